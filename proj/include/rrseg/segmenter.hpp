#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "rrseg/basis.hpp"
#include "rrseg/fitting.hpp"
#include "rrseg/image.hpp"
#include "rrseg/ransac.hpp"

namespace rrseg {

enum class BlockMode { Flat, Smooth, TextOverConstant, Ransac, Split };

const char* to_string(BlockMode mode) noexcept;

/// Outcome of one processed (sub-)block.
struct BlockRecord {
  PixelOrigin origin;
  int width = 0;
  int height = 0;
  /// Side of the quad-tree cell before clipping to the image.
  int nominal_size = 0;
  int depth = 0;
  BlockMode mode = BlockMode::Flat;
  /// Rounded mean of the background pixels; empty for all-foreground and split blocks.
  std::optional<int> background_color;

  friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

struct SegConfig {
  int block_size = 64;
  int min_block = 8;
  int k = 10;
  BasisKind basis = BasisKind::Dct;
  double epsilon2 = 3.0;
  double epsilon3 = 0.5;
  double flat_tolerance = 10.0;
  int color_count_max = 10;
  double range_min = 50.0;
  /// Decision for a flat block with no processed neighbor.
  bool isolated_flat_is_background = true;
  /// When false, step 4 accepts RANSAC unconditionally (no quad-tree).
  bool split_enabled = true;
  /// Worker threads for independent top-level blocks.
  int threads = 1;
  RansacParams ransac;

  /// Throws InvalidArgument when the fields violate their invariants.
  void validate() const;
};

enum class FlatDecision { AllBackground, AllForeground, NotFlat };

struct ConstantBackground {
  /// 1 = foreground, one entry per block pixel.
  std::vector<std::uint8_t> mask;
  int background_color = 0;
};

struct BlockOutcome {
  std::vector<std::uint8_t> mask;
  /// Pre-order: a split block's record precedes its children's.
  std::vector<BlockRecord> records;
  int ransac_calls = 0;
};

struct Segmentation {
  SegMask mask;
  /// Top-level blocks in raster order, each followed by its sub-blocks.
  std::vector<BlockRecord> records;
  long long ransac_calls = 0;
};

/// Background colors of records touching the query rectangle on its left
/// edge or anywhere along the row directly above it, corners included
/// (left, top-left, top, top-right).
std::set<int> neighbor_backgrounds(PixelOrigin origin, int width, int height, std::span<const BlockRecord> records);

FlatDecision flat_check(const Block& block, const std::set<int>& neighbor_colors, double tolerance,
                        bool isolated_is_background = true);

/// Few distinct colors and a wide range: picks the most frequent color that
/// some neighbor confirms, falling back to the most frequent one.
std::optional<ConstantBackground> text_over_constant_check(const Block& block, const std::set<int>& neighbor_colors,
                                                           const SegConfig& config);

/// Runs the flat / smooth / text-over-constant / RANSAC / split cascade on
/// one block. `neighbors` are records of already finished blocks; siblings
/// inside the current top-level block are never consulted.
BlockOutcome segment_block(const Block& block, int nominal_size, std::span<const BlockRecord> neighbors,
                           const SegConfig& config, int depth = 0);

Segmentation segment_image(const GrayImage& image, const SegConfig& config);

/// RANSAC seed for a block: mix64 of the configured seed with origin and size.
std::uint64_t block_seed(std::uint64_t seed, PixelOrigin origin, int width, int height);

}  // namespace rrseg
