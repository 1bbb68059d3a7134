#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "rrseg/image.hpp"

namespace rrseg {

/// Bumped whenever a recipe would generate different pixels.
inline constexpr int kFixtureFormatVersion = 1;

enum class BackgroundKind {
  Constant,
  /// One low-order DCT model spanning the whole image.
  DctGlobal,
  /// Independent low-order DCT model per block_size tile.
  DctBlocks,
  /// Linear ramp from `low` to `high`.
  Ramp,
};

enum class RampDirection { Horizontal, Vertical, Diagonal };
enum class ShapeKind { Glyphs, Strokes, Speckle };
enum class Polarity { Dark, Light, Random };

struct BackgroundRecipe {
  BackgroundKind kind = BackgroundKind::DctGlobal;
  int k = 3;
  /// Standard deviation of each AC amplitude, in intensity units.
  double alpha_scale = 20.0;
  int block_size = 64;
  double value = 128.0;
  double low = 0.0;
  double high = 255.0;
  RampDirection direction = RampDirection::Horizontal;
  double noise_sigma = 0.0;
};

struct ForegroundLayer {
  ShapeKind shape = ShapeKind::Speckle;
  double coverage = 0.1;
  double contrast = 80.0;
  Polarity polarity = Polarity::Random;
  /// Exact number of shapes for glyphs/strokes; 0 means "until coverage".
  int count = 0;
};

struct FixtureRecipe {
  int version = kFixtureFormatVersion;
  int width = 64;
  int height = 64;
  std::uint64_t seed = 1;
  BackgroundRecipe background;
  std::vector<ForegroundLayer> foreground;
};

/// Smooth background: `model` holds the noiseless real-valued surface,
/// `image` the rounded (and optionally noisy) pixels.
struct Background {
  std::vector<double> model;
  GrayImage image;
};

struct Fixture {
  GrayImage image;
  SegMask truth;
  FixtureRecipe recipe;
};

/// Random combination of the first k DCT functions (k <= 10), rescaled to
/// stay inside [0, 255]. k = 1 yields a constant image.
Background gen_smooth_background(int width, int height, int k, double alpha_scale, std::uint64_t seed,
                                 BackgroundKind kind = BackgroundKind::DctGlobal, int block_size = 64);

Background gen_background(int width, int height, const BackgroundRecipe& recipe, std::uint64_t seed);

/// Plants one shape layer on top of `background`. Each planted pixel becomes
/// round(model +/- contrast); with Random polarity the sign is flipped when
/// the first choice would clip. Throws GenerationFailed if clipping would
/// still remove more than half of the contrast.
Fixture plant_foreground(const Background& background, const ForegroundLayer& layer, std::uint64_t seed);

/// Full recipe: background plus every foreground layer; truth is their union.
Fixture generate_fixture(const FixtureRecipe& recipe);

nlohmann::json recipe_to_json(const FixtureRecipe& recipe);
FixtureRecipe recipe_from_json(const nlohmann::json& j);

}  // namespace rrseg
