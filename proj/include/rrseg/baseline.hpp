#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rrseg/fitting.hpp"
#include "rrseg/image.hpp"

namespace rrseg {

// Multi-resolution two-means clustering in the style of the DjVu
// foreground/background separator. Approximation of a prose description, kept
// as a comparison baseline.

struct ClusterState {
  double fg_color = 0.0;
  double bg_color = 0.0;
  int level = 0;
  /// Single-cluster state: every pixel is background.
  bool degenerate = true;
};

struct CentroidPair {
  double fg = 0.0;
  double bg = 0.0;
};

struct KMeansResult {
  double fg_color = 0.0;
  double bg_color = 0.0;
  /// 1 = foreground (nearer the darker centroid).
  std::vector<std::uint8_t> fg_mask;
  bool degenerate = false;
  int iterations = 0;
  /// Within-cluster sum of squares after each assignment step.
  std::vector<double> sse_trace;

  double sse() const { return sse_trace.empty() ? 0.0 : sse_trace.back(); }
};

/// Lloyd iterations on 1-D intensities. Without `init` the centroids start at
/// the minimum and maximum. Fewer than two distinct values gives a
/// degenerate all-background result.
KMeansResult kmeans2(std::span<const double> values, std::optional<CentroidPair> init = std::nullopt,
                     int max_iters = 100);
KMeansResult kmeans2(const Block& block, std::optional<CentroidPair> init = std::nullopt, int max_iters = 100);

struct HierarchicalParams {
  std::vector<int> levels{64, 32, 16, 8};
  /// Weight of the current level when blending with the parent's centroids.
  double blend = 0.5;
  int max_iters = 100;
};

SegMask hierarchical_segment(const GrayImage& image, const HierarchicalParams& params = {});

}  // namespace rrseg
