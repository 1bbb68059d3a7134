#include "rrseg/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrseg/error.hpp"

namespace rrseg {

KMeansResult kmeans2(std::span<const double> values, std::optional<CentroidPair> init, int max_iters) {
  require(!values.empty(), "kmeans2 needs at least one value");
  require(max_iters >= 1, "max_iters must be at least 1");
  KMeansResult out;
  out.fg_mask.assign(values.size(), 0);

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  if (*lo_it == *hi_it) {
    out.degenerate = true;
    out.fg_color = out.bg_color = *lo_it;
    return out;
  }

  // Cluster 0 starts at the foreground guess, cluster 1 at the background guess.
  double centroid[2] = {init ? init->fg : *lo_it, init ? init->bg : *hi_it};
  std::vector<std::uint8_t> assign(values.size(), 2);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    double sum[2] = {0.0, 0.0};
    double count[2] = {0.0, 0.0};
    double sse = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = values[i];
      const std::uint8_t a = std::abs(v - centroid[0]) < std::abs(v - centroid[1]) ? 0 : 1;
      changed = changed || a != assign[i];
      assign[i] = a;
      sum[a] += v;
      count[a] += 1.0;
      sse += (v - centroid[a]) * (v - centroid[a]);
    }
    out.iterations = it + 1;
    if (!changed) {
      out.sse_trace.push_back(sse);
      break;
    }
    for (int c = 0; c < 2; ++c) {
      if (count[c] > 0.0) centroid[c] = sum[c] / count[c];
    }
    // SSE of the fresh partition against its own means.
    double refreshed = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - centroid[assign[i]];
      refreshed += d * d;
    }
    out.sse_trace.push_back(refreshed);
  }

  const int dark = centroid[0] <= centroid[1] ? 0 : 1;
  out.fg_color = centroid[dark];
  out.bg_color = centroid[1 - dark];
  for (std::size_t i = 0; i < values.size(); ++i) out.fg_mask[i] = assign[i] == dark ? 1 : 0;
  return out;
}

KMeansResult kmeans2(const Block& block, std::optional<CentroidPair> init, int max_iters) {
  return kmeans2(std::span<const double>(block.pixels), init, max_iters);
}

SegMask hierarchical_segment(const GrayImage& image, const HierarchicalParams& params) {
  require(!image.empty(), "cannot segment an empty image");
  require(!params.levels.empty(), "at least one level is required");
  require(params.blend >= 0.0 && params.blend <= 1.0, "blend must lie in [0, 1]");
  for (std::size_t i = 0; i < params.levels.size(); ++i) {
    require(params.levels[i] >= 1, "level sizes must be positive");
    if (i > 0) {
      require(params.levels[i] < params.levels[i - 1] && params.levels[i - 1] % params.levels[i] == 0,
              "each level must divide the previous one");
    }
  }

  std::vector<ClusterState> parent;
  int parent_size = 0;
  int parent_cols = 0;
  std::vector<ClusterState> current;
  int size = 0;
  int cols = 0;
  for (std::size_t li = 0; li < params.levels.size(); ++li) {
    size = params.levels[li];
    cols = (image.width + size - 1) / size;
    const int rows = (image.height + size - 1) / size;
    current.assign(static_cast<std::size_t>(rows) * cols, ClusterState{});
    for (int bi = 0; bi < rows; ++bi) {
      for (int bj = 0; bj < cols; ++bj) {
        const int row = bi * size;
        const int col = bj * size;
        const Block block =
            Block::from_image(image, row, col, std::min(size, image.width - col), std::min(size, image.height - row));
        const ClusterState* up = nullptr;
        if (li > 0) up = &parent[static_cast<std::size_t>(row / parent_size) * parent_cols + col / parent_size];

        ClusterState& state = current[static_cast<std::size_t>(bi) * cols + bj];
        state.level = static_cast<int>(li);
        std::optional<CentroidPair> init;
        if (up && !up->degenerate) init = CentroidPair{up->fg_color, up->bg_color};
        const KMeansResult km = kmeans2(block, init, params.max_iters);
        if (km.degenerate) {
          if (up) {
            state = *up;
            state.level = static_cast<int>(li);
          }
          continue;
        }
        state.degenerate = false;
        state.fg_color = km.fg_color;
        state.bg_color = km.bg_color;
        if (up && !up->degenerate) {
          state.fg_color = params.blend * km.fg_color + (1.0 - params.blend) * up->fg_color;
          state.bg_color = params.blend * km.bg_color + (1.0 - params.blend) * up->bg_color;
        }
      }
    }
    parent = current;
    parent_size = size;
    parent_cols = cols;
  }

  SegMask mask(image.width, image.height);
  for (int r = 0; r < image.height; ++r) {
    for (int c = 0; c < image.width; ++c) {
      const ClusterState& state = current[static_cast<std::size_t>(r / size) * cols + c / size];
      if (state.degenerate) continue;
      const double v = image.at(r, c);
      mask.set(r, c, std::abs(v - state.fg_color) < std::abs(v - state.bg_color));
    }
  }
  return mask;
}

}  // namespace rrseg
