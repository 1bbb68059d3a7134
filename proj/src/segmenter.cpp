#include "rrseg/segmenter.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <thread>

#include "rrseg/error.hpp"
#include "rrseg/rng.hpp"

namespace rrseg {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

Block sub_block(const Block& parent, int row, int col, int w, int h) {
  std::vector<double> values(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) values[static_cast<std::size_t>(r) * w + c] = parent.at(row + r, col + c);
  }
  return Block(w, h, std::move(values), {parent.origin.row + row, parent.origin.col + col});
}

int rounded_mean(const Block& block, const std::vector<std::uint8_t>* keep) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < block.pixels.size(); ++i) {
    if (keep == nullptr || (*keep)[i]) {
      sum += block.pixels[i];
      ++count;
    }
  }
  return static_cast<int>(std::lround(sum / static_cast<double>(count)));
}

bool near_any(double value, const std::set<int>& colors, double tolerance) {
  return std::any_of(colors.begin(), colors.end(),
                     [&](int c) { return std::abs(value - static_cast<double>(c)) < tolerance; });
}

BlockOutcome leaf(const BlockRecord& base, BlockMode mode, std::vector<std::uint8_t> mask,
                  std::optional<int> background) {
  BlockRecord rec = base;
  rec.mode = mode;
  rec.background_color = background;
  BlockOutcome out;
  out.mask = std::move(mask);
  out.records.push_back(rec);
  return out;
}

// Accepts a RANSAC (or least-squares fallback) inlier mask as the block result.
BlockOutcome accept_inliers(const Block& block, const BlockRecord& base, const std::vector<std::uint8_t>& inliers) {
  std::vector<std::uint8_t> mask(inliers.size());
  bool any_background = false;
  for (std::size_t i = 0; i < inliers.size(); ++i) {
    mask[i] = inliers[i] ? 0 : 1;
    any_background = any_background || inliers[i];
  }
  std::optional<int> bg;
  if (any_background) bg = rounded_mean(block, &inliers);
  return leaf(base, BlockMode::Ransac, std::move(mask), bg);
}

}  // namespace

const char* to_string(BlockMode mode) noexcept {
  switch (mode) {
    case BlockMode::Flat: return "flat";
    case BlockMode::Smooth: return "smooth";
    case BlockMode::TextOverConstant: return "text_over_constant";
    case BlockMode::Ransac: return "ransac";
    case BlockMode::Split: return "split";
  }
  return "unknown";
}

void SegConfig::validate() const {
  require(min_block >= 1 && block_size >= min_block, "block_size must be at least min_block");
  require(block_size % min_block == 0 && is_power_of_two(block_size / min_block),
          "block_size must be min_block times a power of two");
  require(k >= 1, "basis count k must be at least 1");
  require(epsilon3 >= 0.0 && epsilon3 <= 1.0, "epsilon3 must lie in [0, 1]");
  require(epsilon2 >= 0.0 && flat_tolerance >= 0.0 && range_min >= 0.0, "thresholds must be non-negative");
  require(color_count_max >= 1, "color_count_max must be at least 1");
  require(threads >= 1, "threads must be at least 1");
  require(ransac.max_iters >= 1, "ransac.max_iters must be at least 1");
  require(ransac.epsilon_intercept >= 0.0 && ransac.epsilon_slope >= 0.0, "ransac epsilon terms must be non-negative");
}

std::uint64_t block_seed(std::uint64_t seed, PixelOrigin origin, int width, int height) {
  std::uint64_t s = mix64(seed, static_cast<std::uint64_t>(origin.row));
  s = mix64(s, static_cast<std::uint64_t>(origin.col));
  return mix64(s, (static_cast<std::uint64_t>(width) << 32) | static_cast<std::uint32_t>(height));
}

std::set<int> neighbor_backgrounds(PixelOrigin origin, int width, int height, std::span<const BlockRecord> records) {
  std::set<int> colors;
  const int top = origin.row;
  const int left = origin.col;
  const int bottom = origin.row + height;
  const int right = origin.col + width;
  for (const auto& r : records) {
    if (!r.background_color) continue;
    const int r_bottom = r.origin.row + r.height;
    const int r_right = r.origin.col + r.width;
    const bool on_left = r_right == left && r.origin.row < bottom && r_bottom > top;
    const bool above = r_bottom == top && r.origin.col <= right && r_right >= left;
    if (on_left || above) colors.insert(*r.background_color);
  }
  return colors;
}

FlatDecision flat_check(const Block& block, const std::set<int>& neighbor_colors, double tolerance,
                        bool isolated_is_background) {
  const double first = block.pixels.front();
  const bool flat = std::all_of(block.pixels.begin(), block.pixels.end(), [&](double v) { return v == first; });
  if (!flat) return FlatDecision::NotFlat;
  if (neighbor_colors.empty()) {
    return isolated_is_background ? FlatDecision::AllBackground : FlatDecision::AllForeground;
  }
  return near_any(first, neighbor_colors, tolerance) ? FlatDecision::AllBackground : FlatDecision::AllForeground;
}

std::optional<ConstantBackground> text_over_constant_check(const Block& block, const std::set<int>& neighbor_colors,
                                                           const SegConfig& config) {
  std::map<double, int> histogram;
  for (const double v : block.pixels) {
    ++histogram[v];
    if (static_cast<int>(histogram.size()) > config.color_count_max) return std::nullopt;
  }
  if (!(block.range() > config.range_min)) return std::nullopt;

  std::vector<std::pair<double, int>> ranked(histogram.begin(), histogram.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  double chosen = ranked.front().first;
  for (const auto& [color, count] : ranked) {
    if (near_any(color, neighbor_colors, config.flat_tolerance)) {
      chosen = color;
      break;
    }
  }
  ConstantBackground out;
  out.background_color = static_cast<int>(std::lround(chosen));
  out.mask.resize(block.pixels.size());
  for (std::size_t i = 0; i < block.pixels.size(); ++i) out.mask[i] = block.pixels[i] == chosen ? 0 : 1;
  return out;
}

BlockOutcome segment_block(const Block& block, int nominal_size, std::span<const BlockRecord> neighbors,
                           const SegConfig& config, int depth) {
  require(nominal_size >= config.min_block, "block is smaller than min_block");
  BlockRecord base;
  base.origin = block.origin;
  base.width = block.width;
  base.height = block.height;
  base.nominal_size = nominal_size;
  base.depth = depth;

  const auto colors = neighbor_backgrounds(block.origin, block.width, block.height, neighbors);
  const std::size_t count = block.pixels.size();

  // 1. flat
  switch (flat_check(block, colors, config.flat_tolerance, config.isolated_flat_is_background)) {
    case FlatDecision::AllBackground:
      return leaf(base, BlockMode::Flat, std::vector<std::uint8_t>(count, 0),
                  static_cast<int>(std::lround(block.pixels.front())));
    case FlatDecision::AllForeground:
      return leaf(base, BlockMode::Flat, std::vector<std::uint8_t>(count, 1), std::nullopt);
    case FlatDecision::NotFlat:
      break;
  }

  // 2. smooth: every pixel within epsilon2 of the least-squares model
  const int k = std::min(config.k, block.size());
  const auto basis = cached_basis(config.basis, block.width, block.height, k);
  const FitResult fit = fit_least_squares(block, *basis);
  if (fit.max_residual() < config.epsilon2) {
    return leaf(base, BlockMode::Smooth, std::vector<std::uint8_t>(count, 0), rounded_mean(block, nullptr));
  }

  // 3. text over constant background
  if (auto toc = text_over_constant_check(block, colors, config)) {
    return leaf(base, BlockMode::TextOverConstant, std::move(toc->mask), toc->background_color);
  }

  // 4. RANSAC
  const bool terminal = !config.split_enabled || nominal_size / 2 < config.min_block;
  RansacParams params = config.ransac;
  params.seed = block_seed(config.ransac.seed, block.origin, block.width, block.height);
  try {
    const RansacResult r = ransac_segment(block, *basis, params);
    if (terminal || r.inlier_fraction() > config.epsilon3) {
      auto out = accept_inliers(block, base, r.inlier_mask);
      out.ransac_calls = 1;
      return out;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoModel) throw;
    if (terminal) {
      // No usable minimal sample; threshold the plain least-squares model instead.
      const double eps = adaptive_epsilon(block, params);
      std::vector<std::uint8_t> inliers(count);
      for (std::size_t i = 0; i < count; ++i) inliers[i] = fit.residuals[i] <= eps ? 1 : 0;
      auto out = accept_inliers(block, base, inliers);
      out.ransac_calls = 1;
      return out;
    }
  }

  // 5. quad-tree split; children only see records from outside this top-level block
  BlockOutcome out;
  out.ransac_calls = 1;
  out.mask.assign(count, 0);
  BlockRecord split = base;
  split.mode = BlockMode::Split;
  out.records.push_back(split);
  const int half = nominal_size / 2;
  for (int dr = 0; dr < nominal_size; dr += half) {
    for (int dc = 0; dc < nominal_size; dc += half) {
      const int w = std::min(half, block.width - dc);
      const int h = std::min(half, block.height - dr);
      if (w <= 0 || h <= 0) continue;
      const Block child = sub_block(block, dr, dc, w, h);
      auto sub = segment_block(child, half, neighbors, config, depth + 1);
      for (int r = 0; r < h; ++r) {
        std::copy_n(sub.mask.begin() + static_cast<std::ptrdiff_t>(r) * w, w,
                    out.mask.begin() + static_cast<std::ptrdiff_t>(dr + r) * block.width + dc);
      }
      out.records.insert(out.records.end(), sub.records.begin(), sub.records.end());
      out.ransac_calls += sub.ransac_calls;
    }
  }
  return out;
}

Segmentation segment_image(const GrayImage& image, const SegConfig& config) {
  require(!image.empty(), "cannot segment an empty image");
  config.validate();

  const int bs = config.block_size;
  const int tile_rows = (image.height + bs - 1) / bs;
  const int tile_cols = (image.width + bs - 1) / bs;
  std::vector<BlockOutcome> tiles(static_cast<std::size_t>(tile_rows) * tile_cols);

  auto run_tile = [&](int ti, int tj) {
    std::vector<BlockRecord> neighbors;
    const std::pair<int, int> causal[] = {{ti, tj - 1}, {ti - 1, tj - 1}, {ti - 1, tj}, {ti - 1, tj + 1}};
    for (const auto& [ni, nj] : causal) {
      if (ni < 0 || nj < 0 || nj >= tile_cols) continue;
      const auto& recs = tiles[static_cast<std::size_t>(ni) * tile_cols + nj].records;
      neighbors.insert(neighbors.end(), recs.begin(), recs.end());
    }
    const int row = ti * bs;
    const int col = tj * bs;
    const Block block =
        Block::from_image(image, row, col, std::min(bs, image.width - col), std::min(bs, image.height - row));
    tiles[static_cast<std::size_t>(ti) * tile_cols + tj] = segment_block(block, bs, neighbors, config, 0);
  };

  // Tile (i, j) depends on (i, j-1), (i-1, j-1), (i-1, j), (i-1, j+1); all
  // tiles with the same 2i + j are mutually independent.
  const int waves = 2 * (tile_rows - 1) + tile_cols;
  for (int wave = 0; wave < waves; ++wave) {
    std::vector<std::pair<int, int>> jobs;
    for (int ti = 0; ti < tile_rows; ++ti) {
      const int tj = wave - 2 * ti;
      if (tj >= 0 && tj < tile_cols) jobs.emplace_back(ti, tj);
    }
    const int workers = std::min<int>(config.threads, static_cast<int>(jobs.size()));
    if (workers <= 1) {
      for (const auto& [ti, tj] : jobs) run_tile(ti, tj);
      continue;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) run_tile(jobs[j].first, jobs[j].second);
      });
    }
  }

  Segmentation seg;
  seg.mask = SegMask(image.width, image.height);
  for (int ti = 0; ti < tile_rows; ++ti) {
    for (int tj = 0; tj < tile_cols; ++tj) {
      const auto& tile = tiles[static_cast<std::size_t>(ti) * tile_cols + tj];
      const int row = ti * bs;
      const int col = tj * bs;
      const int w = std::min(bs, image.width - col);
      const int h = std::min(bs, image.height - row);
      for (int r = 0; r < h; ++r) {
        std::copy_n(tile.mask.begin() + static_cast<std::ptrdiff_t>(r) * w, w,
                    seg.mask.bits.begin() + static_cast<std::ptrdiff_t>(row + r) * image.width + col);
      }
      seg.records.insert(seg.records.end(), tile.records.begin(), tile.records.end());
      seg.ransac_calls += tile.ransac_calls;
    }
  }
  return seg;
}

}  // namespace rrseg
