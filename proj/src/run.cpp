#include "rrseg/run.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

#include "rrseg/error.hpp"
#include "rrseg/sparse.hpp"

namespace rrseg {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  fail(ErrorCode::Usage, "invalid value '" + value + "' for '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for double is incomplete on older libstdc++.
    try {
      std::size_t used = 0;
      out = static_cast<T>(std::stod(value, &used));
      if (used != value.size()) bad_value(key, value);
    } catch (const std::logic_error&) {
      bad_value(key, value);
    }
  } else {
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) bad_value(key, value);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  bad_value(key, value);
}

std::vector<int> parse_levels(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<int>(key, trim(item)));
  if (out.empty()) bad_value(key, value);
  return out;
}

Segmentation segment_planes(const Image& image, const RunConfig& config) {
  if (config.color == ColorMode::Luma || image.channels == 1) return segment_image(to_luma(image), config.seg);
  Segmentation merged;
  for (int c = 0; c < image.channels; ++c) {
    Segmentation part = segment_image(extract_channel(image, c), config.seg);
    merged.mask = c == 0 ? part.mask : mask_union(merged.mask, part.mask);
    merged.records.insert(merged.records.end(), part.records.begin(), part.records.end());
    merged.ransac_calls += part.ransac_calls;
  }
  return merged;
}

SegMask sparse_segment(const GrayImage& gray, const RunConfig& config) {
  const SegConfig& seg = config.seg;
  SegMask mask(gray.width, gray.height);
  for (int row = 0; row < gray.height; row += seg.block_size) {
    for (int col = 0; col < gray.width; col += seg.block_size) {
      const Block block = Block::from_image(gray, row, col, std::min(seg.block_size, gray.width - col),
                                            std::min(seg.block_size, gray.height - row));
      const auto basis = cached_basis(seg.basis, block.width, block.height, std::min(seg.k, block.size()));
      const SparseResult sr = sparse_decompose(block, *basis, default_sparse_epsilon(block, seg.epsilon2),
                                               config.sparse.solver_tol, config.sparse.max_iters);
      const double threshold = std::max(adaptive_epsilon(block, seg.ransac), 1e-9);
      const auto local = mask_from_sparse(sr, threshold);
      for (int r = 0; r < block.height; ++r) {
        for (int c = 0; c < block.width; ++c) {
          mask.set(row + r, col + c, local[static_cast<std::size_t>(r) * block.width + c] != 0);
        }
      }
    }
  }
  return mask;
}

}  // namespace

const char* to_string(Method method) noexcept {
  switch (method) {
    case Method::Ransac: return "ransac";
    case Method::Sparse: return "sparse";
    case Method::Kmeans: return "kmeans";
  }
  return "unknown";
}

void apply_setting(RunConfig& config, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  SegConfig& s = config.seg;
  if (key == "method") {
    if (value == "ransac") config.method = Method::Ransac;
    else if (value == "sparse") config.method = Method::Sparse;
    else if (value == "kmeans") config.method = Method::Kmeans;
    else fail(ErrorCode::Usage, "unknown method '" + value + "' (expected ransac, sparse or kmeans)");
  } else if (key == "color_mode") {
    if (value == "luma") config.color = ColorMode::Luma;
    else if (value == "per_channel") config.color = ColorMode::PerChannel;
    else bad_value(key, value);
  } else if (key == "preset") {
    apply_preset(config, value);
  } else if (key == "block_size") {
    s.block_size = parse_number<int>(key, value);
  } else if (key == "min_block") {
    s.min_block = parse_number<int>(key, value);
  } else if (key == "k") {
    s.k = parse_number<int>(key, value);
  } else if (key == "basis") {
    if (value == "dct") s.basis = BasisKind::Dct;
    else if (value == "poly") s.basis = BasisKind::OrthoPoly;
    else bad_value(key, value);
  } else if (key == "epsilon2") {
    s.epsilon2 = parse_number<double>(key, value);
  } else if (key == "epsilon3") {
    s.epsilon3 = parse_number<double>(key, value);
  } else if (key == "flat_tolerance") {
    s.flat_tolerance = parse_number<double>(key, value);
  } else if (key == "color_count_max") {
    s.color_count_max = parse_number<int>(key, value);
  } else if (key == "range_min") {
    s.range_min = parse_number<double>(key, value);
  } else if (key == "isolated_flat") {
    if (value == "background") s.isolated_flat_is_background = true;
    else if (value == "foreground") s.isolated_flat_is_background = false;
    else bad_value(key, value);
  } else if (key == "split") {
    s.split_enabled = parse_bool(key, value);
  } else if (key == "threads") {
    s.threads = parse_number<int>(key, value);
  } else if (key == "ransac.max_iters") {
    s.ransac.max_iters = parse_number<int>(key, value);
  } else if (key == "ransac.epsilon_intercept") {
    s.ransac.epsilon_intercept = parse_number<double>(key, value);
  } else if (key == "ransac.epsilon_slope") {
    s.ransac.epsilon_slope = parse_number<double>(key, value);
  } else if (key == "ransac.seed") {
    s.ransac.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "ransac.refit") {
    s.ransac.refit = parse_bool(key, value);
  } else if (key == "ransac.early_exit") {
    s.ransac.early_exit_fraction = parse_number<double>(key, value);
  } else if (key == "sparse.solver_tol") {
    config.sparse.solver_tol = parse_number<double>(key, value);
  } else if (key == "sparse.max_iters") {
    config.sparse.max_iters = parse_number<int>(key, value);
  } else if (key == "kmeans.levels") {
    config.kmeans.levels = parse_levels(key, value);
  } else if (key == "kmeans.blend") {
    config.kmeans.blend = parse_number<double>(key, value);
  } else if (key == "kmeans.max_iters") {
    config.kmeans.max_iters = parse_number<int>(key, value);
  } else {
    fail(ErrorCode::Usage, "unknown configuration key '" + key + "'");
  }
}

void load_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, path + ": cannot open configuration file");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::Usage, path + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    try {
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      fail(e.code(), path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void apply_preset(RunConfig& config, const std::string& name) {
  if (name == "default") {
    config.preset = name;
  } else if (name == "palmprint") {
    config.seg.k = 14;
    config.preset = name;
  } else {
    fail(ErrorCode::Usage, "unknown preset '" + name + "'");
  }
}

nlohmann::json config_to_json(const RunConfig& config) {
  const SegConfig& s = config.seg;
  return {
      {"method", to_string(config.method)},
      {"preset", config.preset},
      {"color_mode", config.color == ColorMode::Luma ? "luma" : "per_channel"},
      {"block_size", s.block_size},
      {"min_block", s.min_block},
      {"k", s.k},
      {"basis", to_string(s.basis)},
      {"epsilon2", s.epsilon2},
      {"epsilon3", s.epsilon3},
      {"flat_tolerance", s.flat_tolerance},
      {"color_count_max", s.color_count_max},
      {"range_min", s.range_min},
      {"isolated_flat", s.isolated_flat_is_background ? "background" : "foreground"},
      {"split", s.split_enabled},
      {"threads", s.threads},
      {"ransac",
       {{"max_iters", s.ransac.max_iters},
        {"epsilon_intercept", s.ransac.epsilon_intercept},
        {"epsilon_slope", s.ransac.epsilon_slope},
        {"seed", s.ransac.seed},
        {"refit", s.ransac.refit},
        {"early_exit", s.ransac.early_exit_fraction}}},
      {"sparse", {{"solver_tol", config.sparse.solver_tol}, {"max_iters", config.sparse.max_iters}}},
      {"kmeans",
       {{"levels", config.kmeans.levels}, {"blend", config.kmeans.blend}, {"max_iters", config.kmeans.max_iters}}},
  };
}

Metrics compute_metrics(const SegMask& mask, const SegMask& truth) {
  require(mask.width == truth.width && mask.height == truth.height, "mask and truth dimensions differ");
  Metrics m;
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    const bool p = mask.bits[i] != 0;
    const bool t = truth.bits[i] != 0;
    if (p && t) ++m.true_positive;
    else if (p) ++m.false_positive;
    else if (t) ++m.false_negative;
  }
  const auto tp = static_cast<double>(m.true_positive);
  const auto predicted = static_cast<double>(m.true_positive + m.false_positive);
  const auto actual = static_cast<double>(m.true_positive + m.false_negative);
  m.precision = predicted > 0.0 ? tp / predicted : 1.0;
  m.recall = actual > 0.0 ? tp / actual : 1.0;
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

nlohmann::json RunReport::to_json(bool include_timing) const {
  nlohmann::json modes;
  for (int i = 0; i < 5; ++i) modes[to_string(static_cast<BlockMode>(i))] = mode_counts[static_cast<std::size_t>(i)];
  nlohmann::json j{
      {"method", to_string(method)},
      {"width", width},
      {"height", height},
      {"blocks", blocks},
      {"mode_counts", modes},
      {"ransac_calls", ransac_calls},
      {"foreground_fraction", foreground_fraction},
      {"config", config},
  };
  if (include_timing) j["wall_time_ms"] = wall_time_ms;
  if (components_kept) j["components_kept"] = *components_kept;
  if (metrics) {
    j["metrics"] = {{"precision", metrics->precision},
                    {"recall", metrics->recall},
                    {"f1", metrics->f1},
                    {"true_positive", metrics->true_positive},
                    {"false_positive", metrics->false_positive},
                    {"false_negative", metrics->false_negative}};
  }
  return j;
}

RunOutput run_segmentation(const Image& image, const RunConfig& config) {
  require(!image.empty(), "cannot segment an empty image");
  config.seg.validate();
  const auto start = std::chrono::steady_clock::now();

  RunOutput out;
  switch (config.method) {
    case Method::Ransac: {
      Segmentation seg = segment_planes(image, config);
      out.mask = std::move(seg.mask);
      out.records = std::move(seg.records);
      out.report.ransac_calls = seg.ransac_calls;
      break;
    }
    case Method::Sparse:
      out.mask = sparse_segment(to_luma(image), config);
      break;
    case Method::Kmeans:
      out.mask = hierarchical_segment(to_luma(image), config.kmeans);
      break;
  }

  RunReport& r = out.report;
  r.method = config.method;
  r.width = image.width;
  r.height = image.height;
  r.config = config_to_json(config);
  for (const auto& rec : out.records) ++r.mode_counts[static_cast<std::size_t>(rec.mode)];
  r.blocks = static_cast<long long>(out.records.size());
  r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  refresh_report(out);
  return out;
}

void refresh_report(RunOutput& output) { output.report.foreground_fraction = output.mask.foreground_fraction(); }

Image foreground_only(const Image& source, const SegMask& mask) {
  require(source.width == mask.width && source.height == mask.height, "mask does not match image");
  Image out = source;
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (mask.bits[i]) continue;
    for (int c = 0; c < out.channels; ++c) out.data[i * out.channels + c] = 255;
  }
  return out;
}

Image overlay(const Image& source, const SegMask& mask) {
  require(source.width == mask.width && source.height == mask.height, "mask does not match image");
  const GrayImage gray = to_luma(source);
  Image out(source.width, source.height, 3);
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    const int g = gray.pixels[i];
    if (mask.bits[i]) {
      out.data[3 * i] = static_cast<std::uint8_t>((g + 255) / 2);
      out.data[3 * i + 1] = static_cast<std::uint8_t>(g / 2);
      out.data[3 * i + 2] = static_cast<std::uint8_t>(g / 2);
    } else {
      std::fill_n(out.data.begin() + static_cast<std::ptrdiff_t>(3 * i), 3, static_cast<std::uint8_t>(g));
    }
  }
  return out;
}

}  // namespace rrseg
