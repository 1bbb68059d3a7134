#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rrseg/baseline.hpp"
#include "rrseg/image.hpp"
#include "rrseg/segmenter.hpp"

namespace rrseg {

enum class Method { Ransac, Sparse, Kmeans };
enum class ColorMode {
  /// Segment the BT.601 luma plane.
  Luma,
  /// Segment each channel separately and OR the masks.
  PerChannel,
};

struct SparseOptions {
  double solver_tol = 1e-6;
  int max_iters = 5000;
};

/// Everything a run needs. Text form is one `key = value` per line;
/// see apply_setting() for the keys.
struct RunConfig {
  Method method = Method::Ransac;
  ColorMode color = ColorMode::Luma;
  SegConfig seg;
  SparseOptions sparse;
  HierarchicalParams kmeans;
  std::string preset = "default";
};

const char* to_string(Method method) noexcept;

/// Sets one key. Unknown keys and unparsable values raise Usage.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
void load_config_file(const std::string& path, RunConfig& config);
/// Palmprint line extraction preset: K = 14, everything else unchanged.
void apply_preset(RunConfig& config, const std::string& name);
nlohmann::json config_to_json(const RunConfig& config);

struct Metrics {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
};

/// Foreground is the positive class. An empty denominator counts as 1
/// (nothing wrongly flagged / nothing missed); F1 is 0 when P + R = 0.
Metrics compute_metrics(const SegMask& mask, const SegMask& truth);

struct RunReport {
  Method method = Method::Ransac;
  int width = 0;
  int height = 0;
  /// Indexed by BlockMode.
  std::array<long long, 5> mode_counts{};
  long long blocks = 0;
  long long ransac_calls = 0;
  double foreground_fraction = 0.0;
  double wall_time_ms = 0.0;
  nlohmann::json config;
  std::optional<Metrics> metrics;
  std::optional<int> components_kept;

  nlohmann::json to_json(bool include_timing = true) const;
};

struct RunOutput {
  SegMask mask;
  std::vector<BlockRecord> records;
  RunReport report;
};

RunOutput run_segmentation(const Image& image, const RunConfig& config);

/// Updates mask-derived report fields after the mask changed.
void refresh_report(RunOutput& output);

/// Source pixels where the mask is set, white elsewhere.
Image foreground_only(const Image& source, const SegMask& mask);

/// Source in gray with foreground pixels tinted red.
Image overlay(const Image& source, const SegMask& mask);

}  // namespace rrseg
