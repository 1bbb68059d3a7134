// rrseg command-line front end. Talks to the library only through rrseg.h.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rrseg/rrseg.h"

namespace {

struct CallFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(rrseg_status s, const std::string& context) {
  if (s == RRSEG_OK) return;
  std::string msg = context + ": " + rrseg_status_string(s);
  if (const char* detail = rrseg_last_error(); detail && *detail) msg += " (" + std::string(detail) + ")";
  throw CallFailed(msg);
}

using ImagePtr = std::unique_ptr<rrseg_image, decltype(&rrseg_image_free)>;
using ConfigPtr = std::unique_ptr<rrseg_config, decltype(&rrseg_config_free)>;
using ResultPtr = std::unique_ptr<rrseg_result, decltype(&rrseg_result_free)>;

ImagePtr load(const std::string& path) {
  rrseg_image* raw = nullptr;
  check(rrseg_image_load(path.c_str(), &raw), "loading " + path);
  return {raw, rrseg_image_free};
}

ConfigPtr make_config() {
  rrseg_config* raw = nullptr;
  check(rrseg_config_create(&raw), "creating config");
  return {raw, rrseg_config_free};
}

void set(rrseg_config* cfg, const std::string& key, const std::string& value) {
  check(rrseg_config_set(cfg, key.c_str(), value.c_str()), "setting " + key);
}

ResultPtr segment(const rrseg_image* image, const rrseg_config* cfg) {
  rrseg_result* raw = nullptr;
  check(rrseg_segment(image, cfg, &raw), "segmenting");
  return {raw, rrseg_result_free};
}

// A truth argument may be a mask image or a fixture manifest.json.
std::string resolve_truth(const std::string& path) {
  if (std::filesystem::path(path).extension() != ".json") return path;
  std::ifstream in(path);
  if (!in) throw CallFailed(path + ": cannot open manifest");
  nlohmann::json manifest;
  try {
    in >> manifest;
    return (std::filesystem::path(path).parent_path() / manifest.at("truth").get<std::string>()).string();
  } catch (const nlohmann::json::exception& e) {
    throw CallFailed(path + ": malformed manifest (" + e.what() + ")");
  }
}

struct SegmentArgs {
  std::string input;
  std::string output;
  std::string method;
  std::string config;
  std::string truth;
  std::string overlay;
  std::string report;
  std::optional<int> threads;
  std::optional<unsigned long long> seed;
  std::vector<std::string> settings;
};

struct PalmArgs {
  std::string input;
  std::string out_mask;
  std::string out_fg;
  std::string config;
  std::string report;
  int keep = 3;
  std::optional<int> threads;
};

struct FixtureArgs {
  std::string recipe;
  std::string out;
};

void emit_report(rrseg_result* result, const std::string& path) {
  const std::string text = rrseg_result_report(result, 1);
  std::cout << text << '\n';
  if (path.empty()) return;
  std::ofstream out(path);
  out << text << '\n';
  if (!out) throw CallFailed(path + ": cannot write report");
}

// File first, then individual flags, so the command line always wins.
void apply_common(rrseg_config* cfg, const std::string& file, const std::vector<std::string>& settings,
                  const std::optional<int>& threads) {
  if (!file.empty()) check(rrseg_config_load_file(cfg, file.c_str()), "reading config");
  for (const auto& kv : settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw CallFailed("--set expects key=value, got '" + kv + "'");
    set(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (threads) set(cfg, "threads", std::to_string(*threads));
}

void run_segment(const SegmentArgs& a) {
  auto cfg = make_config();
  apply_common(cfg.get(), a.config, a.settings, a.threads);
  if (!a.method.empty()) set(cfg.get(), "method", a.method);
  if (a.seed) set(cfg.get(), "ransac.seed", std::to_string(*a.seed));

  auto image = load(a.input);
  auto result = segment(image.get(), cfg.get());
  if (!a.truth.empty()) {
    const std::string truth = resolve_truth(a.truth);
    check(rrseg_result_attach_truth_file(result.get(), truth.c_str()), "reading truth");
  }
  check(rrseg_result_write_mask(result.get(), a.output.c_str()), "writing mask");
  if (!a.overlay.empty()) {
    check(rrseg_result_write_overlay(result.get(), image.get(), a.overlay.c_str()), "writing overlay");
  }
  emit_report(result.get(), a.report);
}

void run_palmprint(const PalmArgs& a) {
  auto cfg = make_config();
  if (!a.config.empty()) check(rrseg_config_load_file(cfg.get(), a.config.c_str()), "reading config");
  check(rrseg_config_apply_preset(cfg.get(), "palmprint"), "applying preset");
  if (a.threads) set(cfg.get(), "threads", std::to_string(*a.threads));

  auto image = load(a.input);
  auto result = segment(image.get(), cfg.get());
  check(rrseg_result_keep_largest(result.get(), a.keep), "post-processing");
  check(rrseg_result_write_mask(result.get(), a.out_mask.c_str()), "writing mask");
  check(rrseg_result_write_foreground(result.get(), image.get(), a.out_fg.c_str()), "writing foreground image");
  emit_report(result.get(), a.report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust-regression background/foreground segmentation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rrseg_version()));

  SegmentArgs seg;
  auto* segment_cmd = app.add_subcommand("segment", "Segment an image into background and foreground");
  segment_cmd->add_option("input", seg.input, "Input image (PGM, PPM or PNG)")->required();
  segment_cmd->add_option("--out", seg.output, "Output mask (binary PGM, 255 = foreground)")->required();
  segment_cmd->add_option("--method", seg.method, "ransac, sparse or kmeans");
  segment_cmd->add_option("--config", seg.config, "key = value configuration file");
  segment_cmd->add_option("--truth", seg.truth, "Ground-truth mask or fixture manifest.json");
  segment_cmd->add_option("--overlay", seg.overlay, "Write the foreground tinted over the input (PPM)");
  segment_cmd->add_option("--threads", seg.threads, "Worker threads");
  segment_cmd->add_option("--seed", seg.seed, "RANSAC seed");
  segment_cmd->add_option("--set", seg.settings, "Extra key=value setting (repeatable)");
  segment_cmd->add_option("--report", seg.report, "Also write the JSON report to this file");

  PalmArgs palm;
  auto* palm_cmd = app.add_subcommand("palmprint", "Extract palm lines (K = 14, largest components)");
  palm_cmd->add_option("input", palm.input, "Input image")->required();
  palm_cmd->add_option("--out-mask", palm.out_mask, "Output foreground mask")->required();
  palm_cmd->add_option("--out-fg", palm.out_fg, "Output foreground-only image")->required();
  palm_cmd->add_option("--keep", palm.keep, "Connected components to keep")->capture_default_str();
  palm_cmd->add_option("--config", palm.config, "key = value configuration file");
  palm_cmd->add_option("--threads", palm.threads, "Worker threads");
  palm_cmd->add_option("--report", palm.report, "Also write the JSON report to this file");

  FixtureArgs fix;
  auto* fixture_cmd = app.add_subcommand("gen-fixture", "Generate a synthetic fixture from a JSON recipe");
  fixture_cmd->add_option("--recipe", fix.recipe, "Recipe JSON")->required();
  fixture_cmd->add_option("--out", fix.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*segment_cmd) run_segment(seg);
    else if (*palm_cmd) run_palmprint(palm);
    else if (*fixture_cmd) {
      check(rrseg_fixture_generate(fix.recipe.c_str(), fix.out.c_str()), "generating fixture");
      std::cout << "wrote " << fix.out << "/{image.pgm,truth.pgm,manifest.json}\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "rrseg: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
