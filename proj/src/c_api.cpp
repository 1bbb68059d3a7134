#include "rrseg/rrseg.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <new>
#include <optional>
#include <string>

#include "rrseg/error.hpp"
#include "rrseg/image_io.hpp"
#include "rrseg/postprocess.hpp"
#include "rrseg/ransac.hpp"
#include "rrseg/run.hpp"
#include "rrseg/synthgen.hpp"

struct rrseg_image {
  rrseg::Image image;
};

struct rrseg_config {
  rrseg::RunConfig config;
  std::string json;
};

struct rrseg_result {
  rrseg::RunOutput output;
  std::optional<rrseg::SegMask> truth;
  std::string report;
};

namespace {

thread_local std::string last_error;

rrseg_status status_of(rrseg::ErrorCode code) {
  using rrseg::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return RRSEG_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io: return RRSEG_ERR_IO;
    case ErrorCode::Decode: return RRSEG_ERR_DECODE;
    case ErrorCode::DegenerateSample: return RRSEG_ERR_DEGENERATE_SAMPLE;
    case ErrorCode::NoModel: return RRSEG_ERR_NO_MODEL;
    case ErrorCode::NumericalDegeneracy: return RRSEG_ERR_NUMERICAL;
    case ErrorCode::UnreachableConfidence: return RRSEG_ERR_UNREACHABLE_CONFIDENCE;
    case ErrorCode::Usage: return RRSEG_ERR_USAGE;
    case ErrorCode::GenerationFailed: return RRSEG_ERR_GENERATION_FAILED;
  }
  return RRSEG_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into a status plus thread-local message.
template <typename F>
rrseg_status guarded(F&& body) noexcept {
  try {
    last_error.clear();
    body();
    return RRSEG_OK;
  } catch (const rrseg::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return RRSEG_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (p == nullptr) rrseg::fail(rrseg::ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

rrseg_metrics to_c(const rrseg::Metrics& m) {
  return {m.precision, m.recall, m.f1, m.true_positive, m.false_positive, m.false_negative};
}

}  // namespace

extern "C" {

const char* rrseg_version(void) { return "1.0.0"; }

const char* rrseg_status_string(rrseg_status status) {
  switch (status) {
    case RRSEG_OK: return "ok";
    case RRSEG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RRSEG_ERR_IO: return "i/o error";
    case RRSEG_ERR_DECODE: return "decode error";
    case RRSEG_ERR_DEGENERATE_SAMPLE: return "degenerate sample";
    case RRSEG_ERR_NO_MODEL: return "no model";
    case RRSEG_ERR_NUMERICAL: return "numerical degeneracy";
    case RRSEG_ERR_UNREACHABLE_CONFIDENCE: return "unreachable confidence";
    case RRSEG_ERR_USAGE: return "usage error";
    case RRSEG_ERR_GENERATION_FAILED: return "generation failed";
    case RRSEG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rrseg_last_error(void) { return last_error.c_str(); }

rrseg_status rrseg_image_load(const char* path, rrseg_image** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new rrseg_image{rrseg::read_image(path)};
  });
}

rrseg_status rrseg_image_create(int width, int height, int channels, const uint8_t* pixels, rrseg_image** out) {
  return guarded([&] {
    need(pixels, "pixels");
    need(out, "out");
    rrseg::require(width > 0 && height > 0, "image dimensions must be positive");
    rrseg::require(channels == 1 || channels == 3, "channels must be 1 or 3");
    rrseg::Image img(width, height, channels);
    std::copy_n(pixels, img.data.size(), img.data.begin());
    *out = new rrseg_image{std::move(img)};
  });
}

rrseg_status rrseg_image_info(const rrseg_image* image, int* width, int* height, int* channels) {
  return guarded([&] {
    need(image, "image");
    if (width) *width = image->image.width;
    if (height) *height = image->image.height;
    if (channels) *channels = image->image.channels;
  });
}

const uint8_t* rrseg_image_pixels(const rrseg_image* image) { return image ? image->image.data.data() : nullptr; }

void rrseg_image_free(rrseg_image* image) { delete image; }

rrseg_status rrseg_config_create(rrseg_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new rrseg_config{};
  });
}

rrseg_status rrseg_config_set(rrseg_config* config, const char* key, const char* value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    // Validate on a copy so a rejected value leaves the config untouched.
    rrseg::RunConfig next = config->config;
    rrseg::apply_setting(next, key, value);
    config->config = std::move(next);
  });
}

rrseg_status rrseg_config_load_file(rrseg_config* config, const char* path) {
  return guarded([&] {
    need(config, "config");
    need(path, "path");
    rrseg::RunConfig next = config->config;
    rrseg::load_config_file(path, next);
    config->config = std::move(next);
  });
}

rrseg_status rrseg_config_apply_preset(rrseg_config* config, const char* name) {
  return guarded([&] {
    need(config, "config");
    need(name, "name");
    rrseg::apply_preset(config->config, name);
  });
}

const char* rrseg_config_to_json(rrseg_config* config) {
  if (!config) return nullptr;
  config->json = rrseg::config_to_json(config->config).dump(2);
  return config->json.c_str();
}

void rrseg_config_free(rrseg_config* config) { delete config; }

rrseg_status rrseg_segment(const rrseg_image* image, const rrseg_config* config, rrseg_result** out) {
  return guarded([&] {
    need(image, "image");
    need(out, "out");
    const rrseg::RunConfig defaults;
    *out = new rrseg_result{rrseg::run_segmentation(image->image, config ? config->config : defaults), {}, {}};
  });
}

rrseg_status rrseg_result_info(const rrseg_result* result, int* width, int* height, double* foreground_fraction) {
  return guarded([&] {
    need(result, "result");
    if (width) *width = result->output.mask.width;
    if (height) *height = result->output.mask.height;
    if (foreground_fraction) *foreground_fraction = result->output.mask.foreground_fraction();
  });
}

const uint8_t* rrseg_result_mask(const rrseg_result* result) {
  return result ? result->output.mask.bits.data() : nullptr;
}

rrseg_status rrseg_result_keep_largest(rrseg_result* result, int keep) {
  return guarded([&] {
    need(result, "result");
    result->output.mask = rrseg::postprocess_largest_components(result->output.mask, keep);
    result->output.report.components_kept = static_cast<int>(rrseg::label_components(result->output.mask).size());
    rrseg::refresh_report(result->output);
    if (result->truth) result->output.report.metrics = rrseg::compute_metrics(result->output.mask, *result->truth);
  });
}

rrseg_status rrseg_result_attach_truth(rrseg_result* result, const uint8_t* truth, int width, int height) {
  return guarded([&] {
    need(result, "result");
    need(truth, "truth");
    rrseg::require(width == result->output.mask.width && height == result->output.mask.height,
                   "truth mask dimensions differ from the segmented image");
    rrseg::SegMask mask(width, height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) mask.bits[i] = truth[i] ? 1 : 0;
    result->output.report.metrics = rrseg::compute_metrics(result->output.mask, mask);
    result->truth = std::move(mask);
  });
}

rrseg_status rrseg_result_attach_truth_file(rrseg_result* result, const char* path) {
  return guarded([&] {
    need(result, "result");
    need(path, "path");
    rrseg::SegMask mask = rrseg::read_mask(path);
    rrseg::require(mask.width == result->output.mask.width && mask.height == result->output.mask.height,
                   std::string(path) + ": truth mask dimensions differ from the segmented image");
    result->output.report.metrics = rrseg::compute_metrics(result->output.mask, mask);
    result->truth = std::move(mask);
  });
}

rrseg_status rrseg_result_metrics(const rrseg_result* result, rrseg_metrics* out) {
  return guarded([&] {
    need(result, "result");
    need(out, "out");
    if (!result->output.report.metrics) rrseg::fail(rrseg::ErrorCode::Usage, "no truth mask attached");
    *out = to_c(*result->output.report.metrics);
  });
}

rrseg_status rrseg_result_write_mask(const rrseg_result* result, const char* path) {
  return guarded([&] {
    need(result, "result");
    need(path, "path");
    rrseg::write_mask(path, result->output.mask);
  });
}

rrseg_status rrseg_result_write_overlay(const rrseg_result* result, const rrseg_image* source, const char* path) {
  return guarded([&] {
    need(result, "result");
    need(source, "source");
    need(path, "path");
    rrseg::write_pnm(path, rrseg::overlay(source->image, result->output.mask));
  });
}

rrseg_status rrseg_result_write_foreground(const rrseg_result* result, const rrseg_image* source, const char* path) {
  return guarded([&] {
    need(result, "result");
    need(source, "source");
    need(path, "path");
    rrseg::write_pnm(path, rrseg::foreground_only(source->image, result->output.mask));
  });
}

const char* rrseg_result_report(rrseg_result* result, int include_timing) {
  if (!result) return nullptr;
  result->report = result->output.report.to_json(include_timing != 0).dump(2);
  return result->report.c_str();
}

void rrseg_result_free(rrseg_result* result) { delete result; }

rrseg_status rrseg_fixture_generate(const char* recipe_path, const char* out_dir) {
  return guarded([&] {
    need(recipe_path, "recipe_path");
    need(out_dir, "out_dir");
    std::ifstream in(recipe_path);
    if (!in) rrseg::fail(rrseg::ErrorCode::Io, std::string(recipe_path) + ": cannot open recipe");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      rrseg::fail(rrseg::ErrorCode::Decode, std::string(recipe_path) + ": " + e.what());
    }
    const rrseg::Fixture fx = rrseg::generate_fixture(rrseg::recipe_from_json(j));

    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) rrseg::fail(rrseg::ErrorCode::Io, dir.string() + ": " + ec.message());
    rrseg::write_pgm((dir / "image.pgm").string(), fx.image);
    rrseg::write_mask((dir / "truth.pgm").string(), fx.truth);
    const nlohmann::json manifest{{"format_version", rrseg::kFixtureFormatVersion},
                                  {"image", "image.pgm"},
                                  {"truth", "truth.pgm"},
                                  {"foreground_fraction", fx.truth.foreground_fraction()},
                                  {"recipe", rrseg::recipe_to_json(fx.recipe)}};
    std::ofstream m(dir / "manifest.json");
    m << manifest.dump(2) << '\n';
    if (!m) rrseg::fail(rrseg::ErrorCode::Io, (dir / "manifest.json").string() + ": write failed");
  });
}

rrseg_status rrseg_required_iterations(double inlier_ratio, int model_size, double failure_prob, long long* out) {
  return guarded([&] {
    need(out, "out");
    *out = rrseg::required_iterations(inlier_ratio, model_size, failure_prob);
  });
}

rrseg_status rrseg_compute_metrics(const uint8_t* mask, const uint8_t* truth, size_t count, rrseg_metrics* out) {
  return guarded([&] {
    need(out, "out");
    rrseg::require(count == 0 || (mask && truth), "mask and truth must not be null");
    rrseg::SegMask a(static_cast<int>(count), 1);
    rrseg::SegMask b(static_cast<int>(count), 1);
    for (std::size_t i = 0; i < count; ++i) {
      a.bits[i] = mask[i] ? 1 : 0;
      b.bits[i] = truth[i] ? 1 : 0;
    }
    *out = to_c(rrseg::compute_metrics(a, b));
  });
}

}  // extern "C"
