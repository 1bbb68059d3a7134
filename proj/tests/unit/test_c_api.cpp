#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rrseg/rrseg.h"

namespace {

// 64x64 at 200 with a 20x20 dark square at (10, 30).
std::vector<uint8_t> square_pixels(std::vector<uint8_t>& truth) {
  std::vector<uint8_t> px(64 * 64, 200);
  truth.assign(px.size(), 0);
  for (int y = 10; y < 30; ++y) {
    for (int x = 30; x < 50; ++x) {
      px[y * 64 + x] = 60;
      truth[y * 64 + x] = 1;
    }
  }
  return px;
}

}  // namespace

TEST_CASE("status strings and last error") {
  CHECK(std::string(rrseg_version()).size() > 0);
  CHECK(std::string(rrseg_status_string(RRSEG_OK)) == "ok");
  rrseg_image* img = nullptr;
  CHECK(rrseg_image_load("definitely/missing.pgm", &img) == RRSEG_ERR_IO);
  CHECK(img == nullptr);
  CHECK(std::string(rrseg_last_error()).find("missing.pgm") != std::string::npos);
  CHECK(rrseg_image_create(0, 4, 1, nullptr, &img) == RRSEG_ERR_INVALID_ARGUMENT);
  CHECK(rrseg_image_create(4, 4, 1, nullptr, nullptr) == RRSEG_ERR_INVALID_ARGUMENT);
}

TEST_CASE("configuration through the C API") {
  rrseg_config* cfg = nullptr;
  REQUIRE(rrseg_config_create(&cfg) == RRSEG_OK);
  CHECK(rrseg_config_set(cfg, "k", "12") == RRSEG_OK);
  CHECK(rrseg_config_set(cfg, "no_such_key", "1") == RRSEG_ERR_USAGE);
  CHECK(rrseg_config_set(cfg, "k", "abc") == RRSEG_ERR_USAGE);
  auto j = nlohmann::json::parse(rrseg_config_to_json(cfg));
  CHECK(j.at("k") == 12);
  CHECK(rrseg_config_apply_preset(cfg, "palmprint") == RRSEG_OK);
  j = nlohmann::json::parse(rrseg_config_to_json(cfg));
  CHECK(j.at("k") == 14);
  CHECK(rrseg_config_load_file(cfg, "missing.conf") == RRSEG_ERR_IO);
  rrseg_config_free(cfg);
}

TEST_CASE("segment, metrics, report and outputs") {
  std::vector<uint8_t> truth;
  const auto px = square_pixels(truth);
  rrseg_image* img = nullptr;
  REQUIRE(rrseg_image_create(64, 64, 1, px.data(), &img) == RRSEG_OK);
  int w = 0, h = 0, c = 0;
  CHECK(rrseg_image_info(img, &w, &h, &c) == RRSEG_OK);
  CHECK((w == 64 && h == 64 && c == 1));
  CHECK(std::memcmp(rrseg_image_pixels(img), px.data(), px.size()) == 0);

  rrseg_config* cfg = nullptr;
  REQUIRE(rrseg_config_create(&cfg) == RRSEG_OK);
  rrseg_result* res = nullptr;
  REQUIRE(rrseg_segment(img, cfg, &res) == RRSEG_OK);
  double frac = 0.0;
  CHECK(rrseg_result_info(res, &w, &h, &frac) == RRSEG_OK);
  CHECK(frac == doctest::Approx(400.0 / 4096.0));
  CHECK(std::memcmp(rrseg_result_mask(res), truth.data(), truth.size()) == 0);

  rrseg_metrics m{};
  CHECK(rrseg_result_metrics(res, &m) == RRSEG_ERR_USAGE);
  CHECK(rrseg_result_attach_truth(res, truth.data(), 32, 32) == RRSEG_ERR_INVALID_ARGUMENT);
  REQUIRE(rrseg_result_attach_truth(res, truth.data(), 64, 64) == RRSEG_OK);
  REQUIRE(rrseg_result_metrics(res, &m) == RRSEG_OK);
  CHECK(m.f1 == 1.0);
  CHECK(m.true_positive == 400);

  const auto report = nlohmann::json::parse(rrseg_result_report(res, 0));
  CHECK(report.at("method") == "ransac");
  CHECK(report.at("metrics").at("f1") == 1.0);
  CHECK_FALSE(report.contains("wall_time_ms"));

  const auto dir = std::filesystem::temp_directory_path() / "rrseg_c_api_test";
  std::filesystem::create_directories(dir);
  CHECK(rrseg_result_write_mask(res, (dir / "mask.pgm").string().c_str()) == RRSEG_OK);
  CHECK(rrseg_result_write_overlay(res, img, (dir / "overlay.ppm").string().c_str()) == RRSEG_OK);
  CHECK(rrseg_result_write_foreground(res, img, (dir / "fg.pgm").string().c_str()) == RRSEG_OK);
  CHECK(rrseg_result_attach_truth_file(res, (dir / "mask.pgm").string().c_str()) == RRSEG_OK);

  rrseg_image* back = nullptr;
  REQUIRE(rrseg_image_load((dir / "fg.pgm").string().c_str(), &back) == RRSEG_OK);
  CHECK(rrseg_image_pixels(back)[0] == 255);
  CHECK(rrseg_image_pixels(back)[10 * 64 + 30] == 60);
  rrseg_image_free(back);

  CHECK(rrseg_result_keep_largest(res, 0) == RRSEG_ERR_INVALID_ARGUMENT);
  CHECK(rrseg_result_keep_largest(res, 1) == RRSEG_OK);
  CHECK(nlohmann::json::parse(rrseg_result_report(res, 0)).at("components_kept") == 1);

  rrseg_result_free(res);
  rrseg_config_free(cfg);
  rrseg_image_free(img);
}

TEST_CASE("identical runs give identical reports") {
  std::vector<uint8_t> truth;
  const auto px = square_pixels(truth);
  rrseg_image* img = nullptr;
  rrseg_config* cfg = nullptr;
  REQUIRE(rrseg_image_create(64, 64, 1, px.data(), &img) == RRSEG_OK);
  REQUIRE(rrseg_config_create(&cfg) == RRSEG_OK);
  rrseg_result* a = nullptr;
  rrseg_result* b = nullptr;
  REQUIRE(rrseg_segment(img, cfg, &a) == RRSEG_OK);
  REQUIRE(rrseg_segment(img, cfg, &b) == RRSEG_OK);
  CHECK(std::string(rrseg_result_report(a, 0)) == std::string(rrseg_result_report(b, 0)));
  rrseg_result_free(a);
  rrseg_result_free(b);
  rrseg_config_free(cfg);
  rrseg_image_free(img);
}

TEST_CASE("utilities") {
  long long m = 0;
  CHECK(rrseg_required_iterations(0.7, 10, 1e-12, &m) == RRSEG_OK);
  CHECK(m == 965);
  CHECK(rrseg_required_iterations(1e-5, 100, 1e-12, &m) == RRSEG_ERR_UNREACHABLE_CONFIDENCE);
  const uint8_t mask[4] = {1, 1, 0, 0};
  const uint8_t truth[4] = {1, 0, 1, 0};
  rrseg_metrics met{};
  CHECK(rrseg_compute_metrics(mask, truth, 4, &met) == RRSEG_OK);
  CHECK(met.precision == 0.5);
  CHECK(met.recall == 0.5);

  const auto dir = std::filesystem::temp_directory_path() / "rrseg_c_api_fixture";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto recipe = (dir / "recipe.json").string();
  std::ofstream(recipe) << R"({"version":1,"width":40,"height":30,"seed":3,
    "foreground":[{"shape":"speckle","coverage":0.1,"contrast":80}]})";
  CHECK(rrseg_fixture_generate(recipe.c_str(), (dir / "out").string().c_str()) == RRSEG_OK);
  CHECK(std::filesystem::exists(dir / "out" / "image.pgm"));
  CHECK(std::filesystem::exists(dir / "out" / "truth.pgm"));
  std::ifstream manifest(dir / "out" / "manifest.json");
  const auto j = nlohmann::json::parse(manifest);
  CHECK(j.at("foreground_fraction") == doctest::Approx(0.1).epsilon(0.05));
  std::ofstream(recipe) << R"({"version":7,"width":40,"height":30})";
  CHECK(rrseg_fixture_generate(recipe.c_str(), (dir / "bad").string().c_str()) != RRSEG_OK);
}
