#include <cmath>

#include "doctest.h"
#include "rrseg/error.hpp"
#include "rrseg/postprocess.hpp"
#include "rrseg/synthgen.hpp"

using namespace rrseg;

namespace {

FixtureRecipe base_recipe(std::uint64_t seed) {
  FixtureRecipe r;
  r.width = 96;
  r.height = 80;
  r.seed = seed;
  r.background.k = 3;
  r.background.alpha_scale = 15.0;
  r.background.noise_sigma = 0.0;
  return r;
}

}  // namespace

TEST_CASE("gen_smooth_background examples") {
  SUBCASE("k=1 is constant") {
    const auto bg = gen_smooth_background(40, 30, 1, 20.0, 3);
    CHECK(std::all_of(bg.image.pixels.begin(), bg.image.pixels.end(), [&](auto v) { return v == bg.image.pixels[0]; }));
  }
  SUBCASE("k=3 is deterministic and in range") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto a = gen_smooth_background(64, 64, 3, 60.0, seed);
      const auto b = gen_smooth_background(64, 64, 3, 60.0, seed);
      CHECK(a.image.pixels == b.image.pixels);
      const auto [lo, hi] = std::minmax_element(a.model.begin(), a.model.end());
      CHECK(*lo >= 0.0);
      CHECK(*hi <= 255.0);
    }
  }
  SUBCASE("ramp 0 -> 255 covers the full range") {
    BackgroundRecipe r;
    r.kind = BackgroundKind::Ramp;
    const auto bg = gen_background(256, 4, r, 1);
    CHECK(bg.image.at(0, 0) == 0);
    CHECK(bg.image.at(3, 255) == 255);
    for (int x = 1; x < 256; ++x) CHECK(bg.image.at(2, x) >= bg.image.at(2, x - 1));
  }
  SUBCASE("block-wise models differ between tiles") {
    const auto bg = gen_smooth_background(128, 64, 6, 20.0, 5, BackgroundKind::DctBlocks, 64);
    CHECK(bg.model[0] != bg.model[64]);
  }
}

TEST_CASE("plant_foreground examples") {
  const auto bg = gen_smooth_background(100, 100, 3, 10.0, 8);
  SUBCASE("coverage 0 is rejected") {
    CHECK_THROWS_AS(plant_foreground(bg, {ShapeKind::Speckle, 0.0, 80.0, Polarity::Random, 0}, 1), Error);
    CHECK_THROWS_AS(plant_foreground(bg, {ShapeKind::Speckle, 0.5, 80.0, Polarity::Random, 0}, 1), Error);
  }
  SUBCASE("speckle 0.1 at contrast 80 plants 10% +/- 1%") {
    const auto fx = plant_foreground(bg, {ShapeKind::Speckle, 0.1, 80.0, Polarity::Random, 0}, 2);
    CHECK(std::abs(fx.truth.foreground_fraction() - 0.1) <= 0.01);
  }
  SUBCASE("low-contrast variant plants +/-15") {
    BackgroundRecipe r;
    r.kind = BackgroundKind::Constant;
    r.value = 128;
    const auto flat = gen_background(100, 100, r, 1);
    const auto fx = plant_foreground(flat, {ShapeKind::Glyphs, 0.05, 15.0, Polarity::Random, 0}, 3);
    for (std::size_t i = 0; i < fx.truth.bits.size(); ++i) {
      if (fx.truth.bits[i]) CHECK(std::abs(fx.image.pixels[i] - 128) == 15);
      else CHECK(fx.image.pixels[i] == 128);
    }
  }
  SUBCASE("dark contrast that would clip past half fails") {
    BackgroundRecipe r;
    r.kind = BackgroundKind::Constant;
    r.value = 20;
    const auto dim = gen_background(30, 30, r, 1);
    try {
      (void)plant_foreground(dim, {ShapeKind::Speckle, 0.1, 80.0, Polarity::Dark, 0}, 1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::GenerationFailed);
    }
    // Random polarity flips instead.
    CHECK_NOTHROW(plant_foreground(dim, {ShapeKind::Speckle, 0.1, 80.0, Polarity::Random, 0}, 1));
  }
}

TEST_CASE("properties: determinism, truth exactness, contrast floor") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto r = base_recipe(seed);
    r.foreground.push_back({ShapeKind::Glyphs, 0.06, 90.0, Polarity::Random, 0});
    r.foreground.push_back({ShapeKind::Strokes, 0.04, 60.0, Polarity::Light, 0});
    r.foreground.push_back({ShapeKind::Speckle, 0.02, 70.0, Polarity::Random, 0});
    const auto a = generate_fixture(r);
    const auto b = generate_fixture(r);
    CHECK(a.image.pixels == b.image.pixels);
    CHECK(a.truth == b.truth);
    CHECK(a.truth.width == a.image.width);

    // Without noise the background pixels are the rounded model exactly.
    const auto bg = gen_background(r.width, r.height, r.background, r.seed);
    for (std::size_t i = 0; i < a.truth.bits.size(); ++i) {
      if (!a.truth.bits[i]) {
        CHECK(a.image.pixels[i] == bg.image.pixels[i]);
      } else {
        CHECK(a.image.pixels[i] != bg.image.pixels[i]);
        CHECK(std::abs(a.image.pixels[i] - bg.model[i]) >= 0.5 * 60.0 - 0.5);
      }
    }
  }
}

TEST_CASE("strokes with a count give that many separated curves") {
  auto r = base_recipe(4);
  r.width = 200;
  r.height = 150;
  r.background.kind = BackgroundKind::DctGlobal;
  r.background.noise_sigma = 2.0;
  r.foreground.push_back({ShapeKind::Strokes, 0.1, 70.0, Polarity::Dark, 3});
  const auto fx = generate_fixture(r);
  CHECK(label_components(fx.truth).size() == 3);
}

TEST_CASE("recipe JSON round trip and versioning") {
  auto r = base_recipe(99);
  r.background.kind = BackgroundKind::Ramp;
  r.background.direction = RampDirection::Diagonal;
  r.foreground.push_back({ShapeKind::Strokes, 0.2, 50.0, Polarity::Random, 2});
  const auto j = recipe_to_json(r);
  CHECK(j.at("version") == kFixtureFormatVersion);
  const auto back = recipe_from_json(j);
  CHECK(recipe_to_json(back) == j);
  CHECK(generate_fixture(back).image.pixels == generate_fixture(r).image.pixels);

  auto bad = j;
  bad["version"] = 2;
  CHECK_THROWS_AS(generate_fixture(recipe_from_json(bad)), Error);
  try {
    (void)recipe_from_json(nlohmann::json{{"height", 3}});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Decode);
  }
}
