#include "rrseg/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "rrseg/basis.hpp"
#include "rrseg/error.hpp"
#include "rrseg/rng.hpp"

namespace rrseg {

namespace {

// Stream ids keep every random consumer independent of the others.
enum Stream : std::uint64_t { kBackgroundStream = 1, kNoiseStream = 2, kLayerStream = 100 };

double cosine(int pos, int freq, int length) {
  return std::cos((2.0 * pos + 1.0) * std::numbers::pi * freq / (2.0 * length));
}

// Writes a random low-order DCT surface for the w x h window at (row, col).
void fill_dct(std::vector<double>& model, int image_width, int row, int col, int w, int h, int k, double alpha_scale,
              SplitMix64& rng) {
  const auto freqs = zigzag_order(k);
  const double mean = rng.uniform(64.0, 192.0);
  std::vector<double> amp(freqs.size(), 0.0);
  for (std::size_t j = 1; j < freqs.size(); ++j) amp[j] = alpha_scale * rng.normal();

  std::vector<double> ac(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = 0.0;
      for (std::size_t j = 1; j < freqs.size(); ++j) v += amp[j] * cosine(x, freqs[j].u, w) * cosine(y, freqs[j].v, h);
      ac[static_cast<std::size_t>(y) * w + x] = v;
    }
  }
  const auto [lo, hi] = std::minmax_element(ac.begin(), ac.end());
  double scale = 1.0;
  if (*lo < 0.0) scale = std::min(scale, mean / -*lo);
  if (*hi > 0.0) scale = std::min(scale, (255.0 - mean) / *hi);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      model[static_cast<std::size_t>(row + y) * image_width + col + x] = mean + scale * ac[static_cast<std::size_t>(y) * w + x];
    }
  }
}

std::uint8_t to_pixel(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

struct Painter {
  const std::vector<double>& model;
  GrayImage& image;
  SegMask& truth;
  const ForegroundLayer& layer;
  SplitMix64& rng;
  std::vector<std::uint8_t> mine = std::vector<std::uint8_t>(image.pixel_count(), 0);
  std::size_t planted = 0;

  void plant(int row, int col) {
    if (row < 0 || col < 0 || row >= image.height || col >= image.width) return;
    const std::size_t i = static_cast<std::size_t>(row) * image.width + col;
    if (mine[i]) return;
    const double base = model[i];
    double sign = layer.polarity == Polarity::Dark ? -1.0 : 1.0;
    if (layer.polarity == Polarity::Random) sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    double target = base + sign * layer.contrast;
    if (layer.polarity == Polarity::Random && (target < 0.0 || target > 255.0)) target = base - sign * layer.contrast;
    const double clipped = std::clamp(target, 0.0, 255.0);
    if (std::abs(clipped - base) < 0.5 * layer.contrast) {
      fail(ErrorCode::GenerationFailed, "clipping removes more than half of contrast " +
                                            std::to_string(layer.contrast) + " at background value " +
                                            std::to_string(base));
    }
    const std::uint8_t value = to_pixel(clipped);
    if (value == image.pixels[i] && !truth.bits[i]) {
      fail(ErrorCode::GenerationFailed, "planted pixel is indistinguishable from the background pixel");
    }
    image.pixels[i] = value;
    truth.bits[i] = 1;
    mine[i] = 1;
    ++planted;
  }

  void disc(double row, double col, double radius) {
    const int r0 = static_cast<int>(std::floor(row - radius));
    const int r1 = static_cast<int>(std::ceil(row + radius));
    const int c0 = static_cast<int>(std::floor(col - radius));
    const int c1 = static_cast<int>(std::ceil(col + radius));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const double dr = r - row;
        const double dc = c - col;
        if (dr * dr + dc * dc <= radius * radius + 1e-9) plant(r, c);
      }
    }
  }

  void line(double r0, double c0, double r1, double c1, double radius) {
    const double len = std::hypot(r1 - r0, c1 - c0);
    const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
    for (int s = 0; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      disc(r0 + t * (r1 - r0), c0 + t * (c1 - c0), radius);
    }
  }
};

void plant_speckle(Painter& p, std::size_t target) {
  const std::size_t n = p.image.pixel_count();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t placed = 0;
  for (std::size_t i = 0; i < n && placed < target; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(p.rng.below(n - i));
    std::swap(order[i], order[j]);
    const std::size_t idx = order[i];
    if (p.truth.bits[idx]) continue;
    p.plant(static_cast<int>(idx / static_cast<std::size_t>(p.image.width)),
            static_cast<int>(idx % static_cast<std::size_t>(p.image.width)));
    ++placed;
  }
}

// A glyph is 2-4 strokes inside a small letter cell.
void plant_glyph(Painter& p) {
  const double h = p.rng.uniform(7.0, 14.0);
  const double w = 0.6 * h;
  const double top = p.rng.uniform(0.0, std::max(1.0, p.image.height - h));
  const double left = p.rng.uniform(0.0, std::max(1.0, p.image.width - w));
  const double radius = h < 10.0 ? 0.5 : 0.9;
  const int strokes = 2 + static_cast<int>(p.rng.below(3));
  for (int s = 0; s < strokes; ++s) {
    const double r0 = top + h * std::round(p.rng.uniform(0.0, 2.0)) / 2.0;
    const double c0 = left + w * std::round(p.rng.uniform(0.0, 2.0)) / 2.0;
    const double r1 = top + h * std::round(p.rng.uniform(0.0, 2.0)) / 2.0;
    const double c1 = left + w * std::round(p.rng.uniform(0.0, 2.0)) / 2.0;
    p.line(r0, c0, r1, c1, radius);
  }
}

// Quadratic Bezier curve; with a band it stays inside [band_top, band_bottom).
void plant_curve(Painter& p, double band_top, double band_bottom) {
  const double margin = 3.0;
  const double lo = band_top + margin;
  const double hi = std::max(lo + 1.0, band_bottom - margin);
  const double w = p.image.width;
  const double c0 = p.rng.uniform(0.0, 0.2 * w);
  const double c2 = p.rng.uniform(0.8 * w, w - 1.0);
  const double c1 = p.rng.uniform(c0, c2);
  const double r0 = p.rng.uniform(lo, hi);
  const double r1 = p.rng.uniform(lo, hi);
  const double r2 = p.rng.uniform(lo, hi);
  const double radius = p.rng.uniform(1.0, 1.6);
  const int steps = static_cast<int>(std::ceil(2.0 * (c2 - c0 + std::abs(r2 - r0) + 1.0)));
  double pr = r0;
  double pc = c0;
  for (int s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    const double a = (1 - t) * (1 - t);
    const double b = 2 * t * (1 - t);
    const double c = t * t;
    const double r = a * r0 + b * r1 + c * r2;
    const double col = a * c0 + b * c1 + c * c2;
    p.line(pr, pc, r, col, radius);
    pr = r;
    pc = col;
  }
}

void plant_layer(const std::vector<double>& model, GrayImage& image, SegMask& truth, const ForegroundLayer& layer,
                 std::uint64_t seed) {
  require(layer.coverage > 0.0 && layer.coverage < 0.5, "coverage must lie in (0, 0.5)");
  require(layer.contrast >= 2.0 && layer.contrast <= 255.0, "contrast must lie in [2, 255]");
  require(layer.count >= 0, "shape count must be non-negative");
  SplitMix64 rng(seed);
  Painter painter{model, image, truth, layer, rng};
  const auto target = static_cast<std::size_t>(std::llround(layer.coverage * static_cast<double>(image.pixel_count())));
  switch (layer.shape) {
    case ShapeKind::Speckle:
      plant_speckle(painter, target);
      break;
    case ShapeKind::Glyphs:
      if (layer.count > 0) {
        for (int i = 0; i < layer.count; ++i) plant_glyph(painter);
      } else {
        for (int guard = 0; painter.planted < target && guard < 1'000'000; ++guard) plant_glyph(painter);
      }
      break;
    case ShapeKind::Strokes:
      if (layer.count > 0) {
        const double band = static_cast<double>(image.height) / layer.count;
        for (int i = 0; i < layer.count; ++i) plant_curve(painter, i * band, (i + 1) * band);
      } else {
        for (int guard = 0; painter.planted < target && guard < 1'000'000; ++guard) {
          plant_curve(painter, 0.0, image.height);
        }
      }
      break;
  }
}

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<BackgroundKind> kBackgroundNames[] = {{BackgroundKind::Constant, "constant"},
                                                         {BackgroundKind::DctGlobal, "dct_global"},
                                                         {BackgroundKind::DctBlocks, "dct_blocks"},
                                                         {BackgroundKind::Ramp, "ramp"}};
constexpr EnumName<RampDirection> kDirectionNames[] = {{RampDirection::Horizontal, "horizontal"},
                                                       {RampDirection::Vertical, "vertical"},
                                                       {RampDirection::Diagonal, "diagonal"}};
constexpr EnumName<ShapeKind> kShapeNames[] = {
    {ShapeKind::Glyphs, "glyphs"}, {ShapeKind::Strokes, "strokes"}, {ShapeKind::Speckle, "speckle"}};
constexpr EnumName<Polarity> kPolarityNames[] = {
    {Polarity::Dark, "dark"}, {Polarity::Light, "light"}, {Polarity::Random, "random"}};

template <typename E, std::size_t N>
const char* name_of(const EnumName<E> (&table)[N], E value) {
  for (const auto& e : table) {
    if (e.value == value) return e.name;
  }
  return "?";
}

template <typename E, std::size_t N>
E parse_enum(const EnumName<E> (&table)[N], const std::string& text, const char* what) {
  for (const auto& e : table) {
    if (text == e.name) return e.value;
  }
  fail(ErrorCode::InvalidArgument, std::string("unknown ") + what + " '" + text + "'");
}

}  // namespace

Background gen_smooth_background(int width, int height, int k, double alpha_scale, std::uint64_t seed,
                                 BackgroundKind kind, int block_size) {
  BackgroundRecipe recipe;
  recipe.kind = kind;
  recipe.k = k;
  recipe.alpha_scale = alpha_scale;
  recipe.block_size = block_size;
  return gen_background(width, height, recipe, seed);
}

Background gen_background(int width, int height, const BackgroundRecipe& recipe, std::uint64_t seed) {
  require(width >= 1 && height >= 1, "fixture dimensions must be positive");
  require(recipe.noise_sigma >= 0.0, "noise sigma must be non-negative");
  Background out;
  out.model.assign(static_cast<std::size_t>(width) * height, 0.0);
  SplitMix64 rng(mix64(seed, kBackgroundStream));

  switch (recipe.kind) {
    case BackgroundKind::Constant:
      require(recipe.value >= 0.0 && recipe.value <= 255.0, "constant background must lie in [0, 255]");
      std::fill(out.model.begin(), out.model.end(), recipe.value);
      break;
    case BackgroundKind::DctGlobal:
      require(recipe.k >= 1 && recipe.k <= 10, "background model order must lie in [1, 10]");
      fill_dct(out.model, width, 0, 0, width, height, recipe.k, recipe.alpha_scale, rng);
      break;
    case BackgroundKind::DctBlocks:
      require(recipe.k >= 1 && recipe.k <= 10, "background model order must lie in [1, 10]");
      require(recipe.block_size >= 1, "block size must be positive");
      for (int row = 0; row < height; row += recipe.block_size) {
        for (int col = 0; col < width; col += recipe.block_size) {
          fill_dct(out.model, width, row, col, std::min(recipe.block_size, width - col),
                   std::min(recipe.block_size, height - row), recipe.k, recipe.alpha_scale, rng);
        }
      }
      break;
    case BackgroundKind::Ramp: {
      require(recipe.low >= 0.0 && recipe.high <= 255.0 && recipe.low <= 255.0 && recipe.high >= 0.0,
              "ramp end points must lie in [0, 255]");
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          double t = 0.0;
          switch (recipe.direction) {
            case RampDirection::Horizontal: t = width > 1 ? static_cast<double>(x) / (width - 1) : 0.0; break;
            case RampDirection::Vertical: t = height > 1 ? static_cast<double>(y) / (height - 1) : 0.0; break;
            case RampDirection::Diagonal:
              t = width + height > 2 ? static_cast<double>(x + y) / (width + height - 2) : 0.0;
              break;
          }
          out.model[static_cast<std::size_t>(y) * width + x] = recipe.low + t * (recipe.high - recipe.low);
        }
      }
      break;
    }
  }

  out.image = GrayImage(width, height);
  SplitMix64 noise(mix64(seed, kNoiseStream));
  for (std::size_t i = 0; i < out.model.size(); ++i) {
    const double jitter = recipe.noise_sigma > 0.0 ? recipe.noise_sigma * noise.normal() : 0.0;
    out.image.pixels[i] = to_pixel(out.model[i] + jitter);
  }
  return out;
}

Fixture plant_foreground(const Background& background, const ForegroundLayer& layer, std::uint64_t seed) {
  Fixture out;
  out.image = background.image;
  out.truth = SegMask(background.image.width, background.image.height);
  out.recipe.width = background.image.width;
  out.recipe.height = background.image.height;
  out.recipe.seed = seed;
  out.recipe.foreground.push_back(layer);
  plant_layer(background.model, out.image, out.truth, layer, mix64(seed, kLayerStream));
  return out;
}

Fixture generate_fixture(const FixtureRecipe& recipe) {
  require(recipe.version == kFixtureFormatVersion,
          "unsupported fixture format version " + std::to_string(recipe.version));
  const Background bg = gen_background(recipe.width, recipe.height, recipe.background, recipe.seed);
  Fixture out;
  out.recipe = recipe;
  out.image = bg.image;
  out.truth = SegMask(recipe.width, recipe.height);
  for (std::size_t i = 0; i < recipe.foreground.size(); ++i) {
    plant_layer(bg.model, out.image, out.truth, recipe.foreground[i], mix64(recipe.seed, kLayerStream + i));
  }
  return out;
}

nlohmann::json recipe_to_json(const FixtureRecipe& recipe) {
  const auto& b = recipe.background;
  nlohmann::json j;
  j["version"] = recipe.version;
  j["width"] = recipe.width;
  j["height"] = recipe.height;
  j["seed"] = recipe.seed;
  j["background"] = {{"kind", name_of(kBackgroundNames, b.kind)},
                     {"k", b.k},
                     {"alpha_scale", b.alpha_scale},
                     {"block_size", b.block_size},
                     {"value", b.value},
                     {"low", b.low},
                     {"high", b.high},
                     {"direction", name_of(kDirectionNames, b.direction)},
                     {"noise_sigma", b.noise_sigma}};
  j["foreground"] = nlohmann::json::array();
  for (const auto& layer : recipe.foreground) {
    j["foreground"].push_back({{"shape", name_of(kShapeNames, layer.shape)},
                               {"coverage", layer.coverage},
                               {"contrast", layer.contrast},
                               {"polarity", name_of(kPolarityNames, layer.polarity)},
                               {"count", layer.count}});
  }
  return j;
}

FixtureRecipe recipe_from_json(const nlohmann::json& j) {
  try {
    FixtureRecipe r;
    r.version = j.value("version", kFixtureFormatVersion);
    r.width = j.at("width").get<int>();
    r.height = j.at("height").get<int>();
    r.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("background")) {
      const auto& b = j.at("background");
      r.background.kind = parse_enum(kBackgroundNames, b.value("kind", std::string("dct_global")), "background kind");
      r.background.k = b.value("k", r.background.k);
      r.background.alpha_scale = b.value("alpha_scale", r.background.alpha_scale);
      r.background.block_size = b.value("block_size", r.background.block_size);
      r.background.value = b.value("value", r.background.value);
      r.background.low = b.value("low", r.background.low);
      r.background.high = b.value("high", r.background.high);
      r.background.direction = parse_enum(kDirectionNames, b.value("direction", std::string("horizontal")), "direction");
      r.background.noise_sigma = b.value("noise_sigma", r.background.noise_sigma);
    }
    if (j.contains("foreground")) {
      for (const auto& f : j.at("foreground")) {
        ForegroundLayer layer;
        layer.shape = parse_enum(kShapeNames, f.value("shape", std::string("speckle")), "shape");
        layer.coverage = f.value("coverage", layer.coverage);
        layer.contrast = f.value("contrast", layer.contrast);
        layer.polarity = parse_enum(kPolarityNames, f.value("polarity", std::string("random")), "polarity");
        layer.count = f.value("count", layer.count);
        r.foreground.push_back(layer);
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Decode, std::string("malformed fixture recipe: ") + e.what());
  }
}

}  // namespace rrseg
