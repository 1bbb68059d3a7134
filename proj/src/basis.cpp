#include "rrseg/basis.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <tuple>

#include "rrseg/error.hpp"

namespace rrseg {

namespace {

// Relative norm left after orthogonalizing a monomial against the lower
// degrees. Below this the new direction is rounding noise.
constexpr double kMinSurvivingNorm = 1e-10;
constexpr double kOrthogonalityLimit = 1e-8;

void check_counts(int width, int height, int k) {
  require(width >= 1 && height >= 1, "basis grid must be at least 1x1");
  require(k >= 1 && k <= width * height,
          "basis count " + std::to_string(k) + " outside [1, " + std::to_string(width * height) + "]");
}

Eigen::MatrixXd dct_1d(int length, int count) {
  Eigen::MatrixXd table(length, count);
  const double b0 = std::sqrt(1.0 / length);
  const double b1 = std::sqrt(2.0 / length);
  for (int f = 0; f < count; ++f) {
    const double beta = f == 0 ? b0 : b1;
    for (int x = 0; x < length; ++x) {
      table(x, f) = beta * std::cos((2.0 * x + 1.0) * std::numbers::pi * f / (2.0 * length));
    }
  }
  return table;
}

// Columns are the orthonormal polynomials of degree 0..degrees-1 on `length` points.
Eigen::MatrixXd poly_1d(int length, int degrees) {
  Eigen::MatrixXd q(length, degrees);
  Eigen::VectorXd t(length);
  for (int i = 0; i < length; ++i) {
    // x = i + 1 mapped affinely onto [-1, 1].
    t(i) = length == 1 ? 0.0 : (2.0 * i - (length - 1)) / static_cast<double>(length - 1);
  }
  for (int m = 0; m < degrees; ++m) {
    Eigen::VectorXd v = t.array().pow(m).matrix();
    const double start = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < m; ++j) v -= q.col(j).dot(v) * q.col(j);
    }
    const double left = v.norm();
    if (!(left > kMinSurvivingNorm * start)) {
      fail(ErrorCode::NumericalDegeneracy,
           "polynomial degree " + std::to_string(m) + " on " + std::to_string(length) +
               " samples is numerically dependent on lower degrees");
    }
    q.col(m) = v / left;
  }
  const double deviation = (q.transpose() * q - Eigen::MatrixXd::Identity(degrees, degrees)).cwiseAbs().maxCoeff();
  if (deviation > kOrthogonalityLimit) {
    fail(ErrorCode::NumericalDegeneracy,
         "orthonormal polynomial deviation " + std::to_string(deviation) + " exceeds tolerance");
  }
  return q;
}

BasisSet separable(BasisKind kind, int width, int height, int k) {
  check_counts(width, height, k);
  auto indices = zigzag_order(k, width, height);
  int max_u = 0;
  int max_v = 0;
  for (const auto& f : indices) {
    max_u = std::max(max_u, f.u);
    max_v = std::max(max_v, f.v);
  }
  const Eigen::MatrixXd cols = kind == BasisKind::Dct ? dct_1d(width, max_u + 1) : poly_1d(width, max_u + 1);
  const Eigen::MatrixXd rows = kind == BasisKind::Dct ? dct_1d(height, max_v + 1) : poly_1d(height, max_v + 1);

  Eigen::MatrixXd design(static_cast<Eigen::Index>(width) * height, k);
  for (int c = 0; c < k; ++c) {
    const auto [u, v] = indices[c];
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) design(y * width + x, c) = cols(x, u) * rows(y, v);
    }
  }
  return BasisSet(kind, width, height, std::move(indices), std::move(design));
}

}  // namespace

const char* to_string(BasisKind kind) noexcept {
  return kind == BasisKind::Dct ? "dct" : "poly";
}

std::vector<FrequencyIndex> zigzag_order(int count) {
  require(count >= 1, "zigzag count must be at least 1");
  std::vector<FrequencyIndex> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int d = 0; static_cast<int>(out.size()) < count; ++d) {
    for (int i = 0; i <= d && static_cast<int>(out.size()) < count; ++i) {
      const int u = (d % 2 == 1) ? i : d - i;
      out.push_back({u, d - u});
    }
  }
  return out;
}

std::vector<FrequencyIndex> zigzag_order(int count, int width, int height) {
  check_counts(width, height, count);
  std::vector<FrequencyIndex> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int d = 0; static_cast<int>(out.size()) < count; ++d) {
    for (int i = 0; i <= d && static_cast<int>(out.size()) < count; ++i) {
      const int u = (d % 2 == 1) ? i : d - i;
      const int v = d - u;
      if (u < width && v < height) out.push_back({u, v});
    }
  }
  return out;
}

BasisSet::BasisSet(BasisKind kind, int width, int height, std::vector<FrequencyIndex> indices,
                   Eigen::MatrixXd design)
    : kind_(kind), width_(width), height_(height), indices_(std::move(indices)), design_(std::move(design)) {}

int BasisSet::n() const {
  require(width_ == height_, "basis is not square");
  return width_;
}

BasisSet make_dct_basis(int n, int k) { return separable(BasisKind::Dct, n, n, k); }
BasisSet make_dct_basis(int width, int height, int k) { return separable(BasisKind::Dct, width, height, k); }
BasisSet make_poly_basis(int n, int k) { return separable(BasisKind::OrthoPoly, n, n, k); }
BasisSet make_poly_basis(int width, int height, int k) {
  return separable(BasisKind::OrthoPoly, width, height, k);
}

BasisSet make_basis(BasisKind kind, int width, int height, int k) { return separable(kind, width, height, k); }

std::shared_ptr<const BasisSet> cached_basis(BasisKind kind, int width, int height, int k) {
  using Key = std::tuple<int, int, int, int>;
  static std::shared_mutex mutex;
  static std::map<Key, std::shared_ptr<const BasisSet>> cache;

  const Key key{static_cast<int>(kind), width, height, k};
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const BasisSet>(make_basis(kind, width, height, k));
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(built));
  return it->second;
}

}  // namespace rrseg
