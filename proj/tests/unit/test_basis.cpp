#include <cmath>
#include <numbers>
#include <thread>

#include "doctest.h"
#include "rrseg/basis.hpp"
#include "rrseg/error.hpp"
#include "rrseg/fitting.hpp"
#include "rrseg/rng.hpp"

using namespace rrseg;

namespace {

double gram_deviation(const BasisSet& b) {
  const Eigen::MatrixXd g = b.design().transpose() * b.design();
  return (g - Eigen::MatrixXd::Identity(b.k(), b.k())).cwiseAbs().maxCoeff();
}

// Oracle: the zigzag scan built independently by walking diagonals and
// alternating direction, prefix-truncated.
std::vector<FrequencyIndex> zigzag_oracle(int count) {
  std::vector<FrequencyIndex> out;
  for (int d = 0; static_cast<int>(out.size()) < count; ++d) {
    std::vector<FrequencyIndex> diag;
    for (int u = 0; u <= d; ++u) diag.push_back({u, d - u});
    if (d % 2 == 0) std::reverse(diag.begin(), diag.end());
    for (const auto& f : diag) {
      if (static_cast<int>(out.size()) < count) out.push_back(f);
    }
  }
  return out;
}

// Oracle: orthonormal basis of the span of the raw Vandermonde columns via
// Householder QR, projector P P^T.
Eigen::MatrixXd vandermonde_projector(int n, const std::vector<FrequencyIndex>& degrees) {
  Eigen::MatrixXd v(n * n, static_cast<Eigen::Index>(degrees.size()));
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      for (std::size_t j = 0; j < degrees.size(); ++j) {
        v(y * n + x, static_cast<Eigen::Index>(j)) = std::pow(x + 1.0, degrees[j].u) * std::pow(y + 1.0, degrees[j].v);
      }
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(v.rows(), v.cols());
  return q * q.transpose();
}

std::vector<double> random_pixels(std::uint64_t seed, int count) {
  SplitMix64 rng(seed);
  std::vector<double> px(static_cast<std::size_t>(count));
  for (auto& p : px) p = std::round(rng.uniform(0.0, 255.0));
  return px;
}

}  // namespace

TEST_CASE("zigzag order matches the diagonal-walk oracle") {
  CHECK(zigzag_order(1) == std::vector<FrequencyIndex>{{0, 0}});
  CHECK(zigzag_order(3) == std::vector<FrequencyIndex>{{0, 0}, {0, 1}, {1, 0}});
  const std::vector<FrequencyIndex> ten{{0, 0}, {0, 1}, {1, 0}, {2, 0}, {1, 1}, {0, 2}, {0, 3}, {1, 2}, {2, 1}, {3, 0}};
  CHECK(zigzag_order(10) == ten);
  for (int count = 1; count <= 64; ++count) CHECK(zigzag_order(count) == zigzag_oracle(count));
}

TEST_CASE("rectangular zigzag skips indices outside the grid") {
  const auto idx = zigzag_order(4, 4, 1);
  REQUIRE(idx.size() == 4);
  for (const auto& f : idx) CHECK(f.v == 0);
  CHECK(idx.back().u == 3);
}

TEST_CASE("DCT basis examples") {
  SUBCASE("n=8 k=1 is the constant 1/8") {
    const auto b = make_dct_basis(8, 1);
    CHECK(b.k() == 1);
    for (Eigen::Index r = 0; r < b.design().rows(); ++r) CHECK(b.design()(r, 0) == doctest::Approx(1.0 / 8.0).epsilon(1e-15));
  }
  SUBCASE("n=4 k=16 is a square orthogonal matrix") {
    const auto b = make_dct_basis(4, 16);
    CHECK(b.design().rows() == 16);
    CHECK(gram_deviation(b) <= 1e-10);
    const Eigen::MatrixXd outer = b.design() * b.design().transpose();
    CHECK((outer - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("n=64 k=10 default model") {
    const auto b = make_dct_basis(64, 10);
    CHECK(b.design().rows() == 4096);
    CHECK(b.k() == 10);
    CHECK(gram_deviation(b) <= 1e-10);
  }
  SUBCASE("columns follow the separable formula with v on rows") {
    const int n = 8;
    const auto b = make_dct_basis(n, 10);
    for (int j = 0; j < b.k(); ++j) {
      const auto f = b.indices()[static_cast<std::size_t>(j)];
      const double bu = f.u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      const double bv = f.v == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
          const double expect = bu * bv * std::cos((2 * x + 1) * std::numbers::pi * f.u / (2.0 * n)) *
                                std::cos((2 * y + 1) * std::numbers::pi * f.v / (2.0 * n));
          CHECK(b.design()(y * n + x, j) == doctest::Approx(expect).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("k out of range is a parameter error") {
  for (auto kind : {BasisKind::Dct, BasisKind::OrthoPoly}) {
    CHECK_THROWS_AS(make_basis(kind, 4, 4, 0), Error);
    CHECK_THROWS_AS(make_basis(kind, 4, 4, 17), Error);
    try {
      make_basis(kind, 4, 4, 17);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidArgument);
    }
  }
}

TEST_CASE("polynomial basis examples") {
  SUBCASE("n=8 k=1 is the constant 1/sqrt(64)") {
    const auto b = make_poly_basis(8, 1);
    for (Eigen::Index r = 0; r < b.design().rows(); ++r) CHECK(std::abs(b.design()(r, 0)) == doctest::Approx(0.125));
  }
  SUBCASE("n=4 k=3 spans {1, x, y}: projector equals the Vandermonde QR oracle") {
    const auto b = make_poly_basis(4, 3);
    const Eigen::MatrixXd proj = b.design() * b.design().transpose();
    const Eigen::MatrixXd oracle = vandermonde_projector(4, {{0, 0}, {0, 1}, {1, 0}});
    CHECK((proj - oracle).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("projector for k=10 matches the oracle over the same degree pairs") {
    const auto b = make_poly_basis(8, 10);
    const Eigen::MatrixXd proj = b.design() * b.design().transpose();
    const auto degrees = zigzag_order(10);
    const Eigen::MatrixXd oracle = vandermonde_projector(8, degrees);
    CHECK((proj - oracle).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("orthogonality holds at n=64 k=16") { CHECK(gram_deviation(make_poly_basis(64, 16)) <= 1e-10); }
}

TEST_CASE("property: Gram identity and DC column for n <= 64, k <= 32") {
  for (int n : {1, 2, 3, 4, 7, 8, 16, 32, 64}) {
    for (int k : {1, 2, 5, 10, 16, 32}) {
      if (k > n * n) continue;
      for (auto kind : {BasisKind::Dct, BasisKind::OrthoPoly}) {
        CAPTURE(n);
        CAPTURE(k);
        const auto b = make_basis(kind, n, n, k);
        CHECK(gram_deviation(b) <= 1e-10);
        const auto col = b.design().col(0);
        CHECK(col.maxCoeff() - col.minCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("property: complete basis reconstructs any block") {
  for (auto kind : {BasisKind::Dct, BasisKind::OrthoPoly}) {
    for (int n : {2, 4, 6}) {
      const auto b = make_basis(kind, n, n, n * n);
      const Block block = Block::square(n, random_pixels(static_cast<std::uint64_t>(n) * 31 + 7, n * n));
      CHECK(fit_least_squares(block, b).max_residual() <= 1e-8);
    }
  }
}

TEST_CASE("property: least-squares RMSE is non-increasing in k") {
  for (auto kind : {BasisKind::Dct, BasisKind::OrthoPoly}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Block block = Block::square(8, random_pixels(seed, 64));
      double previous = std::numeric_limits<double>::infinity();
      for (int k = 1; k <= 64; ++k) {
        const double rmse = fit_least_squares(block, make_basis(kind, 8, 8, k)).rmse;
        CHECK(rmse <= previous + 1e-9);
        previous = rmse;
      }
    }
  }
}

TEST_CASE("rectangular bases stay orthonormal") {
  for (auto kind : {BasisKind::Dct, BasisKind::OrthoPoly}) {
    const auto b = make_basis(kind, 13, 5, 10);
    CHECK(b.width() == 13);
    CHECK(b.height() == 5);
    CHECK(gram_deviation(b) <= 1e-10);
    CHECK_THROWS_AS((void)b.n(), Error);
  }
}

TEST_CASE("high-degree polynomials raise numerical degeneracy") {
  // Degree 63 monomials on 64 samples are dependent to rounding precision.
  try {
    (void)make_poly_basis(64, 1, 64);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NumericalDegeneracy);
  }
  CHECK(gram_deviation(make_poly_basis(64, 1, 16)) <= 1e-10);
}

TEST_CASE("cached_basis returns one shared instance across threads") {
  std::vector<std::shared_ptr<const BasisSet>> got(8);
  std::vector<std::thread> workers;
  for (int t = 0; t < 8; ++t) {
    workers.emplace_back([&got, t] { got[static_cast<std::size_t>(t)] = cached_basis(BasisKind::Dct, 32, 32, 10); });
  }
  for (auto& w : workers) w.join();
  for (const auto& p : got) CHECK(p.get() == got.front().get());
  CHECK(gram_deviation(*got.front()) <= 1e-10);
}
