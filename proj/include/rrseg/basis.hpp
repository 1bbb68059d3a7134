#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rrseg {

enum class BasisKind { Dct, OrthoPoly };

const char* to_string(BasisKind kind) noexcept;

/// Horizontal (u, along columns) and vertical (v, along rows) frequency or
/// polynomial degree of one separable 2-D basis function.
struct FrequencyIndex {
  int u = 0;
  int v = 0;
  friend bool operator==(const FrequencyIndex&, const FrequencyIndex&) = default;
};

/// First `count` index pairs of the JPEG-style anti-diagonal scan:
/// (0,0),(0,1),(1,0),(2,0),(1,1),(0,2),(0,3),...
/// Odd diagonals run with u ascending, even diagonals with u descending.
std::vector<FrequencyIndex> zigzag_order(int count);

/// Same scan restricted to u < width, v < height.
std::vector<FrequencyIndex> zigzag_order(int count, int width, int height);

/// K smooth basis functions sampled on a width x height pixel grid.
///
/// `design()` is (width*height) x K; row r = y*width + x holds every basis
/// evaluated at pixel (x, y). Columns are orthonormal and column 0 is the
/// constant function. Immutable once built.
class BasisSet {
 public:
  BasisSet(BasisKind kind, int width, int height, std::vector<FrequencyIndex> indices,
           Eigen::MatrixXd design);

  BasisKind kind() const noexcept { return kind_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  /// Side length of a square basis; throws for rectangular ones.
  int n() const;
  int k() const noexcept { return static_cast<int>(design_.cols()); }
  int pixel_count() const noexcept { return width_ * height_; }
  const Eigen::MatrixXd& design() const noexcept { return design_; }
  std::span<const FrequencyIndex> indices() const noexcept { return indices_; }

 private:
  BasisKind kind_;
  int width_;
  int height_;
  std::vector<FrequencyIndex> indices_;
  Eigen::MatrixXd design_;
};

/// Orthonormal 2-D DCT-II functions
///   P(x,y) = b_u b_v cos((2x+1) pi u / 2W) cos((2y+1) pi v / 2H),
/// b_0 = sqrt(1/L), b_u = sqrt(2/L), x in 0..W-1, y in 0..H-1,
/// taken in zigzag order.
BasisSet make_dct_basis(int n, int k);
BasisSet make_dct_basis(int width, int height, int k);

/// Outer products of 1-D orthonormal polynomials. The 1-D sets come from
/// modified Gram-Schmidt (two passes) over the monomials sampled at 1..L;
/// sample positions are affinely mapped onto [-1, 1] first, which spans the
/// same nested subspaces and so yields the same orthonormal polynomials.
/// Throws NumericalDegeneracy when the monomials are too ill-conditioned for
/// the requested degree.
BasisSet make_poly_basis(int n, int k);
BasisSet make_poly_basis(int width, int height, int k);

BasisSet make_basis(BasisKind kind, int width, int height, int k);

/// Memoized make_basis; safe to call from concurrent workers.
std::shared_ptr<const BasisSet> cached_basis(BasisKind kind, int width, int height, int k);

}  // namespace rrseg
