#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rrseg/basis.hpp"
#include "rrseg/image.hpp"

namespace rrseg {

struct PixelOrigin {
  int row = 0;
  int col = 0;
  friend bool operator==(const PixelOrigin&, const PixelOrigin&) = default;
};

/// Rectangular window of intensities in row-major order. Blocks cut from an
/// image are square except at the right and bottom image edges.
struct Block {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;
  PixelOrigin origin;

  Block() = default;
  Block(int w, int h, std::vector<double> values, PixelOrigin at = {});

  static Block square(int n, std::vector<double> values) { return Block(n, n, std::move(values)); }
  static Block from_image(const GrayImage& image, int row, int col, int w, int h);

  int size() const noexcept { return width * height; }
  int n() const;
  double min() const;
  double max() const;
  double range() const { return max() - min(); }
  double at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

struct FitResult {
  Eigen::VectorXd alpha;
  /// |F - P alpha| for every pixel of the block.
  std::vector<double> residuals;
  double rmse = 0.0;

  double max_residual() const;
};

/// Least squares over the whole block. The basis is orthonormal, so the
/// solution is P^T F.
FitResult fit_least_squares(const Block& block, const BasisSet& basis);

/// Least squares restricted to the listed pixels (exact interpolation when
/// there are exactly K of them). Residuals cover all pixels. Throws
/// DegenerateSample when the selected rows are rank deficient.
FitResult fit_subset(const Block& block, const BasisSet& basis, std::span<const int> pixel_indices);

/// Unclamped model surface P alpha, shaped like the basis grid.
Block evaluate_model(const Eigen::VectorXd& alpha, const BasisSet& basis);

/// Copy with values rounded and clamped into [0, 255], for output only.
Block clamp_to_intensity(Block block);

namespace detail {
/// Solve the restricted least squares problem; nullopt when the smallest
/// QR pivot is below 1e-8 of the largest.
std::optional<Eigen::VectorXd> solve_rows(const Eigen::MatrixXd& design, std::span<const double> values,
                                          std::span<const int> rows);
}  // namespace detail

}  // namespace rrseg
