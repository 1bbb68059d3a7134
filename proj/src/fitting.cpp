#include "rrseg/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrseg/error.hpp"

namespace rrseg {

namespace {

constexpr double kPivotRatio = 1e-8;

void check_shape(const Block& block, const BasisSet& basis) {
  require(block.width == basis.width() && block.height == basis.height(),
          "block " + std::to_string(block.width) + "x" + std::to_string(block.height) + " does not match basis " +
              std::to_string(basis.width()) + "x" + std::to_string(basis.height()));
}

FitResult with_residuals(const Block& block, const BasisSet& basis, Eigen::VectorXd alpha) {
  FitResult out;
  const Eigen::VectorXd model = basis.design() * alpha;
  out.residuals.resize(block.pixels.size());
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < block.pixels.size(); ++i) {
    const double r = std::abs(block.pixels[i] - model(static_cast<Eigen::Index>(i)));
    out.residuals[i] = r;
    sum_sq += r * r;
  }
  out.rmse = block.pixels.empty() ? 0.0 : std::sqrt(sum_sq / static_cast<double>(block.pixels.size()));
  out.alpha = std::move(alpha);
  return out;
}

}  // namespace

Block::Block(int w, int h, std::vector<double> values, PixelOrigin at)
    : width(w), height(h), pixels(std::move(values)), origin(at) {
  require(w >= 1 && h >= 1, "block must be at least 1x1");
  require(pixels.size() == static_cast<std::size_t>(w) * h, "block pixel count does not match its dimensions");
}

Block Block::from_image(const GrayImage& image, int row, int col, int w, int h) {
  require(row >= 0 && col >= 0 && w >= 1 && h >= 1 && row + h <= image.height && col + w <= image.width,
          "block window lies outside the image");
  std::vector<double> values(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) values[static_cast<std::size_t>(r) * w + c] = image.at(row + r, col + c);
  }
  return Block(w, h, std::move(values), {row, col});
}

int Block::n() const {
  require(width == height, "block is not square");
  return width;
}

double Block::min() const { return *std::min_element(pixels.begin(), pixels.end()); }
double Block::max() const { return *std::max_element(pixels.begin(), pixels.end()); }

double FitResult::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

namespace detail {

std::optional<Eigen::VectorXd> solve_rows(const Eigen::MatrixXd& design, std::span<const double> values,
                                          std::span<const int> rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto k = design.cols();
  Eigen::MatrixXd a(m, k);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a.row(i) = design.row(rows[static_cast<std::size_t>(i)]);
    b(i) = values[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const auto diag = qr.matrixQR().diagonal().cwiseAbs();
  const double largest = diag.maxCoeff();
  const double smallest = diag.minCoeff();
  if (!(largest > 0.0) || smallest < kPivotRatio * largest) return std::nullopt;
  return Eigen::VectorXd(qr.solve(b));
}

}  // namespace detail

FitResult fit_least_squares(const Block& block, const BasisSet& basis) {
  check_shape(block, basis);
  const Eigen::Map<const Eigen::VectorXd> f(block.pixels.data(), static_cast<Eigen::Index>(block.pixels.size()));
  return with_residuals(block, basis, basis.design().transpose() * f);
}

FitResult fit_subset(const Block& block, const BasisSet& basis, std::span<const int> pixel_indices) {
  check_shape(block, basis);
  require(static_cast<int>(pixel_indices.size()) >= basis.k(),
          "subset of " + std::to_string(pixel_indices.size()) + " pixels cannot determine " +
              std::to_string(basis.k()) + " weights");
  std::vector<std::uint8_t> seen(block.pixels.size(), 0);
  for (const int idx : pixel_indices) {
    require(idx >= 0 && idx < block.size(), "subset pixel index out of range");
    require(!seen[static_cast<std::size_t>(idx)], "subset pixel indices must be distinct");
    seen[static_cast<std::size_t>(idx)] = 1;
  }
  auto alpha = detail::solve_rows(basis.design(), block.pixels, pixel_indices);
  if (!alpha) fail(ErrorCode::DegenerateSample, "selected pixels give a rank-deficient system");
  return with_residuals(block, basis, std::move(*alpha));
}

Block evaluate_model(const Eigen::VectorXd& alpha, const BasisSet& basis) {
  require(alpha.size() == basis.k(), "weight count does not match basis");
  const Eigen::VectorXd model = basis.design() * alpha;
  return Block(basis.width(), basis.height(), std::vector<double>(model.data(), model.data() + model.size()));
}

Block clamp_to_intensity(Block block) {
  for (double& v : block.pixels) v = std::clamp(std::round(v), 0.0, 255.0);
  return block;
}

}  // namespace rrseg
