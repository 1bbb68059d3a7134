#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rrseg/basis.hpp"
#include "rrseg/fitting.hpp"

namespace rrseg {

struct SparseResult {
  Eigen::VectorXd alpha;
  /// Outlier component, one entry per pixel.
  std::vector<double> s;
  /// ||s||_1 of the returned (feasible) iterate.
  double objective = 0.0;
  bool feasible = false;
  int iterations = 0;
  /// Best feasible objective after each iteration; non-increasing.
  std::vector<double> objective_trace;
};

/// L1 decomposition F = P alpha + S:
///
///   minimize ||S||_1  subject to  ||F - P alpha - S||_2 <= epsilon.
///
/// Solved by ADMM on the split S + P alpha + x = F with ||x||_2 <= epsilon.
/// Because P has orthonormal columns the (alpha, x) step is closed form:
/// alpha = P^T v and x is the projection of (I - P P^T) v onto the ball.
/// Every iterate is pulled back onto the feasible set before it is scored,
/// and the best feasible one is returned.
SparseResult sparse_decompose(const Block& block, const BasisSet& basis, double epsilon, double solver_tol = 1e-7,
                              int max_iters = 20000);

/// 1 where |S| exceeds the threshold.
std::vector<std::uint8_t> mask_from_sparse(const SparseResult& result, double threshold);

/// sqrt(pixel count) * per-pixel tolerance.
double default_sparse_epsilon(const Block& block, double per_pixel_tolerance);

}  // namespace rrseg
