#include "rrseg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rrseg/error.hpp"

namespace rrseg {

namespace {

constexpr int kBalanceEvery = 10;
constexpr double kBalanceRatio = 10.0;

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  return v.unaryExpr([t](double x) { return x > t ? x - t : (x < -t ? x + t : 0.0); });
}

// Moves S the shortest way onto {S : ||(I - P P^T)(F - S)|| <= epsilon}.
Eigen::VectorXd make_feasible(const Eigen::MatrixXd& p, const Eigen::VectorXd& f, const Eigen::VectorXd& s,
                              double epsilon) {
  const Eigen::VectorXd r = f - s;
  const Eigen::VectorXd d = r - p * (p.transpose() * r);
  const double norm = d.norm();
  if (norm <= epsilon) return s;
  return s + (1.0 - epsilon / norm) * d;
}

}  // namespace

SparseResult sparse_decompose(const Block& block, const BasisSet& basis, double epsilon, double solver_tol,
                              int max_iters) {
  require(block.width == basis.width() && block.height == basis.height(), "block does not match basis");
  require(epsilon >= 0.0, "constraint radius must be non-negative");
  require(solver_tol > 0.0, "solver tolerance must be positive");
  require(max_iters >= 1, "max_iters must be at least 1");

  const Eigen::MatrixXd& p = basis.design();
  const Eigen::Index n = p.rows();
  const Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(block.pixels.data(), n);
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd alpha = p.transpose() * f;
  Eigen::VectorXd x = f - p * alpha;
  if (const double nx = x.norm(); nx > epsilon) x *= epsilon / nx;
  Eigen::VectorXd z = p * alpha + x;
  double rho = 1.0 / std::max(1.0, (f - z).cwiseAbs().mean());

  SparseResult out;
  Eigen::VectorXd best = make_feasible(p, f, s, epsilon);
  double best_objective = best.lpNorm<1>();

  int it = 0;
  for (; it < max_iters; ++it) {
    s = soft_threshold(f - z - u, 1.0 / rho);

    const Eigen::VectorXd v = f - s - u;
    alpha = p.transpose() * v;
    x = v - p * alpha;
    if (const double nx = x.norm(); nx > epsilon) x *= epsilon / nx;
    const Eigen::VectorXd z_prev = z;
    z = p * alpha + x;

    const Eigen::VectorXd primal = s + z - f;
    u += primal;
    const double primal_norm = primal.norm();
    const double dual_norm = rho * (z - z_prev).norm();

    const Eigen::VectorXd candidate = make_feasible(p, f, s, epsilon);
    const double objective = candidate.lpNorm<1>();
    if (objective < best_objective) {
      best_objective = objective;
      best = candidate;
    }
    out.objective_trace.push_back(best_objective);

    const double eps_primal = sqrt_n * solver_tol + solver_tol * std::max({s.norm(), z.norm(), f.norm()});
    const double eps_dual = sqrt_n * solver_tol + solver_tol * rho * u.norm();
    if (primal_norm <= eps_primal && dual_norm <= eps_dual) {
      ++it;
      break;
    }

    if ((it + 1) % kBalanceEvery == 0) {
      if (primal_norm > kBalanceRatio * dual_norm) {
        rho *= 2.0;
        u /= 2.0;
      } else if (dual_norm > kBalanceRatio * primal_norm) {
        rho /= 2.0;
        u *= 2.0;
      }
    }
  }

  out.iterations = it;
  out.alpha = p.transpose() * (f - best);
  out.s.assign(best.data(), best.data() + best.size());
  out.objective = best_objective;
  const double violation = (f - p * out.alpha - best).norm();
  out.feasible = violation <= epsilon + solver_tol * (1.0 + f.norm());
  return out;
}

std::vector<std::uint8_t> mask_from_sparse(const SparseResult& result, double threshold) {
  require(threshold > 0.0, "mask threshold must be positive");
  std::vector<std::uint8_t> mask(result.s.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = std::abs(result.s[i]) > threshold ? 1 : 0;
  return mask;
}

double default_sparse_epsilon(const Block& block, double per_pixel_tolerance) {
  return std::sqrt(static_cast<double>(block.size())) * per_pixel_tolerance;
}

}  // namespace rrseg
