#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rrseg/basis.hpp"
#include "rrseg/fitting.hpp"

namespace rrseg {

enum class SamplingMode {
  /// Independent K-pixel draw per iteration, see draw_minimal_sample().
  Random,
  /// Every K-subset of the block in lexicographic order; max_iters is ignored.
  Exhaustive,
};

struct RansacParams {
  int max_iters = 1000;
  double epsilon_intercept = 1.0;
  double epsilon_slope = 0.22;
  std::uint64_t seed = 0;
  bool refit = true;
  /// Stop once consensus / pixels reaches this fraction; 0 disables.
  double early_exit_fraction = 0.0;
  SamplingMode sampling = SamplingMode::Random;
  /// Worker threads for the iteration loop. Results do not depend on it.
  int threads = 1;
};

struct RansacResult {
  Eigen::VectorXd alpha;
  /// One entry per pixel, 1 = inlier (background).
  std::vector<std::uint8_t> inlier_mask;
  int consensus_size = 0;
  long long iterations_run = 0;
  double epsilon_used = 0.0;

  double inlier_fraction() const noexcept {
    return inlier_mask.empty() ? 0.0 : static_cast<double>(consensus_size) / static_cast<double>(inlier_mask.size());
  }
};

/// epsilon_intercept + epsilon_slope * (max - min) of the block.
double adaptive_epsilon(const Block& block, const RansacParams& params);

/// Smallest M with (1 - w^K)^M <= failure_prob.
long long required_iterations(double inlier_ratio, int model_size, double failure_prob);

/// K distinct indices in [0, population) for one RANSAC iteration.
///
/// The draw depends only on (seed, iteration): a SplitMix64 stream seeded with
/// mix64(seed, iteration) proposes indices via below(population), rejecting
/// repeats, in draw order. This mapping is stable across releases.
std::vector<int> draw_minimal_sample(std::uint64_t seed, long long iteration, int population, int k);

/// Robust fit of `basis` to `block`: keeps the largest consensus set over the
/// sampled minimal sets (earliest iteration wins ties), optionally refits on
/// its inliers and recomputes the mask once. Throws NoModel when every sample
/// was degenerate.
RansacResult ransac_segment(const Block& block, const BasisSet& basis, const RansacParams& params);

}  // namespace rrseg
