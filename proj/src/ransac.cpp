#include "rrseg/ransac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "rrseg/error.hpp"
#include "rrseg/rng.hpp"

namespace rrseg {

namespace {

constexpr long long kMaxExhaustive = 200'000'000LL;

struct Candidate {
  int consensus = -1;
  long long iteration = std::numeric_limits<long long>::max();
  Eigen::VectorXd alpha;

  bool better_than(const Candidate& other) const {
    if (consensus != other.consensus) return consensus > other.consensus;
    return iteration < other.iteration;
  }
};

class Scorer {
 public:
  Scorer(const Block& block, const BasisSet& basis, double epsilon)
      : design_(basis.design()),
        pixels_(block.pixels.data(), static_cast<Eigen::Index>(block.pixels.size())),
        epsilon_(epsilon) {}

  int consensus(const Eigen::VectorXd& alpha, Eigen::VectorXd& scratch) const {
    scratch.noalias() = design_ * alpha;
    int count = 0;
    for (Eigen::Index i = 0; i < scratch.size(); ++i) {
      if (std::abs(pixels_(i) - scratch(i)) <= epsilon_) ++count;
    }
    return count;
  }

  std::vector<std::uint8_t> mask(const Eigen::VectorXd& alpha) const {
    const Eigen::VectorXd model = design_ * alpha;
    std::vector<std::uint8_t> out(static_cast<std::size_t>(model.size()));
    for (Eigen::Index i = 0; i < model.size(); ++i) {
      out[static_cast<std::size_t>(i)] = std::abs(pixels_(i) - model(i)) <= epsilon_ ? 1 : 0;
    }
    return out;
  }

 private:
  const Eigen::MatrixXd& design_;
  Eigen::Map<const Eigen::VectorXd> pixels_;
  double epsilon_;
};

long long binomial(int n, int k) {
  long double acc = 1.0L;
  for (int i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > static_cast<long double>(std::numeric_limits<long long>::max() / 2)) {
      return std::numeric_limits<long long>::max();
    }
  }
  return static_cast<long long>(std::llround(acc));
}

// Advances `combo` to the next K-subset of [0, n) in lexicographic order.
bool next_combination(std::vector<int>& combo, int n) {
  const int k = static_cast<int>(combo.size());
  int i = k - 1;
  while (i >= 0 && combo[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++combo[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

Candidate search_exhaustive(const Block& block, const BasisSet& basis, const Scorer& scorer, long long* runs) {
  const int n = block.size();
  const int k = basis.k();
  if (binomial(n, k) > kMaxExhaustive) {
    fail(ErrorCode::InvalidArgument, "exhaustive sampling over C(" + std::to_string(n) + "," + std::to_string(k) +
                                         ") subsets is too large");
  }
  std::vector<int> combo(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) combo[static_cast<std::size_t>(i)] = i;
  Candidate best;
  Eigen::VectorXd scratch;
  long long iteration = 0;
  do {
    if (auto alpha = detail::solve_rows(basis.design(), block.pixels, combo)) {
      Candidate c{scorer.consensus(*alpha, scratch), iteration, std::move(*alpha)};
      if (c.better_than(best)) best = std::move(c);
    }
    ++iteration;
  } while (next_combination(combo, n));
  *runs = iteration;
  return best;
}

Candidate search_range(const Block& block, const BasisSet& basis, const RansacParams& params, const Scorer& scorer,
                       long long begin, long long end, long long* stopped_at) {
  Candidate best;
  Eigen::VectorXd scratch;
  const int target = params.early_exit_fraction > 0.0
                         ? static_cast<int>(std::ceil(params.early_exit_fraction * block.size()))
                         : std::numeric_limits<int>::max();
  for (long long it = begin; it < end; ++it) {
    const auto sample = draw_minimal_sample(params.seed, it, block.size(), basis.k());
    auto alpha = detail::solve_rows(basis.design(), block.pixels, sample);
    if (!alpha) continue;
    Candidate c{scorer.consensus(*alpha, scratch), it, std::move(*alpha)};
    if (c.better_than(best)) best = std::move(c);
    if (best.consensus >= target) {
      if (stopped_at) *stopped_at = it + 1;
      return best;
    }
  }
  if (stopped_at) *stopped_at = end;
  return best;
}

}  // namespace

double adaptive_epsilon(const Block& block, const RansacParams& params) {
  return params.epsilon_intercept + params.epsilon_slope * block.range();
}

long long required_iterations(double inlier_ratio, int model_size, double failure_prob) {
  require(inlier_ratio > 0.0 && inlier_ratio < 1.0, "inlier ratio must lie in (0, 1)");
  require(failure_prob > 0.0 && failure_prob < 1.0, "failure probability must lie in (0, 1)");
  require(model_size >= 1, "model size must be at least 1");
  const double all_inliers = std::pow(inlier_ratio, model_size);
  if (!(all_inliers > 0.0)) {
    fail(ErrorCode::UnreachableConfidence, "inlier_ratio^model_size underflows to zero");
  }
  const double m = std::ceil(std::log(failure_prob) / std::log1p(-all_inliers));
  if (!(m < 9.0e18)) fail(ErrorCode::UnreachableConfidence, "required iteration count overflows");
  return std::max(1LL, static_cast<long long>(m));
}

std::vector<int> draw_minimal_sample(std::uint64_t seed, long long iteration, int population, int k) {
  require(k >= 1 && k <= population, "sample size must lie in [1, population]");
  SplitMix64 rng(mix64(seed, static_cast<std::uint64_t>(iteration)));
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k));
  while (static_cast<int>(out.size()) < k) {
    const int idx = static_cast<int>(rng.below(static_cast<std::uint64_t>(population)));
    if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
  }
  return out;
}

RansacResult ransac_segment(const Block& block, const BasisSet& basis, const RansacParams& params) {
  require(block.width == basis.width() && block.height == basis.height(), "block does not match basis");
  require(block.size() >= basis.k(), "block has fewer pixels than the model size");
  require(params.max_iters >= 1, "max_iters must be at least 1");
  require(params.epsilon_intercept >= 0.0 && params.epsilon_slope >= 0.0, "epsilon parameters must be non-negative");

  RansacResult result;
  result.epsilon_used = adaptive_epsilon(block, params);
  const Scorer scorer(block, basis, result.epsilon_used);

  Candidate best;
  if (params.sampling == SamplingMode::Exhaustive) {
    best = search_exhaustive(block, basis, scorer, &result.iterations_run);
  } else if (params.threads <= 1 || params.early_exit_fraction > 0.0) {
    best = search_range(block, basis, params, scorer, 0, params.max_iters, &result.iterations_run);
  } else {
    const int workers = std::min(params.threads, params.max_iters);
    std::vector<Candidate> partial(static_cast<std::size_t>(workers));
    {
      std::vector<std::jthread> pool;
      const long long chunk = (params.max_iters + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        const long long begin = w * chunk;
        const long long end = std::min<long long>(params.max_iters, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
          partial[static_cast<std::size_t>(w)] = search_range(block, basis, params, scorer, begin, end, nullptr);
        });
      }
    }
    for (auto& c : partial) {
      if (c.better_than(best)) best = std::move(c);
    }
    result.iterations_run = params.max_iters;
  }

  if (best.consensus < 0) fail(ErrorCode::NoModel, "every minimal sample was degenerate");

  result.alpha = std::move(best.alpha);
  result.inlier_mask = scorer.mask(result.alpha);

  if (params.refit) {
    std::vector<int> inliers;
    for (std::size_t i = 0; i < result.inlier_mask.size(); ++i) {
      if (result.inlier_mask[i]) inliers.push_back(static_cast<int>(i));
    }
    if (static_cast<int>(inliers.size()) >= basis.k()) {
      if (auto refit = detail::solve_rows(basis.design(), block.pixels, inliers)) {
        result.alpha = std::move(*refit);
        result.inlier_mask = scorer.mask(result.alpha);
      }
    }
  }
  result.consensus_size =
      static_cast<int>(std::count(result.inlier_mask.begin(), result.inlier_mask.end(), std::uint8_t{1}));
  return result;
}

}  // namespace rrseg
