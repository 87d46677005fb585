#include "smp/stochastic.hpp"

#include <cmath>
#include <numbers>

#include "smp/error.hpp"
#include "smp/random.hpp"

namespace smp {

DenseMatrix sample_stochastic(std::size_t n, const StochasticConfig& cfg, std::size_t epoch) {
  require(n >= 1, "sample_stochastic: n must be positive");
  require(cfg.dim >= 1, "sample_stochastic: dim must be positive");
  const std::uint64_t stream_epoch = cfg.mode == StochasticMode::Fixed ? 0 : epoch;
  std::uint64_t key = derive_seed(cfg.seed, "stochastic-signal");
  key = hash_combine(key, stream_epoch);
  key = hash_combine(key, n);
  key = hash_combine(key, cfg.dim);

  DenseMatrix e(n, cfg.dim);
  auto& data = e.data();
  for (std::size_t k = 0; k < data.size(); ++k) data[k] = counter_normal(key, k);
  return e;
}

double chi_mean(std::size_t d) {
  require(d >= 1, "chi_mean: d must be positive");
  const double half = static_cast<double>(d) / 2.0;
  return std::numbers::sqrt2 * std::exp(std::lgamma(half + 0.5) - std::lgamma(half));
}

ChiDistanceStats chi_distance_check(const DenseMatrix& e, std::size_t pair_count, std::uint64_t seed) {
  require(e.rows() >= 2, "chi_distance_check: need at least two rows");
  require(pair_count >= 1, "chi_distance_check: pair_count must be positive");
  Rng rng(derive_seed(seed, "chi-pairs"));
  std::uniform_int_distribution<std::size_t> pick(0, e.rows() - 1);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t p = 0; p < pair_count; ++p) {
    std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    while (j == i) j = pick(rng);
    const double x = l2_distance(e.row(i), e.row(j)) / std::numbers::sqrt2;
    sum += x;
    sum_sq += x * x;
  }
  ChiDistanceStats s;
  s.dim = e.cols();
  s.pair_count = pair_count;
  const auto m = static_cast<double>(pair_count);
  s.sample_mean = sum / m;
  s.sample_variance = pair_count > 1 ? (sum_sq - m * s.sample_mean * s.sample_mean) / (m - 1.0) : 0.0;
  s.analytic_mean = chi_mean(e.cols());
  s.analytic_variance = static_cast<double>(e.cols()) - s.analytic_mean * s.analytic_mean;
  // Pairs drawn from a finite row pool share rows, which adds 4 * zeta1 / n to
  // the variance of the mean (U-statistic). zeta1 = Var_i E[h(E_i, E_j) | E_i];
  // by the delta method on ||E_i||^2 ~ chi2_d it is about 1/8 for every d.
  s.row_reuse_variance = 0.5 / static_cast<double>(e.rows());
  s.standard_error = std::sqrt(s.analytic_variance / m + s.row_reuse_variance);
  return s;
}

}  // namespace smp
