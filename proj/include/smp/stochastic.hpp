#pragma once

#include <cstddef>
#include <cstdint>

#include "smp/dense_matrix.hpp"

namespace smp {

enum class StochasticMode { Fixed, Resampled };

struct StochasticConfig {
  std::size_t dim = 32;
  std::uint64_t seed = 0;
  StochasticMode mode = StochasticMode::Fixed;
};

// n x dim matrix of i.i.d. N(0,1) draws. Entry (i, j) is a pure function of
// (seed, epoch, n, dim, i, j); in Fixed mode the epoch is ignored.
DenseMatrix sample_stochastic(std::size_t n, const StochasticConfig& cfg, std::size_t epoch);

// Mean of the chi distribution with d degrees of freedom.
double chi_mean(std::size_t d);

struct ChiDistanceStats {
  std::size_t dim = 0;
  std::size_t pair_count = 0;
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  double analytic_mean = 0.0;
  double analytic_variance = 0.0;  // d - mean^2
  // Extra variance of sample_mean from pairs that share a row.
  double row_reuse_variance = 0.0;
  // Standard error of sample_mean: analytic variance / pair_count plus the
  // row-reuse term.
  double standard_error = 0.0;
};

// Samples pair_count row pairs (i != j) and summarizes ||E_i - E_j|| / sqrt(2),
// which is chi_d distributed for Gaussian rows.
ChiDistanceStats chi_distance_check(const DenseMatrix& e, std::size_t pair_count, std::uint64_t seed);

}  // namespace smp
