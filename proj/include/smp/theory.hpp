#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "smp/dense_matrix.hpp"
#include "smp/graph.hpp"
#include "smp/models.hpp"
#include "smp/sparse_matrix.hpp"
#include "smp/stochastic.hpp"

namespace smp {

inline constexpr std::size_t kDenseTargetCap = 5000;

// S = A^K (A^K)^T as a dense matrix. Throws DataError above `cap` nodes.
DenseMatrix proximity_target(const SparseMatrix& adj_norm, std::size_t k, std::size_t cap = kDenseTargetCap);

// Largest row norm of A^K.
double max_row_norm(const DenseMatrix& propagated_identity);

// Sketch dimension beyond which every proximity entry is preserved to within
// eps with probability at least 1 - delta:
//   4 ln(4/delta) m^3 / (eps^2 m - eps^3),  m = max_i ||A^K_i||.
// Throws DataError when eps >= m.
double jl_dimension_bound(double eps, double delta, double max_norm);

struct JlReport {
  std::size_t dim = 0;
  std::size_t k = 0;
  double eps = 0.0;
  double delta = 0.0;
  double max_row_norm = 0.0;
  double d0 = 0.0;
  // |S_ij - E~_i . E~_j / d| over the upper triangle including the diagonal.
  std::vector<double> errors;
  double max_error = 0.0;
  double mean_error = 0.0;
  double median_error = 0.0;
  // Fraction of entries with error < eps.
  double success_rate = 0.0;
};

JlReport jl_error_report(const SparseMatrix& adj_norm, std::size_t k, std::size_t d, std::uint64_t seed, double eps,
                         double delta, std::size_t cap = kDenseTargetCap);

// Same as jl_error_report but reuses a precomputed target.
JlReport jl_error_report(const SparseMatrix& adj_norm, const DenseMatrix& target, std::size_t k, std::size_t d,
                         std::uint64_t seed, double eps, double delta);

double median(std::vector<double> values);

// max |P forward(G) - forward(PG)| for the feature-only models (SGC, GCN).
// The graph must carry features.
double check_equivariance(const ModelSpec& spec, const ModelParams& params, const Graph& g,
                          const NodePermutation& perm);

// Largest twin gap max_i ||h_i - h_twin(i)|| and smallest twin gap.
struct TwinGaps {
  double max_gap = 0.0;
  double min_gap = 0.0;
};

TwinGaps twin_gaps(const DenseMatrix& h, const std::vector<NodeId>& twin);

struct CollisionReport {
  // Largest twin gap of the feature-only model; zero up to rounding.
  double equivariant_gap = 0.0;
  // Smallest twin gap of the stochastic model.
  double smp_gap = 0.0;
};

// Duplicates g (which must carry features) and compares the twin gaps of a
// feature-only model against a stochastic one.
CollisionReport check_automorphic_collision(const ModelSpec& equivariant_spec, const ModelParams& equivariant_params,
                                            const ModelSpec& smp_spec, const ModelParams& smp_params, const Graph& g,
                                            const StochasticConfig& stoch_cfg);

// Uniform random relabeling of n nodes.
NodePermutation random_permutation(std::size_t n, std::uint64_t seed);

// Largest |A_ij - A_ji|.
double max_asymmetry(const SparseMatrix& a);

// Largest equivariance deviation of a feature-only variant over `perms` random
// permutations, each with freshly initialized parameters.
double equivariance_sweep(const Graph& g, Variant variant, std::size_t perms, std::uint64_t seed);

struct CollisionSweep {
  std::size_t trials = 0;
  double threshold = 0.0;
  // Largest twin gap seen for SGC and GCN.
  double max_equivariant_gap = 0.0;
  // Smallest twin gap seen for SMP-Identity.
  double min_smp_gap = 0.0;
  // Trials whose smallest SMP-Identity twin gap exceeds the threshold.
  std::size_t smp_separated = 0;
};

// Repeats check_automorphic_collision with fresh parameters and signals.
CollisionSweep collision_sweep(const Graph& g, std::size_t trials, std::size_t stoch_dim, double threshold,
                               std::uint64_t seed);

struct JlSweep {
  std::size_t k = 0;
  std::size_t trials = 0;
  double eps = 0.0;
  double delta = 0.0;
  double max_row_norm = 0.0;
  // False when eps >= max_row_norm: the bound is undefined (and every entry is
  // already below eps in magnitude), so no bound dimension is tested.
  bool bound_applicable = false;
  double d0 = 0.0;
  std::size_t small_dim = 0;
  std::size_t large_dim = 0;
  std::size_t bound_dim = 0;  // ceil(d0)
  // Medians of the errors pooled over all trials.
  double median_small = 0.0;
  double median_large = 0.0;
  // Pooled fraction of entries with error < eps at bound_dim.
  double success_at_bound = 0.0;

  bool improves() const { return median_large < median_small; }
  bool meets_bound() const { return !bound_applicable || success_at_bound >= 1.0 - delta; }
};

JlSweep jl_sweep(const SparseMatrix& adj_norm, std::size_t k, double eps, double delta, std::size_t trials,
                 std::uint64_t seed, std::size_t small_dim = 16, std::size_t large_dim = 4096);

}  // namespace smp
