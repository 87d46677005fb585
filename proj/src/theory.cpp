#include "smp/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "smp/error.hpp"
#include "smp/random.hpp"

namespace smp {

namespace {

void check_cap(const SparseMatrix& adj, std::size_t cap) {
  if (adj.rows() > cap)
    throw DataError("dense proximity target needs " + std::to_string(adj.rows()) + " nodes <= cap " +
                    std::to_string(cap));
}

DenseMatrix gram(const DenseMatrix& x) { return matmul_nt(x, x); }

}  // namespace

DenseMatrix proximity_target(const SparseMatrix& adj_norm, std::size_t k, std::size_t cap) {
  check_cap(adj_norm, cap);
  const DenseMatrix ak = propagate(adj_norm, DenseMatrix::identity(adj_norm.rows()), k);
  return gram(ak);
}

double max_row_norm(const DenseMatrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) best = std::max(best, std::sqrt(dot(m.row(i), m.row(i))));
  return best;
}

double jl_dimension_bound(double eps, double delta, double max_norm) {
  require(eps > 0.0 && delta > 0.0 && delta < 1.0, "jl_dimension_bound: need eps > 0 and 0 < delta < 1");
  if (eps >= max_norm)
    throw DataError("jl_dimension_bound: eps must be below the largest row norm (" + std::to_string(max_norm) + ")");
  const double m = max_norm;
  return 4.0 * std::log(4.0 / delta) * m * m * m / (eps * eps * m - eps * eps * eps);
}

double median(std::vector<double> values) {
  require(!values.empty(), "median: empty input");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return (lower + upper) / 2.0;
}

JlReport jl_error_report(const SparseMatrix& adj_norm, std::size_t k, std::size_t d, std::uint64_t seed, double eps,
                         double delta, std::size_t cap) {
  check_cap(adj_norm, cap);
  return jl_error_report(adj_norm, proximity_target(adj_norm, k, cap), k, d, seed, eps, delta);
}

namespace {

double max_target_row_norm(const DenseMatrix& target) {
  // ||A^K_i||^2 = S_ii.
  double m = 0.0;
  for (std::size_t i = 0; i < target.rows(); ++i) m = std::max(m, std::sqrt(target(i, i)));
  return m;
}

// |S_ij - E~_i . E~_j / d| over the upper triangle, row by row.
std::vector<double> sketch_errors(const SparseMatrix& adj_norm, const DenseMatrix& target, std::size_t k,
                                  std::size_t d, std::uint64_t seed) {
  const std::size_t n = adj_norm.rows();
  require(target.rows() == n && target.cols() == n, "jl_error_report: target must be N x N");
  require(d >= 1, "jl_error_report: d must be positive");
  const DenseMatrix e = sample_stochastic(n, {d, seed, StochasticMode::Fixed}, 0);
  const DenseMatrix sketch = gram(propagate(adj_norm, e, k));
  const double inv_d = 1.0 / static_cast<double>(d);
  std::vector<double> errors;
  errors.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) errors.push_back(std::abs(target(i, j) - sketch(i, j) * inv_d));
  return errors;
}

}  // namespace

JlReport jl_error_report(const SparseMatrix& adj_norm, const DenseMatrix& target, std::size_t k, std::size_t d,
                         std::uint64_t seed, double eps, double delta) {
  JlReport r;
  r.dim = d;
  r.k = k;
  r.eps = eps;
  r.delta = delta;
  r.max_row_norm = max_target_row_norm(target);
  r.d0 = jl_dimension_bound(eps, delta, r.max_row_norm);
  r.errors = sketch_errors(adj_norm, target, k, d, seed);

  double sum = 0.0;
  std::size_t ok = 0;
  for (double err : r.errors) {
    r.max_error = std::max(r.max_error, err);
    sum += err;
    ok += err < eps ? 1 : 0;
  }
  r.mean_error = sum / static_cast<double>(r.errors.size());
  r.median_error = median(r.errors);
  r.success_rate = static_cast<double>(ok) / static_cast<double>(r.errors.size());
  return r;
}

double check_equivariance(const ModelSpec& spec, const ModelParams& params, const Graph& g,
                          const NodePermutation& perm) {
  require(spec.variant == Variant::SGC || spec.variant == Variant::GCN,
          "check_equivariance: only feature-only models are covered");
  const Graph pg = apply_permutation(g, perm);
  const SparseMatrix adj = normalize_adjacency(build_adjacency(g));
  const SparseMatrix padj = normalize_adjacency(build_adjacency(pg));
  const DenseMatrix h = forward(spec, params, adj, g.features(), DenseMatrix{}).h;
  const DenseMatrix ph = forward(spec, params, padj, pg.features(), DenseMatrix{}).h;
  return max_abs_diff(permute_rows(h, perm), ph);
}

TwinGaps twin_gaps(const DenseMatrix& h, const std::vector<NodeId>& twin) {
  require(!twin.empty(), "twin_gaps: no twin pairs");
  TwinGaps t;
  t.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < twin.size(); ++i) {
    require(twin[i] < h.rows(), "twin_gaps: twin index out of range");
    const double gap = l2_distance(h.row(i), h.row(twin[i]));
    t.max_gap = std::max(t.max_gap, gap);
    t.min_gap = std::min(t.min_gap, gap);
  }
  return t;
}

CollisionReport check_automorphic_collision(const ModelSpec& equivariant_spec, const ModelParams& equivariant_params,
                                            const ModelSpec& smp_spec, const ModelParams& smp_params, const Graph& g,
                                            const StochasticConfig& stoch_cfg) {
  require(smp_spec.uses_stochastic(), "check_automorphic_collision: second model must be stochastic");
  const DuplicatedGraph dup = duplicate_graph(g);
  const SparseMatrix adj = normalize_adjacency(build_adjacency(dup.graph));
  const DenseMatrix& f = dup.graph.features();

  CollisionReport r;
  const DenseMatrix h_eq = forward(equivariant_spec, equivariant_params, adj, f, DenseMatrix{}).h;
  r.equivariant_gap = twin_gaps(h_eq, dup.twin).max_gap;

  const DenseMatrix e = sample_stochastic(dup.graph.num_nodes(), stoch_cfg, 0);
  const DenseMatrix h_smp = forward(smp_spec, smp_params, adj, f, e).h;
  r.smp_gap = twin_gaps(h_smp, dup.twin).min_gap;
  return r;
}

NodePermutation random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<NodeId> map(n);
  std::iota(map.begin(), map.end(), NodeId{0});
  Rng rng(derive_seed(seed, "permutation"));
  std::shuffle(map.begin(), map.end(), rng);
  return NodePermutation(std::move(map));
}

double max_asymmetry(const SparseMatrix& a) {
  require(a.rows() == a.cols(), "max_asymmetry: matrix must be square");
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t p = a.row_ptr()[r]; p < a.row_ptr()[r + 1]; ++p)
      worst = std::max(worst, std::abs(a.values()[p] - a.at(a.col_idx()[p], r)));
  return worst;
}

namespace {

ModelSpec feature_only_spec(Variant v, const Graph& g) {
  ModelSpec spec;
  spec.variant = v;
  spec.feat_dim = g.features().cols();
  return spec;
}

}  // namespace

double equivariance_sweep(const Graph& g, Variant variant, std::size_t perms, std::uint64_t seed) {
  const ModelSpec spec = feature_only_spec(variant, g);
  double worst = 0.0;
  for (std::size_t t = 0; t < perms; ++t) {
    const std::uint64_t trial = hash_combine(derive_seed(seed, "equivariance"), t);
    const ModelParams params = init_params(spec, trial);
    worst = std::max(worst, check_equivariance(spec, params, g, random_permutation(g.num_nodes(), trial)));
  }
  return worst;
}

CollisionSweep collision_sweep(const Graph& g, std::size_t trials, std::size_t stoch_dim, double threshold,
                               std::uint64_t seed) {
  CollisionSweep s;
  s.trials = trials;
  s.threshold = threshold;
  s.min_smp_gap = std::numeric_limits<double>::infinity();
  ModelSpec smp_spec;
  smp_spec.variant = Variant::SmpIdentity;
  smp_spec.stoch_dim = stoch_dim;
  smp_spec.feat_dim = g.features().cols();
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t trial = hash_combine(derive_seed(seed, "collision"), t);
    const StochasticConfig sc{stoch_dim, trial, StochasticMode::Fixed};
    for (Variant v : {Variant::SGC, Variant::GCN}) {
      const ModelSpec eq = feature_only_spec(v, g);
      const CollisionReport r = check_automorphic_collision(eq, init_params(eq, trial), smp_spec, ModelParams{}, g, sc);
      s.max_equivariant_gap = std::max(s.max_equivariant_gap, r.equivariant_gap);
      // The stochastic side does not depend on the equivariant model; count it once.
      if (v == Variant::SGC) {
        s.min_smp_gap = std::min(s.min_smp_gap, r.smp_gap);
        s.smp_separated += r.smp_gap > threshold ? 1 : 0;
      }
    }
  }
  return s;
}

JlSweep jl_sweep(const SparseMatrix& adj_norm, std::size_t k, double eps, double delta, std::size_t trials,
                 std::uint64_t seed, std::size_t small_dim, std::size_t large_dim) {
  require(trials > 0, "jl_sweep: need at least one trial");
  require(eps > 0.0 && delta > 0.0 && delta < 1.0, "jl_sweep: need eps > 0 and 0 < delta < 1");
  const DenseMatrix target = proximity_target(adj_norm, k);
  JlSweep s;
  s.k = k;
  s.trials = trials;
  s.eps = eps;
  s.delta = delta;
  s.small_dim = small_dim;
  s.large_dim = large_dim;
  s.max_row_norm = max_target_row_norm(target);
  s.bound_applicable = eps < s.max_row_norm;
  if (s.bound_applicable) {
    s.d0 = jl_dimension_bound(eps, delta, s.max_row_norm);
    s.bound_dim = static_cast<std::size_t>(std::ceil(s.d0));
  }

  std::vector<double> small_errors, large_errors;
  std::size_t ok = 0, total = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t trial = hash_combine(derive_seed(seed, "jl"), t);
    const auto small = sketch_errors(adj_norm, target, k, small_dim, trial);
    small_errors.insert(small_errors.end(), small.begin(), small.end());
    const auto large = sketch_errors(adj_norm, target, k, large_dim, trial);
    large_errors.insert(large_errors.end(), large.begin(), large.end());
    if (s.bound_applicable) {
      for (double e : sketch_errors(adj_norm, target, k, s.bound_dim, trial)) {
        ok += e < eps ? 1 : 0;
        ++total;
      }
    }
  }
  s.median_small = median(std::move(small_errors));
  s.median_large = median(std::move(large_errors));
  if (s.bound_applicable) s.success_at_bound = static_cast<double>(ok) / static_cast<double>(total);
  return s;
}

}  // namespace smp
