#pragma once

// Independent oracles shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "smp/dense_matrix.hpp"
#include "smp/graph.hpp"
#include "smp/models.hpp"
#include "smp/sparse_matrix.hpp"
#include "smp/stochastic.hpp"

namespace smp::testing {

// Small random graph, spec and inputs for gradient checks.
struct SmallInstance {
  ModelSpec spec;
  Graph graph;
  SparseMatrix adj;
  DenseMatrix features;
  DenseMatrix stochastic;
  ModelParams params;
  DenseMatrix upstream;  // dLoss/dH for the linear probe loss sum(G .* H)
};

inline SmallInstance random_instance(Variant variant, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919 + 17);
  std::uniform_int_distribution<std::size_t> nodes(3, 10), dims(1, 4), steps(1, 3);
  std::bernoulli_distribution coin(0.4);
  std::normal_distribution<double> normal(0.0, 1.0);

  SmallInstance s;
  const std::size_t n = nodes(rng);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng)) edges.push_back({u, v});
  s.spec.variant = variant;
  s.spec.k_steps = steps(rng);
  s.spec.stoch_dim = dims(rng);
  s.spec.feat_dim = dims(rng);
  s.spec.hidden_dim = dims(rng);
  s.spec.out_dim = dims(rng);

  s.features = DenseMatrix(n, s.spec.feat_dim);
  for (double& x : s.features.data()) x = normal(rng);
  s.graph = Graph(n, edges, s.features);
  s.adj = normalize_adjacency(build_adjacency(s.graph));
  if (s.spec.uses_stochastic()) s.stochastic = sample_stochastic(n, {s.spec.stoch_dim, seed, StochasticMode::Fixed}, 0);

  s.params = init_params(s.spec, seed);
  // Non-zero biases so that bias gradients and ReLU masks are exercised.
  for (auto& p : s.params.entries())
    if (p.name.ends_with(".bias"))
      for (double& x : p.value.data()) x = 0.1 * normal(rng);

  s.upstream = DenseMatrix(n, s.spec.representation_dim());
  for (double& x : s.upstream.data()) x = normal(rng);
  return s;
}

inline double probe_loss(const SmallInstance& s, const ModelParams& params) {
  const DenseMatrix h = forward(s.spec, params, s.adj, s.features, s.stochastic).h;
  double loss = 0.0;
  for (std::size_t i = 0; i < h.data().size(); ++i) loss += h.data()[i] * s.upstream.data()[i];
  return loss;
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t entries = 0;
};

// Central differences with the given step. Relative error per entry is
// |analytic - numeric| / max(|analytic|, |numeric|, floor).
inline GradCheck gradient_check(const SmallInstance& s, double step = 1e-5, double floor = 1e-6) {
  const ForwardResult fr = forward(s.spec, s.params, s.adj, s.features, s.stochastic);
  const ModelParams grads = backward(s.spec, s.params, s.adj, fr.cache, s.upstream);
  GradCheck out;
  ModelParams work = s.params;
  for (std::size_t p = 0; p < work.size(); ++p) {
    auto& values = work.entries()[p].value.data();
    const auto& analytic = grads.entries()[p].value.data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double orig = values[i];
      values[i] = orig + step;
      const double up = probe_loss(s, work);
      values[i] = orig - step;
      const double down = probe_loss(s, work);
      values[i] = orig;
      const double numeric = (up - down) / (2.0 * step);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
      const double rel = std::abs(analytic[i] - numeric) / denom;
      ++out.entries;
      if (rel > out.max_rel_error) {
        out.max_rel_error = rel;
        out.worst_param = work.entries()[p].name;
      }
    }
  }
  return out;
}

// Count of pos > neg plus half the ties, over all pairs.
inline double brute_force_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos)
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Dense (D+I)^{-1/2}(A+I)(D+I)^{-1/2} straight from the edge list.
inline std::vector<std::vector<double>> dense_normalized(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = 1.0;
  for (const Edge& e : g.edges()) a[e.u][e.v] = a[e.v][e.u] = 1.0;
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) deg[i] += a[i][j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] /= std::sqrt(deg[i] * deg[j]);
  return a;
}

inline std::vector<std::vector<double>> dense_mul(const std::vector<std::vector<double>>& x,
                                                  const std::vector<std::vector<double>>& y) {
  const std::size_t n = x.size(), m = y[0].size(), k = y.size();
  std::vector<std::vector<double>> z(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t t = 0; t < k; ++t) z[i][j] += x[i][t] * y[t][j];
  return z;
}

// A^K (A^K)^T by repeated dense products.
inline std::vector<std::vector<double>> brute_force_proximity(const Graph& g, std::size_t k) {
  const auto a = dense_normalized(g);
  const std::size_t n = a.size();
  std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) p[i][i] = 1.0;
  for (std::size_t s = 0; s < k; ++s) p = dense_mul(p, a);
  std::vector<std::vector<double>> pt(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pt[i][j] = p[j][i];
  return dense_mul(p, pt);
}

inline Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng)) edges.push_back({u, v});
  return Graph(n, edges);
}

}  // namespace smp::testing
