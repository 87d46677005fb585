#include <gtest/gtest.h>

#include <cmath>

#include "smp/datasets.hpp"
#include "smp/error.hpp"
#include "smp/theory.hpp"
#include "support.hpp"

namespace smp {
namespace {

SparseMatrix norm_adj(const Graph& g) { return normalize_adjacency(build_adjacency(g)); }

const Graph kPath(2, {{0, 1}});
const Graph kTriangle(3, {{0, 1}, {1, 2}, {0, 2}});

TEST(ProximityTarget, MatchesBruteForceDensePowers) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Graph g = testing::random_graph(10 + 8 * seed, 0.15, seed);
    for (std::size_t k : {0, 1, 2, 3}) {
      const DenseMatrix s = proximity_target(norm_adj(g), k);
      const auto oracle = testing::brute_force_proximity(g, k);
      double worst = 0.0;
      for (std::size_t i = 0; i < g.num_nodes(); ++i)
        for (std::size_t j = 0; j < g.num_nodes(); ++j) worst = std::max(worst, std::abs(s(i, j) - oracle[i][j]));
      EXPECT_LE(worst, 1e-10) << "seed " << seed << " k " << k;
    }
  }
}

TEST(ProximityTarget, EdgelessGraphIsIdentity) {
  EXPECT_EQ(proximity_target(norm_adj(Graph(4, {})), 2), DenseMatrix::identity(4));
}

TEST(ProximityTarget, GuardsLargeGraphs) {
  EXPECT_THROW(proximity_target(norm_adj(gen_grid(5, 5)), 1, 20), DataError);
}

TEST(JlBound, ClosedFormValues) {
  // 4 ln(80) / 0.009 for eps 0.1, delta 0.05, unit row norm.
  EXPECT_NEAR(jl_dimension_bound(0.1, 0.05, 1.0), 1947.5673931883919, 1e-9);
  EXPECT_NEAR(jl_dimension_bound(0.25, 0.1, 1.0 / std::sqrt(2.0)), 182.60462784386863, 1e-9);
  EXPECT_NEAR(jl_dimension_bound(0.25, 0.1, 1.0 / std::sqrt(3.0)), 138.79692769790708, 1e-9);
}

TEST(JlBound, EpsAtOrAboveRowNormIsAnError) {
  EXPECT_THROW(jl_dimension_bound(0.5, 0.1, 0.5), DataError);
  EXPECT_THROW(jl_dimension_bound(0.6, 0.1, 0.5), DataError);
}

TEST(JlReport, GridRowNormsAndBounds) {
  // Row norms and bounds from an independent dense computation.
  const SparseMatrix adj = norm_adj(gen_grid());
  const JlReport k1 = jl_error_report(adj, 1, 16, 1, 0.25, 0.1);
  EXPECT_NEAR(k1.max_row_norm, 0.5270462766947299, 1e-12);
  EXPECT_NEAR(k1.d0, 124.75798979059454, 1e-8);
  const JlReport k2 = jl_error_report(adj, 2, 16, 1, 0.25, 0.1);
  EXPECT_NEAR(k2.max_row_norm, 0.4011942049973514, 1e-12);
  EXPECT_NEAR(k2.d0, 100.8331293184735, 1e-8);
  EXPECT_EQ(k1.errors.size(), 400u * 401u / 2u);
}

TEST(JlReport, SummaryStatisticsAreConsistent) {
  const JlReport r = jl_error_report(norm_adj(kTriangle), 1, 8, 3, 0.25, 0.1);
  EXPECT_EQ(r.errors.size(), 6u);
  double mx = 0, sum = 0;
  for (double e : r.errors) {
    mx = std::max(mx, e);
    sum += e;
  }
  EXPECT_EQ(r.max_error, mx);
  EXPECT_NEAR(r.mean_error, sum / 6.0, 1e-15);
  EXPECT_EQ(r.median_error, median(r.errors));
}

TEST(JlReport, EdgelessDiagonalTendsToOne) {
  // With no edges A = I, so the diagonal decoder is the mean of d squared
  // normals: mean 1, sd sqrt(2/d).
  const std::size_t d = 2048;
  const JlReport r = jl_error_report(norm_adj(Graph(30, {})), 2, d, 5, 0.25, 0.1);
  const double sd = std::sqrt(2.0 / static_cast<double>(d));
  std::size_t idx = 0;
  for (std::size_t i = 0; i < 30; ++i) {
    EXPECT_LT(r.errors[idx], 3.0 * sd + 0.05) << i;  // diagonal entries come first in each row
    idx += 30 - i;
  }
}

TEST(JlReport, RejectsEpsAboveRowNorm) {
  EXPECT_THROW(jl_error_report(norm_adj(kTriangle), 1, 8, 1, 0.9, 0.1), DataError);
}

TEST(JlSweep, MedianShrinksAndBoundHoldsOnTriangle) {
  const JlSweep s = jl_sweep(norm_adj(kTriangle), 1, 0.25, 0.1, 50, 7);
  EXPECT_TRUE(s.bound_applicable);
  EXPECT_EQ(s.bound_dim, 139u);
  EXPECT_LT(s.median_large, s.median_small);
  EXPECT_GE(s.success_at_bound, 0.9);
}

TEST(JlSweep, BoundNotApplicableWhenEpsExceedsRowNorms) {
  const JlSweep s = jl_sweep(norm_adj(gen_communities()), 1, 0.25, 0.1, 2, 1, 16, 64);
  EXPECT_FALSE(s.bound_applicable);
  EXPECT_TRUE(s.meets_bound());
}

TEST(Median, OddAndEven) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_THROW(median({}), ContractViolation);
}

TEST(Equivariance, IdentityPermutationIsExact) {
  const Graph g = constant_features(gen_grid(4, 4));
  ModelSpec spec;
  spec.variant = Variant::GCN;
  EXPECT_EQ(check_equivariance(spec, init_params(spec, 1), g, NodePermutation::identity(16)), 0.0);
}

TEST(Equivariance, RandomPermutationsOnGeneratedGraphs) {
  for (const Graph& g : {constant_features(gen_grid()), constant_features(gen_communities())})
    for (Variant v : {Variant::SGC, Variant::GCN}) EXPECT_LE(equivariance_sweep(g, v, 3, 2), 1e-9);
}

TEST(Equivariance, OnlyFeatureModels) {
  const Graph g = constant_features(gen_grid(3, 3));
  ModelSpec spec;
  EXPECT_THROW(check_equivariance(spec, init_params(spec, 1), g, NodePermutation::identity(9)), ContractViolation);
}

TEST(Collision, SingleNodeDuplicate) {
  const Graph g(1, {}, DenseMatrix{{1.0}});
  ModelSpec sgc;
  sgc.variant = Variant::SGC;
  ModelSpec ident;
  ident.variant = Variant::SmpIdentity;
  const CollisionReport r =
      check_automorphic_collision(sgc, init_params(sgc, 1), ident, ModelParams{}, g, {32, 1, StochasticMode::Fixed});
  EXPECT_EQ(r.equivariant_gap, 0.0);
  EXPECT_GT(r.smp_gap, 0.1);
}

TEST(Collision, SweepOnDuplicatedGrid) {
  const CollisionSweep s = collision_sweep(constant_features(gen_grid(6, 6)), 10, 32, 0.1, 4);
  EXPECT_LE(s.max_equivariant_gap, 1e-9);
  EXPECT_EQ(s.smp_separated, 10u);
}

TEST(Asymmetry, DetectsPerturbation) {
  const SparseMatrix a = norm_adj(kTriangle);
  EXPECT_EQ(max_asymmetry(a), 0.0);
  std::vector<double> v = a.values();
  v[1] += 0.25;
  EXPECT_NEAR(max_asymmetry(SparseMatrix(3, 3, a.row_ptr(), a.col_idx(), v)), 0.25, 1e-15);
}

TEST(Asymmetry, PathAdjacencyIsSymmetric) { EXPECT_EQ(max_asymmetry(norm_adj(kPath)), 0.0); }

}  // namespace
}  // namespace smp
