#include <gtest/gtest.h>

#include <cmath>

#include "smp/checkpoint.hpp"
#include "smp/datasets.hpp"
#include "smp/error.hpp"
#include "smp/models.hpp"
#include "smp/theory.hpp"
#include "support.hpp"

namespace smp {
namespace {

using testing::random_instance;

Graph path3() { return Graph(3, {{0, 1}, {1, 2}}, DenseMatrix{{1.0}, {2.0}, {3.0}}); }

TEST(Variants, NamesRoundTrip) {
  for (Variant v : kAllVariants) EXPECT_EQ(parse_variant(variant_name(v)), v);
  EXPECT_FALSE(parse_variant("gat").has_value());
}

TEST(ModelSpec, RejectsZeroDims) {
  ModelSpec s;
  s.stoch_dim = 0;
  EXPECT_THROW(s.validate(), ContractViolation);
  s = ModelSpec{};
  s.k_steps = 0;
  s.variant = Variant::GCN;
  EXPECT_THROW(s.validate(), ContractViolation);
}

TEST(Propagate, ZeroStepsIsIdentity) {
  const Graph g = path3();
  const SparseMatrix adj = normalize_adjacency(build_adjacency(g));
  EXPECT_EQ(propagate(adj, g.features(), 0), g.features());
}

TEST(Forward, SgcMatchesClosedForm) {
  // Path 0-1-2 with degrees 1,2,1: A = [[1/2, 1/sqrt6, 0], [1/sqrt6, 1/3, 1/sqrt6], [0, 1/sqrt6, 1/2]].
  const Graph g = path3();
  const SparseMatrix adj = normalize_adjacency(build_adjacency(g));
  ModelSpec spec;
  spec.variant = Variant::SGC;
  spec.k_steps = 1;
  spec.out_dim = 1;
  ModelParams p = init_params(spec, 3);
  p.get("head.weight") = DenseMatrix{{2.0}};
  p.get("head.bias") = DenseMatrix{{0.5}};
  const DenseMatrix h = forward(spec, p, adj, g.features(), DenseMatrix{}).h;
  const double s6 = std::sqrt(6.0);
  const double af[3] = {0.5 + 2.0 / s6, 1.0 / s6 + 2.0 / 3.0 + 3.0 / s6, 2.0 / s6 + 1.5};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(h(i, 0), 2.0 * af[i] + 0.5, 1e-14);
}

TEST(Forward, SmpIdentityConcatenatesStochasticFirst) {
  const Graph g = path3();
  const SparseMatrix adj = normalize_adjacency(build_adjacency(g));
  ModelSpec spec;
  spec.variant = Variant::SmpIdentity;
  spec.stoch_dim = 4;
  const DenseMatrix e = sample_stochastic(3, {4, 1, StochasticMode::Fixed}, 0);
  const DenseMatrix h = forward(spec, ModelParams{}, adj, g.features(), e).h;
  ASSERT_EQ(h.cols(), 5u);
  EXPECT_EQ(column_block(h, 0, 4), propagate(adj, e, 2));
  EXPECT_EQ(column_block(h, 4, 1), propagate(adj, g.features(), 2));
}

TEST(Forward, OutputShapes) {
  for (Variant v : kAllVariants) {
    const auto s = random_instance(v, 5);
    const DenseMatrix h = forward(s.spec, s.params, s.adj, s.features, s.stochastic).h;
    EXPECT_EQ(h.rows(), s.graph.num_nodes()) << variant_name(v);
    EXPECT_EQ(h.cols(), s.spec.representation_dim()) << variant_name(v);
    EXPECT_TRUE(h.all_finite());
  }
}

TEST(Forward, StochasticVariantsNeedSignals) {
  const auto s = random_instance(Variant::SmpLinear, 2);
  EXPECT_THROW(forward(s.spec, s.params, s.adj, s.features, DenseMatrix{}), ContractViolation);
}

TEST(Forward, GcnZeroFeaturesDependOnlyOnBias) {
  const Graph g = gen_grid(3, 3);
  const SparseMatrix adj = normalize_adjacency(build_adjacency(g));
  ModelSpec spec;
  spec.variant = Variant::GCN;
  const ModelParams p = init_params(spec, 1);  // zero biases
  const DenseMatrix h = forward(spec, p, adj, DenseMatrix(9, 1), DenseMatrix{}).h;
  EXPECT_EQ(max_abs(h), 0.0);
}

TEST(Forward, CachedInputsMatchDirectCall) {
  for (Variant v : kAllVariants) {
    const auto s = random_instance(v, 8);
    const auto inputs = prepare_inputs(s.spec, s.adj, s.features, s.stochastic);
    EXPECT_EQ(forward(s.spec, s.params, s.adj, inputs).h, forward(s.spec, s.params, s.adj, s.features, s.stochastic).h)
        << variant_name(v);
  }
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  for (Variant v : kAllVariants) {
    auto s = random_instance(v, 4);
    const auto fr = forward(s.spec, s.params, s.adj, s.features, s.stochastic);
    const ModelParams g = backward(s.spec, s.params, s.adj, fr.cache, DenseMatrix(fr.h.rows(), fr.h.cols()));
    for (const auto& p : g.entries()) EXPECT_EQ(max_abs(p.value), 0.0) << p.name;
  }
}

TEST(Backward, SmpLinearHeadGradientClosedForm) {
  const auto s = random_instance(Variant::SmpLinear, 11);
  const auto fr = forward(s.spec, s.params, s.adj, s.features, s.stochastic);
  const ModelParams g = backward(s.spec, s.params, s.adj, fr.cache, s.upstream);
  const DenseMatrix x = hconcat(propagate(s.adj, s.stochastic, s.spec.k_steps),
                                propagate(s.adj, s.features, s.spec.k_steps));
  EXPECT_LT(max_abs_diff(g.get("head.weight"), matmul_tn(x, s.upstream)), 1e-12);
  const auto sums = column_sums(s.upstream);
  for (std::size_t j = 0; j < sums.size(); ++j) EXPECT_NEAR(g.get("head.bias")(0, j), sums[j], 1e-12);
}

class GradientOracle : public ::testing::TestWithParam<Variant> {};

TEST_P(GradientOracle, MatchesCentralDifferences) {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const auto s = random_instance(GetParam(), seed);
    const auto r = testing::gradient_check(s);
    EXPECT_LT(r.max_rel_error, 1e-4) << variant_name(GetParam()) << " seed " << seed << " worst " << r.worst_param;
  }
}

INSTANTIATE_TEST_SUITE_P(AllVariants, GradientOracle, ::testing::ValuesIn(kAllVariants),
                         [](const auto& info) {
                           std::string n(variant_name(info.param));
                           for (char& c : n)
                             if (c == '-') c = '_';
                           return n;
                         });

TEST(Init, DeterministicAndWithinGlorotBounds) {
  ModelSpec spec;
  spec.variant = Variant::SmpMlp;
  spec.feat_dim = 3;
  const ModelParams a = init_params(spec, 9);
  EXPECT_EQ(a, init_params(spec, 9));
  EXPECT_NE(a, init_params(spec, 10));
  for (const auto& p : a.entries()) {
    if (p.name.ends_with(".bias")) {
      EXPECT_EQ(max_abs(p.value), 0.0);
    } else {
      const double bound = std::sqrt(6.0 / static_cast<double>(p.value.rows() + p.value.cols()));
      EXPECT_LE(max_abs(p.value), bound) << p.name;
    }
  }
}

TEST(Init, SmpIdentityHasNoParameters) {
  ModelSpec spec;
  spec.variant = Variant::SmpIdentity;
  EXPECT_TRUE(init_params(spec, 1).empty());
}

TEST(Reduction, ZeroIdentityHeadReproducesSgcFeatures) {
  // With W = [0; I] and zero bias, SMP-Linear returns A^K F exactly.
  const Graph g = gen_grid(4, 5);
  const SparseMatrix adj = normalize_adjacency(build_adjacency(g));
  DenseMatrix f(20, 3);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 3; ++j) f(i, j) = std::sin(1.0 + i * 3 + j);
  ModelSpec spec;
  spec.feat_dim = 3;
  spec.out_dim = 3;
  const DenseMatrix e = sample_stochastic(20, {spec.stoch_dim, 4, StochasticMode::Fixed}, 0);
  const DenseMatrix h = forward(spec, smp_linear_reduction_params(spec), adj, f, e).h;
  EXPECT_LE(max_abs_diff(h, propagate(adj, f, spec.k_steps)), 1e-12);
}

TEST(Reduction, FromSgcMatchesSgcOutputs) {
  const Graph g = gen_communities(5, 6, 0.1, 3);
  const SparseMatrix adj = normalize_adjacency(build_adjacency(g));
  const DenseMatrix f = constant_features(g).features();
  ModelSpec sgc;
  sgc.variant = Variant::SGC;
  const ModelParams sp = init_params(sgc, 5);
  ModelSpec smp = sgc;
  smp.variant = Variant::SmpLinear;
  const DenseMatrix e = sample_stochastic(g.num_nodes(), {smp.stoch_dim, 8, StochasticMode::Fixed}, 0);
  const DenseMatrix h_smp = forward(smp, smp_linear_from_sgc(smp, sgc, sp), adj, f, e).h;
  const DenseMatrix h_sgc = forward(sgc, sp, adj, f, DenseMatrix{}).h;
  EXPECT_LE(max_abs_diff(h_smp, h_sgc), 1e-12);
}

TEST(Reduction, RequiresMatchingWidths) {
  ModelSpec spec;
  spec.feat_dim = 2;
  spec.out_dim = 3;
  EXPECT_THROW(smp_linear_reduction_params(spec), ContractViolation);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  for (Variant v : kAllVariants) {
    const auto s = random_instance(v, 21);
    const Checkpoint c = checkpoint_from_json(checkpoint_to_json(s.spec, s.params));
    EXPECT_EQ(c.spec, s.spec);
    EXPECT_EQ(c.params, s.params);
    EXPECT_EQ(forward(c.spec, c.params, s.adj, s.features, s.stochastic).h,
              forward(s.spec, s.params, s.adj, s.features, s.stochastic).h);
  }
}

TEST(Checkpoint, RejectsMalformedInput) {
  EXPECT_THROW(checkpoint_from_json("{"), DataError);
  EXPECT_THROW(checkpoint_from_json(R"({"format":"other"})"), DataError);
}

TEST(Equivariance, SgcAndGcnOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Graph g = testing::random_graph(12, 0.3, seed);
    DenseMatrix f(12, 2);
    for (std::size_t i = 0; i < 12; ++i) f(i, 0) = f(i, 1) * 0.5 + static_cast<double>(i % 4);
    g = g.with_features(f);
    for (Variant v : {Variant::SGC, Variant::GCN}) EXPECT_LE(equivariance_sweep(g, v, 5, seed), 1e-9);
  }
}

}  // namespace
}  // namespace smp
