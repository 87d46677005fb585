#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "smp/datasets.hpp"
#include "smp/error.hpp"
#include "smp/graph.hpp"
#include "smp/sparse_matrix.hpp"
#include "smp/theory.hpp"
#include "support.hpp"

namespace smp {
namespace {

TEST(DenseMatrix, RejectsWrongDataLength) {
  EXPECT_THROW(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), ContractViolation);
}

TEST(DenseMatrix, ProductsAgreeWithNaiveLoops) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  DenseMatrix a(7, 5), b(5, 4), c(7, 4);
  for (double& x : a.data()) x = nd(rng);
  for (double& x : b.data()) x = nd(rng);
  for (double& x : c.data()) x = nd(rng);
  const DenseMatrix ab = matmul(a, b);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 5; ++k) s += a(i, k) * b(k, j);
      EXPECT_NEAR(ab(i, j), s, 1e-12);
    }
  EXPECT_LT(max_abs_diff(matmul_tn(a, c), matmul(transpose(a), c)), 1e-12);
  EXPECT_LT(max_abs_diff(matmul_nt(c, b), matmul(c, transpose(b))), 1e-12);
  EXPECT_THROW(matmul(a, a), ContractViolation);
}

TEST(DenseMatrix, HconcatAndColumnBlock) {
  const DenseMatrix a{{1, 2}, {3, 4}};
  const DenseMatrix b{{5}, {6}};
  const DenseMatrix ab = hconcat(a, b);
  EXPECT_EQ(ab, (DenseMatrix{{1, 2, 5}, {3, 4, 6}}));
  EXPECT_EQ(column_block(ab, 2, 1), b);
  EXPECT_THROW(hconcat(a, DenseMatrix{{1}}), ContractViolation);
}

TEST(SparseMatrix, ValidatesCsr) {
  EXPECT_THROW(SparseMatrix(2, 2, {0, 1}, {0}, {1.0}), ContractViolation);        // row_ptr too short
  EXPECT_THROW(SparseMatrix(2, 2, {0, 1, 2}, {0, 5}, {1.0, 1.0}), ContractViolation);  // column out of range
  EXPECT_THROW(SparseMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 1.0}), ContractViolation);  // unsorted row
}

TEST(SparseMatrix, SpmmMatchesDense) {
  const Graph g = testing::random_graph(15, 0.3, 4);
  const SparseMatrix a = normalize_adjacency(build_adjacency(g));
  DenseMatrix x(15, 3);
  for (std::size_t i = 0; i < x.data().size(); ++i) x.data()[i] = std::cos(static_cast<double>(i));
  EXPECT_LT(max_abs_diff(spmm(a, x), matmul(a.to_dense(), x)), 1e-14);
}

TEST(Graph, RejectsInvalidEdges) {
  EXPECT_THROW(Graph(3, {{1, 1}}), ContractViolation);
  EXPECT_THROW(Graph(3, {{0, 1}, {1, 0}}), ContractViolation);
  EXPECT_THROW(Graph(3, {{0, 3}}), ContractViolation);
  EXPECT_THROW(Graph(2, {{0, 1}}, DenseMatrix(3, 1)), ContractViolation);
  EXPECT_THROW(Graph(2, {{0, 1}}, std::nullopt, std::vector<int>{1}), ContractViolation);
}

TEST(Graph, NormalizesAndSortsEdges) {
  const Graph g(4, {{3, 2}, {1, 0}});
  ASSERT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.edges()[0], (Edge{0, 1}));
  EXPECT_EQ(g.edges()[1], (Edge{2, 3}));
  EXPECT_TRUE(g.has_edge(3, 2));
  EXPECT_FALSE(g.has_edge(0, 2));
}

TEST(Normalize, TwoNodePathIsAllHalves) {
  const SparseMatrix a = normalize_adjacency(build_adjacency(Graph(2, {{0, 1}})));
  const DenseMatrix d = a.to_dense();
  for (double x : d.data()) EXPECT_DOUBLE_EQ(x, 0.5);
}

TEST(Normalize, TriangleIsAllThirds) {
  const DenseMatrix d = normalize_adjacency(build_adjacency(Graph(3, {{0, 1}, {1, 2}, {0, 2}}))).to_dense();
  for (double x : d.data()) EXPECT_NEAR(x, 1.0 / 3.0, 1e-16);
}

TEST(Normalize, IsolatedNodeKeepsUnitSelfLoop) {
  const SparseMatrix a = normalize_adjacency(build_adjacency(Graph(3, {{0, 1}})));
  EXPECT_EQ(a.at(2, 2), 1.0);
  EXPECT_EQ(a.row_nnz(2), 1u);
}

TEST(Normalize, MatchesDenseOracleAndIsSymmetric) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = testing::random_graph(20, 0.2, seed);
    const SparseMatrix a = normalize_adjacency(build_adjacency(g));
    EXPECT_TRUE(a.is_symmetric());
    const auto oracle = testing::dense_normalized(g);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 0; j < 20; ++j) EXPECT_NEAR(a.at(i, j), oracle[i][j], 1e-15);
  }
}

TEST(Normalize, RejectsNonAdjacencyInput) {
  EXPECT_THROW(normalize_adjacency(SparseMatrix(2, 2, {0, 1, 1}, {1}, {1.0})), ContractViolation);  // asymmetric
  EXPECT_THROW(normalize_adjacency(SparseMatrix(2, 2, {0, 1, 2}, {0, 1}, {1.0, 1.0})),
               ContractViolation);  // diagonal
  EXPECT_THROW(normalize_adjacency(SparseMatrix(2, 2, {0, 1, 2}, {1, 0}, {2.0, 2.0})), ContractViolation);
}

TEST(Normalize, SpectrumWithinUnitInterval) {
  // The all-ones-weighted vector sqrt(d+1) is an eigenvector with eigenvalue 1.
  const Graph g = gen_grid(5, 5);
  const SparseMatrix a = normalize_adjacency(build_adjacency(g));
  const auto deg = g.degrees();
  DenseMatrix v(25, 1);
  for (std::size_t i = 0; i < 25; ++i) v(i, 0) = std::sqrt(static_cast<double>(deg[i] + 1));
  EXPECT_LT(max_abs_diff(spmm(a, v), v), 1e-14);
}

TEST(Permutation, RejectsNonBijection) {
  EXPECT_THROW(NodePermutation({0, 0, 1}), ContractViolation);
  EXPECT_THROW(NodePermutation({0, 3}), ContractViolation);
}

TEST(Permutation, InverseAndIdentity) {
  const NodePermutation p = random_permutation(30, 4);
  const NodePermutation q = p.inverse();
  for (NodeId i = 0; i < 30; ++i) EXPECT_EQ(q(p(i)), i);
  const Graph g = testing::random_graph(30, 0.1, 1);
  EXPECT_EQ(apply_permutation(g, NodePermutation::identity(30)), g);
  EXPECT_EQ(apply_permutation(apply_permutation(g, p), q), g);
}

TEST(Permutation, SwapOnPathMovesFeatures) {
  const Graph g(2, {{0, 1}}, DenseMatrix{{1.0}, {2.0}});
  const Graph h = apply_permutation(g, NodePermutation({1, 0}));
  EXPECT_EQ(h.edges(), g.edges());
  EXPECT_EQ(h.features(), (DenseMatrix{{2.0}, {1.0}}));
}

TEST(Permutation, AdjacencyConjugation) {
  // A(PG) = P A(G) P^T, checked entrywise.
  const Graph g = testing::random_graph(12, 0.3, 9);
  const NodePermutation p = random_permutation(12, 2);
  const SparseMatrix a = normalize_adjacency(build_adjacency(g));
  const SparseMatrix pa = normalize_adjacency(build_adjacency(apply_permutation(g, p)));
  for (NodeId i = 0; i < 12; ++i)
    for (NodeId j = 0; j < 12; ++j) EXPECT_EQ(pa.at(p(i), p(j)), a.at(i, j));
}

TEST(Duplicate, TwinSwapIsAnAutomorphism) {
  const Graph g = constant_features(gen_communities(4, 5, 0.1, 2));
  const DuplicatedGraph d = duplicate_graph(g);
  EXPECT_EQ(d.graph.num_nodes(), 2 * g.num_nodes());
  EXPECT_EQ(d.graph.num_edges(), 2 * g.num_edges());
  for (std::size_t i = 0; i < g.num_nodes(); ++i) EXPECT_EQ(d.twin[i], i + g.num_nodes());
  EXPECT_EQ(apply_permutation(d.graph, twin_swap(d)), d.graph);
}

TEST(Duplicate, SingleNodeGivesIsolatedTwins) {
  const DuplicatedGraph d = duplicate_graph(Graph(1, {}, DenseMatrix{{1.0}}));
  EXPECT_EQ(d.graph.num_nodes(), 2u);
  EXPECT_EQ(d.graph.num_edges(), 0u);
}

}  // namespace
}  // namespace smp
