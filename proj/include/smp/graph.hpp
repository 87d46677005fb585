#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "smp/dense_matrix.hpp"
#include "smp/sparse_matrix.hpp"

namespace smp {

using NodeId = std::uint32_t;

// Undirected edge, stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// Unweighted undirected graph with optional per-node features and integer labels.
// Immutable after construction; the edge list is kept sorted.
class Graph {
 public:
  Graph() = default;
  // Edges may be given in either orientation. Self-loops, duplicates and
  // out-of-range endpoints throw ContractViolation, as do feature/label
  // row counts that differ from num_nodes.
  Graph(std::size_t num_nodes, std::vector<Edge> edges,
        std::optional<DenseMatrix> features = std::nullopt,
        std::optional<std::vector<int>> labels = std::nullopt);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(NodeId a, NodeId b) const;

  bool has_features() const { return features_.has_value(); }
  const DenseMatrix& features() const;
  bool has_labels() const { return labels_.has_value(); }
  const std::vector<int>& labels() const;

  std::vector<std::size_t> degrees() const;

  Graph with_features(DenseMatrix features) const;
  Graph with_labels(std::vector<int> labels) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::optional<DenseMatrix> features_;
  std::optional<std::vector<int>> labels_;
};

// Bijection on {0..N-1}; mapping[i] is the image of node i.
class NodePermutation {
 public:
  explicit NodePermutation(std::vector<NodeId> mapping);

  static NodePermutation identity(std::size_t n);

  std::size_t size() const { return mapping_.size(); }
  NodeId operator()(NodeId i) const { return mapping_[i]; }
  const std::vector<NodeId>& mapping() const { return mapping_; }
  NodePermutation inverse() const;

 private:
  std::vector<NodeId> mapping_;
};

// Symmetric 0/1 adjacency with zero diagonal.
SparseMatrix build_adjacency(const Graph& g);

// (D+I)^{-1/2} (A+I) (D+I)^{-1/2}. Expects a square symmetric 0/1 matrix with
// zero diagonal.
SparseMatrix normalize_adjacency(const SparseMatrix& a);

// P * x: row i of x moves to row perm(i).
DenseMatrix permute_rows(const DenseMatrix& x, const NodePermutation& perm);

// Relabels nodes: edge (u,v) -> (perm(u), perm(v)); feature and label rows follow.
Graph apply_permutation(const Graph& g, const NodePermutation& perm);

struct DuplicatedGraph {
  Graph graph;
  // twin[i] = i + N for the first copy's nodes.
  std::vector<NodeId> twin;
};

// Two disjoint copies of g: nodes [0, N) and [N, 2N).
DuplicatedGraph duplicate_graph(const Graph& g);

// Involution swapping every node with its twin in a duplicated graph.
NodePermutation twin_swap(const DuplicatedGraph& dup);

}  // namespace smp
