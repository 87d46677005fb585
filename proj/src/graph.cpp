#include "smp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smp/error.hpp"

namespace smp {

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges, std::optional<DenseMatrix> features,
             std::optional<std::vector<int>> labels)
    : num_nodes_(num_nodes),
      edges_(std::move(edges)),
      features_(std::move(features)),
      labels_(std::move(labels)) {
  for (Edge& e : edges_) {
    require(e.u != e.v, "Graph: self-loop on node " + std::to_string(e.u));
    require(e.u < num_nodes_ && e.v < num_nodes_, "Graph: edge endpoint out of range");
    e = make_edge(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  require(std::adjacent_find(edges_.begin(), edges_.end()) == edges_.end(), "Graph: duplicate edge");
  if (features_) require(features_->rows() == num_nodes_, "Graph: feature rows must equal num_nodes");
  if (labels_) require(labels_->size() == num_nodes_, "Graph: label count must equal num_nodes");
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  if (a == b) return false;
  return std::binary_search(edges_.begin(), edges_.end(), make_edge(a, b));
}

const DenseMatrix& Graph::features() const {
  require(features_.has_value(), "Graph: no features attached");
  return *features_;
}

const std::vector<int>& Graph::labels() const {
  require(labels_.has_value(), "Graph: no labels attached");
  return *labels_;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(num_nodes_, 0);
  for (const Edge& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

Graph Graph::with_features(DenseMatrix features) const {
  return Graph(num_nodes_, edges_, std::move(features), labels_);
}

Graph Graph::with_labels(std::vector<int> labels) const {
  return Graph(num_nodes_, edges_, features_, std::move(labels));
}

NodePermutation::NodePermutation(std::vector<NodeId> mapping) : mapping_(std::move(mapping)) {
  std::vector<bool> seen(mapping_.size(), false);
  for (NodeId m : mapping_) {
    require(m < mapping_.size() && !seen[m], "NodePermutation: mapping is not a bijection");
    seen[m] = true;
  }
}

NodePermutation NodePermutation::identity(std::size_t n) {
  std::vector<NodeId> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<NodeId>(i);
  return NodePermutation(std::move(m));
}

NodePermutation NodePermutation::inverse() const {
  std::vector<NodeId> inv(mapping_.size());
  for (std::size_t i = 0; i < mapping_.size(); ++i) inv[mapping_[i]] = static_cast<NodeId>(i);
  return NodePermutation(std::move(inv));
}

SparseMatrix build_adjacency(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const Edge& e : g.edges()) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<std::size_t> ptr(n + 1, 0);
  std::vector<std::uint32_t> idx;
  idx.reserve(2 * g.num_edges());
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    idx.insert(idx.end(), adj[i].begin(), adj[i].end());
    ptr[i + 1] = idx.size();
  }
  std::vector<double> vals(idx.size(), 1.0);
  return SparseMatrix(n, n, std::move(ptr), std::move(idx), std::move(vals));
}

SparseMatrix normalize_adjacency(const SparseMatrix& a) {
  require(a.rows() == a.cols(), "normalize_adjacency: matrix must be square");
  require(a.is_symmetric(), "normalize_adjacency: matrix must be symmetric");
  const std::size_t n = a.rows();
  const auto& ptr = a.row_ptr();
  const auto& idx = a.col_idx();
  for (double v : a.values()) require(v == 1.0, "normalize_adjacency: expected 0/1 entries");

  std::vector<double> deg_plus_one(n);
  for (std::size_t i = 0; i < n; ++i) deg_plus_one[i] = static_cast<double>(a.row_nnz(i)) + 1.0;

  std::vector<std::size_t> out_ptr(n + 1, 0);
  std::vector<std::uint32_t> out_idx;
  std::vector<double> out_val;
  out_idx.reserve(a.nnz() + n);
  out_val.reserve(a.nnz() + n);
  for (std::size_t i = 0; i < n; ++i) {
    bool diag_done = false;
    auto emit = [&](std::uint32_t j) {
      out_idx.push_back(j);
      out_val.push_back(1.0 / std::sqrt(deg_plus_one[i] * deg_plus_one[j]));
    };
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) {
      require(idx[k] != i, "normalize_adjacency: diagonal must be zero");
      if (!diag_done && idx[k] > i) {
        emit(static_cast<std::uint32_t>(i));
        diag_done = true;
      }
      emit(idx[k]);
    }
    if (!diag_done) emit(static_cast<std::uint32_t>(i));
    out_ptr[i + 1] = out_idx.size();
  }
  return SparseMatrix(n, n, std::move(out_ptr), std::move(out_idx), std::move(out_val));
}

DenseMatrix permute_rows(const DenseMatrix& x, const NodePermutation& perm) {
  require(perm.size() == x.rows(), "permute_rows: permutation length must equal row count");
  DenseMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto src = x.row(i);
    std::copy(src.begin(), src.end(), out.row(perm(static_cast<NodeId>(i))).begin());
  }
  return out;
}

Graph apply_permutation(const Graph& g, const NodePermutation& perm) {
  require(perm.size() == g.num_nodes(), "apply_permutation: permutation length must equal num_nodes");
  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  for (const Edge& e : g.edges()) edges.push_back(make_edge(perm(e.u), perm(e.v)));
  std::optional<DenseMatrix> features;
  if (g.has_features()) features = permute_rows(g.features(), perm);
  std::optional<std::vector<int>> labels;
  if (g.has_labels()) {
    labels.emplace(g.num_nodes());
    for (std::size_t i = 0; i < g.num_nodes(); ++i) (*labels)[perm(static_cast<NodeId>(i))] = g.labels()[i];
  }
  return Graph(g.num_nodes(), std::move(edges), std::move(features), std::move(labels));
}

DuplicatedGraph duplicate_graph(const Graph& g) {
  const std::size_t n = g.num_nodes();
  const auto offset = static_cast<NodeId>(n);
  std::vector<Edge> edges;
  edges.reserve(2 * g.num_edges());
  for (const Edge& e : g.edges()) edges.push_back(e);
  for (const Edge& e : g.edges()) edges.push_back({e.u + offset, e.v + offset});

  std::optional<DenseMatrix> features;
  if (g.has_features()) {
    const DenseMatrix& f = g.features();
    features.emplace(2 * n, f.cols());
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(f.row(i).begin(), f.row(i).end(), features->row(i).begin());
      std::copy(f.row(i).begin(), f.row(i).end(), features->row(i + n).begin());
    }
  }
  std::optional<std::vector<int>> labels;
  if (g.has_labels()) {
    labels = g.labels();
    labels->insert(labels->end(), g.labels().begin(), g.labels().end());
  }

  std::vector<NodeId> twin(n);
  for (std::size_t i = 0; i < n; ++i) twin[i] = static_cast<NodeId>(i + n);
  return {Graph(2 * n, std::move(edges), std::move(features), std::move(labels)), std::move(twin)};
}

NodePermutation twin_swap(const DuplicatedGraph& dup) {
  std::vector<NodeId> m(dup.graph.num_nodes());
  for (std::size_t i = 0; i < dup.twin.size(); ++i) {
    m[i] = dup.twin[i];
    m[dup.twin[i]] = static_cast<NodeId>(i);
  }
  return NodePermutation(std::move(m));
}

}  // namespace smp
