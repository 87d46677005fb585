#include "smp/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smp/error.hpp"
#include "smp/random.hpp"

namespace smp {

namespace {

std::string location(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(const std::string& tok, T& out) {
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

Graph gen_grid(std::size_t height, std::size_t width) {
  require(height >= 1 && width >= 1, "gen_grid: height and width must be positive");
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const auto i = static_cast<NodeId>(r * width + c);
      if (c + 1 < width) edges.push_back({i, i + 1});
      if (r + 1 < height) edges.push_back({i, static_cast<NodeId>(i + width)});
    }
  }
  return Graph(height * width, std::move(edges));
}

Graph gen_communities(std::size_t num_comm, std::size_t comm_size, double rewire_frac, std::uint64_t seed) {
  require(num_comm >= 1, "gen_communities: need at least one community");
  require(comm_size >= 2, "gen_communities: comm_size must be at least 2");
  require(rewire_frac >= 0.0 && rewire_frac <= 1.0, "gen_communities: rewire_frac must lie in [0, 1]");
  const std::size_t n = num_comm * comm_size;
  std::vector<Edge> edges;
  std::vector<int> labels(n);
  for (std::size_t c = 0; c < num_comm; ++c) {
    const std::size_t base = c * comm_size;
    for (std::size_t i = 0; i < comm_size; ++i) {
      labels[base + i] = static_cast<int>(c);
      for (std::size_t j = i + 1; j < comm_size; ++j)
        edges.push_back({static_cast<NodeId>(base + i), static_cast<NodeId>(base + j)});
    }
  }

  const std::size_t m = edges.size();
  const auto to_rewire = static_cast<std::size_t>(std::ceil(rewire_frac * static_cast<double>(m) - 1e-9));
  if (to_rewire > 0) {
    Rng rng(derive_seed(seed, "communities-rewire"));
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::set<Edge> present(edges.begin(), edges.end());
    std::uniform_int_distribution<NodeId> pick_node(0, static_cast<NodeId>(n - 1));
    std::bernoulli_distribution pick_side(0.5);
    for (std::size_t r = 0; r < to_rewire; ++r) {
      Edge& e = edges[order[r]];
      const NodeId keep = pick_side(rng) ? e.u : e.v;
      // A node adjacent to everything else cannot take a new edge.
      std::size_t keep_degree = 0;
      for (const Edge& x : present) keep_degree += (x.u == keep || x.v == keep) ? 1 : 0;
      if (keep_degree + 1 >= n) continue;
      for (;;) {
        const NodeId target = pick_node(rng);
        if (target == keep) continue;
        const Edge moved = make_edge(keep, target);
        if (present.count(moved)) continue;
        present.erase(e);
        present.insert(moved);
        e = moved;
        break;
      }
    }
  }
  return Graph(n, std::move(edges), std::nullopt, std::move(labels));
}

Graph constant_features(const Graph& g) {
  if (g.has_features()) throw DataError("constant_features: graph already has features");
  return g.with_features(DenseMatrix(g.num_nodes(), 1, 1.0));
}

Graph identity_features(const Graph& g, std::size_t cap) {
  if (g.has_features()) throw DataError("identity_features: graph already has features");
  if (g.num_nodes() > cap)
    throw DataError("identity_features: " + std::to_string(g.num_nodes()) + " nodes exceeds the cap of " +
                    std::to_string(cap));
  return g.with_features(DenseMatrix::identity(g.num_nodes()));
}

Graph load_graph(const std::filesystem::path& edge_path, const std::optional<std::filesystem::path>& feature_path,
                 const std::optional<std::filesystem::path>& label_path, std::optional<std::size_t> num_nodes) {
  std::optional<DenseMatrix> features;
  if (feature_path) {
    auto in = open_or_throw(*feature_path);
    std::vector<double> data;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      std::stringstream ss(line);
      std::string tok;
      std::size_t c = 0;
      while (std::getline(ss, tok, ',')) {
        double v = 0;
        if (!parse_number(trim(tok), v) || !std::isfinite(v))
          throw DataError(location(*feature_path, lineno) + ": bad feature value '" + tok + "'");
        data.push_back(v);
        ++c;
      }
      if (rows == 0) cols = c;
      if (c != cols)
        throw DataError(location(*feature_path, lineno) + ": expected " + std::to_string(cols) + " columns, got " +
                        std::to_string(c));
      ++rows;
    }
    features.emplace(rows, cols, std::move(data));
  }

  std::optional<std::vector<int>> labels;
  if (label_path) {
    auto in = open_or_throw(*label_path);
    labels.emplace();
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      int v = 0;
      if (!parse_number(line, v)) throw DataError(location(*label_path, lineno) + ": bad label '" + line + "'");
      labels->push_back(v);
    }
  }

  auto in = open_or_throw(edge_path);
  std::vector<Edge> edges;
  std::vector<std::size_t> edge_lines;
  std::set<Edge> seen;
  std::size_t max_node = 0;
  bool any = false;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::vector<std::string> toks;
    for (std::string t; ss >> t;) toks.push_back(t);
    if (toks.size() != 2)
      throw DataError(location(edge_path, lineno) + ": expected two node indices" +
                      (toks.size() > 2 ? " (weighted edge lists are not supported)" : ""));
    NodeId a = 0;
    NodeId b = 0;
    if (!parse_number(toks[0], a) || !parse_number(toks[1], b))
      throw DataError(location(edge_path, lineno) + ": node indices must be non-negative integers");
    if (a == b) throw DataError(location(edge_path, lineno) + ": self-loop on node " + std::to_string(a));
    const Edge e = make_edge(a, b);
    if (!seen.insert(e).second)
      throw DataError(location(edge_path, lineno) + ": duplicate or reversed edge " + toks[0] + " " + toks[1] +
                      " (edge lists must be undirected and simple)");
    edges.push_back(e);
    edge_lines.push_back(lineno);
    max_node = std::max<std::size_t>(max_node, e.v);
    any = true;
  }

  std::size_t n = any ? max_node + 1 : 0;
  if (num_nodes) n = *num_nodes;
  else if (features) n = std::max(n, features->rows());
  else if (labels) n = std::max(n, labels->size());
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].v >= n)
      throw DataError(location(edge_path, edge_lines[i]) + ": node index " + std::to_string(edges[i].v) +
                      " out of range for " + std::to_string(n) + " nodes");
  if (features && features->rows() != n)
    throw DataError(feature_path->string() + ": has " + std::to_string(features->rows()) + " rows but the graph has " +
                    std::to_string(n) + " nodes");
  if (labels && labels->size() != n)
    throw DataError(label_path->string() + ": has " + std::to_string(labels->size()) + " labels but the graph has " +
                    std::to_string(n) + " nodes");
  return Graph(n, std::move(edges), std::move(features), std::move(labels));
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << "# nodes " << g.num_nodes() << " edges " << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

void write_labels(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  for (int l : g.labels()) out << l << '\n';
}

void write_features(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.precision(17);
  const DenseMatrix& f = g.features();
  for (std::size_t i = 0; i < f.rows(); ++i) {
    for (std::size_t j = 0; j < f.cols(); ++j) out << (j ? "," : "") << f(i, j);
    out << '\n';
  }
}

}  // namespace smp
