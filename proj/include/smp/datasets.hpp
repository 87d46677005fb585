#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>

#include "smp/graph.hpp"

namespace smp {

// 4-neighbour lattice, node id = row * width + col.
Graph gen_grid(std::size_t height = 20, std::size_t width = 20);

// Disjoint cliques (caveman graph) with labels = community index, then
// ceil(rewire_frac * M) distinct edges each get one endpoint moved to a
// uniformly random node. Moves that would create a self-loop or a duplicate
// are redrawn, so the edge count is preserved.
Graph gen_communities(std::size_t num_comm = 20, std::size_t comm_size = 20, double rewire_frac = 0.01,
                      std::uint64_t seed = 0);

// Attaches an N x 1 all-ones feature matrix.
Graph constant_features(const Graph& g);

inline constexpr std::size_t kIdentityFeatureCap = 5000;

// Attaches the N x N identity (one-hot node ids). Throws DataError if N > cap.
Graph identity_features(const Graph& g, std::size_t cap = kIdentityFeatureCap);

// Edge list: one "u v" pair per line, 0-based; lines starting with '#' and
// blank lines are skipped. Features: CSV, one row per node. Labels: one
// integer per line. Errors carry file and line.
Graph load_graph(const std::filesystem::path& edge_path,
                 const std::optional<std::filesystem::path>& feature_path = std::nullopt,
                 const std::optional<std::filesystem::path>& label_path = std::nullopt,
                 std::optional<std::size_t> num_nodes = std::nullopt);

void write_edge_list(const std::filesystem::path& path, const Graph& g);
void write_labels(const std::filesystem::path& path, const Graph& g);
void write_features(const std::filesystem::path& path, const Graph& g);

}  // namespace smp
