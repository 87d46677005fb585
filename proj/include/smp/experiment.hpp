#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smp/graph.hpp"
#include "smp/models.hpp"
#include "smp/stochastic.hpp"
#include "smp/training.hpp"

namespace smp {

enum class Task { Link, Node, Pair };

std::string_view task_name(Task t);
std::optional<Task> parse_task(std::string_view name);

enum class FeatureKind { Constant, Identity, File };

struct DatasetSpec {
  // "grid", "communities", or "file" (edge list on disk).
  std::string source = "communities";
  std::size_t height = 20;
  std::size_t width = 20;
  std::size_t num_comm = 20;
  std::size_t comm_size = 20;
  double rewire_frac = 0.01;
  std::filesystem::path edges;
  std::filesystem::path features;
  std::filesystem::path labels;
  FeatureKind feature_kind = FeatureKind::Constant;
};

struct RunConfig {
  Task task = Task::Link;
  ModelSpec model;
  DatasetSpec data;
  TrainConfig train;
  StochasticMode stoch_mode = StochasticMode::Fixed;
  SplitRatios ratios;
  std::size_t train_per_class = 5;
  std::size_t val_per_class = 5;
  std::size_t max_pair_positives = 0;  // 0 keeps every same-label pair
  std::vector<std::uint64_t> seeds{0};
  bool parallel_seeds = false;

  // Cross-field checks (e.g. node and pair tasks need labels).
  void validate() const;
};

// Per-component seeds of one run, derived from the run seed by labeled hashing.
struct SeedPlan {
  std::uint64_t run = 0;
  std::uint64_t data = 0;
  std::uint64_t split = 0;
  std::uint64_t init = 0;
  std::uint64_t stochastic = 0;
};

SeedPlan derive_seeds(std::uint64_t run_seed);

// Generated or loaded graph with features attached.
Graph build_dataset(const DatasetSpec& data, std::uint64_t data_seed);

TaskSplit make_split(const RunConfig& cfg, const Graph& g, std::uint64_t split_seed);

// Model spec adjusted to the graph: feature width, and class count as the
// output width for node classification.
ModelSpec resolve_model(const RunConfig& cfg, const Graph& g);

struct SeedRun {
  std::uint64_t seed = 0;
  SeedPlan seeds;
  ModelSpec model;
  TaskSplit split;
  TrainResult result;
};

SeedRun run_seed(const RunConfig& cfg, std::uint64_t seed);

struct RunSummary {
  std::vector<SeedRun> runs;  // in seed-list order
  double mean_test = 0.0;
  double std_test = 0.0;  // population standard deviation
};

RunSummary run_experiment(const RunConfig& cfg);

// Test metrics of a summary in seed order.
std::vector<double> test_metrics(const RunSummary& s);

}  // namespace smp
