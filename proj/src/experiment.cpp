#include "smp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "smp/datasets.hpp"
#include "smp/error.hpp"
#include "smp/random.hpp"

namespace smp {

std::string_view task_name(Task t) {
  switch (t) {
    case Task::Link: return "link";
    case Task::Node: return "node";
    case Task::Pair: return "pair";
  }
  return "?";
}

std::optional<Task> parse_task(std::string_view name) {
  for (Task t : {Task::Link, Task::Node, Task::Pair})
    if (task_name(t) == name) return t;
  return std::nullopt;
}

void RunConfig::validate() const {
  model.validate();
  train.validate();
  require(!seeds.empty(), "run config: seed list is empty");
  const bool labeled = data.source != "file" ? data.source == "communities" : !data.labels.empty();
  if (data.source != "grid" && data.source != "communities" && data.source != "file")
    throw ContractViolation("run config: unknown dataset source '" + data.source + "'");
  if (data.source == "file" && data.edges.empty()) throw ContractViolation("run config: file dataset needs an edge list");
  if (data.feature_kind == FeatureKind::File && data.features.empty())
    throw ContractViolation("run config: feature file requested but no path given");
  if (task != Task::Link && !labeled)
    throw ContractViolation("run config: " + std::string(task_name(task)) + " task needs node labels");
  if (task == Task::Node && model.variant == Variant::SmpIdentity)
    throw ContractViolation("run config: smp-identity has no output layer for node classification");
  if (stoch_mode == StochasticMode::Resampled && task == Task::Node && model.uses_stochastic())
    throw ContractViolation("run config: resampled signals only support pairwise tasks");
}

SeedPlan derive_seeds(std::uint64_t run_seed) {
  return {run_seed, derive_seed(run_seed, "data"), derive_seed(run_seed, "split"), derive_seed(run_seed, "init"),
          derive_seed(run_seed, "stochastic")};
}

Graph build_dataset(const DatasetSpec& data, std::uint64_t data_seed) {
  Graph g = [&] {
    if (data.source == "grid") return gen_grid(data.height, data.width);
    if (data.source == "communities") return gen_communities(data.num_comm, data.comm_size, data.rewire_frac, data_seed);
    if (data.source == "file") {
      std::optional<std::filesystem::path> feat, lab;
      if (data.feature_kind == FeatureKind::File) feat = data.features;
      if (!data.labels.empty()) lab = data.labels;
      return load_graph(data.edges, feat, lab);
    }
    throw ContractViolation("unknown dataset source '" + data.source + "'");
  }();
  switch (data.feature_kind) {
    case FeatureKind::Constant: return g.has_features() ? g : constant_features(g);
    case FeatureKind::Identity: return identity_features(g);
    case FeatureKind::File:
      if (!g.has_features()) throw DataError("dataset: feature file requested but none loaded");
      return g;
  }
  return g;
}

TaskSplit make_split(const RunConfig& cfg, const Graph& g, std::uint64_t split_seed) {
  switch (cfg.task) {
    case Task::Link: return split_edges(g, cfg.ratios, split_seed);
    case Task::Pair: return split_pairs(g, cfg.ratios, split_seed, cfg.max_pair_positives);
    case Task::Node: return split_nodes(g, cfg.train_per_class, cfg.val_per_class, split_seed);
  }
  throw ContractViolation("make_split: unknown task");
}

ModelSpec resolve_model(const RunConfig& cfg, const Graph& g) {
  ModelSpec m = cfg.model;
  m.feat_dim = g.features().cols();
  if (cfg.task == Task::Node) {
    if (!g.has_labels()) throw DataError("node classification needs labels");
    const auto& labels = g.labels();
    const int top = *std::max_element(labels.begin(), labels.end());
    m.out_dim = static_cast<std::size_t>(top) + 1;
  }
  m.validate();
  return m;
}

SeedRun run_seed(const RunConfig& cfg, std::uint64_t seed) {
  SeedRun r;
  r.seed = seed;
  r.seeds = derive_seeds(seed);
  const Graph g = build_dataset(cfg.data, r.seeds.data);
  r.model = resolve_model(cfg, g);
  r.split = make_split(cfg, g, r.seeds.split);
  TrainConfig tc = cfg.train;
  tc.seed = r.seeds.init;
  const StochasticConfig sc{r.model.stoch_dim, r.seeds.stochastic, cfg.stoch_mode};
  r.result = train(r.model, g, r.split, tc, sc);
  return r;
}

std::vector<double> test_metrics(const RunSummary& s) {
  std::vector<double> out;
  out.reserve(s.runs.size());
  for (const auto& r : s.runs) out.push_back(r.result.test_at_best);
  return out;
}

RunSummary run_experiment(const RunConfig& cfg) {
  cfg.validate();
  RunSummary s;
  if (cfg.parallel_seeds) {
    std::vector<std::future<SeedRun>> jobs;
    jobs.reserve(cfg.seeds.size());
    for (std::uint64_t seed : cfg.seeds) jobs.push_back(std::async(std::launch::async, run_seed, cfg, seed));
    for (auto& j : jobs) s.runs.push_back(j.get());
  } else {
    for (std::uint64_t seed : cfg.seeds) s.runs.push_back(run_seed(cfg, seed));
  }
  const auto m = test_metrics(s);
  double sum = 0.0;
  for (double x : m) sum += x;
  s.mean_test = sum / static_cast<double>(m.size());
  double ss = 0.0;
  for (double x : m) ss += (x - s.mean_test) * (x - s.mean_test);
  s.std_test = std::sqrt(ss / static_cast<double>(m.size()));
  return s;
}

}  // namespace smp
