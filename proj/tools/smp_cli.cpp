// smp: generate synthetic graphs, train models over seeds, run the theory
// verification suite, and benchmark per-epoch cost.
//
// Exit codes: 0 success, 1 usage error, 2 runtime or data error,
// 3 verification failure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smp/bench.hpp"
#include "smp/checkpoint.hpp"
#include "smp/datasets.hpp"
#include "smp/error.hpp"
#include "smp/experiment.hpp"
#include "smp/graph.hpp"
#include "smp/stochastic.hpp"
#include "smp/theory.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerify = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat key=value file. Keys are long option names without the dashes.
std::vector<std::string> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  std::vector<std::string> args;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw UsageError(path.string() + ":" + std::to_string(lineno) + ": empty key");
    args.push_back("--" + key + "=" + trim(t.substr(eq + 1)));
  }
  return args;
}

// Moves `--config FILE` out of the argument list and splices the file's
// entries in front of the remaining flags, so flags given on the command line
// win over the file (every option keeps its last value).
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  if (args.size() < 2) return args;
  std::vector<std::string> rest;
  std::vector<std::string> injected;
  for (std::size_t i = 2; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      injected = read_config(args[++i]);
    } else if (a.rfind("--config=", 0) == 0) {
      injected = read_config(a.substr(9));
    } else {
      rest.push_back(a);
    }
  }
  std::vector<std::string> out{args[0], args[1]};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok[0] == '-') throw UsageError("bad seed '" + tok + "'");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw UsageError("seed list is empty");
  return seeds;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!trim(tok).empty()) out.push_back(trim(tok));
  return out;
}

std::vector<std::string> checked_list(const std::string& text, const std::vector<std::string>& allowed,
                                      const std::string& what) {
  std::vector<std::string> items = split_list(text);
  for (const auto& x : items)
    if (std::find(allowed.begin(), allowed.end(), x) == allowed.end()) throw UsageError("unknown " + what + " '" + x + "'");
  return items;
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) s += (i ? "," : "") + std::to_string(seeds[i]);
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw smp::DataError("cannot write " + path.string());
  out << text;
}

// Keeps the last value when an option is given more than once.
template <typename T>
CLI::Option* last_wins(CLI::App* app, const std::string& name, T& target, const std::string& help) {
  return app->add_option(name, target, help)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->capture_default_str();
}

const std::map<std::string, smp::Variant>& variant_map() {
  static const std::map<std::string, smp::Variant> m = [] {
    std::map<std::string, smp::Variant> out;
    for (smp::Variant v : smp::kAllVariants) out.emplace(std::string(smp::variant_name(v)), v);
    return out;
  }();
  return m;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string kind;
  std::size_t height = 20;
  std::size_t width = 20;
  std::size_t num_comm = 20;
  std::size_t comm_size = 20;
  double rewire = 0.01;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string name;
  bool force = false;
};

void setup_gen(CLI::App& app, GenArgs& a) {
  auto* gen = app.add_subcommand("gen", "Write a synthetic graph as an edge list (plus labels)");
  gen->add_option("kind", a.kind, "grid or communities")->required()->check(CLI::IsMember({"grid", "communities"}));
  last_wins(gen, "--h", a.height, "grid height");
  last_wins(gen, "--w", a.width, "grid width");
  last_wins(gen, "--num-comm", a.num_comm, "number of communities");
  last_wins(gen, "--comm-size", a.comm_size, "nodes per community");
  last_wins(gen, "--rewire", a.rewire, "fraction of edges rewired");
  last_wins(gen, "--seed", a.seed, "generator seed");
  last_wins(gen, "--out", a.out, "output directory (must exist)");
  last_wins(gen, "--name", a.name, "file stem (default: kind)");
  gen->add_flag("--force", a.force, "overwrite existing files");
  gen->add_option("--config", "key=value file with defaults for these flags");
}

int run_gen(const GenArgs& a) {
  const fs::path dir(a.out);
  if (!fs::is_directory(dir)) throw smp::DataError("output directory does not exist: " + dir.string());
  const smp::Graph g = a.kind == "grid" ? smp::gen_grid(a.height, a.width)
                                        : smp::gen_communities(a.num_comm, a.comm_size, a.rewire, a.seed);
  const std::string stem = a.name.empty() ? a.kind : a.name;
  const fs::path edges = dir / (stem + ".edges");
  const fs::path labels = dir / (stem + ".labels");
  for (const fs::path& p : {edges, labels})
    if (!a.force && fs::exists(p)) throw smp::DataError(p.string() + " exists (use --force to overwrite)");
  smp::write_edge_list(edges, g);
  if (g.has_labels()) smp::write_labels(labels, g);
  std::cout << "wrote " << edges.string() << " (" << g.num_nodes() << " nodes, " << g.num_edges() << " edges)";
  if (g.has_labels()) std::cout << " and " << labels.string();
  std::cout << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string task = "link";
  std::string variant = "smp-linear";
  std::string dataset = "communities";
  std::size_t height = 20;
  std::size_t width = 20;
  std::size_t num_comm = 20;
  std::size_t comm_size = 20;
  double rewire = 0.01;
  std::string edges;
  std::string labels;
  std::string features;
  std::string feature_kind = "constant";
  std::size_t k = 2;
  std::size_t stoch_dim = 32;
  std::size_t hidden = 32;
  std::size_t out_dim = 32;
  double lr = 0.01;
  double lr_decay = 0.1;
  std::size_t lr_decay_every = 200;
  double weight_decay = 5e-4;
  std::size_t epochs = 1000;
  std::size_t eval_every = 5;
  std::string precision = "double";
  std::string propagate_on = "full";
  std::string stoch_mode = "fixed";
  double train_ratio = 0.8;
  double val_ratio = 0.1;
  std::size_t train_per_class = 5;
  std::size_t val_per_class = 5;
  std::size_t max_pair_positives = 0;
  std::uint64_t seed = 0;
  std::size_t num_seeds = 10;
  std::string seeds;
  bool parallel = false;
  std::string out = "smp-run";
};

void setup_train(CLI::App& app, TrainArgs& a) {
  auto* t = app.add_subcommand("train", "Train a model over a list of seeds and report test metrics");
  std::vector<std::string> variants;
  for (const auto& [name, v] : variant_map()) variants.push_back(name);
  last_wins(t, "--task", a.task, "link, node or pair")->check(CLI::IsMember({"link", "node", "pair"}));
  last_wins(t, "--variant", a.variant, "model variant")->check(CLI::IsMember(variants));
  last_wins(t, "--dataset", a.dataset, "grid, communities or file")
      ->check(CLI::IsMember({"grid", "communities", "file"}));
  last_wins(t, "--h", a.height, "grid height");
  last_wins(t, "--w", a.width, "grid width");
  last_wins(t, "--num-comm", a.num_comm, "number of communities");
  last_wins(t, "--comm-size", a.comm_size, "nodes per community");
  last_wins(t, "--rewire", a.rewire, "fraction of edges rewired");
  last_wins(t, "--edges", a.edges, "edge list (dataset=file)");
  last_wins(t, "--labels", a.labels, "label file (dataset=file)");
  last_wins(t, "--features", a.features, "feature CSV (feature-kind=file)");
  last_wins(t, "--feature-kind", a.feature_kind, "constant, identity or file")
      ->check(CLI::IsMember({"constant", "identity", "file"}));
  last_wins(t, "--k", a.k, "propagation steps / GCN layers");
  last_wins(t, "--stoch-dim", a.stoch_dim, "columns of the stochastic signal");
  last_wins(t, "--hidden", a.hidden, "hidden width");
  last_wins(t, "--out-dim", a.out_dim, "representation width (node task: class count)");
  last_wins(t, "--lr", a.lr, "initial learning rate");
  last_wins(t, "--lr-decay", a.lr_decay, "learning-rate decay factor");
  last_wins(t, "--lr-decay-every", a.lr_decay_every, "epochs between decays");
  last_wins(t, "--weight-decay", a.weight_decay, "L2 penalty");
  last_wins(t, "--epochs", a.epochs, "training epochs (0 evaluates the initial model)");
  last_wins(t, "--eval-every", a.eval_every, "epochs between evaluations");
  last_wins(t, "--precision", a.precision, "double or single")->check(CLI::IsMember({"double", "single"}));
  last_wins(t, "--propagate-on", a.propagate_on, "full or train (link task)")
      ->check(CLI::IsMember({"full", "train"}));
  last_wins(t, "--stoch-mode", a.stoch_mode, "fixed or resampled")->check(CLI::IsMember({"fixed", "resampled"}));
  last_wins(t, "--train-ratio", a.train_ratio, "pair fraction used for training");
  last_wins(t, "--val-ratio", a.val_ratio, "pair fraction used for validation");
  last_wins(t, "--train-per-class", a.train_per_class, "node task: training nodes per class");
  last_wins(t, "--val-per-class", a.val_per_class, "node task: validation nodes per class");
  last_wins(t, "--max-pair-positives", a.max_pair_positives, "pair task: cap on positives (0 = all)");
  last_wins(t, "--seed", a.seed, "first run seed");
  last_wins(t, "--num-seeds", a.num_seeds, "number of consecutive seeds starting at --seed");
  last_wins(t, "--seeds", a.seeds, "explicit comma-separated seed list (overrides --seed/--num-seeds)");
  t->add_flag("--parallel", a.parallel, "run seeds concurrently");
  last_wins(t, "--out", a.out, "output directory (created if missing)");
  t->add_option("--config", "key=value file with defaults for these flags");
}

smp::RunConfig to_run_config(const TrainArgs& a) {
  smp::RunConfig c;
  c.task = *smp::parse_task(a.task);
  c.model.variant = variant_map().at(a.variant);
  c.model.k_steps = a.k;
  c.model.stoch_dim = a.stoch_dim;
  c.model.hidden_dim = a.hidden;
  c.model.out_dim = a.out_dim;
  c.data.source = a.dataset;
  c.data.height = a.height;
  c.data.width = a.width;
  c.data.num_comm = a.num_comm;
  c.data.comm_size = a.comm_size;
  c.data.rewire_frac = a.rewire;
  c.data.edges = a.edges;
  c.data.labels = a.labels;
  c.data.features = a.features;
  c.data.feature_kind = a.feature_kind == "identity" ? smp::FeatureKind::Identity
                        : a.feature_kind == "file"   ? smp::FeatureKind::File
                                                     : smp::FeatureKind::Constant;
  c.train.lr = a.lr;
  c.train.lr_decay_factor = a.lr_decay;
  c.train.lr_decay_every = a.lr_decay_every;
  c.train.weight_decay = a.weight_decay;
  c.train.epochs = a.epochs;
  c.train.eval_every = a.eval_every;
  c.train.precision = a.precision == "single" ? smp::Precision::Single : smp::Precision::Double;
  c.train.propagate_on = a.propagate_on == "train" ? smp::PropagateOn::Train : smp::PropagateOn::Full;
  c.stoch_mode = a.stoch_mode == "resampled" ? smp::StochasticMode::Resampled : smp::StochasticMode::Fixed;
  if (a.train_ratio <= 0.0 || a.val_ratio < 0.0 || a.train_ratio + a.val_ratio >= 1.0)
    throw UsageError("train-ratio and val-ratio must be positive and sum below 1");
  c.ratios = {a.train_ratio, a.val_ratio, 1.0 - a.train_ratio - a.val_ratio};
  c.train_per_class = a.train_per_class;
  c.val_per_class = a.val_per_class;
  c.max_pair_positives = a.max_pair_positives;
  if (!a.seeds.empty()) {
    c.seeds = parse_seed_list(a.seeds);
  } else {
    if (a.num_seeds == 0) throw UsageError("num-seeds must be positive");
    c.seeds.clear();
    for (std::size_t i = 0; i < a.num_seeds; ++i) c.seeds.push_back(a.seed + i);
  }
  c.parallel_seeds = a.parallel;
  return c;
}

// Resolved configuration as flat key=value pairs; feeding them back through
// --config reproduces the run.
std::vector<std::pair<std::string, std::string>> config_echo(const TrainArgs& a, const smp::RunConfig& c) {
  auto num = [](double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
  };
  std::vector<std::pair<std::string, std::string>> kv = {
      {"task", a.task},
      {"variant", a.variant},
      {"dataset", a.dataset},
      {"h", std::to_string(a.height)},
      {"w", std::to_string(a.width)},
      {"num-comm", std::to_string(a.num_comm)},
      {"comm-size", std::to_string(a.comm_size)},
      {"rewire", num(a.rewire)},
      {"feature-kind", a.feature_kind},
      {"k", std::to_string(a.k)},
      {"stoch-dim", std::to_string(a.stoch_dim)},
      {"hidden", std::to_string(a.hidden)},
      {"out-dim", std::to_string(a.out_dim)},
      {"lr", num(a.lr)},
      {"lr-decay", num(a.lr_decay)},
      {"lr-decay-every", std::to_string(a.lr_decay_every)},
      {"weight-decay", num(a.weight_decay)},
      {"epochs", std::to_string(a.epochs)},
      {"eval-every", std::to_string(a.eval_every)},
      {"precision", a.precision},
      {"propagate-on", a.propagate_on},
      {"stoch-mode", a.stoch_mode},
      {"train-ratio", num(a.train_ratio)},
      {"val-ratio", num(a.val_ratio)},
      {"train-per-class", std::to_string(a.train_per_class)},
      {"val-per-class", std::to_string(a.val_per_class)},
      {"max-pair-positives", std::to_string(a.max_pair_positives)},
      {"seeds", join_seeds(c.seeds)},
  };
  if (!a.edges.empty()) kv.emplace_back("edges", fs::absolute(a.edges).string());
  if (!a.labels.empty()) kv.emplace_back("labels", fs::absolute(a.labels).string());
  if (!a.features.empty()) kv.emplace_back("features", fs::absolute(a.features).string());
  return kv;
}

int run_train(const TrainArgs& a) {
  const smp::RunConfig cfg = to_run_config(a);
  try {
    cfg.validate();
  } catch (const smp::ContractViolation& e) {
    throw UsageError(e.what());
  }
  const fs::path dir(a.out);
  fs::create_directories(dir);

  smp::RunSummary summary;
  try {
    summary = smp::run_experiment(cfg);
  } catch (const smp::DivergenceError& e) {
    throw smp::DataError(std::string(smp::task_name(cfg.task)) + "/" + a.variant + ": " + e.what());
  } catch (const smp::DataError& e) {
    throw smp::DataError(std::string(smp::task_name(cfg.task)) + "/" + a.variant + " on " + a.dataset + ": " +
                         e.what());
  }

  const auto echo = config_echo(a, cfg);
  json config = json::object();
  std::string cfg_text;
  for (const auto& [k, v] : echo) {
    config[k] = v;
    cfg_text += k + "=" + v + "\n";
  }
  write_text(dir / "config.cfg", cfg_text);

  json per_seed = json::array();
  for (const auto& r : summary.runs) {
    const std::string tag = "seed" + std::to_string(r.seed);
    smp::write_trace_csv(dir / ("trace_" + tag + ".csv"), r.result.trace);
    smp::save_checkpoint(dir / ("checkpoint_" + tag + ".json"), r.model, r.result.best_params);
    write_text(dir / ("split_" + tag + ".json"), smp::split_to_json(r.split));
    per_seed.push_back({{"seed", r.seed},
                        {"best_epoch", r.result.best_epoch},
                        {"val", r.result.best_val_metric},
                        {"test", r.result.test_at_best}});
  }

  const std::string metric = cfg.task == smp::Task::Node ? "accuracy" : "auc";
  const json report = {{"command", "train"},
                       {"metric", metric},
                       {"config", config},
                       {"seeds", cfg.seeds},
                       {"per_seed", per_seed},
                       {"mean", summary.mean_test},
                       {"std", summary.std_test}};
  write_text(dir / "metrics.json", report.dump(2) + "\n");
  std::printf("%s %s on %s: test %s %.4f +- %.4f over %zu seeds (outputs in %s)\n", a.task.c_str(),
              a.variant.c_str(), a.dataset.c_str(), metric.c_str(), summary.mean_test, summary.std_test,
              summary.runs.size(), dir.string().c_str());
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string graph = "grid";
  std::string edges;
  std::string suites;
  bool all = false;
  std::string ks = "1,2";
  double eps = 0.25;
  double delta = 0.1;
  std::size_t jl_trials = 50;
  std::size_t collision_trials = 100;
  std::size_t perms = 20;
  std::size_t stoch_dim = 32;
  std::uint64_t seed = 0;
  std::string out;
  bool force_bug = false;
};

const std::vector<std::string> kSuites = {"adjacency", "chi", "equivariance", "collision", "jl"};

void setup_verify(CLI::App& app, VerifyArgs& a) {
  auto* v = app.add_subcommand("verify", "Run the theory verification suites on one graph");
  last_wins(v, "--graph", a.graph, "grid, communities, triangle, path or file")
      ->check(CLI::IsMember({"grid", "communities", "triangle", "path", "file"}));
  last_wins(v, "--edges", a.edges, "edge list (graph=file)");
  last_wins(v, "--suites", a.suites, "comma-separated suites; default all");
  v->add_flag("--all", a.all, "run every suite");
  last_wins(v, "--k", a.ks, "comma-separated propagation depths for the JL suite");
  last_wins(v, "--eps", a.eps, "JL tolerance");
  last_wins(v, "--delta", a.delta, "JL failure probability");
  last_wins(v, "--jl-trials", a.jl_trials, "JL seeds");
  last_wins(v, "--collision-trials", a.collision_trials, "automorphic-collision seeds");
  last_wins(v, "--perms", a.perms, "random permutations for equivariance");
  last_wins(v, "--stoch-dim", a.stoch_dim, "stochastic dimension for the collision suite");
  last_wins(v, "--seed", a.seed, "base seed");
  last_wins(v, "--out", a.out, "write the JSON report here instead of stdout");
  v->add_flag("--force-bug", a.force_bug, "test hook: perturb the normalized adjacency asymmetrically");
  v->add_option("--config", "key=value file with defaults for these flags");
}

smp::Graph verify_graph(const VerifyArgs& a) {
  if (a.graph == "grid") return smp::gen_grid();
  if (a.graph == "communities") return smp::gen_communities(20, 20, 0.01, a.seed);
  if (a.graph == "triangle") return smp::Graph(3, {{0, 1}, {1, 2}, {0, 2}});
  if (a.graph == "path") return smp::Graph(2, {{0, 1}});
  if (a.edges.empty()) throw UsageError("graph=file needs --edges");
  return smp::load_graph(a.edges);
}

// Scales one off-diagonal entry so that A_ij != A_ji.
smp::SparseMatrix break_symmetry(const smp::SparseMatrix& a) {
  std::vector<double> values = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t p = a.row_ptr()[r]; p < a.row_ptr()[r + 1]; ++p)
      if (a.col_idx()[p] != r) {
        values[p] *= 1.5;
        return smp::SparseMatrix(a.rows(), a.cols(), a.row_ptr(), a.col_idx(), std::move(values));
      }
  throw smp::DataError("--force-bug needs a graph with at least one edge");
}

int run_verify(const VerifyArgs& a) {
  std::vector<std::string> suites = checked_list(a.suites, kSuites, "suite");
  if (a.all || suites.empty()) suites = kSuites;
  std::vector<std::size_t> ks;
  for (const auto& tok : split_list(a.ks)) {
    std::size_t used = 0;
    std::size_t k = 0;
    try {
      k = std::stoul(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok[0] == '-') throw UsageError("bad K '" + tok + "'");
    ks.push_back(k);
  }
  auto wants = [&](const std::string& s) { return std::find(suites.begin(), suites.end(), s) != suites.end(); };

  const smp::Graph g = verify_graph(a);
  const smp::Graph gf = smp::constant_features(g);
  smp::SparseMatrix adj = smp::normalize_adjacency(smp::build_adjacency(g));
  if (a.force_bug) adj = break_symmetry(adj);

  json report = {{"command", "verify"},
                 {"graph", a.graph},
                 {"nodes", g.num_nodes()},
                 {"edges", g.num_edges()},
                 {"seed", a.seed},
                 {"force_bug", a.force_bug}};
  json results = json::object();
  bool ok = true;

  if (wants("adjacency")) {
    const double asym = smp::max_asymmetry(adj);
    const bool pass = asym == 0.0;
    results["adjacency"] = {{"max_asymmetry", asym}, {"pass", pass}};
    ok = ok && pass;
  }
  if (wants("chi")) {
    // The sampler check does not depend on the graph; use a large row pool.
    const smp::DenseMatrix e = smp::sample_stochastic(10000, {a.stoch_dim, a.seed, smp::StochasticMode::Fixed}, 0);
    const smp::ChiDistanceStats s = smp::chi_distance_check(e, 2000, a.seed);
    const bool pass = std::abs(s.sample_mean - s.analytic_mean) <= 4.0 * s.standard_error;
    results["chi"] = {{"dim", s.dim},
                      {"rows", e.rows()},
                      {"pairs", s.pair_count},
                      {"sample_mean", s.sample_mean},
                      {"analytic_mean", s.analytic_mean},
                      {"standard_error", s.standard_error},
                      {"pass", pass}};
    ok = ok && pass;
  }
  if (wants("equivariance")) {
    json eq = json::object();
    for (smp::Variant v : {smp::Variant::SGC, smp::Variant::GCN}) {
      const double dev = smp::equivariance_sweep(gf, v, a.perms, a.seed);
      const bool pass = dev <= 1e-9;
      eq[std::string(smp::variant_name(v))] = {{"max_deviation", dev}, {"permutations", a.perms}, {"pass", pass}};
      ok = ok && pass;
    }
    results["equivariance"] = eq;
  }
  if (wants("collision")) {
    const smp::CollisionSweep s = smp::collision_sweep(gf, a.collision_trials, a.stoch_dim, 0.1, a.seed);
    const bool pass = s.max_equivariant_gap <= 1e-9 && s.smp_separated * 100 >= 99 * s.trials;
    results["collision"] = {{"trials", s.trials},
                            {"max_equivariant_gap", s.max_equivariant_gap},
                            {"min_smp_gap", s.min_smp_gap},
                            {"smp_separated", s.smp_separated},
                            {"threshold", s.threshold},
                            {"pass", pass}};
    ok = ok && pass;
  }
  if (wants("jl")) {
    json jl = json::array();
    for (std::size_t k : ks) {
      const smp::JlSweep s = smp::jl_sweep(adj, k, a.eps, a.delta, a.jl_trials, a.seed);
      const bool pass = s.improves() && s.meets_bound();
      jl.push_back({{"k", k},
                    {"eps", s.eps},
                    {"delta", s.delta},
                    {"max_row_norm", s.max_row_norm},
                    {"bound_applicable", s.bound_applicable},
                    {"d0", s.bound_applicable ? json(s.d0) : json(nullptr)},
                    {"bound_dim", s.bound_dim},
                    {"median_error_d" + std::to_string(s.small_dim), s.median_small},
                    {"median_error_d" + std::to_string(s.large_dim), s.median_large},
                    {"success_at_bound", s.success_at_bound},
                    {"trials", s.trials},
                    {"pass", pass}});
      ok = ok && pass;
    }
    results["jl"] = jl;
  }

  report["results"] = results;
  report["pass"] = ok;
  const std::string text = report.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
  if (!ok) std::cerr << "verification failed\n";
  return ok ? kExitOk : kExitVerify;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string graph = "grid";
  std::string task = "link";
  std::string variants = "sgc,smp-linear";
  std::size_t reps = 3000;
  std::size_t warmup = 10;
  std::uint64_t seed = 0;
  std::string out;
};

void setup_bench(CLI::App& app, BenchArgs& a) {
  auto* b = app.add_subcommand("bench", "Time one training epoch plus evaluation per variant");
  last_wins(b, "--graph", a.graph, "grid or communities")->check(CLI::IsMember({"grid", "communities"}));
  last_wins(b, "--task", a.task, "link, node or pair")->check(CLI::IsMember({"link", "node", "pair"}));
  last_wins(b, "--variants", a.variants, "comma-separated variants");
  last_wins(b, "--reps", a.reps, "timed epochs per variant");
  last_wins(b, "--warmup", a.warmup, "untimed epochs before timing");
  last_wins(b, "--seed", a.seed, "run seed");
  last_wins(b, "--out", a.out, "write the CSV here instead of stdout");
  b->add_option("--config", "key=value file with defaults for these flags");
}

int run_bench(const BenchArgs& a) {
  if (a.reps == 0) throw UsageError("reps must be positive");
  smp::RunConfig cfg;
  cfg.task = *smp::parse_task(a.task);
  cfg.data.source = a.graph;
  const smp::SeedPlan seeds = smp::derive_seeds(a.seed);
  const smp::Graph g = smp::build_dataset(cfg.data, seeds.data);
  const smp::TaskSplit split = smp::make_split(cfg, g, seeds.split);

  std::vector<std::string> known;
  for (const auto& [name, v] : variant_map()) known.push_back(name);
  const std::vector<std::string> variants = checked_list(a.variants, known, "variant");
  if (variants.empty()) throw UsageError("no variants given");
  std::vector<std::pair<std::string, smp::BenchResult>> rows;
  for (const std::string& name : variants) {
    cfg.model.variant = variant_map().at(name);
    try {
      cfg.validate();
    } catch (const smp::ContractViolation& e) {
      throw UsageError(e.what());
    }
    const smp::ModelSpec spec = smp::resolve_model(cfg, g);
    smp::TrainConfig tc;
    tc.seed = seeds.init;
    const smp::StochasticConfig sc{spec.stoch_dim, seeds.stochastic, cfg.stoch_mode};
    rows.emplace_back(name, smp::bench_epoch(spec, g, split, a.reps, tc, sc, a.warmup));
  }

  double sgc_ms = 0.0;
  for (const auto& [name, r] : rows)
    if (name == "sgc") sgc_ms = r.mean_ms;

  std::ostringstream csv;
  csv << "graph,task,variant,reps,mean_ms,std_ms,cv,ratio_to_sgc\n";
  csv.precision(6);
  for (const auto& [name, r] : rows) {
    csv << a.graph << ',' << a.task << ',' << name << ',' << r.reps << ',' << r.mean_ms << ',' << r.stddev_ms << ','
        << r.cv << ',';
    if (sgc_ms > 0.0) csv << r.mean_ms / sgc_ms;
    csv << '\n';
  }
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text(a.out, csv.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smp: stochastic message passing toolkit"};
  app.require_subcommand(1);
  // -h is taken by the grid height, so help is --help only.
  app.set_help_flag("--help", "Print this help message and exit");
  GenArgs gen;
  TrainArgs train;
  VerifyArgs verify;
  BenchArgs bench;
  setup_gen(app, gen);
  setup_train(app, train);
  setup_verify(app, verify);
  setup_bench(app, bench);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::vector<char*> ptrs;
    for (auto& s : args) ptrs.push_back(s.data());
    try {
      app.parse(static_cast<int>(ptrs.size()), ptrs.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? kExitOk : kExitUsage;
    }
    if (app.got_subcommand("gen")) return run_gen(gen);
    if (app.got_subcommand("train")) return run_train(train);
    if (app.got_subcommand("verify")) return run_verify(verify);
    if (app.got_subcommand("bench")) return run_bench(bench);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const smp::ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
