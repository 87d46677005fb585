#include "smp/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <unordered_set>

#include "json.hpp"
#include "smp/error.hpp"
#include "smp/metrics.hpp"
#include "smp/random.hpp"

namespace smp {

namespace {

std::uint64_t pair_key(const Edge& e) { return (static_cast<std::uint64_t>(e.u) << 32) | e.v; }

struct Counts {
  std::size_t train, val, test;
};

Counts partition_counts(std::size_t total, const SplitRatios& r) {
  require(r.train >= 0 && r.val >= 0 && r.test >= 0, "split ratios must be non-negative");
  const double sum = r.train + r.val + r.test;
  require(std::abs(sum - 1.0) < 1e-9, "split ratios must sum to 1");
  const auto n = static_cast<double>(total);
  Counts c;
  c.train = static_cast<std::size_t>(std::llround(r.train * n));
  c.val = std::min(total - c.train, static_cast<std::size_t>(std::llround(r.val * n)));
  c.test = total - c.train - c.val;
  return c;
}

// Draws `count` distinct node pairs accepted by `ok`, uniformly. Switches to
// enumeration when the accepted pool is small relative to the request.
template <typename Accept>
std::vector<Edge> sample_pairs(std::size_t n, std::size_t count, std::size_t available, Accept ok, Rng& rng,
                               const std::string& what) {
  if (available < count)
    throw DataError(what + ": need " + std::to_string(count) + " pairs but only " + std::to_string(available) +
                    " are available");
  std::vector<Edge> out;
  out.reserve(count);
  if (count == 0) return out;
  if (2 * count > available) {
    std::vector<Edge> pool;
    pool.reserve(available);
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (ok(Edge{u, v})) pool.push_back({u, v});
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(count);
    return pool;
  }
  std::unordered_set<std::uint64_t> taken;
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  while (out.size() < count) {
    const NodeId a = pick(rng);
    const NodeId b = pick(rng);
    if (a == b) continue;
    const Edge e = make_edge(a, b);
    if (!ok(e) || !taken.insert(pair_key(e)).second) continue;
    out.push_back(e);
  }
  return out;
}

template <typename Split>
void assign_partitions(Split& s, const std::vector<Edge>& pos, const std::vector<Edge>& neg, const Counts& c) {
  auto slice = [](const std::vector<Edge>& v, std::size_t from, std::size_t len) {
    return std::vector<Edge>(v.begin() + static_cast<std::ptrdiff_t>(from),
                             v.begin() + static_cast<std::ptrdiff_t>(from + len));
  };
  s.train_pos = slice(pos, 0, c.train);
  s.val_pos = slice(pos, c.train, c.val);
  s.test_pos = slice(pos, c.train + c.val, c.test);
  s.train_neg = slice(neg, 0, c.train);
  s.val_neg = slice(neg, c.train, c.val);
  s.test_neg = slice(neg, c.train + c.val, c.test);
}

std::vector<double> pair_scores(const DenseMatrix& h, std::span<const Edge> pairs) {
  std::vector<double> s;
  s.reserve(pairs.size());
  for (const Edge& e : pairs) s.push_back(dot(h.row(e.u), h.row(e.v)));
  return s;
}

std::vector<int> argmax_rows(const DenseMatrix& h) {
  std::vector<int> pred(h.rows());
  for (std::size_t i = 0; i < h.rows(); ++i) {
    auto r = h.row(i);
    pred[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return pred;
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void TrainConfig::validate() const {
  require(lr > 0.0, "TrainConfig: lr must be positive");
  require(eval_every >= 1, "TrainConfig: eval_every must be at least 1");
  require(lr_decay_every >= 1, "TrainConfig: lr_decay_every must be at least 1");
  require(weight_decay >= 0.0, "TrainConfig: weight_decay must be non-negative");
}

double TrainConfig::effective_lr(std::size_t epoch) const {
  return lr * std::pow(lr_decay_factor, static_cast<double>(epoch / lr_decay_every));
}

LinkSplit split_edges(const Graph& g, const SplitRatios& ratios, std::uint64_t seed) {
  const std::size_t m = g.num_edges();
  if (m < 10) throw DataError("split_edges: need at least 10 edges, graph has " + std::to_string(m));
  Rng rng(derive_seed(seed, "split-edges"));
  std::vector<Edge> pos = g.edges();
  std::shuffle(pos.begin(), pos.end(), rng);
  const Counts c = partition_counts(m, ratios);

  const std::size_t n = g.num_nodes();
  const std::size_t all_pairs = n * (n - 1) / 2;
  auto not_edge = [&](const Edge& e) { return !g.has_edge(e.u, e.v); };
  std::vector<Edge> neg = sample_pairs(n, m, all_pairs - m, not_edge, rng, "split_edges negative sampling");

  LinkSplit s;
  assign_partitions(s, pos, neg, c);
  return s;
}

std::vector<Edge> same_label_pairs(std::span<const int> labels) {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j]) out.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
  return out;
}

PairSplit split_pairs(const Graph& g, const SplitRatios& ratios, std::uint64_t seed, std::size_t max_positive) {
  if (!g.has_labels()) throw DataError("split_pairs: graph has no labels");
  const auto& labels = g.labels();
  const std::unordered_set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw DataError("split_pairs: need at least two distinct labels");

  Rng rng(derive_seed(seed, "split-pairs"));
  std::vector<Edge> pos = same_label_pairs(labels);
  std::shuffle(pos.begin(), pos.end(), rng);
  if (max_positive > 0 && pos.size() > max_positive) pos.resize(max_positive);
  if (pos.empty()) throw DataError("split_pairs: no same-label pairs");

  const std::size_t n = g.num_nodes();
  const std::size_t all_pairs = n * (n - 1) / 2;
  const std::size_t same = same_label_pairs(labels).size();
  auto differ = [&](const Edge& e) { return labels[e.u] != labels[e.v]; };
  std::vector<Edge> neg = sample_pairs(n, pos.size(), all_pairs - same, differ, rng, "split_pairs negative sampling");

  PairSplit s;
  assign_partitions(s, pos, neg, partition_counts(pos.size(), ratios));
  return s;
}

NodeSplit split_nodes(const Graph& g, std::size_t train_per_class, std::size_t val_per_class, std::uint64_t seed) {
  if (!g.has_labels()) throw DataError("split_nodes: graph has no labels");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) members[g.labels()[i]].push_back(i);

  Rng rng(derive_seed(seed, "split-nodes"));
  NodeSplit s;
  for (auto& [label, nodes] : members) {
    if (nodes.size() < train_per_class + val_per_class + 1)
      throw DataError("split_nodes: class " + std::to_string(label) + " has " + std::to_string(nodes.size()) +
                      " members, needs at least " + std::to_string(train_per_class + val_per_class + 1));
    std::shuffle(nodes.begin(), nodes.end(), rng);
    s.train.insert(s.train.end(), nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(train_per_class));
    s.val.insert(s.val.end(), nodes.begin() + static_cast<std::ptrdiff_t>(train_per_class),
                 nodes.begin() + static_cast<std::ptrdiff_t>(train_per_class + val_per_class));
    s.test.insert(s.test.end(), nodes.begin() + static_cast<std::ptrdiff_t>(train_per_class + val_per_class),
                  nodes.end());
  }
  return s;
}

LossGrad link_loss_and_grad(const DenseMatrix& h, std::span<const Edge> pos, std::span<const Edge> neg) {
  const std::size_t total = pos.size() + neg.size();
  require(total > 0, "link_loss_and_grad: no pairs");
  LossGrad out{0.0, DenseMatrix(h.rows(), h.cols())};
  const double scale = 1.0 / static_cast<double>(total);
  auto accumulate = [&](std::span<const Edge> pairs, double target) {
    for (const Edge& e : pairs) {
      require(e.u < h.rows() && e.v < h.rows(), "link_loss_and_grad: pair index out of range");
      const double z = dot(h.row(e.u), h.row(e.v));
      out.loss += target > 0.5 ? softplus(-z) : softplus(z);
      const double dz = (sigmoid(z) - target) * scale;
      auto gu = out.grad_h.row(e.u);
      auto gv = out.grad_h.row(e.v);
      auto hu = h.row(e.u);
      auto hv = h.row(e.v);
      for (std::size_t k = 0; k < h.cols(); ++k) {
        gu[k] += dz * hv[k];
        gv[k] += dz * hu[k];
      }
    }
  };
  accumulate(pos, 1.0);
  accumulate(neg, 0.0);
  out.loss *= scale;
  return out;
}

LossGrad node_loss_and_grad(const DenseMatrix& h, std::span<const int> labels,
                            std::span<const std::size_t> train_idx) {
  require(!train_idx.empty(), "node_loss_and_grad: empty training set");
  require(labels.size() == h.rows(), "node_loss_and_grad: label count must equal rows of H");
  LossGrad out{0.0, DenseMatrix(h.rows(), h.cols())};
  const double scale = 1.0 / static_cast<double>(train_idx.size());
  for (std::size_t i : train_idx) {
    require(i < h.rows(), "node_loss_and_grad: node index out of range");
    const int y = labels[i];
    require(y >= 0 && static_cast<std::size_t>(y) < h.cols(), "node_loss_and_grad: label out of range");
    auto r = h.row(i);
    const double mx = *std::max_element(r.begin(), r.end());
    double denom = 0.0;
    for (double v : r) denom += std::exp(v - mx);
    const double log_denom = std::log(denom) + mx;
    out.loss += log_denom - r[static_cast<std::size_t>(y)];
    auto g = out.grad_h.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) g[k] += std::exp(r[k] - log_denom) * scale;
    g[static_cast<std::size_t>(y)] -= scale;
  }
  out.loss *= scale;
  return out;
}

AdamState make_adam_state(const ModelParams& params) {
  return {params.zeros_like(), params.zeros_like(), 0};
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, const TrainConfig& cfg,
               std::size_t epoch) {
  require(params.same_layout(grads) && params.same_layout(state.m) && params.same_layout(state.v),
          "adam_step: parameter, gradient and state layouts differ");
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  ++state.step;
  const double lr = cfg.effective_lr(epoch);
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& w = params.entries()[p].value.data();
    const auto& g = grads.entries()[p].value.data();
    auto& m = state.m.entries()[p].value.data();
    auto& v = state.v.entries()[p].value.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g[i] + cfg.weight_decay * w[i];
      m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
      v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      w[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
  if (cfg.precision == Precision::Single)
    for (auto& p : params.entries())
      for (double& x : p.value.data()) x = static_cast<double>(static_cast<float>(x));
}

Trainer::Trainer(ModelSpec spec, const Graph& g, TaskSplit split, TrainConfig train_cfg, StochasticConfig stoch_cfg)
    : spec_(spec), split_(std::move(split)), cfg_(train_cfg), stoch_(stoch_cfg) {
  spec_.validate();
  cfg_.validate();
  if (!g.has_features())
    throw DataError("train: graph has no features (attach constant or identity features first)");
  features_ = g.features();
  if (spec_.uses_stochastic()) require(stoch_.dim == spec_.stoch_dim, "train: stochastic dim must match spec");

  if (const auto* link = std::get_if<LinkSplit>(&split_); link && cfg_.propagate_on == PropagateOn::Train) {
    adj_ = normalize_adjacency(build_adjacency(Graph(g.num_nodes(), link->train_pos)));
  } else {
    adj_ = normalize_adjacency(build_adjacency(g));
  }
  if (std::holds_alternative<NodeSplit>(split_)) {
    if (!g.has_labels()) throw DataError("train: node classification needs labels");
    labels_ = g.labels();
  }
  params_ = init_params(spec_, cfg_.seed);
  if (cfg_.precision == Precision::Single)
    for (auto& p : params_.entries())
      for (double& x : p.value.data()) x = static_cast<double>(static_cast<float>(x));
  adam_ = make_adam_state(params_);
}

std::shared_ptr<const ModelInputs> Trainer::inputs_for(std::size_t epoch) {
  // Fixed signals are drawn once; resampled ones once per epoch.
  const bool fixed = !spec_.uses_stochastic() || stoch_.mode == StochasticMode::Fixed;
  if (cached_inputs_ && (fixed || cached_epoch_ == epoch)) return cached_inputs_;
  DenseMatrix e;
  if (spec_.uses_stochastic()) e = sample_stochastic(features_.rows(), stoch_, epoch);
  cached_inputs_ = prepare_inputs(spec_, adj_, features_, e);
  cached_epoch_ = epoch;
  return cached_inputs_;
}

LossGrad Trainer::task_loss(const DenseMatrix& h) const {
  return std::visit(
      [&](const auto& s) -> LossGrad {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, NodeSplit>) {
          return node_loss_and_grad(h, labels_, s.train);
        } else {
          return link_loss_and_grad(h, s.train_pos, s.train_neg);
        }
      },
      split_);
}

double Trainer::loss(std::size_t epoch) {
  const ForwardResult fr = forward(spec_, params_, adj_, inputs_for(epoch));
  return task_loss(fr.h).loss;
}

double Trainer::step(std::size_t epoch) {
  require(epoch >= 1, "Trainer::step: epochs are counted from 1");
  const ForwardResult fr = forward(spec_, params_, adj_, inputs_for(epoch));
  const LossGrad lg = task_loss(fr.h);
  if (!std::isfinite(lg.loss))
    throw DivergenceError(static_cast<int>(epoch), "training diverged at epoch " + std::to_string(epoch));
  if (!params_.empty()) {
    const ModelParams grads = backward(spec_, params_, adj_, fr.cache, lg.grad_h);
    adam_step(params_, grads, adam_, cfg_, epoch - 1);
  }
  return lg.loss;
}

Evaluation Trainer::evaluate(std::size_t epoch) {
  const ForwardResult fr = forward(spec_, params_, adj_, inputs_for(epoch));
  return std::visit(
      [&](const auto& s) -> Evaluation {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, NodeSplit>) {
          const std::vector<int> pred = argmax_rows(fr.h);
          return {accuracy(pred, labels_, s.val), accuracy(pred, labels_, s.test)};
        } else {
          return {auc(pair_scores(fr.h, s.val_pos), pair_scores(fr.h, s.val_neg)),
                  auc(pair_scores(fr.h, s.test_pos), pair_scores(fr.h, s.test_neg))};
        }
      },
      split_);
}

TrainResult train(const ModelSpec& spec, const Graph& g, const TaskSplit& split, const TrainConfig& train_cfg,
                  const StochasticConfig& stoch_cfg) {
  Trainer trainer(spec, g, split, train_cfg, stoch_cfg);
  TrainResult result;

  const Evaluation initial = trainer.evaluate(0);
  result.trace.push_back({0, trainer.loss(0), initial.val_metric, initial.test_metric});
  result.best_params = trainer.params();
  result.best_epoch = 0;
  result.best_val_metric = initial.val_metric;
  result.test_at_best = initial.test_metric;

  for (std::size_t epoch = 1; epoch <= train_cfg.epochs; ++epoch) {
    const double loss = trainer.step(epoch);
    result.epoch_losses.push_back(loss);
    if (epoch % train_cfg.eval_every != 0) continue;
    const Evaluation ev = trainer.evaluate(epoch);
    result.trace.push_back({epoch, loss, ev.val_metric, ev.test_metric});
    if (ev.val_metric > result.best_val_metric) {
      result.best_val_metric = ev.val_metric;
      result.test_at_best = ev.test_metric;
      result.best_epoch = epoch;
      result.best_params = trainer.params();
    }
  }
  return result;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "epoch,train_loss,val_metric,test_metric\n";
  for (const auto& r : trace) out << r.epoch << ',' << r.train_loss << ',' << r.val_metric << ',' << r.test_metric << '\n';
}

namespace {

nlohmann::json pairs_to_json(const std::vector<Edge>& pairs) {
  nlohmann::json a = nlohmann::json::array();
  for (const Edge& e : pairs) a.push_back({e.u, e.v});
  return a;
}

std::vector<Edge> pairs_from_json(const nlohmann::json& a) {
  std::vector<Edge> out;
  for (const auto& p : a) out.push_back({p.at(0).get<NodeId>(), p.at(1).get<NodeId>()});
  return out;
}

}  // namespace

std::string split_to_json(const TaskSplit& split) {
  nlohmann::json j;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, NodeSplit>) {
          j["kind"] = "node";
          j["train"] = s.train;
          j["val"] = s.val;
          j["test"] = s.test;
        } else {
          j["kind"] = std::is_same_v<S, LinkSplit> ? "link" : "pair";
          j["train_pos"] = pairs_to_json(s.train_pos);
          j["train_neg"] = pairs_to_json(s.train_neg);
          j["val_pos"] = pairs_to_json(s.val_pos);
          j["val_neg"] = pairs_to_json(s.val_neg);
          j["test_pos"] = pairs_to_json(s.test_pos);
          j["test_neg"] = pairs_to_json(s.test_neg);
        }
      },
      split);
  return j.dump();
}

TaskSplit split_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "node") {
      NodeSplit s;
      s.train = j.at("train").get<std::vector<std::size_t>>();
      s.val = j.at("val").get<std::vector<std::size_t>>();
      s.test = j.at("test").get<std::vector<std::size_t>>();
      return s;
    }
    auto fill = [&](PairwiseSplit& s) {
      s.train_pos = pairs_from_json(j.at("train_pos"));
      s.train_neg = pairs_from_json(j.at("train_neg"));
      s.val_pos = pairs_from_json(j.at("val_pos"));
      s.val_neg = pairs_from_json(j.at("val_neg"));
      s.test_pos = pairs_from_json(j.at("test_pos"));
      s.test_neg = pairs_from_json(j.at("test_neg"));
    };
    if (kind == "link") {
      LinkSplit s;
      fill(s);
      return s;
    }
    if (kind == "pair") {
      PairSplit s;
      fill(s);
      return s;
    }
    throw DataError("split JSON: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("split JSON: ") + e.what());
  }
}

}  // namespace smp
