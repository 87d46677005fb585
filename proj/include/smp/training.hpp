#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "smp/dense_matrix.hpp"
#include "smp/graph.hpp"
#include "smp/models.hpp"
#include "smp/stochastic.hpp"

namespace smp {

enum class Precision { Double, Single };
// Which edge set the normalized adjacency is built from during link-prediction
// training. Node and pair tasks always use the full graph.
enum class PropagateOn { Full, Train };

struct TrainConfig {
  double lr = 0.01;
  double lr_decay_factor = 0.1;
  std::size_t lr_decay_every = 200;
  double weight_decay = 5e-4;
  std::size_t epochs = 1000;  // 0 means evaluate the initial parameters only
  std::size_t eval_every = 5;
  std::uint64_t seed = 0;
  // Single rounds the parameters to float32 after every update.
  Precision precision = Precision::Double;
  PropagateOn propagate_on = PropagateOn::Full;

  void validate() const;
  // lr * decay^floor(epoch / decay_every), epoch counted from 0.
  double effective_lr(std::size_t epoch) const;
};

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

// Positive and negative node pairs for the three partitions. Pairs are
// stored as Edge (u < v).
struct PairwiseSplit {
  std::vector<Edge> train_pos, train_neg;
  std::vector<Edge> val_pos, val_neg;
  std::vector<Edge> test_pos, test_neg;

  friend bool operator==(const PairwiseSplit&, const PairwiseSplit&) = default;
};

// Positives are graph edges, negatives are non-edges. The training subgraph is
// made of train_pos.
struct LinkSplit : PairwiseSplit {};
// Positives share a label, negatives do not.
struct PairSplit : PairwiseSplit {};

struct NodeSplit {
  std::vector<std::size_t> train, val, test;

  friend bool operator==(const NodeSplit&, const NodeSplit&) = default;
};

using TaskSplit = std::variant<LinkSplit, PairSplit, NodeSplit>;

LinkSplit split_edges(const Graph& g, const SplitRatios& ratios, std::uint64_t seed);

// All unordered same-label pairs, lexicographic.
std::vector<Edge> same_label_pairs(std::span<const int> labels);

PairSplit split_pairs(const Graph& g, const SplitRatios& ratios, std::uint64_t seed, std::size_t max_positive);

NodeSplit split_nodes(const Graph& g, std::size_t train_per_class, std::size_t val_per_class, std::uint64_t seed);

struct LossGrad {
  double loss = 0.0;
  DenseMatrix grad_h;
};

// Mean binary cross-entropy of sigmoid(H_i . H_j): positives target 1,
// negatives target 0.
LossGrad link_loss_and_grad(const DenseMatrix& h, std::span<const Edge> pos, std::span<const Edge> neg);

// Mean softmax cross-entropy over train_idx; H has one column per class.
LossGrad node_loss_and_grad(const DenseMatrix& h, std::span<const int> labels,
                            std::span<const std::size_t> train_idx);

struct AdamState {
  ModelParams m;
  ModelParams v;
  std::size_t step = 0;
};

AdamState make_adam_state(const ModelParams& params);

// Adam (beta1 0.9, beta2 0.999, eps 1e-8, bias-corrected) with the L2 penalty
// folded into the gradient and the step-decayed learning rate.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, const TrainConfig& cfg,
               std::size_t epoch);

struct TraceRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_metric = 0.0;
  double test_metric = 0.0;
};

struct TrainResult {
  ModelParams best_params;
  std::size_t best_epoch = 0;
  double best_val_metric = 0.0;
  double test_at_best = 0.0;
  std::vector<TraceRow> trace;       // one row per evaluation, epoch 0 included
  std::vector<double> epoch_losses;  // training loss of epochs 1..N, pre-update
};

struct Evaluation {
  double val_metric = 0.0;
  double test_metric = 0.0;
};

// One training run, broken into steps so that timing code can drive it.
class Trainer {
 public:
  Trainer(ModelSpec spec, const Graph& g, TaskSplit split, TrainConfig train_cfg, StochasticConfig stoch_cfg);

  const ModelSpec& spec() const { return spec_; }
  const ModelParams& params() const { return params_; }
  const SparseMatrix& adjacency() const { return adj_; }

  // Training loss at the current parameters with the signals of `epoch`.
  double loss(std::size_t epoch);
  // One optimizer update (epoch counted from 1); returns the pre-update loss.
  double step(std::size_t epoch);
  // Task metric on validation and test with the signals of `epoch`.
  Evaluation evaluate(std::size_t epoch);

 private:
  std::shared_ptr<const ModelInputs> inputs_for(std::size_t epoch);
  LossGrad task_loss(const DenseMatrix& h) const;

  ModelSpec spec_;
  TaskSplit split_;
  TrainConfig cfg_;
  StochasticConfig stoch_;
  std::vector<int> labels_;
  DenseMatrix features_;
  SparseMatrix adj_;
  ModelParams params_;
  AdamState adam_;
  std::shared_ptr<const ModelInputs> cached_inputs_;
  std::size_t cached_epoch_ = 0;
};

// Full protocol: train for cfg.epochs, evaluate every eval_every epochs, keep
// the parameters with the best validation metric (earliest on ties).
TrainResult train(const ModelSpec& spec, const Graph& g, const TaskSplit& split, const TrainConfig& train_cfg,
                  const StochasticConfig& stoch_cfg);

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace);

std::string split_to_json(const TaskSplit& split);
TaskSplit split_from_json(const std::string& text);

}  // namespace smp
