#pragma once

#include <cstddef>
#include <vector>

#include "smp/graph.hpp"
#include "smp/models.hpp"
#include "smp/training.hpp"

namespace smp {

struct BenchResult {
  std::size_t reps = 0;
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
  // stddev / mean
  double cv = 0.0;
  std::vector<double> epoch_ms;
};

// Wall-clock time of one training epoch followed by evaluation, averaged over
// `reps` epochs after `warmup` untimed ones. Throws ContractViolation on reps == 0.
BenchResult bench_epoch(const ModelSpec& spec, const Graph& g, const TaskSplit& split, std::size_t reps,
                        const TrainConfig& train_cfg = {}, const StochasticConfig& stoch_cfg = {},
                        std::size_t warmup = 10);

}  // namespace smp
