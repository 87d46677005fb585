#include "smp/bench.hpp"

#include <chrono>
#include <cmath>

#include "smp/error.hpp"

namespace smp {

BenchResult bench_epoch(const ModelSpec& spec, const Graph& g, const TaskSplit& split, std::size_t reps,
                        const TrainConfig& train_cfg, const StochasticConfig& stoch_cfg, std::size_t warmup) {
  require(reps > 0, "bench_epoch: reps must be positive");
  Trainer trainer(spec, g, split, train_cfg, stoch_cfg);

  std::size_t epoch = 1;
  for (std::size_t i = 0; i < warmup; ++i, ++epoch) {
    trainer.step(epoch);
    trainer.evaluate(epoch);
  }

  BenchResult r;
  r.reps = reps;
  r.epoch_ms.reserve(reps);
  using clock = std::chrono::steady_clock;
  for (std::size_t i = 0; i < reps; ++i, ++epoch) {
    const auto t0 = clock::now();
    trainer.step(epoch);
    trainer.evaluate(epoch);
    const auto t1 = clock::now();
    r.epoch_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }

  double sum = 0.0;
  for (double t : r.epoch_ms) sum += t;
  r.mean_ms = sum / static_cast<double>(reps);
  double ss = 0.0;
  for (double t : r.epoch_ms) ss += (t - r.mean_ms) * (t - r.mean_ms);
  r.stddev_ms = std::sqrt(ss / static_cast<double>(reps));
  r.cv = r.mean_ms > 0.0 ? r.stddev_ms / r.mean_ms : 0.0;
  return r;
}

}  // namespace smp
