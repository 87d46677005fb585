#include <gtest/gtest.h>

#include "smp/error.hpp"
#include "smp/experiment.hpp"

namespace smp {
namespace {

RunConfig quick(Task task, Variant v) {
  RunConfig c;
  c.task = task;
  c.model.variant = v;
  c.data.num_comm = 5;
  c.data.comm_size = 12;
  c.data.rewire_frac = 0.05;
  c.train.epochs = 20;
  c.seeds = {0, 1};
  return c;
}

TEST(Task, NamesRoundTrip) {
  for (Task t : {Task::Link, Task::Node, Task::Pair}) EXPECT_EQ(parse_task(task_name(t)), t);
  EXPECT_FALSE(parse_task("graph").has_value());
}

TEST(RunConfig, LabelRequirements) {
  RunConfig c = quick(Task::Node, Variant::SmpLinear);
  c.data.source = "grid";
  EXPECT_THROW(c.validate(), ContractViolation);
  c.data.source = "communities";
  EXPECT_NO_THROW(c.validate());
  c.model.variant = Variant::SmpIdentity;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = quick(Task::Link, Variant::SGC);
  c.seeds.clear();
  EXPECT_THROW(c.validate(), ContractViolation);
}

TEST(Seeds, ComponentsAreDistinctAndStable) {
  const SeedPlan a = derive_seeds(3);
  EXPECT_EQ(a.run, 3u);
  EXPECT_NE(a.data, a.split);
  EXPECT_NE(a.init, a.stochastic);
  EXPECT_EQ(a.split, derive_seeds(3).split);
}

TEST(ResolveModel, NodeTaskUsesClassCount) {
  const RunConfig c = quick(Task::Node, Variant::SmpLinear);
  const Graph g = build_dataset(c.data, 1);
  const ModelSpec m = resolve_model(c, g);
  EXPECT_EQ(m.out_dim, 5u);
  EXPECT_EQ(m.feat_dim, 1u);
}

TEST(Experiment, ReproducibleAndSummarized) {
  for (Task t : {Task::Link, Task::Node, Task::Pair}) {
    const RunConfig c = quick(t, Variant::SmpLinear);
    const RunSummary a = run_experiment(c);
    const RunSummary b = run_experiment(c);
    ASSERT_EQ(a.runs.size(), 2u);
    EXPECT_EQ(test_metrics(a), test_metrics(b));
    const auto m = test_metrics(a);
    EXPECT_NEAR(a.mean_test, (m[0] + m[1]) / 2.0, 1e-15);
    EXPECT_NEAR(a.std_test, std::abs(m[0] - m[1]) / 2.0, 1e-15);
  }
}

TEST(Experiment, ParallelSeedsMatchSequential) {
  RunConfig c = quick(Task::Link, Variant::SmpLinear);
  const RunSummary seq = run_experiment(c);
  c.parallel_seeds = true;
  EXPECT_EQ(test_metrics(run_experiment(c)), test_metrics(seq));
}

TEST(Experiment, SingleSeedHasZeroStd) {
  RunConfig c = quick(Task::Link, Variant::SGC);
  c.seeds = {4};
  EXPECT_EQ(run_experiment(c).std_test, 0.0);
}

}  // namespace
}  // namespace smp
