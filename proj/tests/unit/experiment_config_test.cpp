#include "othpo/experiment_config.hpp"

#include <filesystem>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "othpo/errors.hpp"

namespace othpo {
namespace {

const std::filesystem::path kFixtures = OTHPO_FIXTURE_DIR;

TEST(SeedRangeTest, Forms) {
  EXPECT_EQ(parse_seed_range("0..3"), (std::vector<std::uint64_t>{0, 1, 2, 3}));
  EXPECT_EQ(parse_seed_range("5"), (std::vector<std::uint64_t>{5}));
  EXPECT_EQ(parse_seed_range("4,1, 9"), (std::vector<std::uint64_t>{4, 1, 9}));
  EXPECT_EQ(parse_seed_range("0..1,7"), (std::vector<std::uint64_t>{0, 1, 7}));
  EXPECT_EQ(parse_seed_range("2..2"), (std::vector<std::uint64_t>{2}));
  EXPECT_EQ(parse_seed_range("0..49").size(), 50u);
}

TEST(SeedRangeTest, Errors) {
  EXPECT_THROW(parse_seed_range(""), ValidationError);
  EXPECT_THROW(parse_seed_range(","), ValidationError);
  EXPECT_THROW(parse_seed_range("3..1"), ValidationError);
  EXPECT_THROW(parse_seed_range("a"), ValidationError);
  EXPECT_THROW(parse_seed_range("-1"), ValidationError);
  EXPECT_THROW(parse_seed_range("1..x"), ValidationError);
}

TEST(MethodListTest, ParsesNamesInOrder) {
  EXPECT_EQ(parse_method_list("SimpleOrdered, RandomSearch"),
            (std::vector<Method>{Method::kSimpleOrdered, Method::kRandomSearch}));
}

TEST(MethodListTest, UnknownNameListsValidOnes) {
  try {
    parse_method_list("BO,Hyperband");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("Hyperband"), std::string::npos);
    EXPECT_NE(msg.find("SimplePreviousNoBO"), std::string::npos);
  }
  EXPECT_THROW(parse_method_list(""), ValidationError);
}

TEST(BenchmarkFactoryTest, NewsVendorParameters) {
  const auto b = make_benchmark(
      {{"type", "newsvendor"}, {"seed", 3}, {"n_tasks", 4}, {"rw_sigma", 0.0}});
  EXPECT_EQ(b->name(), "newsvendor");
  EXPECT_EQ(b->n_tasks(), 4);
  EXPECT_EQ(b->direction(), Direction::kMaximize);
  const auto& nv = dynamic_cast<const NewsVendorBenchmark&>(*b);
  // A zero-variance walk keeps the initial utilities.
  EXPECT_EQ(nv.state(4).utilities, (std::vector<double>{10.0, 12.0, 8.0}));
}

TEST(BenchmarkFactoryTest, SyntheticDriftDefaults) {
  const auto b = make_benchmark({{"type", "synthetic_drift"}, {"dim", 3}});
  EXPECT_EQ(b->n_tasks(), 28);
  EXPECT_EQ(b->space().size(), 3u);
  const auto c = make_benchmark(
      {{"type", "synthetic_drift"}, {"sizes", {10.0, 20.0, 40.0}}});
  EXPECT_EQ(c->n_tasks(), 3);
  EXPECT_DOUBLE_EQ(c->tasks()[2].feature, 40.0);
}

TEST(BenchmarkFactoryTest, TabularPathResolvesAgainstBaseDir) {
  const nlohmann::json spec = {
      {"type", "tabular"},
      {"path", "tabular_small.csv"},
      {"space",
       {{{"name", "x"}, {"lower", 0}, {"upper", 1}},
        {{"name", "depth"}, {"kind", "integer"}, {"lower", 1}, {"upper", 4}}}}};
  const auto b = make_benchmark(spec, kFixtures);
  EXPECT_EQ(b->n_tasks(), 3);
  EXPECT_DOUBLE_EQ(b->evaluate(2, Configuration({0.5, 2}), 0), 0.0);
  EXPECT_ANY_THROW(make_benchmark(spec, "/nonexistent"));
}

TEST(BenchmarkFactoryTest, UnknownTypeIsRejected) {
  EXPECT_THROW(make_benchmark({{"type", "yahpo"}}), ValidationError);
}

TEST(PlanFromJsonTest, Defaults) {
  const ExperimentPlan plan =
      plan_from_json({{"benchmark", {{"type", "synthetic_drift"}, {"n_tasks", 2}}}});
  EXPECT_EQ(plan.methods.size(), all_methods().size());
  EXPECT_EQ(plan.budget, 25);
  EXPECT_EQ(plan.seeds, default_seeds());
  EXPECT_GE(plan.parallelism, 1);
  EXPECT_EQ(plan.scheduler.n_warm_start, 5);
  EXPECT_EQ(plan.scheduler.initial_design, 3);
  EXPECT_NO_THROW(plan.validate());
}

TEST(PlanFromJsonTest, SchedulerSettingsRoundTrip) {
  SchedulerConfig c;
  c.n_warm_start = 3;
  c.acquisition.mc_samples = 17;
  c.gp.restarts = 2;
  c.transfer_obs_cap = 50;
  const SchedulerConfig back = scheduler_config_from_json(scheduler_config_to_json(c));
  EXPECT_EQ(back.n_warm_start, 3);
  EXPECT_EQ(back.acquisition.mc_samples, 17);
  EXPECT_EQ(back.gp.restarts, 2);
  EXPECT_EQ(back.transfer_obs_cap, 50);
  EXPECT_THROW(scheduler_config_from_json({{"N", 0}}), ValidationError);
}

TEST(PlanFromJsonTest, MalformedConfigsAreValidationErrors) {
  EXPECT_THROW(plan_from_json(nlohmann::json::object()), ValidationError);
  EXPECT_THROW(plan_from_json({{"benchmark", {{"type", "newsvendor"}}},
                               {"budget", "ten"}}),
               ValidationError);
  EXPECT_THROW(plan_from_json({{"benchmark", {{"type", "newsvendor"}}},
                               {"methods", {"NotAMethod"}}}),
               ValidationError);
}

TEST(PlanFromJsonTest, ExampleConfigLoads) {
  const ExperimentPlan plan = plan_from_json(example_config());
  EXPECT_EQ(plan.benchmark->name(), "newsvendor");
  EXPECT_EQ(plan.benchmark->n_tasks(), 9);
  EXPECT_EQ(plan.seeds.size(), 50u);
  EXPECT_EQ(plan.methods.size(), 10u);
  EXPECT_NO_THROW(plan.validate());
}

TEST(PlanFromJsonTest, LoadsCommentedFixtureFile) {
  const ExperimentPlan plan = load_plan(kFixtures / "tabular_config.json");
  EXPECT_EQ(plan.benchmark->n_tasks(), 3);
  EXPECT_EQ(plan.budget, 4);
  EXPECT_EQ(plan.seeds, (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_EQ(plan.parallelism, 1);
  EXPECT_EQ(plan.scheduler.acquisition.mc_samples, 64);
  EXPECT_THROW(load_plan(kFixtures / "missing.json"), ValidationError);
}

}  // namespace
}  // namespace othpo
