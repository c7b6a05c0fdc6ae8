#include "othpo/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "othpo/errors.hpp"
#include "support/quantile_cases.hpp"
#include "support/warm_start_cases.hpp"

namespace othpo {
namespace {

using testing::make_history;
using testing::make_task;
using testing::values_of;

SearchSpace unit_square() {
  return SearchSpace({{"x0", DimensionKind::kContinuous, 0, 1, Scaling::kLinear},
                      {"x1", DimensionKind::kContinuous, 0, 1, Scaling::kLinear}});
}

Evaluation eval_at(const Configuration& c, double loss, int task, int it) {
  return {c, loss, task, it, static_cast<double>(task)};
}

// --- method names -----------------------------------------------------------

TEST(MethodTest, NamesRoundTrip) {
  EXPECT_EQ(all_methods().size(), 10u);
  for (const auto m : all_methods()) EXPECT_EQ(parse_method(method_name(m)), m);
}

TEST(MethodTest, UnknownNameListsValidOnes) {
  try {
    parse_method("SimpleOrderd");
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("SimpleOrdered"), std::string::npos);
    EXPECT_NE(msg.find("SimplePreviousNoBO"), std::string::npos);
  }
}

// --- SimpleOrdered warm start ------------------------------------------------

class WarmStartCaseTest : public ::testing::TestWithParam<testing::WarmStartCase> {};

TEST_P(WarmStartCaseTest, MatchesHandConstructedList) {
  const auto& c = GetParam();
  EXPECT_EQ(values_of(simple_ordered_warm_start(c.history, c.n)), c.expected);
}

INSTANTIATE_TEST_SUITE_P(
    Histories, WarmStartCaseTest, ::testing::ValuesIn(testing::warm_start_cases()),
    [](const ::testing::TestParamInfo<testing::WarmStartCase>& info) {
      return info.param.name;
    });

TEST(WarmStartTest, DistinctOptimaGivePerTaskTopsProperty) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int n_prev = 1 + static_cast<int>(rng() % 8);
    const int n = 1 + static_cast<int>(rng() % 6);
    TaskHistory h;
    std::vector<double> tops;
    for (int t = 0; t < n_prev; ++t) {
      TaskEvaluations evals;
      // Distinct tops 0..7; the rest of the task lives in 20..99.
      const double top = t;
      tops.push_back(top);
      evals.push_back(eval_at(Configuration({20.0 + static_cast<double>(rng() % 80)}),
                              1.0 + uniform01(rng), t + 1, 1));
      evals.push_back(eval_at(Configuration({top}), 0.0, t + 1, 2));
      evals.push_back(eval_at(Configuration({20.0 + static_cast<double>(rng() % 80)}),
                              1.0 + uniform01(rng), t + 1, 3));
      h.tasks.push_back(evals);
      h.context_features.push_back(t + 1);
    }
    const auto list = values_of(simple_ordered_warm_start(h, n));
    const int k = std::min(n, n_prev);
    ASSERT_GE(static_cast<int>(list.size()), k);
    for (int j = 0; j < k; ++j) EXPECT_EQ(list[j], tops[n_prev - 1 - j]);
    EXPECT_LE(static_cast<int>(list.size()), n);
    EXPECT_EQ(std::set<double>(list.begin(), list.end()).size(), list.size());
  }
}

TEST(SchedulerTest, SimpleOrderedReplaysThenUsesBo) {
  const auto space = testing::line_space();
  const auto h = make_history({{{1, 0.1}}, {{2, 0.2}}});
  SchedulerConfig cfg;
  cfg.method = Method::kSimpleOrdered;
  Scheduler s(space, cfg);
  Rng rng(3);
  s.begin_task(h, {3, 3.0, {}, 25}, rng);
  TaskEvaluations current;
  std::vector<double> proposed;
  for (int it = 1; it <= 8; ++it) {
    const auto c = s.suggest(current, rng);
    EXPECT_NO_THROW(space.validate(c));
    proposed.push_back(c[0]);
    current.push_back(eval_at(c, std::abs(c[0] - 40.0), 3, it));
  }
  EXPECT_EQ(proposed[0], 2.0);
  EXPECT_EQ(proposed[1], 1.0);
}

TEST(SchedulerTest, ShuffledIsPermutationOfOrdered) {
  const auto space = testing::line_space();
  for (const auto& c : testing::warm_start_cases()) {
    SchedulerConfig cfg;
    cfg.n_warm_start = c.n;
    cfg.method = Method::kSimpleOrderedShuffled;
    Scheduler s(space, cfg);
    Rng rng(7);
    s.begin_task(c.history, {9, 9.0, {}, 25}, rng);
    auto got = values_of(s.replay_list());
    auto expected = c.expected;
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(got, expected) << c.name;
  }
}

TEST(SchedulerTest, ShuffledPermutesUniformly) {
  const auto h = make_history({{{1, 0.1}}, {{2, 0.1}}, {{3, 0.1}}});
  SchedulerConfig cfg;
  cfg.method = Method::kSimpleOrderedShuffled;
  cfg.n_warm_start = 3;
  Scheduler s(testing::line_space(), cfg);
  std::map<std::vector<double>, int> counts;
  Rng rng(11);
  constexpr int kRuns = 6000;
  for (int i = 0; i < kRuns; ++i) {
    s.begin_task(h, {4, 4.0, {}, 25}, rng);
    ++counts[values_of(s.replay_list())];
  }
  ASSERT_EQ(counts.size(), 6u);
  const double p = 1.0 / 6.0;
  const double se = std::sqrt(p * (1 - p) / kRuns);
  for (const auto& [perm, n] : counts) {
    EXPECT_NEAR(static_cast<double>(n) / kRuns, p, 4 * se);
  }
}

// --- SimplePrevious -------------------------------------------------------------

TEST(SimplePreviousTest, SortsAscending) {
  // Configs a, b, c = 1, 2, 3 with losses 5, 1, 3.
  const auto h = make_history({{{9, 0.0}}, {{1, 5}, {2, 1}, {3, 3}}});
  EXPECT_EQ(values_of(simple_previous_warm_start(h, 2)), (std::vector<double>{2, 3}));
}

TEST(SimplePreviousTest, DeduplicatesKeepingFirstOccurrence) {
  const auto h = make_history({{{1, 0.5}, {2, 0.4}, {1, 0.1}, {3, 0.45}}});
  EXPECT_EQ(values_of(simple_previous_warm_start(h, -1)),
            (std::vector<double>{2, 3, 1}));
}

TEST(SchedulerTest, SimplePreviousNoBoReplaysPreviousTaskExactly) {
  const auto space = testing::line_space();
  Rng data(5);
  std::vector<std::pair<double, double>> prev;
  std::vector<int> xs(101);
  std::iota(xs.begin(), xs.end(), 0);
  std::shuffle(xs.begin(), xs.end(), data);
  for (int i = 0; i < 25; ++i) prev.emplace_back(xs[i], uniform01(data));
  const auto h = make_history({prev});
  auto sorted = prev;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });

  SchedulerConfig cfg;
  cfg.method = Method::kSimplePreviousNoBO;
  Scheduler s(space, cfg);
  Rng rng(1);
  s.begin_task(h, {2, 2.0, {}, 25}, rng);
  TaskEvaluations current;
  for (int it = 0; it < 25; ++it) {
    const auto c = s.suggest(current, rng);
    EXPECT_EQ(c[0], sorted[static_cast<std::size_t>(it)].first) << "iteration " << it + 1;
    current.push_back(eval_at(c, 0.0, 2, it + 1));
  }
  // Past the replayed list the method samples uniformly.
  Rng expect = rng;
  EXPECT_EQ(s.suggest(current, rng), space.sample_uniform(expect));
}

// --- BoundingBox -------------------------------------------------------------

TEST(BoundingBoxTest, HullOfTwoOptima) {
  const auto space = unit_square();
  TaskHistory h;
  h.tasks.push_back({eval_at(Configuration({0.2, 0.8}), 0.0, 1, 1),
                     eval_at(Configuration({0.9, 0.9}), 1.0, 1, 2)});
  h.tasks.push_back({eval_at(Configuration({0.6, 0.3}), 0.0, 2, 1),
                     eval_at(Configuration({0.0, 0.0}), 1.0, 2, 2)});
  const auto box = bounding_box_for_task(space, h);
  ASSERT_TRUE(box.has_value());
  EXPECT_DOUBLE_EQ(box->box.lower(0), 0.2);
  EXPECT_DOUBLE_EQ(box->box.upper(0), 0.6);
  EXPECT_DOUBLE_EQ(box->box.lower(1), 0.3);
  EXPECT_DOUBLE_EQ(box->box.upper(1), 0.8);

  SchedulerConfig cfg;
  Rng rng(2);
  TaskEvaluations current;
  for (int it = 1; it <= 8; ++it) {
    const auto c = next_bounding_box(space, h, current, cfg, rng);
    EXPECT_GE(c[0], 0.2);
    EXPECT_LE(c[0], 0.6);
    EXPECT_GE(c[1], 0.3);
    EXPECT_LE(c[1], 0.8);
    current.push_back(eval_at(c, c[0] + c[1], 3, it));
  }
}

TEST(BoundingBoxTest, NeedsTwoDistinctOptima) {
  const auto space = unit_square();
  TaskHistory one;
  one.tasks.push_back({eval_at(Configuration({0.2, 0.8}), 0.0, 1, 1)});
  EXPECT_FALSE(bounding_box_for_task(space, one).has_value());
  TaskHistory same = one;
  same.tasks.push_back({eval_at(Configuration({0.2, 0.8}), 0.0, 2, 1),
                        eval_at(Configuration({0.5, 0.5}), 1.0, 2, 2)});
  EXPECT_FALSE(bounding_box_for_task(space, same).has_value());
}

TEST(BoundingBoxTest, ContainsOptimaAndNeverExpandsProperty) {
  const auto space = unit_square();
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    TaskHistory h;
    std::optional<UnitBox> prev;
    std::vector<Eigen::VectorXd> optima;
    for (int t = 1; t <= 8; ++t) {
      const auto box = bounding_box_for_task(space, h);
      const UnitBox sample_box = box ? box->box : UnitBox::full(2);
      if (box) {
        for (const auto& o : optima) EXPECT_TRUE(box->box.contains(o));
        if (prev) {
          EXPECT_TRUE((box->box.lower.array() >= prev->lower.array()).all());
          EXPECT_TRUE((box->box.upper.array() <= prev->upper.array()).all());
        }
        prev = box->box;
      }
      // Evaluations of the method lie inside the current box.
      TaskEvaluations evals;
      double best = std::numeric_limits<double>::infinity();
      Eigen::VectorXd best_point;
      for (int it = 1; it <= 4; ++it) {
        const Eigen::VectorXd p = sample_box.sample(rng);
        const double loss = uniform01(rng);
        evals.push_back(eval_at(space.decode(p), loss, t, it));
        if (loss < best) {
          best = loss;
          best_point = space.encode(evals.back().config);
        }
      }
      optima.push_back(best_point);
      h.tasks.push_back(evals);
      h.context_features.push_back(t);
    }
  }
}

// --- ZeroShot ------------------------------------------------------------------

TEST(ZeroShotTest, SinglePreviousTaskSortsByLoss) {
  const auto space = testing::line_space();
  const auto h = make_history({{{10, 0.3}, {20, 0.1}, {30, 0.9}, {40, 0.2}}});
  EXPECT_EQ(values_of(build_zeroshot_portfolio(space, h, 25)),
            (std::vector<double>{20, 40, 10, 30}));
  EXPECT_EQ(values_of(build_zeroshot_portfolio(space, h, 2)),
            (std::vector<double>{20, 40}));
}

TEST(ZeroShotTest, ImputesFromNearestNeighbourAndNormalizes) {
  const auto space = testing::line_space();
  // Task 1 observes 0, 10, 100; task 2 observes 12 and 90.
  const auto h = make_history({{{0, 1.0}, {10, 3.0}, {100, 5.0}}, {{12, 2.0}, {90, 6.0}}});
  const auto problem = zeroshot_loss_matrix(space, h);
  EXPECT_EQ(values_of(problem.candidates), (std::vector<double>{0, 10, 100, 12, 90}));
  Eigen::MatrixXd expected(5, 2);
  // Task 1 range [1, 5]; task 2 range [2, 6]. Candidate 12 on task 1 takes
  // 10's value, 90 takes 100's; 0 and 10 on task 2 take 12's, 100 takes 90's.
  expected << 0.0, 0.0,
              0.5, 0.0,
              1.0, 1.0,
              0.5, 0.0,
              1.0, 1.0;
  EXPECT_TRUE(problem.normalized_losses.isApprox(expected, 1e-12))
      << problem.normalized_losses;
}

TEST(ZeroShotTest, ConstantTaskColumnIsZero) {
  const auto space = testing::line_space();
  const auto h = make_history({{{1, 2.0}, {2, 2.0}}});
  const auto problem = zeroshot_loss_matrix(space, h);
  EXPECT_TRUE((problem.normalized_losses.array() == 0.0).all());
}

TEST(ZeroShotTest, GreedyAgainstBruteForce) {
  Rng rng(12);
  int greedy_optimal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd l(6, 3);
    for (int i = 0; i < 6; ++i) {
      for (int t = 0; t < 3; ++t) l(i, t) = uniform01(rng);
    }
    const auto greedy = greedy_portfolio(l, 6);
    ASSERT_EQ(greedy.size(), 6u);
    // Step one takes the smallest row sum.
    Eigen::Index argmin = 0;
    l.rowwise().sum().minCoeff(&argmin);
    EXPECT_EQ(greedy[0], argmin);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= greedy.size(); ++k) {
      const double obj = portfolio_objective(l, std::span(greedy).first(k));
      EXPECT_LE(obj, prev);
      prev = obj;
    }
    double best_pair = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < 6; ++i) {
      for (Eigen::Index j = i + 1; j < 6; ++j) {
        const std::array<Eigen::Index, 2> pair{i, j};
        best_pair = std::min(best_pair, portfolio_objective(l, pair));
      }
    }
    const double greedy_pair = portfolio_objective(l, std::span(greedy).first(2));
    EXPECT_GE(greedy_pair, best_pair - 1e-15);
    if (greedy_pair <= best_pair + 1e-15) ++greedy_optimal;
  }
  RecordProperty("greedy_size2_optimal_of_200", greedy_optimal);
  EXPECT_GT(greedy_optimal, 0);
}

TEST(ZeroShotTest, TiesGoToLowerSumThenEarlierIndex) {
  Eigen::MatrixXd l(3, 2);
  // Rows 1 and 2 are identical and tie on every criterion, so the earlier
  // index is taken first; row 0 then lowers the objective more than row 2.
  l << 0.5, 0.5,
       0.0, 0.9,
       0.0, 0.9;
  const auto p = greedy_portfolio(l, 3);
  EXPECT_EQ(p, (std::vector<Eigen::Index>{1, 0, 2}));
}

TEST(SchedulerTest, ZeroShotReplaysPortfolioThenSamples) {
  const auto space = testing::line_space();
  const auto h = make_history({{{10, 0.3}, {20, 0.1}}});
  SchedulerConfig cfg;
  cfg.method = Method::kZeroShot;
  Scheduler s(space, cfg);
  Rng rng(4);
  s.begin_task(h, {2, 2.0, {}, 25}, rng);
  TaskEvaluations current;
  EXPECT_EQ(s.suggest(current, rng)[0], 20.0);
  current.push_back(eval_at(Configuration({20}), 0.0, 2, 1));
  EXPECT_EQ(s.suggest(current, rng)[0], 10.0);
  current.push_back(eval_at(Configuration({10}), 0.0, 2, 2));
  Rng expect = rng;
  EXPECT_EQ(s.suggest(current, rng), space.sample_uniform(expect));
}

// --- CTS ------------------------------------------------------------------------

class QuantileCaseTest : public ::testing::TestWithParam<testing::QuantileCase> {};

TEST_P(QuantileCaseTest, MatchesHandComputedValues) {
  const auto& c = GetParam();
  const auto q = mid_rank_quantiles(c.losses);
  ASSERT_EQ(q.size(), c.expected.size());
  for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(q[i], c.expected[i], 1e-15);
}

INSTANTIATE_TEST_SUITE_P(
    Tasks, QuantileCaseTest, ::testing::ValuesIn(testing::quantile_cases()),
    [](const ::testing::TestParamInfo<testing::QuantileCase>& info) {
      return info.param.name;
    });

TEST(CtsTest, ProbitInvertsNormalCdf) {
  EXPECT_EQ(probit(0.5), 0.0);
  EXPECT_NEAR(probit(0.975), 1.959963984540054, 1e-12);
  for (double q = 0.01; q < 1.0; q += 0.01) EXPECT_NEAR(normal_cdf(probit(q)), q, 1e-14);
}

TEST(CtsTest, MassBalanceProperty) {
  Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 40);
    std::vector<double> losses(n);
    for (auto& l : losses) l = static_cast<double>(rng() % 10);  // many ties
    double mass = 0.0;
    for (const double q : mid_rank_quantiles(losses)) mass += normal_cdf(probit(q));
    EXPECT_NEAR(mass, n / 2.0, 1e-9);
  }
}

TEST(CtsTest, QuantilesArePermutationEquivariant) {
  Rng rng(7);
  std::vector<double> losses(12);
  for (auto& l : losses) l = static_cast<double>(rng() % 5);
  const auto q = mid_rank_quantiles(losses);
  std::vector<std::size_t> perm(12);
  std::iota(perm.begin(), perm.end(), 0u);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> permuted(12);
  for (std::size_t i = 0; i < 12; ++i) permuted[i] = losses[perm[i]];
  const auto qp = mid_rank_quantiles(permuted);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(qp[i], q[perm[i]]);
}

TEST(CtsTest, ProposalIsInPoolAndDeterministic) {
  const auto space = unit_square();
  Rng data(9);
  TaskHistory h;
  for (int t = 1; t <= 3; ++t) {
    TaskEvaluations evals;
    for (int it = 1; it <= 10; ++it) {
      const auto c = space.sample_uniform(data);
      evals.push_back(eval_at(c, std::pow(c[0] - 0.1 * t, 2) + c[1], t, it));
    }
    h.tasks.push_back(evals);
    h.context_features.push_back(t);
  }
  SchedulerConfig cfg;
  cfg.method = Method::kCTS;
  TaskEvaluations current{eval_at(Configuration({0.5, 0.5}), 1.0, 4, 1)};
  Rng a(1);
  Rng b(1);
  const auto ca = next_cts(space, h, current, cfg, a);
  EXPECT_EQ(ca, next_cts(space, h, current, cfg, b));
  EXPECT_NO_THROW(space.validate(ca));
}

// --- TransferBO -----------------------------------------------------------------

TEST(ContextScaleTest, Normalizes) {
  const ContextScale index{ContextKind::kIndex, 1, 9, 9};
  EXPECT_DOUBLE_EQ(index.normalize(9), 1.0);
  EXPECT_DOUBLE_EQ(index.normalize(3), 1.0 / 3.0);
  const ContextScale size{ContextKind::kSize, 56, 56000, 28};
  EXPECT_DOUBLE_EQ(size.normalize(56), 0.0);
  EXPECT_DOUBLE_EQ(size.normalize(56000), 1.0);
  EXPECT_NEAR(size.normalize(std::sqrt(56.0 * 56000.0)), 0.5, 1e-12);
}

TEST(TransferBoTest, MatchesBoWithoutPreviousTasks) {
  const auto space = unit_square();
  SchedulerConfig cfg;
  Rng data(10);
  TaskEvaluations current;
  for (int it = 1; it <= 6; ++it) {
    const auto c = space.sample_uniform(data);
    current.push_back(eval_at(c, std::pow(c[0] - 0.3, 2) + std::pow(c[1] - 0.6, 2), 1, it));
  }
  const TaskInfo task{1, 1.0, {ContextKind::kIndex, 1, 5, 5}, 25};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng a(seed);
    Rng b(seed);
    EXPECT_EQ(next_transfer_bo(space, TaskHistory{}, current, task, cfg, a),
              next_bo(space, current, cfg, b));
  }
}

TEST(TransferBoTest, CapsPooledObservations) {
  const auto space = unit_square();
  Rng data(11);
  TaskHistory h;
  for (int t = 1; t <= 8; ++t) {
    TaskEvaluations evals;
    for (int it = 1; it <= 25; ++it) {
      evals.push_back(eval_at(space.sample_uniform(data), uniform01(data), t, it));
    }
    h.tasks.push_back(evals);
    h.context_features.push_back(t);
  }
  TaskEvaluations current{eval_at(space.sample_uniform(data), 0.5, 9, 1)};
  ASSERT_EQ(8 * 25 + 1, 201);
  SchedulerConfig cfg;
  const TaskInfo task{9, 9.0, {ContextKind::kIndex, 1, 9, 9}, 25};
  Rng rng(1);
  const auto d = transfer_dataset(space, h, current, task, cfg, rng);
  EXPECT_EQ(d.inputs.rows(), 200);
  EXPECT_EQ(d.targets.size(), 200);

  current.clear();
  const auto full = transfer_dataset(space, h, current, task, cfg, rng);
  EXPECT_EQ(full.inputs.rows(), 200);
  // Rows keep task order, so the feature column is constant within a task.
  for (int t = 0; t < 8; ++t) {
    EXPECT_TRUE((full.inputs.col(2).segment(25 * t, 25).array() == (t + 1) / 9.0).all());
  }
}

// --- BO and cross-method properties ----------------------------------------

TEST(BoTest, InitialDesignIsUniform) {
  const auto space = unit_square();
  SchedulerConfig cfg;
  TaskEvaluations current;
  Rng rng(13);
  Rng expect(13);
  for (int it = 1; it <= 3; ++it) {
    const auto c = next_bo(space, current, cfg, rng);
    EXPECT_EQ(c, space.sample_uniform(expect));
    current.push_back(eval_at(c, c[0], 1, it));
  }
}

TEST(BoTest, IgnoresHistory) {
  const auto space = unit_square();
  SchedulerConfig cfg;
  cfg.method = Method::kBO;
  Rng data(14);
  TaskHistory h;
  h.tasks.push_back({eval_at(Configuration({0.1, 0.1}), 0.0, 1, 1)});
  h.context_features.push_back(1);
  TaskEvaluations current;
  for (int it = 1; it <= 5; ++it) {
    current.push_back(eval_at(space.sample_uniform(data), uniform01(data), 2, it));
  }
  Scheduler with(space, cfg);
  Scheduler without(space, cfg);
  const TaskHistory empty;
  Rng a(2);
  Rng b(2);
  with.begin_task(h, {2, 2.0, {}, 25}, a);
  without.begin_task(empty, {2, 2.0, {}, 25}, b);
  EXPECT_EQ(with.suggest(current, a), without.suggest(current, b));
}

TEST(BoTest, BeatsRandomSearchOnQuadratic) {
  const SearchSpace space({{"x", DimensionKind::kContinuous, 0, 1, Scaling::kLinear}});
  const auto f = [](const Configuration& c) { return std::pow(c[0] - 0.37, 2); };
  SchedulerConfig cfg;
  double bo_total = 0.0;
  double rs_total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    TaskEvaluations bo;
    double bo_best = std::numeric_limits<double>::infinity();
    double rs_best = bo_best;
    for (int it = 1; it <= 25; ++it) {
      const auto c = next_bo(space, bo, cfg, rng);
      bo.push_back(eval_at(c, f(c), 1, it));
      bo_best = std::min(bo_best, f(c));
    }
    Rng rs_rng(seed);
    for (int it = 1; it <= 25; ++it) rs_best = std::min(rs_best, f(next_random(space, rs_rng)));
    bo_total += bo_best;
    rs_total += rs_best;
  }
  EXPECT_LT(bo_total / 20, rs_total / 20);
}

TEST(SchedulerTest, EveryMethodInBoundsAndDeterministic) {
  const SearchSpace space({{"p", DimensionKind::kInteger, 0, 20, Scaling::kLinear},
                           {"lr", DimensionKind::kContinuous, 1e-4, 1.0,
                            Scaling::kLogarithmic}});
  Rng data(15);
  TaskHistory h;
  for (int t = 1; t <= 3; ++t) {
    TaskEvaluations evals;
    for (int it = 1; it <= 6; ++it) {
      const auto c = space.sample_uniform(data);
      evals.push_back(eval_at(c, std::abs(c[0] - 5.0 * t) + std::log(c[1]), t, it));
    }
    h.tasks.push_back(evals);
    h.context_features.push_back(t);
  }
  const TaskInfo task{4, 4.0, {ContextKind::kIndex, 1, 4, 4}, 10};
  for (const auto method : all_methods()) {
    SchedulerConfig cfg;
    cfg.method = method;
    cfg.acquisition.candidate_pool_size = 200;
    const auto run = [&](std::uint64_t seed) {
      Scheduler s(space, cfg);
      Rng rng(seed);
      s.begin_task(h, task, rng);
      TaskEvaluations current;
      std::vector<Configuration> out;
      for (int it = 1; it <= task.budget; ++it) {
        const auto c = s.suggest(current, rng);
        EXPECT_NO_THROW(space.validate(c)) << method_name(method);
        out.push_back(c);
        current.push_back(eval_at(c, std::abs(c[0] - 20.0) + std::log(c[1]), 4, it));
      }
      return out;
    };
    EXPECT_EQ(run(1), run(1)) << method_name(method);
  }
}

}  // namespace
}  // namespace othpo
