#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nashvi/harness.hpp"

using namespace nashvi;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("nashvi_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small(Algorithm algo, const fs::path& out) {
  ExperimentConfig c;
  c.algorithm = algo;
  c.K = 20;
  c.eval_every = 5;
  c.seeds = {1, 2};
  c.out = out.string();
  c.instance.S = 2;
  c.instance.H = 2;
  if (algo == Algorithm::MultiNashVi || algo == Algorithm::MultiViZero) {
    c.instance.generator = "random_general_sum";
    c.instance.action_counts = {2, 2, 2};
  }
  c.tasks.count = 3;
  return c;
}

}  // namespace

TEST(Config, ParsesFieldsAndRejectsUnknown) {
  const auto doc = json::parse(R"({
    "instance": {"generator": "random_general_sum", "S": 2, "H": 2, "action_counts": [2, 2, 2], "reward_kind": "bernoulli", "seed": 9},
    "algorithm": "multi_nash_vi", "equilibrium": "ce", "K": 50, "c_beta": 2.0, "p": 0.01,
    "eval_every": 0, "seeds": [3, 4], "out": "somewhere", "tasks": {"count": 2}, "threads": 2
  })");
  const auto c = config_from_json(doc);
  EXPECT_EQ(c.algorithm, Algorithm::MultiNashVi);
  EXPECT_EQ(c.equilibrium, EquilibriumKind::CE);
  EXPECT_EQ(c.K, 50);
  EXPECT_EQ(c.instance.action_counts, (std::vector<int>{2, 2, 2}));
  EXPECT_EQ(c.instance.seed, std::optional<std::uint64_t>(9));
  EXPECT_DOUBLE_EQ(c.failure_prob, 0.01);
  EXPECT_EQ(c.label(), "multi_nash_vi_ce");
  // round trip through the JSON form
  const auto again = config_from_json(to_json(c));
  EXPECT_EQ(again.label(), c.label());
  EXPECT_EQ(again.seeds, c.seeds);
  EXPECT_EQ(again.instance.seed, c.instance.seed);

  EXPECT_THROW(config_from_json(json::parse(R"({"K": 10, "bogus": 1})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"K": 0})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"seeds": []})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"algorithm": "nash_vi_hoeffding", "instance": {"generator": "random_general_sum"}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"algorithm": "q_learning"})")), std::exception);
}

TEST(Config, SeedLists) {
  EXPECT_EQ(parse_seed_list("1-3,7"), (std::vector<std::uint64_t>{1, 2, 3, 7}));
  EXPECT_EQ(parse_seed_list("5"), (std::vector<std::uint64_t>{5}));
  EXPECT_THROW(parse_seed_list("3-1"), std::exception);
  EXPECT_THROW(parse_seed_list("x"), std::exception);
}

TEST(RunExperiment, SingleSeedSingleEpisodeHasOneRow) {
  const auto dir = fresh_dir("one_row");
  auto c = small(Algorithm::NashViHoeffding, dir);
  c.K = 1;
  c.seeds = {4};
  const auto out = run_experiment(c);
  EXPECT_EQ(out.failures, 0);
  const auto rows = read_run_csv((dir / "nash_vi_hoeffding_seed4.csv").string());
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].exact_gap.has_value());
  EXPECT_FALSE(rows[0].wall_clock_ns.has_value());
  EXPECT_TRUE(fs::exists(dir / "nash_vi_hoeffding_seed4_policy.json"));
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
}

TEST(RunExperiment, EveryAlgorithmWritesSchemaValidCsv) {
  for (auto algo : {Algorithm::NashViHoeffding, Algorithm::NashViBernstein, Algorithm::MultiNashVi, Algorithm::ViZero,
                    Algorithm::MultiViZero}) {
    const auto dir = fresh_dir(std::string("schema_") + to_string(algo));
    auto c = small(algo, dir);
    c.record_wall_clock = true;
    const auto out = run_experiment(c);
    ASSERT_EQ(out.failures, 0) << out.summary.dump();
    for (auto seed : c.seeds) {
      const auto csv = dir / (c.label() + "_seed" + std::to_string(seed) + ".csv");
      EXPECT_EQ(validate_run_csv(csv.string()), "") << csv;
      const auto rows = read_run_csv(csv.string());
      EXPECT_EQ(rows.size(), 20u);
      EXPECT_TRUE(rows[0].wall_clock_ns.has_value());
    }
  }
}

TEST(RunExperiment, RewardFreeSummaryHasOneGapPerTask) {
  const auto dir = fresh_dir("tasks");
  auto c = small(Algorithm::ViZero, dir);
  c.tasks.write_datasets = true;
  const auto out = run_experiment(c);
  ASSERT_EQ(out.failures, 0);
  for (const auto& r : out.summary.at("runs")) {
    const auto gaps = r.at("task_gaps").get<std::vector<double>>();
    ASSERT_EQ(gaps.size(), 3u);
    for (double g : gaps) EXPECT_GE(g, -1e-10);
  }
  EXPECT_TRUE(fs::exists(dir / "vi_zero_seed1_task2.csv"));
}

TEST(RunExperiment, RewardFreeTaskGapsMatchIndependentReplay) {
  // replay one task by hand through the public building blocks
  const auto dir = fresh_dir("replay");
  auto c = small(Algorithm::ViZero, dir);
  c.seeds = {7};
  c.tasks.count = 1;
  const auto out = run_experiment(c);
  ASSERT_EQ(out.failures, 0);
  const double logged = out.summary.at("runs")[0].at("task_gaps")[0].get<double>();
  const auto game = std::get<ZeroSumGame>(build_instance(c.instance, 7));
  ExplorationConfig ec;
  ec.failure_prob = c.failure_prob;
  const auto ex = explore(game.dynamics, c.K, ec, 7);
  auto truth = game;
  truth.reward = random_reward_table(game.dynamics, detail::derived_seed(0, 7, 0, 1));
  const auto data = augment_with_rewards(game.dynamics, ex.transitions, truth.reward, game.reward_kind, 1, detail::derived_seed(0, 7, 0, 2));
  const auto plan = plan_nash(ex.p_out, estimate_reward(data, game.dynamics));
  EXPECT_EQ(logged, nash_gap(truth, plan.mu, plan.nu));
}

TEST(RunExperiment, RerunIsBitIdenticalAndThreadCountIndependent) {
  const auto a = fresh_dir("det_a");
  const auto b = fresh_dir("det_b");
  auto ca = small(Algorithm::NashViBernstein, a);
  ca.seeds = {1, 2, 3, 4};
  auto cb = ca;
  cb.out = b.string();
  cb.threads = 3;
  run_experiment(ca);
  run_experiment(cb);
  for (auto seed : ca.seeds) {
    const auto name = ca.label() + "_seed" + std::to_string(seed);
    EXPECT_EQ(slurp(a / (name + ".csv")), slurp(b / (name + ".csv")));
    EXPECT_EQ(slurp(a / (name + "_policy.json")), slurp(b / (name + "_policy.json")));
  }
}

TEST(RunExperiment, FailingSeedDoesNotStopOthers) {
  const auto dir = fresh_dir("failing");
  auto c = small(Algorithm::NashViHoeffding, dir);
  c.instance.generator = "file";
  c.instance.path = (dir / "does_not_exist.json").string();
  const auto out = run_experiment(c);
  EXPECT_EQ(out.failures, 2);
  for (const auto& r : out.summary.at("runs")) EXPECT_EQ(r.at("status"), "error");
}

TEST(RunCsv, SchemaViolationsAreReported) {
  const auto dir = fresh_dir("schema_bad");
  const auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream(dir / name) << body;
    return validate_run_csv((dir / name).string());
  };
  const std::string header = std::string(kRunCsvHeader) + "\n";
  EXPECT_EQ(write("ok.csv", header + "1,0.5,0.5,,\n2,0.25,0.75,0.1,\n"), "");
  EXPECT_NE(write("hdr.csv", "episode,gap\n1,0.5\n"), "");
  EXPECT_NE(write("cum.csv", header + "1,0.5,0.5,,\n2,0.25,0.70,,\n"), "");
  EXPECT_NE(write("order.csv", header + "2,0.5,0.5,,\n"), "");
  EXPECT_NE(write("fields.csv", header + "1,0.5,0.5\n"), "");
  EXPECT_NE(write("empty.csv", header), "");
}

TEST(Compare, IdenticalRunsHaveZeroDifferences) {
  const auto a = fresh_dir("cmp_a");
  const auto b = fresh_dir("cmp_b");
  auto ca = small(Algorithm::NashViHoeffding, a);
  auto cb = ca;
  cb.out = b.string();
  run_experiment(ca);
  run_experiment(cb);
  const auto rows = compare_report({a.string(), b.string()});
  ASSERT_EQ(rows.size(), 8u);  // checkpoints 5, 10, 15, 20 for both directories
  for (const auto& r : rows) {
    EXPECT_EQ(r.delta_vs_first, 0.0);
    EXPECT_EQ(r.count, 2u);
    EXPECT_LE(r.q25, r.median);
    EXPECT_LE(r.median, r.q75);
  }
  std::stringstream ss;
  write_report_csv(ss, rows);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "label,episode,count,median,q25,q75,delta_vs_first");
}

TEST(Compare, HoeffdingAndBernsteinShareCheckpoints) {
  const auto a = fresh_dir("cmp_h");
  const auto b = fresh_dir("cmp_b2");
  run_experiment(small(Algorithm::NashViHoeffding, a));
  run_experiment(small(Algorithm::NashViBernstein, b));
  const auto rows = compare_report({a.string(), b.string()});
  std::map<std::string, int> per_label;
  for (const auto& r : rows) ++per_label[r.label];
  EXPECT_EQ(per_label["nash_vi_hoeffding"], 4);
  EXPECT_EQ(per_label["nash_vi_bernstein"], 4);
}

TEST(Compare, MismatchedCheckpointsAreReported) {
  const auto a = fresh_dir("cmp_m1");
  const auto b = fresh_dir("cmp_m2");
  run_experiment(small(Algorithm::NashViHoeffding, a));
  auto cb = small(Algorithm::NashViHoeffding, b);
  cb.eval_every = 4;
  run_experiment(cb);
  try {
    compare_report({a.string(), b.string()});
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("mismatched checkpoints"), std::string::npos);
  }
}

TEST(Compare, QuantileInterpolates) {
  EXPECT_DOUBLE_EQ(quantile({3, 1, 2, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5}, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(quantile({7}, 0.75), 7.0);
  EXPECT_THROW(quantile({}, 0.5), std::invalid_argument);
}
