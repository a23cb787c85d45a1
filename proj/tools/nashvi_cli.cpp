// nashvi: experiment runner and game utilities.
//
//   nashvi run     --config exp.json [--seeds 1-10] [--k 2000] [--algo nash_vi_bernstein]
//                  [--out runs/x] [--eval-every 10] [--threads 4] [--equilibrium cce]
//   nashvi compare runs/a runs/b [--out report.csv]
//   nashvi gen     --generator random_zero_sum --S 3 --A 2 --B 2 --H 3 --seed 7 --out game.json
//   nashvi eval    --game game.json --policy policy.json

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nashvi/evaluation.hpp"
#include "nashvi/harness.hpp"
#include "nashvi/instances.hpp"
#include "nashvi/io.hpp"

namespace {

using nashvi::json;

int cmd_run(const std::string& config_path, const std::string& seeds, int k, const std::string& algo,
            const std::string& out, int eval_every, int threads, const std::string& equilibrium) {
  json doc = config_path.empty() ? json::object() : nashvi::read_json_file(config_path);
  if (!seeds.empty()) doc["seeds"] = nashvi::parse_seed_list(seeds);
  if (k > 0) doc["K"] = k;
  if (!algo.empty()) doc["algorithm"] = algo;
  if (!out.empty()) doc["out"] = out;
  if (eval_every >= 0) doc["eval_every"] = eval_every;
  if (threads > 0) doc["threads"] = threads;
  if (!equilibrium.empty()) doc["equilibrium"] = equilibrium;
  const auto cfg = nashvi::config_from_json(doc);
  const auto outcome = nashvi::run_experiment(cfg);
  for (const auto& r : outcome.summary.at("runs")) {
    if (r.at("status") != "ok") std::cerr << "seed " << r.at("seed") << ": " << r.at("error").get<std::string>() << '\n';
  }
  std::cout << "wrote " << cfg.seeds.size() << " run(s) to " << cfg.out << " (" << outcome.failures << " failed)\n";
  return outcome.failures == 0 ? 0 : 1;
}

int cmd_compare(const std::vector<std::string>& dirs, const std::string& out) {
  const auto rows = nashvi::compare_report(dirs);
  if (out.empty()) {
    nashvi::write_report_csv(std::cout, rows);
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write '" + out + "'");
    nashvi::write_report_csv(f, rows);
  }
  return 0;
}

int cmd_eval(const std::string& game_path, const std::string& policy_path) {
  const auto game = nashvi::load_game(game_path);
  const auto pi = nashvi::load_policy(policy_path);
  const auto report = std::visit(
      [&](const auto& g) {
        if (!nashvi::matches(pi, g.dynamics)) throw std::runtime_error("policy shape does not match the game");
        return nashvi::evaluate_policy(g, pi);
      },
      game);
  json doc;
  doc["exploitability"] = report.exploitability;
  doc["value_of_policy"] = report.value_of_policy;
  doc["cce_gap"] = report.cce_gap;
  doc["ce_gap"] = report.ce.gap;
  doc["ce_gap_per_player"] = report.ce.per_player;
  json witnesses = json::array();
  for (const auto& w : report.ce.witnesses) witnesses.push_back({{"player", w.player}, {"map", w.map}});
  doc["ce_witnesses"] = witnesses;
  if (report.nash_gap) doc["nash_gap"] = *report.nash_gap;
  std::cout << doc.dump(1) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimistic value iteration for Markov games: experiments and evaluation"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment and write CSV traces and summary.json");
  std::string config_path, seeds, algo, out, equilibrium;
  int k = 0, eval_every = -1, threads = 0;
  run->add_option("--config", config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
  run->add_option("--seeds", seeds, "seed list, e.g. 1-10 or 1,4,9");
  run->add_option("--k", k, "number of episodes");
  run->add_option("--algo", algo, "nash_vi_hoeffding | nash_vi_bernstein | multi_nash_vi | vi_zero | multi_vi_zero");
  run->add_option("--out", out, "output directory");
  run->add_option("--eval-every", eval_every, "exact-gap evaluation period (0 disables)");
  run->add_option("--threads", threads, "seeds run concurrently");
  run->add_option("--equilibrium", equilibrium, "nash | ce | cce (multiplayer algorithms)");

  auto* compare = app.add_subcommand("compare", "median/IQR of exact gaps at matched checkpoints");
  std::vector<std::string> dirs;
  std::string report_out;
  compare->add_option("dirs", dirs, "run directories")->required()->check(CLI::ExistingDirectory);
  compare->add_option("--out", report_out, "report CSV (default: stdout)");

  auto* gen = app.add_subcommand("gen", "write a generated game file");
  std::string generator = "random_zero_sum", game_out, reward_kind = "deterministic", counts_text;
  int S = 3, A = 2, B = 2, H = 3, sparsity = 0;
  double eps = 0.1;
  std::uint64_t seed = 0;
  bool constant_sum = false;
  gen->add_option("--generator", generator, "random_zero_sum | random_general_sum | hard_markov_game")
      ->check(CLI::IsMember({"random_zero_sum", "random_general_sum", "hard_markov_game"}));
  gen->add_option("--S", S, "states");
  gen->add_option("--A", A, "max-player actions");
  gen->add_option("--B", B, "min-player actions");
  gen->add_option("--H", H, "horizon (reward steps for hard_markov_game)");
  gen->add_option("--actions", counts_text, "per-player action counts for random_general_sum, e.g. 2,2,2");
  gen->add_option("--sparsity", sparsity, "next-state support size per row (0 = dense)");
  gen->add_option("--eps", eps, "gap parameter of hard_markov_game");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_flag("--constant-sum", constant_sum, "two-player general-sum with r2 = 1 - r1");
  gen->add_option("--reward-kind", reward_kind, "deterministic | bernoulli")->check(CLI::IsMember({"deterministic", "bernoulli"}));
  gen->add_option("--out", game_out, "game file")->required();

  auto* eval = app.add_subcommand("eval", "exact gaps of a policy file against a game file");
  std::string game_path, policy_path;
  eval->add_option("--game", game_path, "game file")->required()->check(CLI::ExistingFile);
  eval->add_option("--policy", policy_path, "policy file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, seeds, k, algo, out, eval_every, threads, equilibrium);
    if (*compare) return cmd_compare(dirs, report_out);
    if (*eval) return cmd_eval(game_path, policy_path);
    if (*gen) {
      const auto kind = reward_kind == "bernoulli" ? nashvi::RewardKind::Bernoulli : nashvi::RewardKind::Deterministic;
      nashvi::AnyGame game;
      if (generator == "random_zero_sum") {
        game = nashvi::random_zero_sum(S, A, B, H, seed, sparsity, kind);
      } else if (generator == "random_general_sum") {
        std::vector<int> counts;
        std::stringstream ss(counts_text);
        std::string part;
        while (std::getline(ss, part, ',')) counts.push_back(std::stoi(part));
        if (counts.empty()) throw nashvi::ConfigError("--actions is required for random_general_sum");
        game = nashvi::random_general_sum(S, counts, H, seed, constant_sum, sparsity, kind);
      } else {
        game = nashvi::random_hard_markov_game(S, A, B, H, eps, seed);
      }
      nashvi::save_game(game_out, game);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
