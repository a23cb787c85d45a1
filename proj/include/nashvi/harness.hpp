#pragma once

// Experiment runner: builds the instance, runs one learner per seed
// (optionally on several threads), and writes per-seed CSV traces plus a
// JSON summary. Output files depend only on the configuration and seeds.
//
// Per-seed CSV, one row per episode:
//   episode,optimistic_gap_s1,cumulative_optimistic_gap,exact_nash_gap,wall_clock_ns
// optimistic_gap_s1 is (V_up - V_low)(s_1) for the learners and the
// exploration value V~(s_1) for reward-free runs. exact_nash_gap is the
// exact gap of the episode's policy (Nash gap for two-player learners, the
// CCE or CE gap for the multiplayer learner) and is blank between
// evaluation checkpoints and for reward-free runs. wall_clock_ns is blank
// unless record_wall_clock is set, which keeps reruns byte-identical.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nashvi/evaluation.hpp"
#include "nashvi/game.hpp"
#include "nashvi/instances.hpp"
#include "nashvi/io.hpp"
#include "nashvi/multi_nash_vi.hpp"
#include "nashvi/nash_vi.hpp"
#include "nashvi/rng.hpp"
#include "nashvi/vi_zero.hpp"

namespace nashvi {

inline constexpr const char* kRunCsvHeader =
    "episode,optimistic_gap_s1,cumulative_optimistic_gap,exact_nash_gap,wall_clock_ns";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { NashViHoeffding, NashViBernstein, MultiNashVi, ViZero, MultiViZero };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::NashViHoeffding: return "nash_vi_hoeffding";
    case Algorithm::NashViBernstein: return "nash_vi_bernstein";
    case Algorithm::MultiNashVi: return "multi_nash_vi";
    case Algorithm::ViZero: return "vi_zero";
    case Algorithm::MultiViZero: return "multi_vi_zero";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  for (auto a : {Algorithm::NashViHoeffding, Algorithm::NashViBernstein, Algorithm::MultiNashVi, Algorithm::ViZero,
                 Algorithm::MultiViZero}) {
    if (s == to_string(a)) return a;
  }
  throw ConfigError("unknown algorithm '" + s + "'");
}

inline EquilibriumKind parse_equilibrium_kind(const std::string& s) {
  for (auto k : {EquilibriumKind::Nash, EquilibriumKind::CE, EquilibriumKind::CCE})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown equilibrium kind '" + s + "'");
}

struct InstanceSpec {
  std::string generator = "random_zero_sum";  // or random_general_sum, hard_markov_game, file
  std::string path;                           // generator == "file"
  int S = 3;
  int A = 2;
  int B = 2;
  int H = 3;
  std::vector<int> action_counts;  // random_general_sum
  int sparsity = 0;
  double eps = 0.1;
  bool constant_sum = false;
  RewardKind reward_kind = RewardKind::Bernoulli;
  std::optional<std::uint64_t> seed;  // empty: the run seed generates the instance
};

struct TaskSpec {
  int count = 5;
  std::uint64_t seed = 0;
  int samples_per_visit = 1;
  bool write_datasets = false;
};

struct ExperimentConfig {
  InstanceSpec instance;
  Algorithm algorithm = Algorithm::NashViHoeffding;
  EquilibriumKind equilibrium = EquilibriumKind::CCE;
  int K = 1000;
  double c_beta = 1.0;
  double c_gamma = 1.0;
  std::optional<double> iota;
  double failure_prob = 0.05;
  int eval_every = 10;
  std::vector<std::uint64_t> seeds{1};
  std::string out = "runs";
  TaskSpec tasks;
  int threads = 1;
  bool record_wall_clock = false;
  double solver_tol = kDefaultSolverTol;

  [[nodiscard]] bool is_multi() const {
    return algorithm == Algorithm::MultiNashVi || algorithm == Algorithm::MultiViZero;
  }
  [[nodiscard]] bool is_reward_free() const {
    return algorithm == Algorithm::ViZero || algorithm == Algorithm::MultiViZero;
  }
  // File-name stem; multiplayer runs carry the equilibrium kind.
  [[nodiscard]] std::string label() const {
    std::string s = to_string(algorithm);
    if (is_multi()) s += std::string("_") + to_string(equilibrium);
    return s;
  }
};

inline void check(const ExperimentConfig& c) {
  if (c.K < 1) throw ConfigError("K must be at least 1");
  if (c.seeds.empty()) throw ConfigError("seeds must be nonempty");
  if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) throw ConfigError("seeds must be distinct");
  if (!(c.c_beta > 0.0) || !(c.c_gamma > 0.0)) throw ConfigError("bonus constants must be positive");
  if (c.iota && !(*c.iota > 0.0)) throw ConfigError("iota must be positive");
  if (!(c.failure_prob > 0.0 && c.failure_prob < 1.0)) throw ConfigError("p must be in (0, 1)");
  if (c.eval_every < 0) throw ConfigError("eval_every must be nonnegative");
  if (c.threads < 1) throw ConfigError("threads must be at least 1");
  if (c.out.empty()) throw ConfigError("out must be set");
  if (c.is_reward_free() && (c.tasks.count < 1 || c.tasks.samples_per_visit < 1)) {
    throw ConfigError("reward-free runs need tasks.count >= 1 and tasks.samples_per_visit >= 1");
  }
  const auto& g = c.instance.generator;
  if (g != "random_zero_sum" && g != "random_general_sum" && g != "hard_markov_game" && g != "file") {
    throw ConfigError("unknown instance generator '" + g + "'");
  }
  if (g == "file" && c.instance.path.empty()) throw ConfigError("instance.path is required for file instances");
  if (g == "random_general_sum" && !c.is_multi()) throw ConfigError(std::string(to_string(c.algorithm)) + " requires a zero-sum instance");
}

// ---------------------------------------------------------------------------
// Config documents

namespace detail {

template <typename T>
void read_opt(const json& doc, const char* key, T& dst) {
  if (!doc.contains(key)) return;
  try {
    dst = doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{"instance", "algorithm", "equilibrium", "K", "c_beta", "c_gamma", "iota",
                                           "p", "eval_every", "seeds", "out", "tasks", "threads", "record_wall_clock",
                                           "solver_tol"};
  for (const auto& [k, v] : doc.items())
    if (!known.count(k)) throw ConfigError("unknown config field '" + k + "'");

  ExperimentConfig c;
  if (doc.contains("instance")) {
    const auto& in = doc.at("instance");
    if (!in.is_object()) throw ConfigError("instance must be an object");
    auto& s = c.instance;
    detail::read_opt(in, "generator", s.generator);
    detail::read_opt(in, "path", s.path);
    if (!s.path.empty() && !in.contains("generator")) s.generator = "file";
    detail::read_opt(in, "S", s.S);
    detail::read_opt(in, "A", s.A);
    detail::read_opt(in, "B", s.B);
    detail::read_opt(in, "H", s.H);
    detail::read_opt(in, "action_counts", s.action_counts);
    detail::read_opt(in, "sparsity", s.sparsity);
    detail::read_opt(in, "eps", s.eps);
    detail::read_opt(in, "constant_sum", s.constant_sum);
    if (in.contains("reward_kind")) {
      try {
        s.reward_kind = detail::parse_reward_kind(in.at("reward_kind"));
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    }
    if (in.contains("seed")) {
      std::uint64_t v = 0;
      detail::read_opt(in, "seed", v);
      s.seed = v;
    }
  }
  if (doc.contains("algorithm")) c.algorithm = parse_algorithm(doc.at("algorithm").get<std::string>());
  if (doc.contains("equilibrium")) c.equilibrium = parse_equilibrium_kind(doc.at("equilibrium").get<std::string>());
  detail::read_opt(doc, "K", c.K);
  detail::read_opt(doc, "c_beta", c.c_beta);
  detail::read_opt(doc, "c_gamma", c.c_gamma);
  if (doc.contains("iota") && !doc.at("iota").is_null()) {
    double v = 0.0;
    detail::read_opt(doc, "iota", v);
    c.iota = v;
  }
  detail::read_opt(doc, "p", c.failure_prob);
  detail::read_opt(doc, "eval_every", c.eval_every);
  detail::read_opt(doc, "seeds", c.seeds);
  detail::read_opt(doc, "out", c.out);
  if (doc.contains("tasks")) {
    const auto& t = doc.at("tasks");
    detail::read_opt(t, "count", c.tasks.count);
    detail::read_opt(t, "seed", c.tasks.seed);
    detail::read_opt(t, "samples_per_visit", c.tasks.samples_per_visit);
    detail::read_opt(t, "write_datasets", c.tasks.write_datasets);
  }
  detail::read_opt(doc, "threads", c.threads);
  detail::read_opt(doc, "record_wall_clock", c.record_wall_clock);
  detail::read_opt(doc, "solver_tol", c.solver_tol);
  check(c);
  return c;
}

inline json to_json(const ExperimentConfig& c) {
  json in;
  in["generator"] = c.instance.generator;
  if (c.instance.generator == "file") {
    in["path"] = c.instance.path;
  } else {
    in["S"] = c.instance.S;
    in["H"] = c.instance.H;
    if (c.instance.generator == "random_general_sum") {
      in["action_counts"] = c.instance.action_counts;
      in["constant_sum"] = c.instance.constant_sum;
    } else {
      in["A"] = c.instance.A;
      in["B"] = c.instance.B;
    }
    if (c.instance.generator == "hard_markov_game") in["eps"] = c.instance.eps;
    else in["sparsity"] = c.instance.sparsity;
    in["reward_kind"] = c.instance.reward_kind == RewardKind::Bernoulli ? "bernoulli" : "deterministic";
    if (c.instance.seed) in["seed"] = *c.instance.seed;
  }
  json doc;
  doc["instance"] = in;
  doc["algorithm"] = to_string(c.algorithm);
  if (c.is_multi()) doc["equilibrium"] = to_string(c.equilibrium);
  doc["K"] = c.K;
  doc["c_beta"] = c.c_beta;
  doc["c_gamma"] = c.c_gamma;
  doc["iota"] = c.iota ? json(*c.iota) : json(nullptr);
  doc["p"] = c.failure_prob;
  doc["eval_every"] = c.eval_every;
  doc["seeds"] = c.seeds;
  doc["out"] = c.out;
  if (c.is_reward_free()) {
    doc["tasks"] = {{"count", c.tasks.count}, {"seed", c.tasks.seed}, {"samples_per_visit", c.tasks.samples_per_visit},
                    {"write_datasets", c.tasks.write_datasets}};
  }
  doc["threads"] = c.threads;
  doc["record_wall_clock"] = c.record_wall_clock;
  doc["solver_tol"] = c.solver_tol;
  return doc;
}

// "1,2,5" or "1-10" or a mix ("1-3,7").
inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    try {
      const auto dash = part.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoull(part));
      } else {
        const auto lo = std::stoull(part.substr(0, dash));
        const auto hi = std::stoull(part.substr(dash + 1));
        if (hi < lo) throw ConfigError("bad seed range '" + part + "'");
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad seed list entry '" + part + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty seed list");
  return out;
}

// ---------------------------------------------------------------------------
// Instances

inline AnyGame build_instance(const InstanceSpec& spec, std::uint64_t run_seed) {
  const std::uint64_t seed = spec.seed.value_or(run_seed);
  if (spec.generator == "file") return load_game(spec.path);
  if (spec.generator == "random_zero_sum") return random_zero_sum(spec.S, spec.A, spec.B, spec.H, seed, spec.sparsity, spec.reward_kind);
  if (spec.generator == "random_general_sum") {
    if (spec.action_counts.empty()) throw ConfigError("random_general_sum needs action_counts");
    return random_general_sum(spec.S, spec.action_counts, spec.H, seed, spec.constant_sum, spec.sparsity, spec.reward_kind);
  }
  if (spec.generator == "hard_markov_game") return random_hard_markov_game(spec.S, spec.A, spec.B, spec.H, spec.eps, seed);
  throw ConfigError("unknown instance generator '" + spec.generator + "'");
}

// ---------------------------------------------------------------------------
// Runs

namespace detail {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_run_csv(const std::string& path, const RunLog& log, bool wall_clock) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << kRunCsvHeader << '\n';
  double cumulative = 0.0;
  for (const auto& e : log.episodes) {
    cumulative += e.optimistic_gap;
    out << e.episode << ',' << format_double(e.optimistic_gap) << ',' << format_double(cumulative) << ',';
    if (e.exact_gap) out << format_double(*e.exact_gap);
    out << ',';
    if (wall_clock) out << e.wall_clock_ns;
    out << '\n';
  }
}

inline json solver_json(const SolverStats& s) {
  return {{"calls", s.calls}, {"max_residual", s.max_residual}, {"iterations", s.iterations}};
}

inline double cumulative_gap(const RunLog& log) {
  double c = 0.0;
  for (const auto& e : log.episodes) c += e.optimistic_gap;
  return c;
}

inline GeneralSumGame as_general_sum(const AnyGame& g) {
  if (const auto* z = std::get_if<ZeroSumGame>(&g)) return to_general_sum(*z);
  return std::get<GeneralSumGame>(g);
}

// Seeds derived from (base, run seed, index) for task rewards and datasets.
inline std::uint64_t derived_seed(std::uint64_t base, std::uint64_t run_seed, std::uint64_t index, std::uint64_t purpose) {
  return CounterRng(base ^ (purpose * 0x9e3779b97f4a7c15ULL), run_seed).split(index).next_u64();
}

inline json run_reward_free(const ExperimentConfig& cfg, const AnyGame& game, std::uint64_t seed, RunLog& log_out) {
  const auto& dyn = dynamics_of(game);
  ExplorationConfig ec;
  ec.c = cfg.c_beta;
  ec.iota = cfg.iota;
  ec.failure_prob = cfg.failure_prob;
  ec.record_wall_clock = cfg.record_wall_clock;
  const auto ex = cfg.algorithm == Algorithm::ViZero ? explore(dyn, cfg.K, ec, seed) : multi_explore(dyn, cfg.K, ec, seed);
  log_out = ex.log;

  const RewardKind kind = std::visit([](const auto& g) { return g.reward_kind; }, game);
  json tasks = json::array();
  std::vector<double> gaps;
  for (int t = 0; t < cfg.tasks.count; ++t) {
    const auto tu = static_cast<std::uint64_t>(t);
    json task;
    double gap = 0.0;
    if (cfg.algorithm == Algorithm::ViZero) {
      ZeroSumGame truth = std::get<ZeroSumGame>(game);
      truth.reward = random_reward_table(dyn, derived_seed(cfg.tasks.seed, seed, tu, 1));
      const auto data = augment_with_rewards(dyn, ex.transitions, truth.reward, kind, cfg.tasks.samples_per_visit,
                                             derived_seed(cfg.tasks.seed, seed, tu, 2));
      if (cfg.tasks.write_datasets) {
        std::ofstream f(cfg.out + "/" + cfg.label() + "_seed" + std::to_string(seed) + "_task" + std::to_string(t) + ".csv");
        write_dataset(f, data, 2);
      }
      const auto plan = plan_nash(ex.p_out, estimate_reward(data, dyn), cfg.solver_tol);
      gap = nash_gap(truth, plan.mu, plan.nu);
    } else {
      GeneralSumGame truth = as_general_sum(game);
      std::vector<std::vector<double>> estimates;
      for (int i = 0; i < truth.num_players(); ++i) {
        const auto iu = static_cast<std::uint64_t>(i);
        auto& r = truth.rewards[static_cast<std::size_t>(i)];
        r = random_reward_table(dyn, derived_seed(cfg.tasks.seed, seed, tu * 64 + iu, 1));
        const auto data = augment_with_rewards(dyn, ex.transitions, r, kind, cfg.tasks.samples_per_visit,
                                               derived_seed(cfg.tasks.seed, seed, tu * 64 + iu, 2));
        if (cfg.tasks.write_datasets) {
          std::ofstream f(cfg.out + "/" + cfg.label() + "_seed" + std::to_string(seed) + "_task" + std::to_string(t) +
                          "_player" + std::to_string(i) + ".csv");
          write_dataset(f, data, truth.num_players());
        }
        estimates.push_back(estimate_reward(data, dyn));
      }
      const auto plan = plan_equilibrium_general(ex.p_out, estimates, cfg.equilibrium, cfg.solver_tol);
      gap = equilibrium_gap(truth, plan.policy, cfg.equilibrium);
    }
    gaps.push_back(gap);
    tasks.push_back({{"task", t}, {"gap", gap}});
  }
  return {{"final_delta", ex.log.episodes.back().best_gap},
          {"output_episode", ex.log.output_episode},
          {"cumulative_optimistic_gap", cumulative_gap(ex.log)},
          {"task_gaps", gaps}};
}

inline json run_one(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto game = build_instance(cfg.instance, seed);
  const auto stem = cfg.out + "/" + cfg.label() + "_seed" + std::to_string(seed);
  RunLog log;
  json result;
  switch (cfg.algorithm) {
    case Algorithm::NashViHoeffding:
    case Algorithm::NashViBernstein: {
      const auto* zs = std::get_if<ZeroSumGame>(&game);
      if (!zs) throw ConfigError(std::string(to_string(cfg.algorithm)) + " requires a zero-sum game");
      NashViConfig nc;
      nc.bonus.kind = cfg.algorithm == Algorithm::NashViHoeffding ? BonusKind::Hoeffding : BonusKind::Bernstein;
      nc.bonus.c_beta = cfg.c_beta;
      nc.bonus.c_gamma = cfg.c_gamma;
      nc.bonus.iota = cfg.iota;
      nc.bonus.failure_prob = cfg.failure_prob;
      nc.solver_tol = cfg.solver_tol;
      nc.eval_every = cfg.eval_every;
      nc.record_wall_clock = cfg.record_wall_clock;
      auto r = run_nash_vi(*zs, cfg.K, nc, seed);
      log = std::move(r.log);
      write_json_file(stem + "_policy.json", to_json(r.pi_out));
      result = {{"final_delta", log.episodes.back().best_gap},
                {"output_episode", log.output_episode},
                {"output_gap", nash_gap(*zs, r.mu_out, r.nu_out)},
                {"cumulative_optimistic_gap", cumulative_gap(log)},
                {"solver", solver_json(log.solver)}};
      break;
    }
    case Algorithm::MultiNashVi: {
      const auto gs = as_general_sum(game);
      MultiConfig mc;
      mc.kind = cfg.equilibrium;
      mc.c = cfg.c_beta;
      mc.iota = cfg.iota;
      mc.failure_prob = cfg.failure_prob;
      mc.solver_tol = cfg.solver_tol;
      mc.eval_every = cfg.eval_every;
      mc.record_wall_clock = cfg.record_wall_clock;
      auto r = multi_run(gs, cfg.K, mc, seed);
      log = std::move(r.log);
      write_json_file(stem + "_policy.json", to_json(r.pi_out));
      result = {{"final_delta", log.episodes.back().best_gap},
                {"output_episode", log.output_episode},
                {"output_gap", equilibrium_gap(gs, r.pi_out, cfg.equilibrium)},
                {"uniform_gap", equilibrium_gap(gs, uniform_policy(gs.dynamics), cfg.equilibrium)},
                {"cumulative_optimistic_gap", cumulative_gap(log)},
                {"solver", solver_json(log.solver)}};
      break;
    }
    case Algorithm::ViZero:
      if (!std::holds_alternative<ZeroSumGame>(game)) throw ConfigError("vi_zero requires a zero-sum game");
      result = run_reward_free(cfg, game, seed, log);
      break;
    case Algorithm::MultiViZero:
      result = run_reward_free(cfg, game, seed, log);
      break;
  }
  write_run_csv(stem + ".csv", log, cfg.record_wall_clock);
  return result;
}

}  // namespace detail

struct ExperimentOutcome {
  json summary;
  int failures = 0;
};

// Runs every seed; a failing seed is recorded in the summary and does not
// stop the others.
inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  check(cfg);
  std::filesystem::create_directories(cfg.out);
  std::vector<json> runs(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cfg.seeds.size(); k = next++) {
      const auto seed = cfg.seeds[k];
      json r;
      r["seed"] = seed;
      try {
        auto res = detail::run_one(cfg, seed);
        r["status"] = "ok";
        for (auto& [key, v] : res.items()) r[key] = v;
      } catch (const std::exception& e) {
        r["status"] = "error";
        r["error"] = e.what();
      }
      runs[k] = std::move(r);
    }
  };
  const auto n = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), cfg.seeds.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  ExperimentOutcome out;
  out.summary["config"] = to_json(cfg);
  out.summary["algorithm"] = cfg.label();
  out.summary["K"] = cfg.K;
  out.summary["runs"] = runs;
  for (const auto& r : runs)
    if (r.at("status") != "ok") ++out.failures;
  write_json_file(cfg.out + "/summary.json", out.summary);
  return out;
}

// ---------------------------------------------------------------------------
// CSV schema

struct RunRow {
  int episode = 0;
  double optimistic_gap = 0.0;
  double cumulative = 0.0;
  std::optional<double> exact_gap;
  std::optional<std::int64_t> wall_clock_ns;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_number(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::logic_error&) {
    throw std::runtime_error(where + ": not a number '" + s + "'");
  }
  if (used != s.size()) throw std::runtime_error(where + ": trailing characters in '" + s + "'");
  return v;
}

}  // namespace detail

// Reads a per-seed run CSV, enforcing the schema: exact header, five
// fields per row, episodes 1, 2, ..., finite gaps, and a cumulative column
// equal to the running sum of the gap column.
inline std::vector<RunRow> read_run_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kRunCsvHeader) throw std::runtime_error(path + ": bad header");
  std::vector<RunRow> rows;
  double running = 0.0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto f = detail::split_csv_line(line);
    if (f.size() != 5) throw std::runtime_error(where + ": expected 5 fields, got " + std::to_string(f.size()));
    RunRow r;
    const double ep = detail::parse_number(f[0], where);
    r.episode = static_cast<int>(ep);
    if (r.episode != static_cast<int>(rows.size()) + 1 || ep != r.episode) throw std::runtime_error(where + ": episodes must be 1, 2, ...");
    r.optimistic_gap = detail::parse_number(f[1], where);
    r.cumulative = detail::parse_number(f[2], where);
    if (!std::isfinite(r.optimistic_gap) || r.optimistic_gap < 0.0) throw std::runtime_error(where + ": bad optimistic gap");
    running += r.optimistic_gap;
    if (std::abs(running - r.cumulative) > 1e-9 * std::max(1.0, std::abs(running))) {
      throw std::runtime_error(where + ": cumulative column is not the running sum");
    }
    if (!f[3].empty()) r.exact_gap = detail::parse_number(f[3], where);
    if (!f[4].empty()) r.wall_clock_ns = static_cast<std::int64_t>(detail::parse_number(f[4], where));
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");
  return rows;
}

// Empty string when the file satisfies the schema, else the first problem.
inline std::string validate_run_csv(const std::string& path) {
  try {
    read_run_csv(path);
    return {};
  } catch (const std::exception& e) {
    return e.what();
  }
}

// ---------------------------------------------------------------------------
// Comparison

struct CheckpointStats {
  std::string label;
  int episode = 0;
  std::size_t count = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double delta_vs_first = 0.0;
};

// Linear-interpolation quantile of a nonempty sample.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace detail {

// checkpoint episode -> one value per successful seed
inline std::map<int, std::vector<double>> collect_checkpoints(const std::string& dir, const json& summary) {
  std::map<int, std::vector<double>> out;
  const auto label = summary.at("algorithm").get<std::string>();
  const int K = summary.at("K").get<int>();
  std::optional<std::set<int>> expected;
  for (const auto& r : summary.at("runs")) {
    if (r.at("status") != "ok") continue;
    if (r.contains("task_gaps")) {
      out[K].push_back(quantile(r.at("task_gaps").get<std::vector<double>>(), 0.5));
      continue;
    }
    const auto seed = r.at("seed").get<std::uint64_t>();
    const auto rows = read_run_csv(dir + "/" + label + "_seed" + std::to_string(seed) + ".csv");
    std::set<int> eps;
    for (const auto& row : rows) {
      if (!row.exact_gap) continue;
      out[row.episode].push_back(*row.exact_gap);
      eps.insert(row.episode);
    }
    if (expected && *expected != eps) throw std::runtime_error(dir + ": seeds have different checkpoints");
    expected = eps;
  }
  return out;
}

}  // namespace detail

// One row per (run directory, checkpoint) with the median and quartiles of
// the exact gap across seeds, and the median's difference from the first
// directory at the same checkpoint. Directories must share checkpoints.
inline std::vector<CheckpointStats> compare_report(const std::vector<std::string>& dirs) {
  if (dirs.empty()) throw std::invalid_argument("compare_report: no run directories");
  std::vector<std::string> labels;
  std::vector<std::map<int, std::vector<double>>> data;
  std::map<std::string, int> seen;
  for (const auto& dir : dirs) {
    const auto summary = read_json_file(dir + "/summary.json");
    auto label = summary.at("algorithm").get<std::string>();
    if (const int n = seen[label]++; n > 0) label += "#" + std::to_string(n + 1);
    labels.push_back(label);
    data.push_back(detail::collect_checkpoints(dir, summary));
  }
  std::set<int> first;
  for (const auto& [ep, v] : data[0]) first.insert(ep);
  for (std::size_t k = 1; k < data.size(); ++k) {
    std::set<int> mine;
    for (const auto& [ep, v] : data[k]) mine.insert(ep);
    if (mine != first) {
      std::string msg = "mismatched checkpoints between '" + dirs[0] + "' and '" + dirs[k] + "':";
      for (int e : first)
        if (!mine.count(e)) msg += " missing " + std::to_string(e);
      for (int e : mine)
        if (!first.count(e)) msg += " extra " + std::to_string(e);
      throw std::runtime_error(msg);
    }
  }
  std::vector<CheckpointStats> out;
  for (std::size_t k = 0; k < data.size(); ++k) {
    for (const auto& [ep, v] : data[k]) {
      CheckpointStats st{labels[k], ep, v.size(), quantile(v, 0.5), quantile(v, 0.25), quantile(v, 0.75), 0.0};
      st.delta_vs_first = st.median - quantile(data[0].at(ep), 0.5);
      out.push_back(st);
    }
  }
  return out;
}

inline void write_report_csv(std::ostream& os, const std::vector<CheckpointStats>& rows) {
  os << "label,episode,count,median,q25,q75,delta_vs_first\n";
  for (const auto& r : rows) {
    os << r.label << ',' << r.episode << ',' << r.count << ',' << detail::format_double(r.median) << ','
       << detail::format_double(r.q25) << ',' << detail::format_double(r.q75) << ','
       << detail::format_double(r.delta_vs_first) << '\n';
  }
}

}  // namespace nashvi
