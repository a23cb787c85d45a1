#pragma once

// JSON game and policy documents.
//
// Game:
//   { "zero_sum": true, "horizon": H, "num_states": S, "action_counts": [A, B],
//     "initial_state": s, "reward_kind": "deterministic" | "bernoulli",
//     "transition": [h][s][a][b][s'], "rewards": [h][s][a][b] }
//   { "zero_sum": false, "players": m, ..., "action_counts": [A_1, ..., A_m],
//     "transition": [h][s][joint][s'], "rewards": [i][h][s][joint] }
// Joint indices are mixed radix with player 1 most significant. All indices
// are 0-based. Doubles are written in shortest round-trip form, so a
// save/load cycle reproduces every entry bit-for-bit.
//
// Policy:
//   { "kind": "correlated", "horizon": H, "num_states": S, "action_counts": [...],
//     "probs": [h][s][joint] }
//   { "kind": "product", "horizon": H, "num_states": S, "action_counts": [...],
//     "probs": [i][h][s][a] }

#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nashvi/game.hpp"
#include "nashvi/policy.hpp"

namespace nashvi {

using json = nlohmann::json;
using AnyGame = std::variant<ZeroSumGame, GeneralSumGame>;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const char* reward_kind_name(RewardKind k) { return k == RewardKind::Bernoulli ? "bernoulli" : "deterministic"; }

inline RewardKind parse_reward_kind(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "deterministic") return RewardKind::Deterministic;
  if (s == "bernoulli") return RewardKind::Bernoulli;
  throw FormatError("unknown reward_kind '" + s + "'");
}

template <typename T>
T field(const json& doc, const char* name) {
  if (!doc.contains(name)) throw FormatError(std::string("missing field '") + name + "'");
  try {
    return doc.at(name).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("field '") + name + "': " + e.what());
  }
}

// Flattens a nested array whose leaf depth and per-level sizes are given.
inline void flatten(const json& node, const std::vector<std::size_t>& dims, std::size_t level, std::vector<double>& out,
                    const char* name) {
  if (level == dims.size()) {
    if (!node.is_number()) throw FormatError(std::string("'") + name + "': expected a number");
    out.push_back(node.get<double>());
    return;
  }
  if (!node.is_array() || node.size() != dims[level]) {
    throw FormatError(std::string("'") + name + "': expected an array of length " + std::to_string(dims[level]) +
                      " at depth " + std::to_string(level));
  }
  for (const auto& child : node) flatten(child, dims, level + 1, out, name);
}

inline json nest(const std::vector<double>& flat, const std::vector<std::size_t>& dims, std::size_t level,
                 std::size_t& pos) {
  if (level == dims.size()) return flat[pos++];
  json arr = json::array();
  for (std::size_t k = 0; k < dims[level]; ++k) arr.push_back(nest(flat, dims, level + 1, pos));
  return arr;
}

inline json nest(const std::vector<double>& flat, const std::vector<std::size_t>& dims) {
  std::size_t pos = 0;
  return nest(flat, dims, 0, pos);
}

inline std::vector<std::size_t> action_dims(const Dynamics& d, bool split_joint) {
  if (!split_joint) return {d.num_joint()};
  std::vector<std::size_t> out;
  for (int c : d.actions.counts()) out.push_back(static_cast<std::size_t>(c));
  return out;
}

}  // namespace detail

inline json to_json(const ZeroSumGame& g) {
  const auto& d = g.dynamics;
  const auto H = static_cast<std::size_t>(d.horizon);
  const auto S = static_cast<std::size_t>(d.num_states);
  const auto A = static_cast<std::size_t>(d.actions.count(0));
  const auto B = static_cast<std::size_t>(d.actions.count(1));
  json doc;
  doc["zero_sum"] = true;
  doc["horizon"] = d.horizon;
  doc["num_states"] = d.num_states;
  doc["action_counts"] = d.actions.counts();
  doc["initial_state"] = d.initial_state;
  doc["reward_kind"] = detail::reward_kind_name(g.reward_kind);
  doc["transition"] = detail::nest(d.transition, {H, S, A, B, S});
  doc["rewards"] = detail::nest(g.reward, {H, S, A, B});
  return doc;
}

inline json to_json(const GeneralSumGame& g) {
  const auto& d = g.dynamics;
  const auto H = static_cast<std::size_t>(d.horizon);
  const auto S = static_cast<std::size_t>(d.num_states);
  const auto J = d.num_joint();
  json doc;
  doc["zero_sum"] = false;
  doc["players"] = g.num_players();
  doc["horizon"] = d.horizon;
  doc["num_states"] = d.num_states;
  doc["action_counts"] = d.actions.counts();
  doc["initial_state"] = d.initial_state;
  doc["reward_kind"] = detail::reward_kind_name(g.reward_kind);
  doc["transition"] = detail::nest(d.transition, {H, S, J, S});
  json rewards = json::array();
  for (const auto& r : g.rewards) rewards.push_back(detail::nest(r, {H, S, J}));
  doc["rewards"] = std::move(rewards);
  return doc;
}

inline json to_json(const AnyGame& g) {
  return std::visit([](const auto& x) { return to_json(x); }, g);
}

// Parses and validates a game document.
inline AnyGame game_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("game document must be an object");
  const bool zero_sum = doc.contains("zero_sum") && detail::field<bool>(doc, "zero_sum");
  const int H = detail::field<int>(doc, "horizon");
  const int S = detail::field<int>(doc, "num_states");
  const auto counts = detail::field<std::vector<int>>(doc, "action_counts");
  const int s1 = doc.contains("initial_state") ? detail::field<int>(doc, "initial_state") : 0;
  const RewardKind kind = doc.contains("reward_kind") ? detail::parse_reward_kind(doc.at("reward_kind")) : RewardKind::Deterministic;
  if (H <= 0 || S <= 0) throw FormatError("horizon and num_states must be positive");
  if (s1 < 0 || s1 >= S) throw FormatError("initial_state out of range");
  for (int c : counts)
    if (c <= 0) throw FormatError("action counts must be positive");
  if (!doc.contains("transition") || !doc.contains("rewards")) throw FormatError("missing transition or rewards");

  const auto Hs = static_cast<std::size_t>(H);
  const auto Ss = static_cast<std::size_t>(S);
  auto check = [](const auto& game) {
    if (auto v = validate(game)) throw FormatError(describe(*v));
  };

  if (zero_sum) {
    if (counts.size() != 2) throw FormatError("zero-sum games have exactly two players");
    auto g = make_zero_sum(H, S, counts[0], counts[1], s1);
    g.reward_kind = kind;
    const auto A = static_cast<std::size_t>(counts[0]);
    const auto B = static_cast<std::size_t>(counts[1]);
    g.dynamics.transition.clear();
    detail::flatten(doc.at("transition"), {Hs, Ss, A, B, Ss}, 0, g.dynamics.transition, "transition");
    g.reward.clear();
    detail::flatten(doc.at("rewards"), {Hs, Ss, A, B}, 0, g.reward, "rewards");
    check(g);
    return g;
  }
  const int m = doc.contains("players") ? detail::field<int>(doc, "players") : static_cast<int>(counts.size());
  if (m != static_cast<int>(counts.size()) || m < 1) throw FormatError("players does not match action_counts");
  auto g = make_general_sum(H, S, counts, s1);
  g.reward_kind = kind;
  const auto J = g.dynamics.num_joint();
  g.dynamics.transition.clear();
  detail::flatten(doc.at("transition"), {Hs, Ss, J, Ss}, 0, g.dynamics.transition, "transition");
  const auto& rw = doc.at("rewards");
  if (!rw.is_array() || rw.size() != static_cast<std::size_t>(m)) throw FormatError("rewards must hold one table per player");
  for (int i = 0; i < m; ++i) {
    auto& table = g.rewards[static_cast<std::size_t>(i)];
    table.clear();
    detail::flatten(rw.at(static_cast<std::size_t>(i)), {Hs, Ss, J}, 0, table, "rewards");
  }
  check(g);
  return g;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path + "': " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << doc.dump(1) << '\n';
}

inline AnyGame load_game(const std::string& path) { return game_from_json(read_json_file(path)); }

inline void save_game(const std::string& path, const AnyGame& g) { write_json_file(path, to_json(g)); }

inline const Dynamics& dynamics_of(const AnyGame& g) {
  return std::visit([](const auto& x) -> const Dynamics& { return x.dynamics; }, g);
}

// ---------------------------------------------------------------------------
// Policies

inline json to_json(const CorrelatedPolicy& pi) {
  json doc;
  doc["kind"] = "correlated";
  doc["horizon"] = pi.horizon;
  doc["num_states"] = pi.num_states;
  doc["action_counts"] = pi.actions.counts();
  doc["probs"] = detail::nest(pi.probs, {static_cast<std::size_t>(pi.horizon), static_cast<std::size_t>(pi.num_states),
                                         pi.num_joint()});
  return doc;
}

inline json to_json(const std::vector<MarkovPolicy>& factors) {
  if (factors.empty()) throw std::invalid_argument("to_json: empty product policy");
  json doc;
  doc["kind"] = "product";
  doc["horizon"] = factors[0].horizon;
  doc["num_states"] = factors[0].num_states;
  std::vector<int> counts;
  json probs = json::array();
  for (const auto& f : factors) {
    counts.push_back(f.num_actions);
    probs.push_back(detail::nest(f.probs, {static_cast<std::size_t>(f.horizon), static_cast<std::size_t>(f.num_states),
                                           static_cast<std::size_t>(f.num_actions)}));
  }
  doc["action_counts"] = counts;
  doc["probs"] = std::move(probs);
  return doc;
}

// Any policy document becomes a CorrelatedPolicy (product policies are
// expanded). Distributions are checked to sum to one.
inline CorrelatedPolicy policy_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("policy document must be an object");
  const auto kind = detail::field<std::string>(doc, "kind");
  const int H = detail::field<int>(doc, "horizon");
  const int S = detail::field<int>(doc, "num_states");
  const auto counts = detail::field<std::vector<int>>(doc, "action_counts");
  if (H <= 0 || S <= 0 || counts.empty()) throw FormatError("policy dimensions must be positive");
  for (int c : counts)
    if (c <= 0) throw FormatError("action counts must be positive");
  const auto Hs = static_cast<std::size_t>(H);
  const auto Ss = static_cast<std::size_t>(S);
  CorrelatedPolicy pi;
  if (kind == "correlated") {
    pi = CorrelatedPolicy(H, S, JointActionSpace(counts));
    pi.probs.clear();
    detail::flatten(doc.at("probs"), {Hs, Ss, pi.num_joint()}, 0, pi.probs, "probs");
  } else if (kind == "product") {
    const auto& probs = doc.at("probs");
    if (!probs.is_array() || probs.size() != counts.size()) throw FormatError("product policy needs one table per player");
    std::vector<MarkovPolicy> factors;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      MarkovPolicy f(static_cast<int>(i), H, S, counts[i]);
      f.probs.clear();
      detail::flatten(probs.at(i), {Hs, Ss, static_cast<std::size_t>(counts[i])}, 0, f.probs, "probs");
      if (!is_valid(f, 1e-9)) throw FormatError("policy of player " + std::to_string(i) + " is not a distribution everywhere");
      factors.push_back(std::move(f));
    }
    pi = product_policy(factors);
  } else {
    throw FormatError("unknown policy kind '" + kind + "'");
  }
  if (!is_valid(pi, 1e-9)) throw FormatError("policy is not a distribution at every (h, s)");
  return pi;
}

inline CorrelatedPolicy load_policy(const std::string& path) { return policy_from_json(read_json_file(path)); }

}  // namespace nashvi
