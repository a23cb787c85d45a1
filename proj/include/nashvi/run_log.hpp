#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace nashvi {

struct EpisodeRecord {
  int episode = 0;               // 1-based
  double optimistic_gap = 0.0;   // (V_up - V_low)(s_1), or V-tilde(s_1) for reward-free exploration
  double best_gap = 0.0;         // running Delta after this episode
  std::optional<double> exact_gap;  // filled at evaluation checkpoints only
  std::int64_t wall_clock_ns = 0;
};

struct SolverStats {
  long long calls = 0;
  double max_residual = 0.0;
  long long iterations = 0;

  void record(double residual, int iters) {
    ++calls;
    if (residual > max_residual) max_residual = residual;
    iterations += iters;
  }
};

struct RunLog {
  std::vector<EpisodeRecord> episodes;
  int output_episode = 1;  // episode whose policy (or model) was output
  SolverStats solver;
};

}  // namespace nashvi
