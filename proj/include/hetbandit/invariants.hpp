#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hetbandit/simulator.hpp"
#include "hetbandit/topology.hpp"

namespace hetbandit {

/// Reconciles one trial's final beliefs with its event log. Returns a
/// description of the first mismatch, or nothing when every identity holds:
///   n_i^k(T) from the log equals the belief's own-pull count,
///   sum_i n_i^k(T) = T,
///   N_i^k(T) = n_i^k(T) + #{t, j neighbor of k : j broadcast at t and chose i}.
inline std::optional<std::string> check_counting_identity(const TrialRecord& rec,
                                                          const MultiStarGraph& graph) {
  const std::size_t K = rec.num_agents;
  const std::size_t N = rec.num_options;
  std::vector<std::size_t> own(K * N, 0);
  std::vector<std::size_t> received(K * N, 0);
  for (std::size_t t = 1; t <= rec.horizon; ++t) {
    for (AgentIndex j = 0; j < K; ++j) {
      const OptionIndex i = rec.choice(t, j);
      ++own[j * N + i];
      if (!rec.broadcast(t, j)) continue;
      for (AgentIndex k : graph.neighbors(j)) ++received[k * N + i];
    }
  }
  for (AgentIndex k = 0; k < K; ++k) {
    const auto& b = rec.final_beliefs.at(k);
    if (b.total_own_pulls() != rec.horizon) {
      return "agent " + std::to_string(k) + " pulled " + std::to_string(b.total_own_pulls()) +
             " times over T=" + std::to_string(rec.horizon);
    }
    for (OptionIndex i = 0; i < N; ++i) {
      const std::string where = "agent " + std::to_string(k) + " option " + std::to_string(i);
      if (b.own_pulls(i) != own[k * N + i]) return where + ": own-pull count disagrees with log";
      if (b.observations(i) != own[k * N + i] + received[k * N + i]) {
        return where + ": N != n + received (" + std::to_string(b.observations(i)) + " vs " +
               std::to_string(own[k * N + i]) + " + " + std::to_string(received[k * N + i]) + ")";
      }
    }
  }
  return std::nullopt;
}

// sum_k sum_i n_i^k(T) = K T
inline bool check_conservation(const TrialRecord& rec) {
  std::size_t total = 0;
  for (const auto& b : rec.final_beliefs) total += b.total_own_pulls();
  return total == rec.num_agents * rec.horizon;
}

struct IdentityCheck {
  double residual = 0.0;   // mean over trials of N - n - p * sum_neighbors n
  double std_error = 0.0;  // standard error of that mean
  // |residual| / std_error; 0 when both vanish, +inf for a nonzero residual
  // with zero spread.
  double z() const {
    if (std_error > 0.0) return std::abs(residual) / std_error;
    return residual == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
};

/// Per (agent, option) check of E[N] - E[n] - p sum_{j ~ k} E[n^j] = 0 at T,
/// using the per-trial final counts. Result indexed [k * N + i].
inline std::vector<IdentityCheck> communication_identity(const AggregateResult& agg,
                                                         const MultiStarGraph& graph, double p) {
  const std::size_t K = agg.num_agents;
  const std::size_t N = agg.num_options;
  const std::size_t R = agg.num_trials;
  std::vector<IdentityCheck> out(K * N);
  std::vector<double> samples(R);
  for (AgentIndex k = 0; k < K; ++k) {
    for (OptionIndex i = 0; i < N; ++i) {
      double mean = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        double neighbor_pulls = 0.0;
        for (AgentIndex j : graph.neighbors(k)) neighbor_pulls += agg.final_own(r, j, i);
        samples[r] = agg.final_observed(r, k, i) - agg.final_own(r, k, i) - p * neighbor_pulls;
        mean += samples[r];
      }
      mean /= static_cast<double>(R);
      double ss = 0.0;
      for (double s : samples) ss += (s - mean) * (s - mean);
      auto& c = out[k * N + i];
      c.residual = mean;
      c.std_error = R > 1 ? std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R)) : 0.0;
    }
  }
  return out;
}

}  // namespace hetbandit
