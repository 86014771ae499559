#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "hetbandit/environment.hpp"
#include "hetbandit/errors.hpp"
#include "hetbandit/policy.hpp"
#include "hetbandit/rng.hpp"
#include "hetbandit/topology.hpp"

namespace hetbandit {

// Entry k is 1 when agent k broadcasts this step.
using BroadcastMask = std::vector<std::uint8_t>;

inline void check_probability(double p, std::string_view name = "p") {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

// One Bernoulli(p) draw per agent, in agent order; always consumes K uniforms.
inline void draw_broadcasters(std::size_t num_agents, double p, RandomStream& rng,
                              BroadcastMask& out) {
  check_probability(p);
  out.resize(num_agents);
  for (std::size_t k = 0; k < num_agents; ++k) out[k] = rng.uniform() < p ? 1 : 0;
}

inline BroadcastMask draw_broadcasters(std::size_t num_agents, double p, RandomStream& rng) {
  BroadcastMask out;
  draw_broadcasters(num_agents, p, rng, out);
  return out;
}

struct SimConfig {
  std::size_t num_agents = 36;
  std::size_t num_centers = 2;
  RewardModel model = default_reward_model();
  double p = 0.8;
  std::size_t horizon = 1000;
  double xi = 1.01;
  PolicyMode mode = PolicyMode::heterogeneous;
  std::uint64_t master_seed = 1;
  std::size_t num_trials = 1000;
  bool record_rewards = false;

  void validate() const {
    (void)MultiStarGraph(num_agents, num_centers);
    check_probability(p);
    make_policy_params(model, xi, mode);
    if (model.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw DomainError("at most 65535 options are supported");
    }
    if (horizon < model.size()) {
      throw DomainError("horizon T=" + std::to_string(horizon) +
                        " must be at least the number of options (" +
                        std::to_string(model.size()) + ")");
    }
    if (num_trials < 1) throw DomainError("number of trials must be >= 1");
  }
};

struct StepEvents {
  std::vector<OptionIndex> choices;
  std::vector<double> rewards;
  BroadcastMask broadcast;
};

/// State of one trial: the graph, the bandit instance, and every agent's
/// belief. Each step runs in fixed phases: all agents choose from end-of-
/// previous-step beliefs, all rewards are drawn, broadcasters are drawn, and
/// only then are own and received observations recorded.
class World {
 public:
  World(MultiStarGraph graph, RewardModel model, PolicyParams params, double p)
      : graph_(std::move(graph)), model_(std::move(model)), params_(std::move(params)), p_(p) {
    check_probability(p);
    params_.validate();
    if (params_.sigma.size() != model_.size()) {
      throw DomainError("policy has " + std::to_string(params_.sigma.size()) +
                        " sigmas for a model of " + std::to_string(model_.size()) + " options");
    }
    const auto biases = exploration_biases(graph_, p);
    beliefs_.reserve(biases.size());
    for (double a : biases) beliefs_.emplace_back(model_.size(), a);
  }

  explicit World(const SimConfig& config)
      : World(MultiStarGraph(config.num_agents, config.num_centers), config.model,
              make_policy_params(config.model, config.xi, config.mode), config.p) {}

  const MultiStarGraph& graph() const noexcept { return graph_; }
  const RewardModel& model() const noexcept { return model_; }
  const PolicyParams& params() const noexcept { return params_; }
  double broadcast_probability() const noexcept { return p_; }
  const std::vector<AgentBelief>& beliefs() const noexcept { return beliefs_; }
  const AgentBelief& belief(AgentIndex k) const { return beliefs_.at(k); }

  void step(std::size_t t, RandomStream& rng, StepEvents& events) {
    const std::size_t agents = beliefs_.size();
    events.choices.resize(agents);
    events.rewards.resize(agents);
    for (AgentIndex k = 0; k < agents; ++k) {
      events.choices[k] = choose_option(beliefs_[k], params_, t, rng);
    }
    for (AgentIndex k = 0; k < agents; ++k) {
      events.rewards[k] = model_.sample(events.choices[k], rng);
    }
    draw_broadcasters(agents, p_, rng, events.broadcast);
    apply(events.choices, events.rewards, events.broadcast);
  }

  StepEvents step(std::size_t t, RandomStream& rng) {
    StepEvents events;
    step(t, rng, events);
    return events;
  }

  // Delivery and belief update for already decided choices and rewards.
  void apply(std::span<const OptionIndex> choices, std::span<const double> rewards,
             std::span<const std::uint8_t> broadcast) {
    const std::size_t agents = beliefs_.size();
    if (choices.size() != agents || rewards.size() != agents || broadcast.size() != agents) {
      throw DomainError("step events must have one entry per agent");
    }
    for (AgentIndex k = 0; k < agents; ++k) beliefs_[k].record_own(choices[k], rewards[k]);
    for (AgentIndex j = 0; j < agents; ++j) {
      if (!broadcast[j]) continue;
      for (AgentIndex k : graph_.neighbors(j)) beliefs_[k].record_received(choices[j], rewards[j]);
    }
  }

 private:
  MultiStarGraph graph_;
  RewardModel model_;
  PolicyParams params_;
  double p_;
  std::vector<AgentBelief> beliefs_;
};

/// Compact log of one trial: one option index and one broadcast flag per
/// agent per step, laid out step-major ([(t-1) * K + k]).
struct TrialRecord {
  std::size_t num_agents = 0;
  std::size_t num_options = 0;
  std::size_t horizon = 0;
  std::vector<std::uint16_t> choices;
  BroadcastMask broadcasts;
  std::vector<double> rewards;  // empty unless SimConfig::record_rewards
  std::vector<AgentBelief> final_beliefs;

  OptionIndex choice(std::size_t t, AgentIndex k) const {
    return choices.at((t - 1) * num_agents + k);
  }
  bool broadcast(std::size_t t, AgentIndex k) const {
    return broadcasts.at((t - 1) * num_agents + k) != 0;
  }

  // n_i^k(t) for every option, rebuilt from the choice log.
  std::vector<std::size_t> own_pulls(AgentIndex k, std::size_t t) const {
    std::vector<std::size_t> counts(num_options, 0);
    for (std::size_t s = 1; s <= t; ++s) ++counts[choice(s, k)];
    return counts;
  }

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

inline TrialRecord run_trial(const SimConfig& config, std::uint64_t seed) {
  config.validate();
  World world(config);
  RandomStream rng(seed);
  const std::size_t agents = config.num_agents;
  TrialRecord rec;
  rec.num_agents = agents;
  rec.num_options = config.model.size();
  rec.horizon = config.horizon;
  rec.choices.resize(agents * config.horizon);
  rec.broadcasts.resize(agents * config.horizon);
  if (config.record_rewards) rec.rewards.resize(agents * config.horizon);

  StepEvents events;
  for (std::size_t t = 1; t <= config.horizon; ++t) {
    world.step(t, rng, events);
    const std::size_t base = (t - 1) * agents;
    for (AgentIndex k = 0; k < agents; ++k) {
      rec.choices[base + k] = static_cast<std::uint16_t>(events.choices[k]);
      rec.broadcasts[base + k] = events.broadcast[k];
      if (config.record_rewards) rec.rewards[base + k] = events.rewards[k];
    }
  }
  rec.final_beliefs = world.beliefs();
  return rec;
}

// Mean and standard error of the mean, per time step (index t-1).
struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> std_error;

  friend bool operator==(const SeriesStats&, const SeriesStats&) = default;
};

struct AggregateResult {
  std::size_t num_agents = 0;
  std::size_t num_centers = 0;
  std::size_t num_options = 0;
  std::size_t horizon = 0;
  std::size_t num_trials = 0;

  // E[n_i^k(t)] at [(k * N + i) * T + (t - 1)].
  std::vector<double> mean_pulls;
  // E[n_i^k(T)] and E[N_i^k(T)] at [k * N + i].
  std::vector<double> mean_final_own;
  std::vector<double> mean_final_observed;
  // Per-trial final counts at [(r * K + k) * N + i], kept for statistical checks.
  std::vector<std::uint32_t> trial_final_own;
  std::vector<std::uint32_t> trial_final_observed;
  // Mean per-agent regret trajectory at [k * T + (t - 1)].
  std::vector<double> mean_agent_regret;

  SeriesStats group_regret;
  SeriesStats center_regret;      // mean over center agents
  SeriesStats peripheral_regret;  // mean over peripheral agents; empty when m = K
  SeriesStats average_regret;     // group / K

  double mean_pull(AgentIndex k, OptionIndex i, std::size_t t) const {
    return mean_pulls.at((k * num_options + i) * horizon + (t - 1));
  }
  double final_own(std::size_t r, AgentIndex k, OptionIndex i) const {
    return trial_final_own.at((r * num_agents + k) * num_options + i);
  }
  double final_observed(std::size_t r, AgentIndex k, OptionIndex i) const {
    return trial_final_observed.at((r * num_agents + k) * num_options + i);
  }

  friend bool operator==(const AggregateResult&, const AggregateResult&) = default;
};

namespace detail {

// Two-pass mean / standard error over trial-major samples[r * T + t], reduced
// in trial order so the result does not depend on scheduling.
inline SeriesStats series_stats(std::span<const double> samples, std::size_t trials,
                                std::size_t horizon) {
  SeriesStats s;
  s.mean.assign(horizon, 0.0);
  s.std_error.assign(horizon, 0.0);
  for (std::size_t r = 0; r < trials; ++r) {
    for (std::size_t t = 0; t < horizon; ++t) s.mean[t] += samples[r * horizon + t];
  }
  for (auto& m : s.mean) m /= static_cast<double>(trials);
  if (trials < 2) return s;
  for (std::size_t r = 0; r < trials; ++r) {
    for (std::size_t t = 0; t < horizon; ++t) {
      const double d = samples[r * horizon + t] - s.mean[t];
      s.std_error[t] += d * d;
    }
  }
  const double n = static_cast<double>(trials);
  for (auto& v : s.std_error) v = std::sqrt(v / (n - 1.0) / n);
  return s;
}

}  // namespace detail

/// Runs config.num_trials independent trials, trial r seeded with
/// trial_seed(master_seed, r), on up to `workers` threads (0 = hardware
/// concurrency). Output is bitwise independent of the worker count: pull
/// counts are summed as integers and real-valued series are reduced in
/// trial order.
inline AggregateResult run_monte_carlo(const SimConfig& config, std::size_t workers = 1) {
  config.validate();
  const std::size_t K = config.num_agents;
  const std::size_t N = config.model.size();
  const std::size_t T = config.horizon;
  const std::size_t R = config.num_trials;
  const std::size_t m = config.num_centers;
  const GapVector gaps = config.model.gaps();

  std::vector<double> group(R * T), center(R * T), peripheral(m < K ? R * T : 0);
  AggregateResult agg;
  agg.num_agents = K;
  agg.num_centers = m;
  agg.num_options = N;
  agg.horizon = T;
  agg.num_trials = R;
  agg.trial_final_own.resize(R * K * N);
  agg.trial_final_observed.resize(R * K * N);

  // Per-step pull increments, summed over trials: [(k * N + i) * T + t - 1].
  std::vector<std::uint64_t> increments(K * N * T, 0);
  std::mutex merge_mutex;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  SimConfig trial_config = config;
  trial_config.record_rewards = false;

  auto worker = [&] {
    std::vector<std::uint64_t> local(K * N * T, 0);
    try {
      for (std::size_t r = next++; r < R; r = next++) {
        const TrialRecord rec = run_trial(trial_config, trial_seed(config.master_seed, r));
        double g = 0.0, c = 0.0, q = 0.0;
        for (std::size_t t = 1; t <= T; ++t) {
          for (AgentIndex k = 0; k < K; ++k) {
            const OptionIndex i = rec.choice(t, k);
            ++local[(k * N + i) * T + (t - 1)];
            const double d = gaps.values[i];
            g += d;
            (k < m ? c : q) += d;
          }
          group[r * T + t - 1] = g;
          center[r * T + t - 1] = c / static_cast<double>(m);
          if (m < K) peripheral[r * T + t - 1] = q / static_cast<double>(K - m);
        }
        for (AgentIndex k = 0; k < K; ++k) {
          for (OptionIndex i = 0; i < N; ++i) {
            const std::size_t at = (r * K + k) * N + i;
            agg.trial_final_own[at] =
                static_cast<std::uint32_t>(rec.final_beliefs[k].own_pulls(i));
            agg.trial_final_observed[at] =
                static_cast<std::uint32_t>(rec.final_beliefs[k].observations(i));
          }
        }
      }
    } catch (...) {
      std::lock_guard lock(merge_mutex);
      if (!failure) failure = std::current_exception();
      next = R;
    }
    std::lock_guard lock(merge_mutex);
    for (std::size_t x = 0; x < local.size(); ++x) increments[x] += local[x];
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, R);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const double n = static_cast<double>(R);
  agg.mean_pulls.resize(K * N * T);
  for (std::size_t row = 0; row < K * N; ++row) {
    std::uint64_t running = 0;
    for (std::size_t t = 0; t < T; ++t) {
      running += increments[row * T + t];
      agg.mean_pulls[row * T + t] = static_cast<double>(running) / n;
    }
  }
  agg.mean_agent_regret.assign(K * T, 0.0);
  for (AgentIndex k = 0; k < K; ++k) {
    for (OptionIndex i = 0; i < N; ++i) {
      if (gaps.values[i] == 0.0) continue;
      for (std::size_t t = 0; t < T; ++t) {
        agg.mean_agent_regret[k * T + t] += gaps.values[i] * agg.mean_pulls[(k * N + i) * T + t];
      }
    }
  }
  agg.mean_final_own.assign(K * N, 0.0);
  agg.mean_final_observed.assign(K * N, 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t x = 0; x < K * N; ++x) {
      agg.mean_final_own[x] += agg.trial_final_own[r * K * N + x];
      agg.mean_final_observed[x] += agg.trial_final_observed[r * K * N + x];
    }
  }
  for (auto& v : agg.mean_final_own) v /= n;
  for (auto& v : agg.mean_final_observed) v /= n;

  agg.group_regret = detail::series_stats(group, R, T);
  agg.center_regret = detail::series_stats(center, R, T);
  if (m < K) agg.peripheral_regret = detail::series_stats(peripheral, R, T);
  agg.average_regret = agg.group_regret;
  for (auto& v : agg.average_regret.mean) v /= static_cast<double>(K);
  for (auto& v : agg.average_regret.std_error) v /= static_cast<double>(K);
  return agg;
}

}  // namespace hetbandit
