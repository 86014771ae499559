#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hetbandit/environment.hpp"
#include "hetbandit/errors.hpp"
#include "hetbandit/rng.hpp"
#include "hetbandit/topology.hpp"

namespace hetbandit {

enum class PolicyMode { heterogeneous, homogeneous };

inline std::string_view to_string(PolicyMode mode) {
  return mode == PolicyMode::heterogeneous ? "heterogeneous" : "homogeneous";
}

inline PolicyMode parse_policy_mode(std::string_view text) {
  if (text == "heterogeneous") return PolicyMode::heterogeneous;
  if (text == "homogeneous") return PolicyMode::homogeneous;
  throw DomainError("unknown policy mode '" + std::string(text) +
                    "' (expected heterogeneous or homogeneous)");
}

struct PolicyParams {
  double xi = 1.01;
  PolicyMode mode = PolicyMode::heterogeneous;
  std::vector<double> sigma;  // per option, sqrt of the variance proxy

  void validate() const {
    if (!(xi > 1.0) || !std::isfinite(xi)) {
      throw DomainError("xi must be a finite value > 1, got " + std::to_string(xi));
    }
    for (double s : sigma) {
      if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("sigma must be positive");
    }
  }
};

inline PolicyParams make_policy_params(const RewardModel& model, double xi, PolicyMode mode) {
  PolicyParams params{xi, mode, model.sigmas()};
  params.validate();
  return params;
}

/// One agent's sufficient statistics: own pulls n_i, observations N_i (own
/// pulls plus received broadcasts), reward sums S_i, and its bias alpha.
class AgentBelief {
 public:
  AgentBelief() = default;
  AgentBelief(std::size_t num_options, double bias)
      : own_(num_options, 0), observed_(num_options, 0), sums_(num_options, 0.0), bias_(bias) {
    if (!(bias >= 0.0)) throw DomainError("exploration bias must be nonnegative");
  }

  std::size_t num_options() const noexcept { return own_.size(); }
  std::size_t own_pulls(OptionIndex i) const { return own_.at(i); }
  std::size_t observations(OptionIndex i) const { return observed_.at(i); }
  double reward_sum(OptionIndex i) const { return sums_.at(i); }
  double bias() const noexcept { return bias_; }

  std::size_t total_own_pulls() const noexcept {
    std::size_t n = 0;
    for (auto c : own_) n += c;
    return n;
  }

  bool has_estimate(OptionIndex i) const { return observations(i) > 0; }

  double estimate(OptionIndex i) const {
    if (observations(i) == 0) {
      throw DomainError("no observations of option " + std::to_string(i) + " yet");
    }
    return sums_[i] / static_cast<double>(observed_[i]);
  }

  void record_own(OptionIndex i, double reward) {
    check(i);
    ++own_[i];
    ++observed_[i];
    sums_[i] += reward;
  }

  void record_received(OptionIndex i, double reward) {
    check(i);
    ++observed_[i];
    sums_[i] += reward;
  }

  friend bool operator==(const AgentBelief&, const AgentBelief&) = default;

 private:
  void check(OptionIndex i) const {
    if (i >= own_.size()) {
      throw DomainError("option index " + std::to_string(i) + " outside belief of " +
                        std::to_string(own_.size()) + " options");
    }
  }

  std::vector<std::size_t> own_;
  std::vector<std::size_t> observed_;
  std::vector<double> sums_;
  double bias_ = 0.0;
};

namespace detail {

// 2 (1 + alpha) (xi + 1) log t; shared by every index evaluation so that the
// single-option and the argmax paths round identically.
inline double width_scale(double bias, double xi, std::size_t t) {
  return 2.0 * (1.0 + bias) * (xi + 1.0) * std::log(static_cast<double>(t));
}

inline double width(double sigma, double scale, std::size_t observations) {
  return sigma * std::sqrt(scale / static_cast<double>(observations));
}

inline double effective_bias(const AgentBelief& belief, const PolicyParams& params) {
  return params.mode == PolicyMode::homogeneous ? 0.0 : belief.bias();
}

}  // namespace detail

/// C = sigma * sqrt(2 (1 + alpha) (xi + 1) log t / N), natural log.
inline double uncertainty(double sigma, double bias, double xi, std::size_t t,
                          std::size_t observations) {
  if (t < 1) throw DomainError("time step must be >= 1");
  if (observations < 1) throw DomainError("uncertainty needs at least one observation");
  return detail::width(sigma, detail::width_scale(bias, xi, t), observations);
}

// Q = S/N + C. Homogeneous mode evaluates with alpha = 0.
inline double ucb_index(const AgentBelief& belief, const PolicyParams& params, OptionIndex i,
                        std::size_t t) {
  if (t < 1) throw DomainError("time step must be >= 1");
  const double scale = detail::width_scale(detail::effective_bias(belief, params), params.xi, t);
  return belief.estimate(i) + detail::width(params.sigma.at(i), scale, belief.observations(i));
}

/// Index of a maximum of `values`; ties resolved uniformly at random. Draws
/// one uniform only when more than one index attains the maximum.
inline std::size_t select_argmax(std::span<const double> values, RandomStream& rng) {
  std::size_t best = 0;
  std::size_t ties = 1;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) {
      best = i;
      ties = 1;
    } else if (values[i] == values[best]) {
      ++ties;
    }
  }
  if (ties == 1) return best;
  std::size_t pick = rng.uniform_index(ties);
  for (std::size_t i = best; i < values.size(); ++i) {
    if (values[i] == values[best] && pick-- == 0) return i;
  }
  return best;
}

/// Sampling rule for step t (1-based). The first N steps pull options
/// 0, 1, ..., N-1 in turn so every estimate exists before any index is
/// compared; afterwards the option maximizing Q over all options is chosen.
inline OptionIndex choose_option(const AgentBelief& belief, const PolicyParams& params,
                                 std::size_t t, RandomStream& rng) {
  const std::size_t n = belief.num_options();
  if (t < 1) throw DomainError("time step must be >= 1");
  if (t <= n) return (t - 1) % n;

  const double scale = detail::width_scale(detail::effective_bias(belief, params), params.xi, t);
  // Small fixed buffer avoids a heap allocation per decision.
  constexpr std::size_t kInline = 64;
  double inline_q[kInline];
  std::vector<double> heap_q;
  std::span<double> q;
  if (n <= kInline) {
    q = std::span<double>(inline_q, n);
  } else {
    heap_q.resize(n);
    q = heap_q;
  }
  for (OptionIndex i = 0; i < n; ++i) {
    const std::size_t obs = belief.observations(i);
    if (obs == 0) {
      // Only reachable when a caller skips forced initialization.
      throw DomainError("option " + std::to_string(i) + " has no observations at t=" +
                        std::to_string(t));
    }
    q[i] = belief.reward_sum(i) / static_cast<double>(obs) +
           detail::width(params.sigma[i], scale, obs);
  }
  return select_argmax(q, rng);
}

}  // namespace hetbandit
