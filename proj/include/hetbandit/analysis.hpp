#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "hetbandit/environment.hpp"
#include "hetbandit/errors.hpp"
#include "hetbandit/policy.hpp"
#include "hetbandit/simulator.hpp"
#include "hetbandit/topology.hpp"

namespace hetbandit {

// Cumulative regret per time step; values[t - 1] is the regret at t.
struct RegretTrajectory {
  std::vector<double> values;

  std::size_t horizon() const noexcept { return values.size(); }
  double at(std::size_t t) const { return t == 0 ? 0.0 : values.at(t - 1); }
};

// Regret bound per time step; values[t - 1] is the bound at horizon t.
struct BoundCurve {
  std::vector<double> values;

  std::size_t horizon() const noexcept { return values.size(); }
  double at(std::size_t t) const { return values.at(t - 1); }
};

struct RoleRegret {
  RegretTrajectory center;
  RegretTrajectory peripheral;  // empty when there are no peripheral agents
  RegretTrajectory average;
  bool has_peripheral = true;
};

inline RegretTrajectory empirical_group_regret(const AggregateResult& agg, const GapVector& gaps) {
  if (gaps.size() != agg.num_options) {
    throw DomainError("gap vector has " + std::to_string(gaps.size()) +
                      " entries but the aggregate has " + std::to_string(agg.num_options) +
                      " options");
  }
  RegretTrajectory out;
  out.values.assign(agg.horizon, 0.0);
  for (AgentIndex k = 0; k < agg.num_agents; ++k) {
    for (OptionIndex i = 0; i < agg.num_options; ++i) {
      const double d = gaps[i];
      if (d == 0.0) continue;
      for (std::size_t t = 1; t <= agg.horizon; ++t) out.values[t - 1] += d * agg.mean_pull(k, i, t);
    }
  }
  return out;
}

// Expected regret of agent k alone.
inline RegretTrajectory agent_regret(const AggregateResult& agg, const GapVector& gaps,
                                     AgentIndex k) {
  if (gaps.size() != agg.num_options) throw DomainError("gap/model dimension mismatch");
  RegretTrajectory out;
  out.values.assign(agg.horizon, 0.0);
  for (OptionIndex i = 0; i < agg.num_options; ++i) {
    if (gaps[i] == 0.0) continue;
    for (std::size_t t = 1; t <= agg.horizon; ++t) out.values[t - 1] += gaps[i] * agg.mean_pull(k, i, t);
  }
  return out;
}

/// Mean regret of a center agent, of a peripheral agent, and of the average
/// agent (group / K). With m = K the peripheral series is left empty and
/// has_peripheral is false.
inline RoleRegret per_role_regret(const AggregateResult& agg, const GapVector& gaps) {
  const std::size_t K = agg.num_agents;
  const std::size_t m = agg.num_centers;
  RoleRegret out;
  out.center.values.assign(agg.horizon, 0.0);
  out.has_peripheral = m < K;
  if (out.has_peripheral) out.peripheral.values.assign(agg.horizon, 0.0);
  for (AgentIndex k = 0; k < K; ++k) {
    const auto r = agent_regret(agg, gaps, k);
    auto& target = k < m ? out.center.values : out.peripheral.values;
    for (std::size_t t = 0; t < agg.horizon; ++t) target[t] += r.values[t];
  }
  for (auto& v : out.center.values) v /= static_cast<double>(m);
  for (auto& v : out.peripheral.values) v /= static_cast<double>(K - m);
  out.average = empirical_group_regret(agg, gaps);
  for (auto& v : out.average.values) v /= static_cast<double>(K);
  return out;
}

/// eta_i(t) = 8 sigma^2 (xi + 1) log t / Delta^2
inline double eta(double sigma, double xi, double gap, std::size_t t) {
  if (!(gap > 0.0)) throw DomainError("eta is undefined for a zero gap (optimal option)");
  if (t < 1) throw DomainError("eta needs t >= 1");
  return 8.0 * sigma * sigma * (xi + 1.0) * std::log(static_cast<double>(t)) / (gap * gap);
}

// [1 - p (K - m) / m]^+
inline double sparse_broadcast_factor(std::size_t K, std::size_t m, double p) {
  const double ratio = static_cast<double>(K - m) / static_cast<double>(m);
  return std::max(1.0 - p * ratio, 0.0);
}

// Leading constant of the heterogeneous bound.
inline double c1(std::size_t K, std::size_t m, double bias, double p) {
  if (m < 1 || m > K) throw DomainError("c1 needs 1 <= m <= K");
  check_probability(p);
  const double md = static_cast<double>(m);
  return static_cast<double>(K - m) +
         md * (1.0 + bias) / (1.0 + p * (md - 1.0)) * sparse_broadcast_factor(K, m, p);
}

// Leading constant of the homogeneous bound: c1 with zero bias.
inline double c2(std::size_t K, std::size_t m, double p) { return c1(K, m, 0.0, p); }

/// Tail probability bound for one agent's estimate:
///   log((1 + d) t) / (log(zeta) t^((xi + 1)(1 + alpha)))
inline double tail_bound(double zeta, double xi, double bias, std::size_t degree, std::size_t t) {
  if (!(zeta > 1.0)) throw DomainError("zeta must be > 1");
  if (!(xi > 1.0)) throw DomainError("xi must be > 1");
  if (t < 1) throw DomainError("tail bound needs t >= 1");
  const double td = static_cast<double>(t);
  return std::log((1.0 + static_cast<double>(degree)) * td) /
         (std::log(zeta) * std::pow(td, (xi + 1.0) * (1.0 + bias)));
}

/// Everything the closed-form group regret bounds depend on.
struct BoundParams {
  std::size_t num_agents = 0;
  std::size_t num_centers = 0;
  double d_avg = 0.0;
  double d_cen = 0.0;
  double bias = 0.0;  // common exploration bias of the centers
  double p = 0.0;
  double xi = 1.01;
  double zeta = 2.0;
  std::vector<double> gaps;    // per option; the optimal option has gap 0
  std::vector<double> sigmas;  // per option

  void validate() const {
    if (num_centers < 1 || num_centers > num_agents) throw DomainError("bound needs 1 <= m <= K");
    check_probability(p);
    if (!(xi > 1.0)) throw DomainError("xi must be > 1");
    if (!(zeta > 1.0)) throw DomainError("zeta must be > 1");
    if (!(bias >= 0.0)) throw DomainError("bias must be >= 0");
    if (gaps.size() != sigmas.size()) throw DomainError("gaps and sigmas differ in length");
    for (double g : gaps) {
      if (!(g >= 0.0)) throw DomainError("gaps must be nonnegative");
    }
  }

  static BoundParams for_multi_star(const MultiStarGraph& g, const RewardModel& model, double p,
                                    double xi, double zeta) {
    const DegreeStats stats = degree_stats(g);
    BoundParams b;
    b.num_agents = g.num_agents();
    b.num_centers = g.num_centers();
    b.d_avg = stats.network_avg;
    b.d_cen = static_cast<double>(g.center_degree());
    b.bias = exploration_bias(g, stats, 0, p);
    b.p = p;
    b.xi = xi;
    b.zeta = zeta;
    b.gaps = model.gaps().values;
    b.sigmas = model.sigmas();
    b.validate();
    return b;
  }
};

/// Right-hand side of the group regret bound at horizon T.
///
/// Heterogeneous:
///   c1 sum_i 8 sigma_i^2 (xi+1) log T / Delta_i
///   + 2/log(zeta) sum_i Delta_i ( K log(1 + d_avg)
///       + (K-m)(xi log 4 + 1) / (xi^2 2^xi)
///       + m (log(2(1 + d_cen)) x + 1) / (x^2 2^x) ),   x = xi alpha + xi + alpha
///
/// Homogeneous is the same expression with alpha = 0 (so c1 becomes c2).
/// Sums run over suboptimal options; all logs are natural.
inline double regret_bound_value(const BoundParams& b, std::size_t T, PolicyMode mode) {
  b.validate();
  if (T < 1) throw DomainError("bound needs T >= 1");
  const double alpha = mode == PolicyMode::heterogeneous ? b.bias : 0.0;
  const double K = static_cast<double>(b.num_agents);
  const double m = static_cast<double>(b.num_centers);
  const double xi = b.xi;
  const double lead = c1(b.num_agents, b.num_centers, alpha, b.p);

  const double x = xi * alpha + xi + alpha;
  const double per_gap = K * std::log(1.0 + b.d_avg) +
                         (K - m) * (xi * std::log(4.0) + 1.0) / (xi * xi * std::exp2(xi)) +
                         m * (std::log(2.0 * (1.0 + b.d_cen)) * x + 1.0) / (x * x * std::exp2(x));

  double log_sum = 0.0;
  double gap_sum = 0.0;
  for (std::size_t i = 0; i < b.gaps.size(); ++i) {
    const double d = b.gaps[i];
    if (d == 0.0) continue;
    log_sum += 8.0 * b.sigmas[i] * b.sigmas[i] * (xi + 1.0) / d;
    gap_sum += d;
  }
  return lead * log_sum * std::log(static_cast<double>(T)) +
         2.0 / std::log(b.zeta) * gap_sum * per_gap;
}

inline BoundCurve regret_bound(const BoundParams& b, std::size_t T, PolicyMode mode) {
  BoundCurve curve;
  curve.values.resize(T);
  for (std::size_t t = 1; t <= T; ++t) curve.values[t - 1] = regret_bound_value(b, t, mode);
  return curve;
}

struct DominanceReport {
  std::vector<double> margin;            // bound - empirical, index t - 1
  std::vector<std::size_t> violations;   // time steps (>= from_t) with negative margin

  bool dominated() const noexcept { return violations.empty(); }
};

inline DominanceReport bound_dominance_report(const RegretTrajectory& empirical,
                                              const BoundCurve& bound, std::size_t from_t = 1) {
  if (empirical.horizon() != bound.horizon()) {
    throw DomainError("time axes differ: empirical has " + std::to_string(empirical.horizon()) +
                      " steps, bound has " + std::to_string(bound.horizon()));
  }
  DominanceReport rep;
  rep.margin.resize(bound.horizon());
  for (std::size_t t = 1; t <= bound.horizon(); ++t) {
    rep.margin[t - 1] = bound.at(t) - empirical.at(t);
    if (t >= from_t && rep.margin[t - 1] < 0.0) rep.violations.push_back(t);
  }
  return rep;
}

}  // namespace hetbandit
