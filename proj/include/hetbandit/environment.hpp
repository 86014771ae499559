#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hetbandit/errors.hpp"
#include "hetbandit/rng.hpp"

namespace hetbandit {

using OptionIndex = std::size_t;

enum class RewardKind { gaussian, bernoulli };

inline std::string_view to_string(RewardKind kind) {
  return kind == RewardKind::gaussian ? "gaussian" : "bernoulli";
}

inline RewardKind parse_reward_kind(std::string_view text) {
  if (text == "gaussian") return RewardKind::gaussian;
  if (text == "bernoulli") return RewardKind::bernoulli;
  throw DomainError("unknown reward kind '" + std::string(text) +
                    "' (expected gaussian or bernoulli)");
}

struct OptionSpec {
  double mean = 0.0;
  double variance_proxy = 1.0;
  RewardKind kind = RewardKind::gaussian;

  friend bool operator==(const OptionSpec&, const OptionSpec&) = default;
};

// Delta_i = mu_{i*} - mu_i, one entry per option; zero exactly at i*.
struct GapVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](OptionIndex i) const { return values.at(i); }
  friend bool operator==(const GapVector&, const GapVector&) = default;
};

/// Sub-Gaussian bandit instance. Validated on construction: at least two
/// options, a unique best mean, positive variance proxies, and for Bernoulli
/// options mu in [0, 1] with proxy >= 1/4.
class RewardModel {
 public:
  explicit RewardModel(std::vector<OptionSpec> options) : options_(std::move(options)) {
    if (options_.size() < 2) throw DomainError("reward model needs at least 2 options");
    for (std::size_t i = 0; i < options_.size(); ++i) {
      const auto& o = options_[i];
      const std::string where = "option " + std::to_string(i);
      if (!std::isfinite(o.mean)) throw DomainError(where + ": mean must be finite");
      if (!(o.variance_proxy > 0.0) || !std::isfinite(o.variance_proxy)) {
        throw DomainError(where + ": variance proxy must be positive and finite");
      }
      if (o.kind == RewardKind::bernoulli) {
        if (o.mean < 0.0 || o.mean > 1.0) {
          throw DomainError(where + ": bernoulli mean must lie in [0, 1]");
        }
        if (o.variance_proxy < 0.25) {
          throw DomainError(where + ": bernoulli variance proxy must be >= 1/4");
        }
      }
    }
    best_ = 0;
    for (std::size_t i = 1; i < options_.size(); ++i) {
      if (options_[i].mean > options_[best_].mean) best_ = i;
    }
    for (std::size_t i = 0; i < options_.size(); ++i) {
      if (i != best_ && options_[i].mean == options_[best_].mean) {
        throw DomainError("options " + std::to_string(best_) + " and " + std::to_string(i) +
                          " tie for the maximum mean; gaps must be positive");
      }
    }
  }

  std::size_t size() const noexcept { return options_.size(); }
  const std::vector<OptionSpec>& options() const noexcept { return options_; }
  const OptionSpec& option(OptionIndex i) const { return options_.at(i); }
  double mean(OptionIndex i) const { return option(i).mean; }
  double sigma(OptionIndex i) const { return std::sqrt(option(i).variance_proxy); }

  std::vector<double> sigmas() const {
    std::vector<double> out(options_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigma(i);
    return out;
  }

  OptionIndex optimal_option() const noexcept { return best_; }

  GapVector gaps() const {
    GapVector g;
    g.values.resize(options_.size());
    for (std::size_t i = 0; i < options_.size(); ++i) {
      g.values[i] = i == best_ ? 0.0 : options_[best_].mean - options_[i].mean;
    }
    return g;
  }

  // Gaussian consumes two uniforms, Bernoulli one.
  double sample(OptionIndex i, RandomStream& rng) const {
    if (i >= options_.size()) {
      throw DomainError("option index " + std::to_string(i) + " outside model of " +
                        std::to_string(options_.size()) + " options");
    }
    const auto& o = options_[i];
    if (o.kind == RewardKind::bernoulli) return rng.uniform() < o.mean ? 1.0 : 0.0;
    return o.mean + std::sqrt(o.variance_proxy) * rng.standard_normal();
  }

  friend bool operator==(const RewardModel&, const RewardModel&) = default;

 private:
  std::vector<OptionSpec> options_;
  OptionIndex best_ = 0;
};

inline OptionIndex optimal_option(const RewardModel& model) { return model.optimal_option(); }
inline GapVector reward_gaps(const RewardModel& model) { return model.gaps(); }
inline double sample_reward(const RewardModel& model, OptionIndex i, RandomStream& rng) {
  return model.sample(i, rng);
}

// Ten Gaussian options with unit variance; option 0 has mean 11, the rest 10.
inline RewardModel default_reward_model() {
  std::vector<OptionSpec> options(10, OptionSpec{10.0, 1.0, RewardKind::gaussian});
  options[0].mean = 11.0;
  return RewardModel(std::move(options));
}

}  // namespace hetbandit
