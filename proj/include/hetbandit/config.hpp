#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hetbandit/environment.hpp"
#include "hetbandit/errors.hpp"
#include "hetbandit/policy.hpp"
#include "hetbandit/simulator.hpp"
#include "hetbandit/text.hpp"
#include "hetbandit/topology.hpp"

namespace hetbandit {

inline constexpr std::string_view kVersion = "0.1.0";

struct EmitFlags {
  bool trajectories = false;  // group regret over time, per sweep point
  bool roles = false;         // center / peripheral / average regret over time
  bool bounds = false;        // closed-form bound curves beside the empirical curve
  bool event_log = false;     // step-by-step log of trial 0 of the first point

  friend bool operator==(const EmitFlags&, const EmitFlags&) = default;
};

/// A sweep over centers x p x policy modes sharing every other setting.
///
/// Defaults: K = 36, m = 2, p = 0.8, both modes, T = 1000, R = 1000,
/// xi = 1.01, zeta = 2, seed 1, ten unit-variance Gaussian options with
/// means 11, 10, ..., 10.
struct ExperimentSpec {
  std::string preset;
  std::size_t num_agents = 36;
  std::vector<std::size_t> centers{2};
  std::vector<double> p_values{0.8};
  std::vector<PolicyMode> modes{PolicyMode::heterogeneous, PolicyMode::homogeneous};
  std::size_t horizon = 1000;
  std::size_t num_trials = 1000;
  double xi = 1.01;
  double zeta = 2.0;
  std::uint64_t master_seed = 1;
  std::vector<OptionSpec> options = default_reward_model().options();
  std::string output_dir = "results";
  EmitFlags emit;

  RewardModel model() const { return RewardModel(options); }

  SimConfig point(std::size_t m, double p, PolicyMode mode) const {
    SimConfig c;
    c.num_agents = num_agents;
    c.num_centers = m;
    c.model = model();
    c.p = p;
    c.horizon = horizon;
    c.xi = xi;
    c.mode = mode;
    c.master_seed = master_seed;
    c.num_trials = num_trials;
    return c;
  }

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

// 0, 0.05, ..., 1
inline std::vector<double> figure1_p_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  return grid;
}

inline ExperimentSpec make_preset(std::string_view name) {
  ExperimentSpec s;
  s.preset = std::string(name);
  if (name == "figure1") {
    s.centers = {2, 3};
    s.p_values = figure1_p_grid();
  } else if (name == "figure2") {
    s.centers = {2, 3};
    s.p_values = {0.8};
    s.emit.roles = true;
  } else {
    throw ConfigError("preset: unknown preset '" + std::string(name) +
                      "' (expected figure1 or figure2)");
  }
  return s;
}

namespace detail {

[[noreturn]] inline void config_fail(std::string_view key, const std::string& what) {
  throw ConfigError(std::string(key) + ": " + what);
}

[[noreturn]] inline void domain_fail(std::string_view key, const std::string& what) {
  throw DomainError(std::string(key) + ": " + what);
}

inline std::uint64_t config_uint(std::string_view key, std::string_view value) {
  auto v = text::parse_uint(value);
  if (!v) config_fail(key, "expected a nonnegative integer, got '" + std::string(value) + "'");
  return *v;
}

inline double config_double(std::string_view key, std::string_view value) {
  auto v = text::parse_double(value);
  if (!v) config_fail(key, "expected a number, got '" + std::string(value) + "'");
  return *v;
}

inline bool config_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  config_fail(key, "expected true or false, got '" + std::string(value) + "'");
}

inline std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + text::format_double(v[i]);
  return out;
}

}  // namespace detail

/// Checks every field; throws DomainError naming the field path.
inline void validate(const ExperimentSpec& s) {
  using detail::domain_fail;
  if (s.num_agents < 1) domain_fail("graph.agents", "must be >= 1");
  if (s.centers.empty()) domain_fail("graph.centers", "needs at least one value");
  for (std::size_t m : s.centers) {
    try {
      (void)MultiStarGraph(s.num_agents, m);
    } catch (const DomainError& e) {
      domain_fail("graph.centers", e.what());
    }
  }
  if (s.p_values.empty()) domain_fail("sim.p", "needs at least one value");
  for (double p : s.p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      domain_fail("sim.p", "value " + text::format_double(p) + " outside [0, 1]");
    }
  }
  if (s.modes.empty()) domain_fail("policy.modes", "needs at least one mode");
  if (!(s.xi > 1.0) || !std::isfinite(s.xi)) domain_fail("policy.xi", "must be a finite value > 1");
  if (!(s.zeta > 1.0) || !std::isfinite(s.zeta)) {
    domain_fail("analysis.zeta", "must be a finite value > 1");
  }
  if (s.num_trials < 1) domain_fail("sim.trials", "must be >= 1");
  try {
    (void)s.model();
  } catch (const DomainError& e) {
    domain_fail("model.option", e.what());
  }
  if (s.horizon < s.options.size()) {
    domain_fail("sim.horizon", "must be at least the number of options (" +
                                   std::to_string(s.options.size()) + ")");
  }
  if (s.output_dir.empty()) domain_fail("output.dir", "must not be empty");
}

/// Parses flat `key = value` text. Lines starting with '#' are comments.
/// A `preset` key, wherever it appears, is applied first; the remaining keys
/// override it. Unknown keys are rejected.
inline ExperimentSpec parse_config(std::string_view input) {
  std::map<std::string, std::string, std::less<>> entries;
  std::istringstream lines{std::string(input)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string value(text::trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!entries.emplace(key, value).second) {
      throw ConfigError(key + ": given more than once (line " + std::to_string(line_no) + ")");
    }
  }

  ExperimentSpec s;
  if (auto it = entries.find("preset"); it != entries.end()) {
    s = make_preset(it->second);
    entries.erase(it);
  }

  std::map<std::size_t, OptionSpec> options;
  for (const auto& [key, value] : entries) {
    using namespace detail;
    if (key == "graph.agents") {
      s.num_agents = config_uint(key, value);
    } else if (key == "graph.centers") {
      s.centers.clear();
      for (auto part : text::split(value, ',')) s.centers.push_back(config_uint(key, part));
    } else if (key == "sim.p") {
      s.p_values.clear();
      for (auto part : text::split(value, ',')) s.p_values.push_back(config_double(key, part));
    } else if (key == "sim.horizon") {
      s.horizon = config_uint(key, value);
    } else if (key == "sim.trials") {
      s.num_trials = config_uint(key, value);
    } else if (key == "sim.seed") {
      s.master_seed = config_uint(key, value);
    } else if (key == "policy.xi") {
      s.xi = config_double(key, value);
    } else if (key == "policy.modes") {
      s.modes.clear();
      for (auto part : text::split(value, ',')) {
        try {
          s.modes.push_back(parse_policy_mode(part));
        } catch (const DomainError& e) {
          config_fail(key, e.what());
        }
      }
    } else if (key == "analysis.zeta") {
      s.zeta = config_double(key, value);
    } else if (key == "output.dir") {
      s.output_dir = value;
    } else if (key == "emit.trajectories") {
      s.emit.trajectories = config_bool(key, value);
    } else if (key == "emit.roles") {
      s.emit.roles = config_bool(key, value);
    } else if (key == "emit.bounds") {
      s.emit.bounds = config_bool(key, value);
    } else if (key == "emit.event_log") {
      s.emit.event_log = config_bool(key, value);
    } else if (key == "meta.version") {
      // informational
    } else if (key == "meta.log_base") {
      if (value != "e") config_fail(key, "only natural logarithms (e) are supported");
    } else if (key.starts_with("model.option.")) {
      const auto index = text::parse_uint(std::string_view(key).substr(13));
      if (!index) config_fail(key, "option suffix must be an index");
      const auto fields = text::split_whitespace(value);
      if (fields.size() != 3) config_fail(key, "expected '<kind> <mean> <variance_proxy>'");
      OptionSpec o;
      try {
        o.kind = parse_reward_kind(fields[0]);
      } catch (const DomainError& e) {
        config_fail(key, e.what());
      }
      o.mean = config_double(key, fields[1]);
      o.variance_proxy = config_double(key, fields[2]);
      options[*index] = o;
    } else {
      throw ConfigError(key + ": unknown key");
    }
  }
  if (!options.empty()) {
    s.options.clear();
    for (const auto& [index, o] : options) {
      if (index != s.options.size()) {
        detail::config_fail("model.option." + std::to_string(s.options.size()),
                            "option indices must be contiguous from 0");
      }
      s.options.push_back(o);
    }
  }
  validate(s);
  return s;
}

/// Serializes a spec in the format parse_config reads; used for manifests.
inline std::string to_config_text(const ExperimentSpec& s) {
  std::ostringstream out;
  if (!s.preset.empty()) out << "preset = " << s.preset << '\n';
  out << "graph.agents = " << s.num_agents << '\n';
  out << "graph.centers = ";
  for (std::size_t i = 0; i < s.centers.size(); ++i) out << (i ? ", " : "") << s.centers[i];
  out << '\n';
  out << "sim.p = " << detail::join_doubles(s.p_values) << '\n';
  out << "sim.horizon = " << s.horizon << '\n';
  out << "sim.trials = " << s.num_trials << '\n';
  out << "sim.seed = " << s.master_seed << '\n';
  out << "policy.xi = " << text::format_double(s.xi) << '\n';
  out << "policy.modes = ";
  for (std::size_t i = 0; i < s.modes.size(); ++i) out << (i ? ", " : "") << to_string(s.modes[i]);
  out << '\n';
  out << "analysis.zeta = " << text::format_double(s.zeta) << '\n';
  for (std::size_t i = 0; i < s.options.size(); ++i) {
    const auto& o = s.options[i];
    out << "model.option." << i << " = " << to_string(o.kind) << ' '
        << text::format_double(o.mean) << ' ' << text::format_double(o.variance_proxy) << '\n';
  }
  out << "output.dir = " << s.output_dir << '\n';
  out << "emit.trajectories = " << (s.emit.trajectories ? "true" : "false") << '\n';
  out << "emit.roles = " << (s.emit.roles ? "true" : "false") << '\n';
  out << "emit.bounds = " << (s.emit.bounds ? "true" : "false") << '\n';
  out << "emit.event_log = " << (s.emit.event_log ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace hetbandit
