#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "hetbandit/analysis.hpp"
#include "hetbandit/config.hpp"
#include "hetbandit/errors.hpp"
#include "hetbandit/simulator.hpp"
#include "hetbandit/text.hpp"

namespace hetbandit {

struct PointResult {
  std::size_t centers = 0;
  double p = 0.0;
  PolicyMode mode = PolicyMode::heterogeneous;
  AggregateResult aggregate;
  BoundParams bounds;
};

struct ResultSet {
  ExperimentSpec spec;
  std::vector<PointResult> points;  // centers-major, then p, then mode
};

/// Runs every (m, p, mode) point of the sweep. All points share the master
/// seed, so trial r sees the same seed at every point.
inline ResultSet run_experiment(const ExperimentSpec& spec, std::size_t workers = 1,
                                const std::function<void(const PointResult&)>& on_point = {}) {
  validate(spec);
  ResultSet out;
  out.spec = spec;
  const RewardModel model = spec.model();
  for (std::size_t m : spec.centers) {
    const MultiStarGraph graph(spec.num_agents, m);
    for (double p : spec.p_values) {
      for (PolicyMode mode : spec.modes) {
        PointResult pr;
        pr.centers = m;
        pr.p = p;
        pr.mode = mode;
        pr.aggregate = run_monte_carlo(spec.point(m, p, mode), workers);
        pr.bounds = BoundParams::for_multi_star(graph, model, p, spec.xi, spec.zeta);
        if (on_point) on_point(pr);
        out.points.push_back(std::move(pr));
      }
    }
  }
  return out;
}

namespace detail {

// Builds one CSV body, refusing non-finite numbers.
class CsvWriter {
 public:
  CsvWriter(std::string name, std::string header_comment, std::string columns)
      : name_(std::move(name)) {
    out_ << "# " << header_comment << '\n' << columns << '\n';
  }

  CsvWriter& field(std::string_view s) {
    sep();
    out_ << s;
    return *this;
  }
  CsvWriter& field(std::size_t v) {
    sep();
    out_ << v;
    return *this;
  }
  CsvWriter& field(double v) {
    if (!std::isfinite(v)) throw Error("non-finite value in " + name_);
    sep();
    out_ << text::format_double(v);
    return *this;
  }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }

  const std::string& name() const noexcept { return name_; }
  std::string str() const { return out_.str(); }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }

  std::string name_;
  std::ostringstream out_;
  bool first_ = true;
};

inline void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << body;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

// One-line description of every fixed parameter behind the numbers.
inline std::string parameter_header(const ExperimentSpec& s) {
  const RewardModel model = s.model();
  std::ostringstream h;
  h << "version=" << kVersion << " K=" << s.num_agents << " T=" << s.horizon
    << " R=" << s.num_trials << " seed=" << s.master_seed
    << " xi=" << text::format_double(s.xi) << " zeta=" << text::format_double(s.zeta)
    << " log=natural gaps=";
  const auto gaps = model.gaps();
  for (std::size_t i = 0; i < gaps.size(); ++i) h << (i ? ";" : "") << text::format_double(gaps[i]);
  h << " sigmas=";
  for (std::size_t i = 0; i < model.size(); ++i) {
    h << (i ? ";" : "") << text::format_double(model.sigma(i));
  }
  return h.str();
}

}  // namespace detail

inline std::string manifest_text(const ExperimentSpec& spec) {
  std::ostringstream m;
  m << "# hetbandit experiment manifest\n";
  m << "meta.version = " << kVersion << '\n';
  m << "meta.log_base = e\n";
  m << to_config_text(spec);
  return m.str();
}

/// Writes the manifest and CSV files of `results` into spec.output_dir and
/// returns the written paths. File bodies carry no timestamps, so rerunning
/// a manifest reproduces them byte for byte.
///
///   manifest.txt             parse_config-readable record of the run
///   regret_vs_p.csv          m,p,mode,regret_at_T,stderr sorted by (m, mode, p)
///   regret_vs_time.csv       m,mode,role,t,regret,stderr       (emit.roles)
///   group_regret_vs_time.csv m,p,mode,t,regret,stderr          (emit.trajectories)
///   bounds.csv               m,p,mode,alpha,d_avg,d_cen,c,t,bound,empirical,margin (emit.bounds)
///   event_log.csv            m,p,mode,t,agent,option,reward,broadcast (emit.event_log)
///
/// With several p values the role file is split per p (regret_vs_time_p<p>.csv).
inline std::vector<std::filesystem::path> emit_results(const ResultSet& results,
                                                       const ExperimentSpec& spec) {
  namespace fs = std::filesystem;
  const fs::path dir(spec.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  const std::string header = detail::parameter_header(spec);
  const GapVector gaps = spec.model().gaps();
  std::vector<detail::CsvWriter> files;

  std::vector<std::size_t> order(results.points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = results.points[a];
    const auto& y = results.points[b];
    return std::tuple(x.centers, to_string(x.mode), x.p) <
           std::tuple(y.centers, to_string(y.mode), y.p);
  });

  {
    detail::CsvWriter csv("regret_vs_p.csv", header, "m,p,mode,regret_at_T,stderr");
    for (std::size_t idx : order) {
      const auto& pt = results.points[idx];
      const auto& g = pt.aggregate.group_regret;
      csv.field(pt.centers).field(pt.p).field(to_string(pt.mode));
      csv.field(g.mean.back()).field(g.std_error.back());
      csv.end_row();
    }
    files.push_back(std::move(csv));
  }

  if (spec.emit.roles) {
    for (double p : spec.p_values) {
      const std::string name = spec.p_values.size() == 1
                                   ? "regret_vs_time.csv"
                                   : "regret_vs_time_p" + text::format_double(p) + ".csv";
      detail::CsvWriter csv(name, header + " p=" + text::format_double(p),
                            "m,mode,role,t,regret,stderr");
      for (std::size_t idx : order) {
        const auto& pt = results.points[idx];
        if (pt.p != p) continue;
        const auto& a = pt.aggregate;
        const std::pair<std::string_view, const SeriesStats*> roles[] = {
            {"center", &a.center_regret},
            {"peripheral", &a.peripheral_regret},
            {"average", &a.average_regret}};
        for (const auto& [role, series] : roles) {
          // No peripheral agents when m = K: the rows are omitted, not zero-filled.
          if (series->mean.empty()) continue;
          for (std::size_t t = 1; t <= a.horizon; ++t) {
            csv.field(pt.centers).field(to_string(pt.mode)).field(role).field(t);
            csv.field(series->mean[t - 1]).field(series->std_error[t - 1]);
            csv.end_row();
          }
        }
      }
      files.push_back(std::move(csv));
    }
  }

  if (spec.emit.trajectories) {
    detail::CsvWriter csv("group_regret_vs_time.csv", header, "m,p,mode,t,regret,stderr");
    for (std::size_t idx : order) {
      const auto& pt = results.points[idx];
      const auto& g = pt.aggregate.group_regret;
      for (std::size_t t = 1; t <= pt.aggregate.horizon; ++t) {
        csv.field(pt.centers).field(pt.p).field(to_string(pt.mode)).field(t);
        csv.field(g.mean[t - 1]).field(g.std_error[t - 1]);
        csv.end_row();
      }
    }
    files.push_back(std::move(csv));
  }

  if (spec.emit.bounds) {
    detail::CsvWriter csv("bounds.csv", header,
                          "m,p,mode,alpha,d_avg,d_cen,c,t,bound,empirical,margin");
    for (std::size_t idx : order) {
      const auto& pt = results.points[idx];
      const auto& b = pt.bounds;
      const double alpha = pt.mode == PolicyMode::heterogeneous ? b.bias : 0.0;
      const double c = c1(b.num_agents, b.num_centers, alpha, b.p);
      const auto empirical = empirical_group_regret(pt.aggregate, gaps);
      const auto curve = regret_bound(b, pt.aggregate.horizon, pt.mode);
      const auto report = bound_dominance_report(empirical, curve);
      for (std::size_t t = 1; t <= pt.aggregate.horizon; ++t) {
        csv.field(pt.centers).field(pt.p).field(to_string(pt.mode));
        csv.field(alpha).field(b.d_avg).field(b.d_cen).field(c).field(t);
        csv.field(curve.at(t)).field(empirical.at(t)).field(report.margin[t - 1]);
        csv.end_row();
      }
    }
    files.push_back(std::move(csv));
  }

  if (spec.emit.event_log && !results.points.empty()) {
    const auto& first = results.points.front();
    SimConfig config = spec.point(first.centers, first.p, first.mode);
    config.record_rewards = true;
    const TrialRecord rec = run_trial(config, trial_seed(spec.master_seed, 0));
    detail::CsvWriter csv("event_log.csv", header + " trial=0",
                          "m,p,mode,t,agent,option,reward,broadcast");
    for (std::size_t t = 1; t <= rec.horizon; ++t) {
      for (AgentIndex k = 0; k < rec.num_agents; ++k) {
        csv.field(first.centers).field(first.p).field(to_string(first.mode)).field(t).field(k);
        csv.field(rec.choice(t, k)).field(rec.rewards[(t - 1) * rec.num_agents + k]);
        csv.field(static_cast<std::size_t>(rec.broadcast(t, k) ? 1 : 0));
        csv.end_row();
      }
    }
    files.push_back(std::move(csv));
  }

  std::vector<fs::path> written;
  for (const auto& f : files) {
    written.push_back(dir / f.name());
    detail::write_file(written.back(), f.str());
  }
  written.push_back(dir / "manifest.txt");
  detail::write_file(written.back(), manifest_text(spec));
  return written;
}

}  // namespace hetbandit
