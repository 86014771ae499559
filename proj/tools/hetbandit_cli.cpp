// hetbandit command line: run experiments, evaluate bounds, check invariants.
//
// Exit codes: 0 success, 1 internal error, 2 configuration or usage error,
// 3 parameter domain error, 4 I/O error, 5 invariant check failed.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hetbandit/hetbandit.hpp"

namespace {

using namespace hetbandit;

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kDomain = 3,
  kIo = 4,
  kValidation = 5,
};

constexpr const char* kOutputEnv = "HETBANDIT_OUTPUT_DIR";

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

struct RunOptions {
  std::string preset;
  std::string config_path;
  std::string output;
  std::size_t workers = 0;
  std::size_t trials = 0;
  std::string seed;
};

int cmd_run(const RunOptions& o) {
  if (o.preset.empty() == o.config_path.empty()) {
    throw ConfigError("run: give exactly one of --preset or --config");
  }
  ExperimentSpec spec = o.config_path.empty() ? parse_config("preset = " + o.preset)
                                              : parse_config(read_file(o.config_path));
  if (o.trials > 0) spec.num_trials = o.trials;
  if (!o.seed.empty()) {
    auto s = text::parse_uint(o.seed);
    if (!s) throw ConfigError("--seed: expected an integer");
    spec.master_seed = *s;
  }
  if (const char* env = std::getenv(kOutputEnv); env && *env) spec.output_dir = env;
  if (!o.output.empty()) spec.output_dir = o.output;
  validate(spec);

  // Fail on an unusable output directory before spending time on the sweep.
  std::error_code ec;
  std::filesystem::create_directories(spec.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + spec.output_dir + ": " + ec.message());

  const std::size_t total = spec.centers.size() * spec.p_values.size() * spec.modes.size();
  std::size_t done = 0;
  const auto results = run_experiment(spec, o.workers, [&](const PointResult& pt) {
    ++done;
    std::fprintf(stderr, "[%zu/%zu] m=%zu p=%s %s regret(T)=%.3f\n", done, total, pt.centers,
                 text::format_double(pt.p).c_str(), std::string(to_string(pt.mode)).c_str(),
                 pt.aggregate.group_regret.mean.back());
  });
  for (const auto& path : emit_results(results, spec)) std::cout << path.string() << '\n';
  return kOk;
}

struct BoundsOptions {
  std::size_t agents = 36;
  std::size_t centers = 2;
  double p = 0.8;
  double xi = 1.01;
  double zeta = 2.0;
  std::size_t horizon = 1000;
  std::string config_path;
  std::string curve_path;
};

int cmd_bounds(const BoundsOptions& o) {
  RewardModel model = default_reward_model();
  if (!o.config_path.empty()) model = parse_config(read_file(o.config_path)).model();
  const MultiStarGraph graph(o.agents, o.centers);
  const auto b = BoundParams::for_multi_star(graph, model, o.p, o.xi, o.zeta);
  const auto fmt = text::format_double;

  std::cout << "K = " << b.num_agents << '\n'
            << "m = " << b.num_centers << '\n'
            << "p = " << fmt(b.p) << '\n'
            << "xi = " << fmt(b.xi) << '\n'
            << "zeta = " << fmt(b.zeta) << '\n'
            << "T = " << o.horizon << '\n'
            << "log_base = e\n"
            << "d_avg = " << fmt(b.d_avg) << '\n'
            << "d_cen = " << fmt(b.d_cen) << '\n'
            << "alpha = " << fmt(b.bias) << '\n'
            << "c1 = " << fmt(c1(b.num_agents, b.num_centers, b.bias, b.p)) << '\n'
            << "c2 = " << fmt(c2(b.num_agents, b.num_centers, b.p)) << '\n'
            << "bound_heterogeneous = "
            << fmt(regret_bound_value(b, o.horizon, PolicyMode::heterogeneous)) << '\n'
            << "bound_homogeneous = "
            << fmt(regret_bound_value(b, o.horizon, PolicyMode::homogeneous)) << '\n';
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (b.gaps[i] == 0.0) continue;
    std::cout << "eta_" << i << " = " << fmt(eta(b.sigmas[i], b.xi, b.gaps[i], o.horizon)) << '\n';
  }

  if (!o.curve_path.empty()) {
    const auto het = regret_bound(b, o.horizon, PolicyMode::heterogeneous);
    const auto hom = regret_bound(b, o.horizon, PolicyMode::homogeneous);
    std::ofstream f(o.curve_path, std::ios::binary);
    if (!f) throw IoError("cannot open " + o.curve_path + " for writing");
    f << "# K=" << b.num_agents << " m=" << b.num_centers << " p=" << fmt(b.p)
      << " xi=" << fmt(b.xi) << " zeta=" << fmt(b.zeta) << " alpha=" << fmt(b.bias)
      << " d_avg=" << fmt(b.d_avg) << " d_cen=" << fmt(b.d_cen) << " log=natural\n";
    f << "t,heterogeneous,homogeneous\n";
    for (std::size_t t = 1; t <= o.horizon; ++t) {
      f << t << ',' << fmt(het.at(t)) << ',' << fmt(hom.at(t)) << '\n';
    }
    if (!f) throw IoError("failed writing " + o.curve_path);
  }
  return kOk;
}

struct ValidateOptions {
  std::string config_path;
  std::size_t workers = 2;
};

int cmd_validate(const ValidateOptions& o) {
  SimConfig config;
  if (o.config_path.empty()) {
    config.num_agents = 12;
    config.num_centers = 2;
    config.p = 0.5;
    config.horizon = 200;
    config.num_trials = 200;
  } else {
    const auto spec = parse_config(read_file(o.config_path));
    config = spec.point(spec.centers.front(), spec.p_values.front(), spec.modes.front());
  }
  config.validate();
  const MultiStarGraph graph(config.num_agents, config.num_centers);
  bool ok = true;
  auto report = [&](const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) std::cout << ": " << detail;
    std::cout << '\n';
    ok = ok && pass;
  };

  std::string counting_failure;
  bool conserved = true;
  for (std::size_t r = 0; r < config.num_trials; ++r) {
    const auto rec = run_trial(config, trial_seed(config.master_seed, r));
    if (auto f = check_counting_identity(rec, graph); f && counting_failure.empty()) {
      counting_failure = "trial " + std::to_string(r) + ", " + *f;
    }
    conserved = conserved && check_conservation(rec);
  }
  report("counting identity", counting_failure.empty(), counting_failure);
  report("conservation", conserved, "");

  const auto one = run_monte_carlo(config, 1);
  const auto many = run_monte_carlo(config, o.workers);
  report("worker-count independence", one == many, "");

  double worst = 0.0;
  for (const auto& c : communication_identity(one, graph, config.p)) worst = std::max(worst, c.z());
  report("communication identity (4 sigma)", worst <= 4.0,
         "max |z| = " + text::format_double(worst));

  const auto regret = empirical_group_regret(one, config.model.gaps());
  bool monotone = true;
  for (std::size_t t = 2; t <= regret.horizon(); ++t) monotone = monotone && regret.at(t) >= regret.at(t - 1);
  report("group regret nondecreasing", monotone, "");

  return ok ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent heterogeneous UCB bandits on multi-star graphs"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run an experiment sweep and write CSV results");
  run->add_option("--preset", run_opts.preset, "Built-in experiment: figure1 or figure2");
  run->add_option("--config", run_opts.config_path, "Path of a key=value experiment config");
  run->add_option("--output", run_opts.output,
                  std::string("Output directory (overrides ") + kOutputEnv + " and output.dir)");
  run->add_option("--workers", run_opts.workers, "Worker threads, 0 = all cores");
  run->add_option("--trials", run_opts.trials, "Override the number of Monte Carlo trials");
  run->add_option("--seed", run_opts.seed, "Override the master seed");

  BoundsOptions bounds_opts;
  auto* bounds = app.add_subcommand("bounds", "Evaluate the closed-form regret bounds");
  bounds->add_option("--agents", bounds_opts.agents, "Number of agents K");
  bounds->add_option("--centers", bounds_opts.centers, "Number of center agents m");
  bounds->add_option("--p", bounds_opts.p, "Broadcast probability");
  bounds->add_option("--xi", bounds_opts.xi, "Exploration constant xi > 1");
  bounds->add_option("--zeta", bounds_opts.zeta, "Tail-bound constant zeta > 1");
  bounds->add_option("--horizon", bounds_opts.horizon, "Horizon T");
  bounds->add_option("--config", bounds_opts.config_path, "Take the reward model from a config");
  bounds->add_option("--curve", bounds_opts.curve_path, "Write both bound curves to this CSV");

  ValidateOptions validate_opts;
  auto* check = app.add_subcommand("validate", "Run the invariant suite on a small config");
  check->add_option("--config", validate_opts.config_path,
                    "Config whose first sweep point is checked (default: K=12, m=2, T=200)");
  check->add_option("--workers", validate_opts.workers, "Workers for the independence check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*bounds) return cmd_bounds(bounds_opts);
    if (*check) return cmd_validate(validate_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
