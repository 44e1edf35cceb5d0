#include <algorithm>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pdss/config.hpp"
#include "pdss/experiment.hpp"
#include "pdss/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitNumericalAbort = 2;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> snapshots;
  bool long_mode = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_long) {
  cmd->add_option("--config", flags.config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("--seed", flags.seed, "override: run only this seed");
  cmd->add_option("--out", flags.out_dir, "override: output directory");
  cmd->add_option("--snapshots", flags.snapshots, "override: trace snapshot count");
  if (with_long) {
    cmd->add_flag("--long", flags.long_mode,
                  "run the full tuned iteration count K_star");
  }
}

pdss::ExperimentConfig load(const CommonFlags& flags) {
  pdss::ExperimentConfig config = pdss::load_config(flags.config_path);
  if (flags.seed) config.seeds = {*flags.seed};
  if (flags.out_dir) config.out_dir = *flags.out_dir;
  if (flags.snapshots) config.snapshots = *flags.snapshots;
  config.validate();
  return config;
}

void print_solve_report(const pdss::SolveReport& report) {
  for (const std::string& w : report.warnings) std::cout << "warning: " << w << "\n";
  for (const pdss::SeedOutcome& o : report.outcomes) {
    std::cout << "seed " << o.seed << ": xbar =";
    for (double v : o.xbar) std::printf(" %.6g", v);
    std::cout << "  zbar =";
    for (double v : o.zbar) std::printf(" %.6g", v);
    std::printf("  F_hat = %.6g  G_hat =", o.eval.f_hat);
    for (double g : o.eval.g_hat) std::printf(" %.6g", g);
    std::cout << "\n";
  }
  std::printf("mean over %zu seed(s): F_hat = %.6g  G_hat =",
              report.outcomes.size(), report.mean_f_hat);
  for (double g : report.mean_g_hat) std::printf(" %.6g", g);
  double violation = 0.0;
  for (double g : report.mean_g_hat) violation += std::max(g, 0.0);
  std::printf("  total violation = %.6g\n", violation);
  if (report.certificate) {
    std::printf("certificate eta/sqrt(K) = %.6g at K = %llu\n", *report.certificate,
                static_cast<unsigned long long>(report.iterations));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Primal-dual stochastic subgradient solver for CVaR-constrained "
      "convex programs"};
  app.require_subcommand(1);

  CommonFlags flags;
  CLI::App* tune = app.add_subcommand("tune", "compute bound constants and the optimal step");
  CLI::App* solve = app.add_subcommand("solve", "run the solver and evaluate the result");
  CLI::App* compare = app.add_subcommand("compare", "Gauss-Seidel vs Jacobi dual updates");
  CLI::App* sweep = app.add_subcommand("sweep", "tuned step/iterations over a risk grid");
  CLI::App* evaluate = app.add_subcommand("evaluate", "risk functionals at a given point");
  add_common(tune, flags, false);
  add_common(solve, flags, true);
  add_common(compare, flags, false);
  add_common(sweep, flags, false);
  add_common(evaluate, flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    const pdss::ExperimentConfig config = load(flags);

    if (tune->parsed()) {
      const pdss::TuneReport report = pdss::cmd_tune(config);
      std::cout << report.text;
    } else if (solve->parsed()) {
      print_solve_report(pdss::cmd_solve(config, flags.long_mode));
    } else if (compare->parsed()) {
      const pdss::CompareReport report = pdss::cmd_compare(config);
      for (std::size_t s = 0; s < report.seeds.size(); ++s) {
        std::printf("seed %llu: max |xbar_GS - xbar_J| = %.6g\n",
                    static_cast<unsigned long long>(report.seeds[s]),
                    report.per_seed_diff[s]);
      }
      std::printf("max over seeds: %.6g\n", report.max_diff);
    } else if (sweep->parsed()) {
      const auto rows = pdss::cmd_sweep(config);
      std::printf("wrote %zu sweep rows to %s/sweep.csv\n", rows.size(),
                  config.out_dir.c_str());
    } else if (evaluate->parsed()) {
      const pdss::Evaluation eval = pdss::cmd_evaluate(config);
      std::printf("F_hat = %.6g  G_hat =", eval.f_hat);
      for (double g : eval.g_hat) std::printf(" %.6g", g);
      std::printf("  total violation = %.6g  (n = %zu, seed = %llu)\n",
                  eval.total_violation(), eval.n_samples,
                  static_cast<unsigned long long>(eval.seed));
    }
  } catch (const pdss::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const pdss::NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumericalAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalAbort;
  }
  return kExitOk;
}
