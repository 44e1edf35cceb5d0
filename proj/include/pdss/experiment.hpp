#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "pdss/config.hpp"
#include "pdss/cvar.hpp"
#include "pdss/eval.hpp"
#include "pdss/example.hpp"
#include "pdss/solver.hpp"
#include "pdss/tuning.hpp"

namespace pdss {

/// A configured problem resolved from an ExperimentConfig: the raw program,
/// the risk levels, the program the solver actually runs (reformulated
/// unless the config is risk-neutral), and the tuning inputs with defaults
/// filled in.
struct ProblemSetup {
  std::shared_ptr<const StochasticProgram> program;
  std::shared_ptr<const StochasticProgram> solve_program;
  RiskParams risk;
  bool reformulated = false;
  double x1_dist_sq = 0.0;
  double z_norm_bound = 0.0;
  PConstants constants;  // formula constants for solve_program
};

ProblemSetup resolve_problem(const ExperimentConfig& config);

struct TuneReport {
  PConstants formula;
  TuningResult tuned;
  std::optional<PConstants> reference;        // published constants (example)
  std::optional<TuningResult> reference_tuned;
  std::string text;
};

/// Computes the bound constants and the optimal (gamma_star, k_star, eta,
/// step) for the configured problem. For the built-in example the report
/// also carries the published reference constants side by side, with a
/// note wherever formula and reference disagree.
TuneReport cmd_tune(const ExperimentConfig& config);

struct SeedOutcome {
  std::uint64_t seed = 0;
  Vec xbar;  // ergodic decision (augmented when reformulated)
  Vec zbar;
  Evaluation eval;  // risk functionals at the x block
};

struct SolveReport {
  std::vector<SeedOutcome> outcomes;
  double mean_f_hat = 0.0;
  Vec mean_g_hat;
  std::optional<double> certificate;  // eta / sqrt(K), constant schedules
  std::uint64_t iterations = 0;
  double gamma_scale = 0.0;
  std::vector<std::string> warnings;
};

/// Runs the solver for every configured seed, writes one trace CSV and one
/// evaluation CSV per seed plus a summary CSV, and evaluates the risk
/// functionals at a log-spaced subset of snapshot ergodic means.
/// long_mode replaces the configured iteration count with the tuned k_star.
SolveReport cmd_solve(const ExperimentConfig& config, bool long_mode = false);

struct CompareReport {
  std::vector<std::uint64_t> seeds;
  Vec per_seed_diff;          // |xbar_GS - xbar_J| over the decision block
  double max_diff = 0.0;
  std::uint64_t iterations = 0;
};

/// Runs the Gauss-Seidel and Jacobi variants on matched seeds and writes
/// per-snapshot ergodic iterates of both plus their differences.
CompareReport cmd_compare(const ExperimentConfig& config);

/// Tabulates tuned (gamma_star, k_star, step) over the configured
/// (alpha, beta) grid and writes the table as CSV. Monotonicity along both
/// axes is verified before writing.
std::vector<SweepRow> cmd_sweep(const ExperimentConfig& config);

/// Evaluates the risk functionals at the configured point (eval_x).
Evaluation cmd_evaluate(const ExperimentConfig& config);

}  // namespace pdss
