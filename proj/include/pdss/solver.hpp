#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "pdss/problem.hpp"

namespace pdss {

/// Step-size schedule. ConstantOverHorizon fixes gamma_k = gamma / sqrt(K)
/// for a horizon of K iterations; Decaying uses gamma_k = c / k^p with
/// p in (0.5, 1], a non-summable square-summable sequence.
struct StepSchedule {
  enum class Kind { ConstantOverHorizon, Decaying };

  Kind kind = Kind::ConstantOverHorizon;
  double gamma = 1.0;          // step scale (constant kind)
  std::uint64_t horizon = 0;   // K (constant kind)
  double c = 1.0;              // numerator (decaying kind)
  double p = 1.0;              // exponent in (0.5, 1] (decaying kind)

  static StepSchedule constant(double gamma, std::uint64_t horizon);
  static StepSchedule decaying(double c, double p = 1.0);

  /// Step size for 1-based iteration k.
  double step(std::uint64_t k) const;

  void validate() const;
  std::string describe() const;
};

/// Converged state of a run: the primal/dual iterates after the last
/// completed iteration, the step-weighted ergodic averages
///   ergodic_x = sum_j gamma_j x_{j+1} / sum_j gamma_j
/// (and likewise for z), and the iteration counter. z is componentwise
/// nonnegative at all times; ergodic averages are undefined until the
/// first iteration completes (weight_sum > 0).
struct SolverState {
  std::uint64_t k = 0;
  Vec x;
  Vec z;
  Vec ergodic_x;
  Vec ergodic_z;
  double weight_sum = 0.0;
};

struct TraceSnapshot {
  std::uint64_t k = 0;
  Vec x;
  Vec z;
  Vec ergodic_x;
  Vec ergodic_z;
};

/// Snapshot log of one run plus its final state. Identical (seed, schedule,
/// problem, snapshot stride) reproduce identical traces within one build.
struct RunTrace {
  std::vector<TraceSnapshot> snapshots;
  SolverState final_state;
  std::uint64_t seed = 0;
  std::string schedule;
  std::uint64_t iterations = 0;
  std::uint64_t scenario_draws = 0;
  std::vector<std::string> warnings;

  bool has_ergodic() const { return final_state.weight_sum > 0.0; }
};

/// Thrown when an iterate or oracle output turns non-finite; carries the
/// 1-based iteration at which the run aborted.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& msg, std::uint64_t iteration);
  std::uint64_t iteration;
};

/// Primal-dual stochastic subgradient iteration in projected form:
///   x_{k+1} = proj_X[ x_k - gamma_k (grad f_w(x_k) + sum_i z_k^i grad g_w^i(x_k)) ]
///   z_{k+1} = max(0, z_k + gamma_k g_w'(x_{k+1}))        (Gauss-Seidel)
/// where w and w' are two independent scenario draws per iteration. The
/// Jacobi variant reuses w and evaluates g at the stale x_k instead.
///
/// A single solver instance is strictly sequential; run several instances
/// with distinct seeds for parallel experiments.
class PrimalDualSolver {
 public:
  PrimalDualSolver(const StochasticProgram& prog, std::uint64_t seed,
                   std::optional<Vec> x1 = {});

  /// Draws the next scenario from the run's stream into `out`.
  void draw(Scenario& out);

  /// Gauss-Seidel primal update with scenario w and step gamma.
  void primal_step(const Scenario& w, double gamma);

  /// Gauss-Seidel dual update with a fresh scenario; completes the
  /// iteration (ergodic accumulation, counter, finiteness check).
  void dual_step(const Scenario& w, double gamma);

  /// Jacobi iteration: both updates from the single scenario w, the dual
  /// one using g_w(x_k) at the stale primal iterate.
  void jacobi_iteration(const Scenario& w, double gamma);

  const SolverState& state() const { return state_; }
  std::uint64_t scenario_draws() const { return draws_; }

 private:
  void finish_iteration(double gamma);

  const StochasticProgram* prog_;
  SolverState state_;
  Rng rng_;
  std::uint64_t draws_ = 0;
  Vec grad_buf_;
  Vec dir_buf_;
  Vec dual_slack_buf_;
};

struct RunOptions {
  std::uint64_t seed = 1;
  /// Iteration count. Zero means: use the schedule horizon (constant kind).
  std::uint64_t iterations = 0;
  /// Number of evenly spaced snapshots kept in the trace.
  std::size_t snapshot_count = 1000;
  /// When set, a constant-schedule gamma >= p3^{-1/2} produces a warning in
  /// the trace (the certificate is vacuous there; the run proceeds).
  std::optional<double> p3;
  std::optional<Vec> initial_x;
};

/// Runs the Gauss-Seidel algorithm for K iterations (two scenario draws
/// per iteration, w_k first, w_{k+1/2} second). K = 0 yields a trace
/// holding only the initial state.
RunTrace run(const StochasticProgram& prog, const StepSchedule& schedule,
             const RunOptions& options);

/// Runs the Jacobi variant (one scenario draw per iteration).
RunTrace run_jacobi(const StochasticProgram& prog, const StepSchedule& schedule,
                    const RunOptions& options);

/// Final ergodic averages (x_bar, z_bar) of a trace. Throws
/// std::invalid_argument if the trace holds no completed iteration.
std::pair<Vec, Vec> ergodic_average(const RunTrace& trace);

/// Exact evaluators and a reference saddle point for an analytic test
/// problem, enabling the saddle-gap diagnostic.
struct SaddleReference {
  Vec x_star;
  Vec z_star;
  std::function<double(std::span<const double>)> objective;
  std::vector<std::function<double(std::span<const double>)>> constraints;
};

/// L(x, z_star) - L(x_star, z) with L(x, z) = F(x) + z^T G(x). Nonnegative
/// by the saddle property; zero at (x_star, z_star).
double saddle_gap(const SaddleReference& ref, std::span<const double> x,
                  std::span<const double> z);

/// CSV export: header k,x_0..x_{n-1},z_0..z_{m-1},xbar_0..,zbar_0.., one
/// row per snapshot, floating values at 17 significant digits.
void write_trace_csv(std::ostream& os, const RunTrace& trace);

}  // namespace pdss
