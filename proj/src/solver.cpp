#include "pdss/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <utility>

namespace pdss {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

StepSchedule StepSchedule::constant(double gamma, std::uint64_t horizon) {
  StepSchedule s;
  s.kind = Kind::ConstantOverHorizon;
  s.gamma = gamma;
  s.horizon = horizon;
  s.validate();
  return s;
}

StepSchedule StepSchedule::decaying(double c, double p) {
  StepSchedule s;
  s.kind = Kind::Decaying;
  s.c = c;
  s.p = p;
  s.validate();
  return s;
}

void StepSchedule::validate() const {
  if (kind == Kind::ConstantOverHorizon) {
    require(gamma > 0.0, "constant schedule needs gamma > 0");
  } else {
    require(c > 0.0, "decaying schedule needs c > 0");
    require(p > 0.5 && p <= 1.0, "decaying schedule needs p in (0.5, 1]");
  }
}

double StepSchedule::step(std::uint64_t k) const {
  if (kind == Kind::ConstantOverHorizon) {
    return gamma / std::sqrt(static_cast<double>(horizon));
  }
  return c / std::pow(static_cast<double>(k), p);
}

std::string StepSchedule::describe() const {
  char buf[128];
  if (kind == Kind::ConstantOverHorizon) {
    std::snprintf(buf, sizeof(buf), "constant(gamma=%.17g,K=%llu)", gamma,
                  static_cast<unsigned long long>(horizon));
  } else {
    std::snprintf(buf, sizeof(buf), "decaying(c=%.17g,p=%.17g)", c, p);
  }
  return buf;
}

NumericalError::NumericalError(const std::string& msg, std::uint64_t it)
    : std::runtime_error(msg), iteration(it) {}

PrimalDualSolver::PrimalDualSolver(const StochasticProgram& prog,
                                   std::uint64_t seed, std::optional<Vec> x1)
    : prog_(&prog), rng_(seed) {
  const std::size_t n = prog.dimension();
  const std::size_t m = prog.num_constraints();
  if (x1) {
    require(x1->size() == n, "initial point has wrong dimension");
    state_.x = std::move(*x1);
    prog.project(state_.x);  // x1 must lie in the decision set
  } else {
    state_.x = prog.initial_point();
  }
  state_.z.assign(m, 0.0);
  state_.ergodic_x.assign(n, 0.0);
  state_.ergodic_z.assign(m, 0.0);
  grad_buf_.resize(n);
  dir_buf_.resize(n);
  dual_slack_buf_.resize(m);
}

void PrimalDualSolver::draw(Scenario& out) {
  prog_->draw(rng_, out);
  ++draws_;
}

void PrimalDualSolver::primal_step(const Scenario& w, double gamma) {
  require(gamma > 0.0, "primal step needs gamma > 0");
  const std::size_t n = state_.x.size();
  Vec& x = state_.x;

  // x <- proj(x - gamma * (grad f + sum_i z_i grad g_i))
  prog_->objective_subgrad(w, x, dir_buf_);
  for (std::size_t i = 0; i < state_.z.size(); ++i) {
    const double zi = state_.z[i];
    if (zi == 0.0) continue;
    prog_->constraint_subgrad(w, x, i, grad_buf_);
    for (std::size_t j = 0; j < n; ++j) dir_buf_[j] += zi * grad_buf_[j];
  }
  for (std::size_t j = 0; j < n; ++j) x[j] -= gamma * dir_buf_[j];
  prog_->project(x);
}

void PrimalDualSolver::dual_step(const Scenario& w, double gamma) {
  require(gamma > 0.0, "dual step needs gamma > 0");
  Vec& z = state_.z;
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = std::max(0.0, z[i] + gamma * prog_->constraint(w, state_.x, i));
  }
  finish_iteration(gamma);
}

void PrimalDualSolver::jacobi_iteration(const Scenario& w, double gamma) {
  // Constraint values at the stale iterate, before the primal update.
  for (std::size_t i = 0; i < dual_slack_buf_.size(); ++i) {
    dual_slack_buf_[i] = prog_->constraint(w, state_.x, i);
  }
  primal_step(w, gamma);
  Vec& z = state_.z;
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = std::max(0.0, z[i] + gamma * dual_slack_buf_[i]);
  }
  finish_iteration(gamma);
}

void PrimalDualSolver::finish_iteration(double gamma) {
  ++state_.k;
  state_.weight_sum += gamma;
  const double w = gamma / state_.weight_sum;
  for (std::size_t j = 0; j < state_.x.size(); ++j) {
    state_.ergodic_x[j] += w * (state_.x[j] - state_.ergodic_x[j]);
  }
  for (std::size_t i = 0; i < state_.z.size(); ++i) {
    assert(state_.z[i] >= 0.0);
    state_.ergodic_z[i] += w * (state_.z[i] - state_.ergodic_z[i]);
  }
  if (!all_finite(state_.x) || !all_finite(state_.z)) {
    throw NumericalError("non-finite iterate at iteration " +
                             std::to_string(state_.k),
                         state_.k);
  }
}

namespace {

TraceSnapshot make_snapshot(std::uint64_t k, const SolverState& s) {
  return {k, s.x, s.z, s.ergodic_x, s.ergodic_z};
}

std::uint64_t resolve_iterations(const StepSchedule& schedule,
                                 const RunOptions& options) {
  if (options.iterations != 0) {
    if (schedule.kind == StepSchedule::Kind::ConstantOverHorizon &&
        schedule.horizon != 0 && schedule.horizon != options.iterations) {
      throw std::invalid_argument(
          "iteration count disagrees with the constant schedule horizon");
    }
    return options.iterations;
  }
  return schedule.kind == StepSchedule::Kind::ConstantOverHorizon
             ? schedule.horizon
             : 0;
}

RunTrace run_impl(const StochasticProgram& prog, const StepSchedule& schedule,
                  const RunOptions& options, bool jacobi) {
  schedule.validate();
  const std::uint64_t total = resolve_iterations(schedule, options);

  StepSchedule effective = schedule;
  if (effective.kind == StepSchedule::Kind::ConstantOverHorizon) {
    effective.horizon = total;
  }

  RunTrace trace;
  trace.seed = options.seed;
  trace.schedule = effective.describe();
  trace.iterations = total;

  if (options.p3 && effective.kind == StepSchedule::Kind::ConstantOverHorizon &&
      effective.gamma * effective.gamma * *options.p3 >= 1.0) {
    // Outside the certificate region the run is still well-defined; only
    // the bound becomes vacuous.
    trace.warnings.push_back(
        "step scale gamma exceeds P3^{-1/2}; convergence certificate is vacuous");
  }

  PrimalDualSolver solver(prog, options.seed, options.initial_x);
  trace.snapshots.push_back(make_snapshot(0, solver.state()));
  if (total == 0) {
    trace.final_state = solver.state();
    return trace;
  }

  const std::uint64_t stride =
      std::max<std::uint64_t>(1, total / std::max<std::size_t>(1, options.snapshot_count));

  const bool constant_steps =
      effective.kind == StepSchedule::Kind::ConstantOverHorizon;
  const double fixed_gamma = constant_steps ? effective.step(1) : 0.0;

  Scenario w;
  for (std::uint64_t k = 1; k <= total; ++k) {
    const double gamma = constant_steps ? fixed_gamma : effective.step(k);
    if (jacobi) {
      solver.draw(w);
      solver.jacobi_iteration(w, gamma);
    } else {
      solver.draw(w);
      solver.primal_step(w, gamma);
      solver.draw(w);
      solver.dual_step(w, gamma);
    }
    if (k % stride == 0 || k == total) {
      trace.snapshots.push_back(make_snapshot(k, solver.state()));
    }
  }
  trace.final_state = solver.state();
  trace.scenario_draws = solver.scenario_draws();
  return trace;
}

}  // namespace

RunTrace run(const StochasticProgram& prog, const StepSchedule& schedule,
             const RunOptions& options) {
  return run_impl(prog, schedule, options, /*jacobi=*/false);
}

RunTrace run_jacobi(const StochasticProgram& prog, const StepSchedule& schedule,
                    const RunOptions& options) {
  return run_impl(prog, schedule, options, /*jacobi=*/true);
}

std::pair<Vec, Vec> ergodic_average(const RunTrace& trace) {
  if (!trace.has_ergodic()) {
    throw std::invalid_argument("trace holds no completed iteration; ergodic average undefined");
  }
  return {trace.final_state.ergodic_x, trace.final_state.ergodic_z};
}

double saddle_gap(const SaddleReference& ref, std::span<const double> x,
                  std::span<const double> z) {
  require(ref.objective != nullptr, "saddle gap needs exact evaluators");
  require(!ref.x_star.empty(), "saddle gap needs a reference saddle point");
  require(z.size() == ref.constraints.size() && z.size() == ref.z_star.size(),
          "saddle gap: dual dimension mismatch");

  double left = ref.objective(x);             // L(x, z_star)
  double right = ref.objective(ref.x_star);   // L(x_star, z)
  for (std::size_t i = 0; i < ref.constraints.size(); ++i) {
    left += ref.z_star[i] * ref.constraints[i](x);
    right += z[i] * ref.constraints[i](ref.x_star);
  }
  return left - right;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  const std::size_t n = trace.final_state.x.size();
  const std::size_t m = trace.final_state.z.size();

  os << "k";
  for (std::size_t j = 0; j < n; ++j) os << ",x_" << j;
  for (std::size_t i = 0; i < m; ++i) os << ",z_" << i;
  for (std::size_t j = 0; j < n; ++j) os << ",xbar_" << j;
  for (std::size_t i = 0; i < m; ++i) os << ",zbar_" << i;
  os << "\n";

  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), ",%.17g", v);
    os << buf;
  };
  for (const TraceSnapshot& s : trace.snapshots) {
    os << s.k;
    for (double v : s.x) put(v);
    for (double v : s.z) put(v);
    for (double v : s.ergodic_x) put(v);
    for (double v : s.ergodic_z) put(v);
    os << "\n";
  }
}

}  // namespace pdss
