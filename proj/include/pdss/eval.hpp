#pragma once

#include <cstdint>
#include <iosfwd>

#include "pdss/cvar.hpp"
#include "pdss/problem.hpp"
#include "pdss/solver.hpp"

namespace pdss {

/// Empirical CVaR at level delta: with the samples sorted descending and
/// lambda = (1 - delta) * N, the weighted average of the top floor(lambda)
/// samples plus the fractional remainder of the next one, divided by
/// lambda. This is the exact minimizer value of the variational form
///   min_u { u + sum_j [y_j - u]^+ / ((1 - delta) N) }
/// and lies between the sample mean and the sample maximum. Throws on an
/// empty sample set or delta outside [0, 1).
double empirical_cvar(std::span<const double> samples, double delta);

/// Estimator value plus the sampling metadata needed to reproduce it. The
/// value always lies between the sample mean and the sample maximum.
struct CvarEstimate {
  double value = 0.0;
  std::size_t n_samples = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

CvarEstimate estimate_cvar(std::span<const double> samples, double delta,
                           std::uint64_t seed = 0);

/// Monte-Carlo evaluation of the risk functionals at a candidate decision:
/// draws n_samples scenarios, evaluates f and each g^i at x, and returns
/// the empirical CVaR of the objective samples at level alpha and of each
/// constraint's samples at level beta^i. Deterministic given the seed.
struct Evaluation {
  double f_hat = 0.0;
  Vec g_hat;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  /// Sharpened violation metric: sum of positive parts of g_hat.
  double total_violation() const;
};

Evaluation evaluate_solution(const StochasticProgram& problem,
                             std::span<const double> x, const RiskParams& risk,
                             std::size_t n_samples, std::uint64_t seed);

/// Cross-check of the closed-form estimator against a bracketed 1-D
/// minimization of the variational objective over u. Flags disagreement
/// beyond the tolerance.
struct VariationalCheck {
  double closed_form = 0.0;
  double minimized = 0.0;
  double abs_gap = 0.0;
  bool flagged = false;
};

VariationalCheck cross_check_variational(std::span<const double> samples,
                                         double delta, double tolerance = 1e-8);

/// Tail bound exp(-N tau^2 eta^2 / (K d_g_i^2)) on the probability that
/// the i-th constraint at the replica-averaged solution exceeds
/// (1 + tau) eta / sqrt(K). Can exceed 1 (vacuous) at modest N; reported
/// verbatim.
double hoeffding_tail_bound(std::size_t n_replicas, double tau, double eta,
                            double k_iterations, double d_g_i);

/// Replicated-run aggregation: n_replicas independent solver runs on the
/// reformulated problem with seeds base_seed + j, averaged ergodic
/// solutions, per-replica risk evaluations at the x block, and the tail
/// bound per constraint.
struct ReplicaAggregate {
  Vec mean_solution;  // mean of augmented ergodic iterates
  std::vector<Evaluation> replica_evals;
  Vec tail_bounds;
  std::vector<RunTrace> traces;
};

struct AggregateOptions {
  std::uint64_t iterations = 0;
  int n_replicas = 1;
  std::uint64_t base_seed = 1;
  double tau = 1.0;
  double eta = 0.0;  // certificate numerator used in the tail bound
  std::size_t eval_samples = 1'000'000;
  std::uint64_t eval_seed = 0x9e3779b9u;  // independent of solver seeds
  std::size_t snapshot_count = 1000;
};

ReplicaAggregate parallel_aggregate(const StochasticProgram& problem,
                                    const RiskParams& risk,
                                    const StepSchedule& schedule,
                                    const AggregateOptions& options);

/// CSV export: x...,F_hat,G_hat...,n_samples,seed (17 significant digits).
void write_eval_csv(std::ostream& os, std::span<const double> x,
                    const Evaluation& eval);

}  // namespace pdss
