#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pdss/cvar.hpp"
#include "pdss/problem.hpp"

namespace pdss {

/// The three constants entering the convergence bound
///   (P1 + P2 * A) / (4 * S * (1 - P3 * A)),  A = sum gamma_k^2, S = sum gamma_k.
/// All strictly positive. The mode records which formula produced them.
struct PConstants {
  enum class Mode { Expectation, AlmostSure, Cvar };

  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  Mode mode = Mode::Expectation;

  void validate() const;
};

/// P constants under expectation-mode bounds (variance terms present):
///   P1 = 2 * x1_dist_sq + 4 * (sqrt(m) + z_norm_bound)^2
///   P2 = 8 * (4 c_f^2 + sigma_f^2) + 2 * |d_g|^2
///   P3 = 8 m * (4 |c_g|^2 + |sigma_g|^2)
/// x1_dist_sq overestimates |x1 - x*|^2 and z_norm_bound overestimates
/// |z*|; the (sqrt(m) + z_norm_bound)^2 term upper-bounds |1 + z*|^2.
PConstants p_constants_expectation(const BoundSet& bounds, double x1_dist_sq,
                                   double z_norm_bound);

/// P constants under almost-sure bounds:
///   P2 = 16 c_f^2 + 2 |d_g|^2,  P3 = 16 m |c_g|^2,  P1 as above.
PConstants p_constants_almost_sure(const BoundSet& bounds, double x1_dist_sq,
                                   double z_norm_bound);

/// P constants for the reformulated risk-sensitive problem, in terms of the
/// original problem's almost-sure bounds and the risk levels:
///   P2 = 16 (c_f^2 + 1) / (1 - alpha)^2 + 2 * sum_i ((1+b_i)/(1-b_i) d_g_i)^2
///   P3 = 16 m * sum_i [ (c_g_i / (1-b_i))^2 + (1 / (1-b_i))^2 ]
/// x1_dist_sq refers to the augmented decision (x, u0, u).
PConstants p_constants_cvar(const BoundSet& bounds, const RiskParams& risk,
                            double x1_dist_sq, double z_norm_bound);

/// Output of the step-size optimization: the step scale gamma_star, the
/// minimal iteration count k_star meeting the target tolerance, the
/// certificate numerator eta, and the per-iteration constant step
/// gamma_star / sqrt(k_star).
struct TuningResult {
  double gamma_star = 0.0;
  std::uint64_t k_star = 0;
  double eta = 0.0;
  double epsilon = 0.0;
  double step = 0.0;
};

/// Minimizes the iteration count K subject to eta / sqrt(K) <= epsilon over
/// the step scale gamma in (0, P3^{-1/2}):
///   gamma_star^2 = 2 / (P3 * (2 + y + sqrt(y^2 + 8y))),  y = 1 + P2/(P1 P3)
///   K_star = ceil( (P1 + P2 g^2)^2 / (16 g^2 (1 - P3 g^2)^2 eps^2) ).
/// The ceiling restores integrality conservatively.
TuningResult optimal_step(const PConstants& p, double epsilon);

/// Certificate numerator eta = (P1 + P2 g^2) / (4 g (1 - P3 g^2)).
/// Requires 0 < gamma < P3^{-1/2}.
double eta(const PConstants& p, double gamma);

/// The computed bound eta / sqrt(K) on expected suboptimality and
/// per-constraint violation at the ergodic average after K iterations with
/// constant step gamma / sqrt(K).
double eta_certificate(const PConstants& p, double gamma, std::uint64_t k);

/// One cell of a risk-parameter sweep (single-constraint problems).
struct SweepRow {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma_star = 0.0;
  std::uint64_t k_star = 0;
  double step = 0.0;
};

/// Tabulates (gamma_star, k_star, step) over an (alpha, beta) grid for a
/// single-constraint problem with the given almost-sure bounds. Verifies
/// that k_star is nondecreasing and gamma_star nonincreasing along both
/// grid axes before returning; a violation throws std::logic_error.
std::vector<SweepRow> sweep_risk(const BoundSet& bounds, double x1_dist_sq,
                                 double z_norm_bound, double epsilon,
                                 std::span<const double> alpha_grid,
                                 std::span<const double> beta_grid);

/// CSV export: header alpha,beta,gamma_star,k_star,step with floating
/// values at 17 significant digits.
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

}  // namespace pdss
