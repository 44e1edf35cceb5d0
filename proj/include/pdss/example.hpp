#pragma once

#include <memory>

#include "pdss/problem.hpp"
#include "pdss/solver.hpp"

namespace pdss {

/// Median of three values.
double median3(double a, double b, double c);

/// Scaled Beta(2, 2) draw from three explicit uniforms: the median of
/// three independent U[0,1] has the Beta(2,2) law; the result is divided
/// by 3 so all mass lies in [0, 1/3]. Exposed separately so the median
/// logic is testable without an RNG.
double scaled_beta_from_uniforms(double u1, double u2, double u3);

/// One draw of omega ~ (1/3) Beta(2, 2), consuming three uniforms.
/// Branch-free; mean 1/6, variance 1/180.
double sample_scaled_beta(Rng& rng);

/// Stateful wrapper owning its generator; every draw lies in [0, 1/3].
class ScaledBetaSampler {
 public:
  explicit ScaledBetaSampler(std::uint64_t seed) : rng_(seed) {}
  double draw() { return sample_scaled_beta(rng_); }

 private:
  Rng rng_;
};

/// The built-in illustrative problem:
///   minimize   CVaR_alpha[ (x - omega - 1/2)^2 / 2 ]
///   subject to CVaR_beta[ x + omega ] <= 0,   x in [-1/2, 1/2],
/// with omega ~ (1/3) Beta(2, 2). Almost-sure bounds c_f = 4/3, c_g = 1,
/// d_g = 5/6.
class ExampleProblem final : public StochasticProgram {
 public:
  ExampleProblem();

  std::size_t dimension() const override { return 1; }
  std::size_t num_constraints() const override { return 1; }
  void draw(Rng& rng, Scenario& out) const override;
  double objective(const Scenario& w, std::span<const double> x) const override;
  double constraint(const Scenario& w, std::span<const double> x,
                    std::size_t i) const override;
  void objective_subgrad(const Scenario& w, std::span<const double> x,
                         std::span<double> out) const override;
  void constraint_subgrad(const Scenario& w, std::span<const double> x,
                          std::size_t i, std::span<double> out) const override;
  void project(std::span<double> x) const override;
  const BoundSet& bounds() const override { return bounds_; }

 private:
  BoundSet bounds_;
};

std::shared_ptr<const StochasticProgram> build_example_problem();

/// Known reference values for the example at alpha = 0.3, beta = 0.2,
/// epsilon = 5e-3: the published constants and tuned step data this
/// instance is expected to reproduce, plus the conventional overestimates
/// feeding P1 (augmented start at the origin, |z*| <= 2, |u0*| <= 8/9,
/// |u1*| <= 5/6, |x1 - x*| <= 1/2).
struct ExampleReference {
  double alpha = 0.3;
  double beta = 0.2;
  double epsilon = 5e-3;
  double p1 = 3197.0 / 81.0;
  double p2 = 8276.0 / 93.0;  // differs from the formula value; see README
  double p3 = 50.0;
  double gamma_star = 0.0808;
  double k_star = 1.35e9;
  double x_star = -0.1929;
  double f_star = 0.4042;
  double x1_dist_sq = 0.25 + 64.0 / 81.0 + 25.0 / 36.0;
  double z_norm_bound = 2.0;
  double u0_abs_bound = 8.0 / 9.0;  // max |f| over the domain, (4/3)^2 / 2
};

ExampleReference example_reference();

/// Deterministic quadratic test problem with a hand-computable saddle:
///   minimize (x - 1)^2  subject to  x <= 0,  x in [-2, 2].
/// Singleton scenario set; KKT point (x*, z*) = (0, 2). Almost-sure
/// bounds c_f = 6, c_g = 1, d_g = 2.
class QpTestProblem final : public StochasticProgram {
 public:
  QpTestProblem();

  std::size_t dimension() const override { return 1; }
  std::size_t num_constraints() const override { return 1; }
  void draw(Rng& rng, Scenario& out) const override;
  double objective(const Scenario& w, std::span<const double> x) const override;
  double constraint(const Scenario& w, std::span<const double> x,
                    std::size_t i) const override;
  void objective_subgrad(const Scenario& w, std::span<const double> x,
                         std::span<double> out) const override;
  void constraint_subgrad(const Scenario& w, std::span<const double> x,
                          std::size_t i, std::span<double> out) const override;
  void project(std::span<double> x) const override;
  const BoundSet& bounds() const override { return bounds_; }

 private:
  BoundSet bounds_;
};

std::shared_ptr<const StochasticProgram> build_qp_test_problem();

/// Exact evaluators and the KKT point of the quadratic test problem.
SaddleReference qp_saddle_reference();

}  // namespace pdss
