#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "pdss/problem.hpp"

namespace pdss {

/// Risk-aversion levels: alpha for the objective, beta^i per constraint,
/// each in [0, 1). Level 0 reduces CVaR to the plain expectation; levels
/// near 1 approach worst-case evaluation.
struct RiskParams {
  double alpha = 0.0;
  Vec beta;

  void validate() const;
  bool risk_neutral() const;
};

/// Variational CVaR integrand: psi(h, u; delta) = u + [h - u]^+ / (1 - delta).
/// Minimizing its expectation over u yields CVaR_delta of h. Throws if
/// delta is outside [0, 1).
double psi(double h_val, double u, double delta);

/// Slope data of psi at (h, u): the x-part of the subgradient is
/// grad_scale * grad_h, the u-part is u_slope. Ties h == u take the
/// indicator active (closed convention).
struct PsiSlope {
  double grad_scale;  // 1{h >= u} / (1 - delta)
  double u_slope;     // 1 - 1{h >= u} / (1 - delta)
};

PsiSlope psi_slope(double h_val, double u, double delta);

/// Full subgradient of psi in (x, u): scales grad_h by the indicator
/// factor and appends the u-component. Convenience form of psi_slope.
std::pair<Vec, double> psi_subgradient(std::span<const double> grad_h,
                                       double h_val, double u, double delta);

/// Bound constants induced on the reformulated problem:
///   objective subgradient bound   sqrt(c_f^2 + 1) / (1 - alpha)
///   constraint subgradient bound  sqrt(c_g_i^2 + 1) / (1 - beta_i)
///   constraint value bound        (1 + beta_i) / (1 - beta_i) * d_g_i
/// Requires almost-sure input bounds.
BoundSet transform_bounds(const BoundSet& bounds, const RiskParams& risk);

/// Expectation-form rewrite of a risk-sensitive program. The decision is
/// augmented to [x (n), u0, u (m)]: u0 is the CVaR auxiliary for the
/// objective (unconstrained unless u0_bound is given), u^i the auxiliary
/// for constraint i, clamped to [-d_g_i, d_g_i]. The objective oracle
/// becomes psi of f at level alpha; constraint i becomes psi of g^i at
/// level beta^i and touches only the x block and u^i.
class CvarReformulation final : public StochasticProgram {
 public:
  CvarReformulation(std::shared_ptr<const StochasticProgram> base,
                    RiskParams risk, std::optional<double> u0_bound = {});

  std::size_t dimension() const override { return n_ + 1 + m_; }
  std::size_t num_constraints() const override { return m_; }

  void draw(Rng& rng, Scenario& out) const override { base_->draw(rng, out); }

  double objective(const Scenario& w, std::span<const double> x) const override;
  double constraint(const Scenario& w, std::span<const double> x,
                    std::size_t i) const override;
  void objective_subgrad(const Scenario& w, std::span<const double> x,
                         std::span<double> out) const override;
  void constraint_subgrad(const Scenario& w, std::span<const double> x,
                          std::size_t i, std::span<double> out) const override;
  void project(std::span<double> x) const override;
  const BoundSet& bounds() const override { return bounds_; }

  const StochasticProgram& base() const { return *base_; }
  const RiskParams& risk() const { return risk_; }

  /// The x block of an augmented decision vector.
  std::span<const double> base_part(std::span<const double> aug) const {
    return aug.subspan(0, n_);
  }

 private:
  std::shared_ptr<const StochasticProgram> base_;
  RiskParams risk_;
  std::optional<double> u0_bound_;
  std::size_t n_, m_;
  BoundSet bounds_;
};

/// Builds the expectation-form reformulation. Throws if the base problem
/// does not carry almost-sure bounds (the u box needs d_g) or risk
/// parameters are invalid.
std::shared_ptr<CvarReformulation> reformulate(
    std::shared_ptr<const StochasticProgram> base, RiskParams risk,
    std::optional<double> u0_bound = {});

}  // namespace pdss
