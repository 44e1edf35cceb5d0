#include "pdss/cvar.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace pdss {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_level(double delta) {
  require(delta >= 0.0 && delta < 1.0, "risk level must lie in [0, 1)");
}

}  // namespace

void RiskParams::validate() const {
  check_level(alpha);
  for (double b : beta) check_level(b);
}

bool RiskParams::risk_neutral() const {
  if (alpha != 0.0) return false;
  return std::all_of(beta.begin(), beta.end(), [](double b) { return b == 0.0; });
}

double psi(double h_val, double u, double delta) {
  check_level(delta);
  return u + std::max(h_val - u, 0.0) / (1.0 - delta);
}

PsiSlope psi_slope(double h_val, double u, double delta) {
  check_level(delta);
  if (h_val >= u) {
    const double s = 1.0 / (1.0 - delta);
    return {s, 1.0 - s};
  }
  return {0.0, 1.0};
}

std::pair<Vec, double> psi_subgradient(std::span<const double> grad_h,
                                       double h_val, double u, double delta) {
  const PsiSlope slope = psi_slope(h_val, u, delta);
  Vec g(grad_h.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = slope.grad_scale * grad_h[i];
  return {std::move(g), slope.u_slope};
}

BoundSet transform_bounds(const BoundSet& bounds, const RiskParams& risk) {
  require(bounds.mode == AssumptionMode::AlmostSure,
          "CVaR reformulation requires almost-sure bounds");
  risk.validate();
  const std::size_t m = bounds.c_g.size();
  require(risk.beta.size() == m, "risk beta has wrong dimension");
  bounds.validate(m);

  BoundSet out;
  out.mode = AssumptionMode::AlmostSure;
  out.c_f = std::sqrt(bounds.c_f * bounds.c_f + 1.0) / (1.0 - risk.alpha);
  out.c_g.resize(m);
  out.d_g.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double bi = risk.beta[i];
    out.c_g[i] = std::sqrt(bounds.c_g[i] * bounds.c_g[i] + 1.0) / (1.0 - bi);
    out.d_g[i] = (1.0 + bi) / (1.0 - bi) * bounds.d_g[i];
  }
  return out;
}

CvarReformulation::CvarReformulation(std::shared_ptr<const StochasticProgram> base,
                                     RiskParams risk,
                                     std::optional<double> u0_bound)
    : base_(std::move(base)),
      risk_(std::move(risk)),
      u0_bound_(u0_bound),
      n_(base_->dimension()),
      m_(base_->num_constraints()) {
  require(risk_.beta.size() == m_, "risk beta has wrong dimension");
  if (u0_bound_) require(*u0_bound_ >= 0.0, "u0 bound must be >= 0");
  bounds_ = transform_bounds(base_->bounds(), risk_);
}

double CvarReformulation::objective(const Scenario& w,
                                    std::span<const double> x) const {
  return psi(base_->objective(w, base_part(x)), x[n_], risk_.alpha);
}

double CvarReformulation::constraint(const Scenario& w, std::span<const double> x,
                                     std::size_t i) const {
  return psi(base_->constraint(w, base_part(x), i), x[n_ + 1 + i], risk_.beta[i]);
}

void CvarReformulation::objective_subgrad(const Scenario& w,
                                          std::span<const double> x,
                                          std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const auto xb = base_part(x);
  const PsiSlope slope = psi_slope(base_->objective(w, xb), x[n_], risk_.alpha);
  if (slope.grad_scale != 0.0) {
    base_->objective_subgrad(w, xb, out.subspan(0, n_));
    for (std::size_t j = 0; j < n_; ++j) out[j] *= slope.grad_scale;
  }
  out[n_] = slope.u_slope;
}

void CvarReformulation::constraint_subgrad(const Scenario& w,
                                           std::span<const double> x,
                                           std::size_t i,
                                           std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const auto xb = base_part(x);
  const PsiSlope slope =
      psi_slope(base_->constraint(w, xb, i), x[n_ + 1 + i], risk_.beta[i]);
  if (slope.grad_scale != 0.0) {
    base_->constraint_subgrad(w, xb, i, out.subspan(0, n_));
    for (std::size_t j = 0; j < n_; ++j) out[j] *= slope.grad_scale;
  }
  out[n_ + 1 + i] = slope.u_slope;
}

void CvarReformulation::project(std::span<double> x) const {
  base_->project(x.subspan(0, n_));
  if (u0_bound_) x[n_] = std::clamp(x[n_], -*u0_bound_, *u0_bound_);
  const Vec& d_g = base_->bounds().d_g;
  for (std::size_t i = 0; i < m_; ++i) {
    x[n_ + 1 + i] = std::clamp(x[n_ + 1 + i], -d_g[i], d_g[i]);
  }
}

std::shared_ptr<CvarReformulation> reformulate(
    std::shared_ptr<const StochasticProgram> base, RiskParams risk,
    std::optional<double> u0_bound) {
  require(base != nullptr, "reformulate: null base program");
  return std::make_shared<CvarReformulation>(std::move(base), std::move(risk),
                                             u0_bound);
}

}  // namespace pdss
