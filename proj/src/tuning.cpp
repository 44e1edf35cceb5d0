#include "pdss/tuning.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace pdss {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double p1_from_overestimates(double x1_dist_sq, double z_norm_bound,
                             std::size_t m) {
  require(x1_dist_sq >= 0.0, "x1_dist_sq must be >= 0");
  require(z_norm_bound >= 0.0, "z_norm_bound must be >= 0");
  // |1 + z*|^2 <= (sqrt(m) + |z*|)^2 by the triangle inequality.
  const double ones_plus_z = std::sqrt(static_cast<double>(m)) + z_norm_bound;
  return 2.0 * x1_dist_sq + 4.0 * ones_plus_z * ones_plus_z;
}

}  // namespace

void PConstants::validate() const {
  if (!(p1 > 0.0 && p2 > 0.0 && p3 > 0.0)) {
    throw std::invalid_argument("P constants must be strictly positive");
  }
}

PConstants p_constants_expectation(const BoundSet& bounds, double x1_dist_sq,
                                   double z_norm_bound) {
  require(bounds.mode == AssumptionMode::Expectation,
          "expectation-mode constants need expectation-mode bounds");
  const std::size_t m = bounds.c_g.size();
  bounds.validate(m);
  require(bounds.sigma_f.has_value() && bounds.sigma_g.has_value(),
          "expectation-mode constants need sigma_f and sigma_g");

  PConstants p;
  p.mode = PConstants::Mode::Expectation;
  p.p1 = p1_from_overestimates(x1_dist_sq, z_norm_bound, m);
  p.p2 = 8.0 * (4.0 * bounds.c_f * bounds.c_f + *bounds.sigma_f * *bounds.sigma_f) +
         2.0 * norm_sq(bounds.d_g);
  p.p3 = 8.0 * static_cast<double>(m) *
         (4.0 * norm_sq(bounds.c_g) + norm_sq(*bounds.sigma_g));
  p.validate();
  return p;
}

PConstants p_constants_almost_sure(const BoundSet& bounds, double x1_dist_sq,
                                   double z_norm_bound) {
  require(bounds.mode == AssumptionMode::AlmostSure,
          "almost-sure constants need almost-sure bounds");
  const std::size_t m = bounds.c_g.size();
  bounds.validate(m);

  PConstants p;
  p.mode = PConstants::Mode::AlmostSure;
  p.p1 = p1_from_overestimates(x1_dist_sq, z_norm_bound, m);
  p.p2 = 16.0 * bounds.c_f * bounds.c_f + 2.0 * norm_sq(bounds.d_g);
  p.p3 = 16.0 * static_cast<double>(m) * norm_sq(bounds.c_g);
  p.validate();
  return p;
}

PConstants p_constants_cvar(const BoundSet& bounds, const RiskParams& risk,
                            double x1_dist_sq, double z_norm_bound) {
  require(bounds.mode == AssumptionMode::AlmostSure,
          "risk-sensitive constants need almost-sure bounds");
  risk.validate();
  const std::size_t m = bounds.c_g.size();
  bounds.validate(m);
  require(risk.beta.size() == m, "risk beta has wrong dimension");

  const double one_minus_a = 1.0 - risk.alpha;
  double dg_sq = 0.0;   // |diag(1+b) diag(1-b)^-1 d_g|^2
  double tail_sq = 0.0; // |(diag(1-b)^-1 c_g ; diag(1-b)^-1 1)|^2
  for (std::size_t i = 0; i < m; ++i) {
    const double bi = risk.beta[i];
    const double scaled_dg = (1.0 + bi) / (1.0 - bi) * bounds.d_g[i];
    dg_sq += scaled_dg * scaled_dg;
    const double cg = bounds.c_g[i] / (1.0 - bi);
    const double unit = 1.0 / (1.0 - bi);
    tail_sq += cg * cg + unit * unit;
  }

  PConstants p;
  p.mode = PConstants::Mode::Cvar;
  p.p1 = p1_from_overestimates(x1_dist_sq, z_norm_bound, m);
  p.p2 = 16.0 * (bounds.c_f * bounds.c_f + 1.0) / (one_minus_a * one_minus_a) +
         2.0 * dg_sq;
  p.p3 = 16.0 * static_cast<double>(m) * tail_sq;
  p.validate();
  return p;
}

double eta(const PConstants& p, double gamma) {
  p.validate();
  require(gamma > 0.0 && gamma * gamma * p.p3 < 1.0,
          "step scale gamma must lie in (0, P3^{-1/2})");
  const double g2 = gamma * gamma;
  return (p.p1 + p.p2 * g2) / (4.0 * gamma * (1.0 - p.p3 * g2));
}

double eta_certificate(const PConstants& p, double gamma, std::uint64_t k) {
  require(k > 0, "certificate needs at least one iteration");
  return eta(p, gamma) / std::sqrt(static_cast<double>(k));
}

TuningResult optimal_step(const PConstants& p, double epsilon) {
  p.validate();
  require(epsilon > 0.0, "tolerance epsilon must be > 0");

  const double y = 1.0 + p.p2 / (p.p1 * p.p3);
  const double gamma_sq = (2.0 / p.p3) / (2.0 + y + std::sqrt(y * y + 8.0 * y));
  const double gamma = std::sqrt(gamma_sq);

  const double num = p.p1 + p.p2 * gamma_sq;
  const double den = 1.0 - p.p3 * gamma_sq;
  const double k_real =
      (num * num) / (16.0 * gamma_sq * den * den * epsilon * epsilon);
  require(k_real < 9.0e18, "optimal iteration count overflows a 64-bit counter");

  TuningResult result;
  result.gamma_star = gamma;
  result.k_star = static_cast<std::uint64_t>(std::ceil(k_real));
  result.eta = num / (4.0 * gamma * den);
  result.epsilon = epsilon;
  result.step = gamma / std::sqrt(static_cast<double>(result.k_star));
  return result;
}

std::vector<SweepRow> sweep_risk(const BoundSet& bounds, double x1_dist_sq,
                                 double z_norm_bound, double epsilon,
                                 std::span<const double> alpha_grid,
                                 std::span<const double> beta_grid) {
  require(bounds.c_g.size() == 1, "risk sweep expects a single constraint");
  require(!alpha_grid.empty() && !beta_grid.empty(), "risk sweep grid is empty");
  for (double a : alpha_grid) require(a >= 0.0 && a < 1.0, "alpha grid value outside [0, 1)");
  for (double b : beta_grid) require(b >= 0.0 && b < 1.0, "beta grid value outside [0, 1)");

  std::vector<SweepRow> rows;
  rows.reserve(alpha_grid.size() * beta_grid.size());
  for (double a : alpha_grid) {
    for (double b : beta_grid) {
      const PConstants p =
          p_constants_cvar(bounds, RiskParams{a, Vec{b}}, x1_dist_sq, z_norm_bound);
      const TuningResult t = optimal_step(p, epsilon);
      rows.push_back({a, b, t.gamma_star, t.k_star, t.step});
    }
  }

  // k_star must not decrease and gamma_star must not increase along either
  // grid axis; anything else means the constants lost their monotonicity.
  const std::size_t nb = beta_grid.size();
  auto cell = [&](std::size_t ia, std::size_t ib) -> const SweepRow& {
    return rows[ia * nb + ib];
  };
  for (std::size_t ia = 0; ia < alpha_grid.size(); ++ia) {
    for (std::size_t ib = 0; ib < nb; ++ib) {
      if (ib + 1 < nb && beta_grid[ib + 1] >= beta_grid[ib]) {
        if (cell(ia, ib + 1).k_star < cell(ia, ib).k_star ||
            cell(ia, ib + 1).gamma_star > cell(ia, ib).gamma_star) {
          throw std::logic_error("risk sweep lost monotonicity along beta");
        }
      }
      if (ia + 1 < alpha_grid.size() && alpha_grid[ia + 1] >= alpha_grid[ia]) {
        if (cell(ia + 1, ib).k_star < cell(ia, ib).k_star ||
            cell(ia + 1, ib).gamma_star > cell(ia, ib).gamma_star) {
          throw std::logic_error("risk sweep lost monotonicity along alpha");
        }
      }
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "alpha,beta,gamma_star,k_star,step\n";
  char buf[512];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%llu,%.17g\n", r.alpha,
                  r.beta, r.gamma_star,
                  static_cast<unsigned long long>(r.k_star), r.step);
    os << buf;
  }
}

}  // namespace pdss
