#include "pdss/problem.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace pdss {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void require_nonneg(std::span<const double> v, const std::string& name) {
  for (double x : v) require(x >= 0.0, name + " must be componentwise >= 0");
}

}  // namespace

void BoundSet::validate(std::size_t num_constraints) const {
  require(c_f >= 0.0, "bound c_f must be >= 0");
  require(c_g.size() == num_constraints, "bound c_g has wrong dimension");
  require(d_g.size() == num_constraints, "bound d_g has wrong dimension");
  require_nonneg(c_g, "bound c_g");
  require_nonneg(d_g, "bound d_g");
  if (mode == AssumptionMode::AlmostSure) {
    require(!sigma_f.has_value() && !sigma_g.has_value(),
            "almost-sure bounds imply zero variance; sigma fields must be absent");
  } else {
    if (sigma_f) require(*sigma_f >= 0.0, "bound sigma_f must be >= 0");
    if (sigma_g) {
      require(sigma_g->size() == num_constraints, "bound sigma_g has wrong dimension");
      require_nonneg(*sigma_g, "bound sigma_g");
    }
  }
}

BoundSet BoundSet::almost_sure(double c_f, Vec c_g, Vec d_g) {
  BoundSet b;
  b.c_f = c_f;
  b.c_g = std::move(c_g);
  b.d_g = std::move(d_g);
  b.mode = AssumptionMode::AlmostSure;
  return b;
}

BoundSet BoundSet::expectation(double c_f, double sigma_f, Vec c_g, Vec sigma_g,
                               Vec d_g) {
  BoundSet b;
  b.c_f = c_f;
  b.sigma_f = sigma_f;
  b.c_g = std::move(c_g);
  b.sigma_g = std::move(sigma_g);
  b.d_g = std::move(d_g);
  b.mode = AssumptionMode::Expectation;
  return b;
}

BoxProjection::BoxProjection(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  require(lo_.size() == hi_.size(), "box projection: lo/hi dimension mismatch");
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    require(lo_[i] <= hi_[i], "box projection: lo > hi");
  }
}

void BoxProjection::apply(std::span<double> v) const {
  require(v.size() == lo_.size(), "box projection: input dimension mismatch");
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = std::clamp(v[i], lo_[i], hi_[i]);
  }
}

Vec project_box(std::span<const double> v, std::span<const double> lo,
                std::span<const double> hi) {
  require(v.size() == lo.size() && v.size() == hi.size(),
          "project_box: dimension mismatch");
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(lo[i] <= hi[i], "project_box: lo > hi");
    out[i] = std::clamp(v[i], lo[i], hi[i]);
  }
  return out;
}

double subgradient_slack(double h_y, double h_x, std::span<const double> grad_x,
                         std::span<const double> y_minus_x) {
  return h_y - h_x - dot(grad_x, y_minus_x);
}

namespace {

// Draws y from the projected neighborhood of x.
Vec random_nearby_point(const StochasticProgram& prog, std::span<const double> x,
                        double radius, Rng& rng) {
  Vec y(x.begin(), x.end());
  for (double& c : y) c += rng.next_uniform(-radius, radius);
  prog.project(y);
  return y;
}

}  // namespace

SubgradientCheck check_subgradient(const StochasticProgram& prog,
                                   const Scenario& w, std::span<const double> x,
                                   int trials, Rng& rng, double radius,
                                   double tolerance) {
  const std::size_t n = prog.dimension();
  const std::size_t m = prog.num_constraints();
  require(x.size() == n, "check_subgradient: point dimension mismatch");

  SubgradientCheck report;
  report.worst_slack = std::numeric_limits<double>::infinity();

  Vec grad(n), diff(n);
  const double f_x = prog.objective(w, x);
  Vec g_x(m);
  for (std::size_t i = 0; i < m; ++i) g_x[i] = prog.constraint(w, x, i);

  for (int t = 0; t < trials; ++t) {
    const Vec y = random_nearby_point(prog, x, radius, rng);
    for (std::size_t i = 0; i < n; ++i) diff[i] = y[i] - x[i];

    prog.objective_subgrad(w, x, grad);
    report.worst_slack = std::min(
        report.worst_slack, subgradient_slack(prog.objective(w, y), f_x, grad, diff));

    for (std::size_t i = 0; i < m; ++i) {
      prog.constraint_subgrad(w, x, i, grad);
      report.worst_slack =
          std::min(report.worst_slack,
                   subgradient_slack(prog.constraint(w, y, i), g_x[i], grad, diff));
    }
  }
  report.flagged = report.worst_slack < -tolerance;
  return report;
}

ConvexityCheck check_midpoint_convexity(const StochasticProgram& prog,
                                        const Scenario& w,
                                        std::span<const double> x, int trials,
                                        Rng& rng, double radius,
                                        double tolerance) {
  const std::size_t n = prog.dimension();
  const std::size_t m = prog.num_constraints();
  require(x.size() == n, "check_midpoint_convexity: point dimension mismatch");

  ConvexityCheck report;
  report.worst_gap = -std::numeric_limits<double>::infinity();
  Vec mid(n);

  for (int t = 0; t < trials; ++t) {
    const Vec a = random_nearby_point(prog, x, radius, rng);
    const Vec b = random_nearby_point(prog, x, radius, rng);
    for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (a[i] + b[i]);

    double gap = prog.objective(w, mid) -
                 0.5 * (prog.objective(w, a) + prog.objective(w, b));
    report.worst_gap = std::max(report.worst_gap, gap);
    for (std::size_t i = 0; i < m; ++i) {
      gap = prog.constraint(w, mid, i) -
            0.5 * (prog.constraint(w, a, i) + prog.constraint(w, b, i));
      report.worst_gap = std::max(report.worst_gap, gap);
    }
  }
  report.flagged = report.worst_gap > tolerance;
  return report;
}

}  // namespace pdss
