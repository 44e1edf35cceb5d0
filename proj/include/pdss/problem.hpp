#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "pdss/rng.hpp"
#include "pdss/vec.hpp"

namespace pdss {

/// Opaque scenario payload. The solver never interprets it; only the
/// oracles of the owning program do. Reused across iterations to avoid
/// per-draw allocation.
using Scenario = std::vector<double>;

/// Which growth assumption the bound constants were stated under.
/// Expectation: subgradient bounds plus variance bounds (sigma fields).
/// AlmostSure: uniform bounds holding for every scenario; sigma fields
/// must be absent since they are implied zero.
enum class AssumptionMode { Expectation, AlmostSure };

/// Bound parameters of a stochastic program: subgradient bound c_f for the
/// objective, per-constraint subgradient bounds c_g and value bounds d_g,
/// and (in Expectation mode) the variance bounds sigma_f, sigma_g.
struct BoundSet {
  double c_f = 0.0;
  Vec c_g;
  Vec d_g;
  std::optional<double> sigma_f;
  std::optional<Vec> sigma_g;
  AssumptionMode mode = AssumptionMode::Expectation;

  /// Throws std::invalid_argument on size mismatch, negative entries, or
  /// sigma fields present in AlmostSure mode.
  void validate(std::size_t num_constraints) const;

  static BoundSet almost_sure(double c_f, Vec c_g, Vec d_g);
  static BoundSet expectation(double c_f, double sigma_f, Vec c_g, Vec sigma_g,
                              Vec d_g);
};

/// Projection onto the feasible decision set. Implementations must be
/// idempotent and non-expansive.
class Projection {
 public:
  virtual ~Projection() = default;
  virtual void apply(std::span<double> v) const = 0;

  Vec applied(std::span<const double> v) const {
    Vec out(v.begin(), v.end());
    apply(out);
    return out;
  }
};

/// Componentwise clamp to [lo, hi]. The only built-in projection.
class BoxProjection final : public Projection {
 public:
  BoxProjection(Vec lo, Vec hi);
  void apply(std::span<double> v) const override;

  std::span<const double> lo() const { return lo_; }
  std::span<const double> hi() const { return hi_; }

 private:
  Vec lo_, hi_;
};

/// Clamp v into the box [lo, hi]. Throws std::invalid_argument on
/// dimension mismatch or lo > hi.
Vec project_box(std::span<const double> v, std::span<const double> lo,
                std::span<const double> hi);

/// A stochastic convex program: sampling oracle, value/subgradient oracles
/// for the objective f and constraints g^i, a projection onto the decision
/// set, and the bound parameters. Convexity of every f(w,.), g^i(w,.) and
/// validity of the subgradients are user contracts, spot-checked by
/// check_subgradient / check_midpoint_convexity.
///
/// Oracles must be safe to call from concurrent runs as long as each run
/// owns its Rng; a single run calls them sequentially.
class StochasticProgram {
 public:
  virtual ~StochasticProgram() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::size_t num_constraints() const = 0;

  virtual void draw(Rng& rng, Scenario& out) const = 0;

  virtual double objective(const Scenario& w, std::span<const double> x) const = 0;
  virtual double constraint(const Scenario& w, std::span<const double> x,
                            std::size_t i) const = 0;

  virtual void objective_subgrad(const Scenario& w, std::span<const double> x,
                                 std::span<double> out) const = 0;
  virtual void constraint_subgrad(const Scenario& w, std::span<const double> x,
                                  std::size_t i, std::span<double> out) const = 0;

  virtual void project(std::span<double> x) const = 0;

  virtual const BoundSet& bounds() const = 0;

  /// Default starting point: the projection of the origin.
  virtual Vec initial_point() const {
    Vec x(dimension(), 0.0);
    project(x);
    return x;
  }
};

/// Result of spot-checking oracles against the convexity inequality
/// h(y) >= h(x) + <grad h(x), y - x>. worst_slack is the most negative
/// slack seen over all trials and functions; flagged means it fell below
/// -tolerance.
struct SubgradientCheck {
  double worst_slack = 0.0;
  bool flagged = false;
};

/// Slack of the convexity inequality for one (x, y) pair:
/// h(y) - h(x) - <grad_x, y - x>. Nonnegative iff grad_x is a valid
/// subgradient direction for this pair.
double subgradient_slack(double h_y, double h_x, std::span<const double> grad_x,
                         std::span<const double> y_minus_x);

/// Checks the objective and every constraint of `prog` at scenario `w` and
/// point `x` against `trials` random y drawn from the projected
/// neighborhood x + radius*[-1,1]^n. Oracle failures propagate.
SubgradientCheck check_subgradient(const StochasticProgram& prog,
                                   const Scenario& w, std::span<const double> x,
                                   int trials, Rng& rng, double radius = 1.0,
                                   double tolerance = 1e-9);

/// Midpoint convexity spot check: h((x+y)/2) <= (h(x)+h(y))/2 on random
/// projected pairs. worst_gap is the largest positive violation.
struct ConvexityCheck {
  double worst_gap = 0.0;
  bool flagged = false;
};

ConvexityCheck check_midpoint_convexity(const StochasticProgram& prog,
                                        const Scenario& w,
                                        std::span<const double> x, int trials,
                                        Rng& rng, double radius = 1.0,
                                        double tolerance = 1e-9);

}  // namespace pdss
