#include "pdss/example.hpp"

#include <algorithm>
#include <cmath>

namespace pdss {

double median3(double a, double b, double c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

double scaled_beta_from_uniforms(double u1, double u2, double u3) {
  return median3(u1, u2, u3) / 3.0;
}

double sample_scaled_beta(Rng& rng) {
  const double u1 = rng.next_uniform();
  const double u2 = rng.next_uniform();
  const double u3 = rng.next_uniform();
  return scaled_beta_from_uniforms(u1, u2, u3);
}

ExampleProblem::ExampleProblem() {
  bounds_ = BoundSet::almost_sure(4.0 / 3.0, Vec{1.0}, Vec{5.0 / 6.0});
}

void ExampleProblem::draw(Rng& rng, Scenario& out) const {
  out.resize(1);
  out[0] = sample_scaled_beta(rng);
}

double ExampleProblem::objective(const Scenario& w,
                                 std::span<const double> x) const {
  const double r = x[0] - w[0] - 0.5;
  return 0.5 * r * r;
}

double ExampleProblem::constraint(const Scenario& w, std::span<const double> x,
                                  std::size_t) const {
  return x[0] + w[0];
}

void ExampleProblem::objective_subgrad(const Scenario& w,
                                       std::span<const double> x,
                                       std::span<double> out) const {
  out[0] = x[0] - w[0] - 0.5;
}

void ExampleProblem::constraint_subgrad(const Scenario&, std::span<const double>,
                                        std::size_t, std::span<double> out) const {
  out[0] = 1.0;
}

void ExampleProblem::project(std::span<double> x) const {
  x[0] = std::clamp(x[0], -0.5, 0.5);
}

std::shared_ptr<const StochasticProgram> build_example_problem() {
  return std::make_shared<ExampleProblem>();
}

ExampleReference example_reference() { return {}; }

QpTestProblem::QpTestProblem() {
  bounds_ = BoundSet::almost_sure(6.0, Vec{1.0}, Vec{2.0});
}

void QpTestProblem::draw(Rng&, Scenario& out) const {
  out.resize(1);
  out[0] = 0.0;  // singleton scenario set
}

double QpTestProblem::objective(const Scenario&, std::span<const double> x) const {
  return (x[0] - 1.0) * (x[0] - 1.0);
}

double QpTestProblem::constraint(const Scenario&, std::span<const double> x,
                                 std::size_t) const {
  return x[0];
}

void QpTestProblem::objective_subgrad(const Scenario&, std::span<const double> x,
                                      std::span<double> out) const {
  out[0] = 2.0 * (x[0] - 1.0);
}

void QpTestProblem::constraint_subgrad(const Scenario&, std::span<const double>,
                                       std::size_t, std::span<double> out) const {
  out[0] = 1.0;
}

void QpTestProblem::project(std::span<double> x) const {
  x[0] = std::clamp(x[0], -2.0, 2.0);
}

std::shared_ptr<const StochasticProgram> build_qp_test_problem() {
  return std::make_shared<QpTestProblem>();
}

SaddleReference qp_saddle_reference() {
  SaddleReference ref;
  ref.x_star = {0.0};
  ref.z_star = {2.0};
  ref.objective = [](std::span<const double> x) {
    return (x[0] - 1.0) * (x[0] - 1.0);
  };
  ref.constraints = {[](std::span<const double> x) { return x[0]; }};
  return ref;
}

}  // namespace pdss
