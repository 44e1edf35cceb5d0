// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Criterion 4 (the full
// tuned-horizon run) is skipped unless --long is given; everything else
// runs unconditionally. Exit code 0 iff nothing failed.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "pdss/cvar.hpp"
#include "pdss/eval.hpp"
#include "pdss/example.hpp"
#include "pdss/experiment.hpp"
#include "pdss/solver.hpp"
#include "pdss/tuning.hpp"

using namespace pdss;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void skip(int criterion, const std::string& detail) {
  std::printf("[SKIP] criterion %2d: %s\n", criterion, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// ---- criterion 1: tuner reproduction from the published constants ----
void criterion_tuner_reproduction() {
  PConstants p;
  p.mode = PConstants::Mode::Cvar;
  p.p1 = 3197.0 / 81.0;
  p.p2 = 8276.0 / 93.0;
  p.p3 = 50.0;
  const TuningResult t = optimal_step(p, 5e-3);

  const bool gamma_ok = std::abs(t.gamma_star - 0.0808) <= 1e-3;
  const bool k_ok =
      std::abs(static_cast<double>(t.k_star) - 1.35e9) <= 0.01 * 1.35e9;
  report(1, gamma_ok && k_ok,
         fmt("gamma_star = %.6f (target 0.0808 +- 1e-3), K_star = %.4e "
             "(target 1.35e9 +- 1%%)",
             t.gamma_star, static_cast<double>(t.k_star)));
}

// ---- criterion 2: constant formulas on the example ----
void criterion_constant_formulas() {
  const ExampleReference ref = example_reference();
  const BoundSet bounds = build_example_problem()->bounds();
  const PConstants p = p_constants_cvar(bounds, RiskParams{0.3, Vec{0.2}},
                                        ref.x1_dist_sq, ref.z_norm_bound);

  const bool p3_ok = p.p3 == 50.0;
  const bool p1_ok = p.p1 == 3197.0 / 81.0;
  const double p2_formula = 40000.0 / 441.0 + 25.0 / 8.0;
  const bool p2_ok = std::abs(p.p2 - p2_formula) <= 1e-12 * p2_formula;
  report(2, p3_ok && p1_ok && p2_ok,
         fmt("P3 = %.17g (= 50 exact), P1 = %.17g (= 3197/81 exact), "
             "P2 formula = %.4f; note: differs from the published 8276/93 = "
             "%.4f, which the reference tuning row uses",
             p.p3, p.p1, p.p2, 8276.0 / 93.0));
}

// ---- criterion 3: desk-scale convergence at K = 1e7 over 5 seeds ----
void criterion_desk_scale() {
  const ExampleReference ref = example_reference();
  auto base = build_example_problem();
  const RiskParams risk{0.3, Vec{0.2}};
  auto prog = reformulate(base, risk);
  const PConstants p = p_constants_cvar(base->bounds(), risk, ref.x1_dist_sq,
                                        ref.z_norm_bound);
  const TuningResult tuned = optimal_step(p, 5e-3);

  const std::uint64_t k_iters = 10'000'000;
  const double bound = eta_certificate(p, tuned.gamma_star, k_iters);
  const StepSchedule schedule = StepSchedule::constant(tuned.gamma_star, k_iters);

  double sum_f = 0.0, sum_g = 0.0;
  const std::vector<std::uint64_t> seeds{11, 12, 13, 14, 15};
  for (std::uint64_t seed : seeds) {
    RunOptions options;
    options.seed = seed;
    options.iterations = k_iters;
    options.snapshot_count = 16;
    const RunTrace trace = run(*prog, schedule, options);
    const auto [xbar, zbar] = ergodic_average(trace);
    const Evaluation eval =
        evaluate_solution(*base, std::span<const double>{xbar.data(), 1}, risk,
                          1'000'000, 900 + seed);
    sum_f += eval.f_hat;
    sum_g += eval.g_hat[0];
  }
  const double mean_f = sum_f / static_cast<double>(seeds.size());
  const double mean_g = sum_g / static_cast<double>(seeds.size());

  const bool f_ok = mean_f - 0.4042 <= bound;
  const bool g_ok = mean_g <= bound;
  report(3, f_ok && g_ok,
         fmt("mean F_hat - 0.4042 = %.5f and mean G_hat = %.5f, both <= "
             "eta/sqrt(K) = %.5f over %zu seeds",
             mean_f - 0.4042, mean_g, bound, seeds.size()));
}

// ---- criterion 4 (--long): full tuned horizon on one seed ----
void criterion_long_run(bool enabled) {
  if (!enabled) {
    skip(4, "full K_star run; enable with --long");
    return;
  }
  const ExampleReference ref = example_reference();
  auto base = build_example_problem();
  const RiskParams risk{0.3, Vec{0.2}};
  auto prog = reformulate(base, risk);

  // The published constants define the tuned horizon.
  PConstants p;
  p.mode = PConstants::Mode::Cvar;
  p.p1 = ref.p1;
  p.p2 = ref.p2;
  p.p3 = ref.p3;
  const TuningResult tuned = optimal_step(p, 5e-3);

  RunOptions options;
  options.seed = 1;
  options.iterations = tuned.k_star;
  options.snapshot_count = 64;
  const StepSchedule schedule = StepSchedule::constant(tuned.gamma_star, tuned.k_star);
  const RunTrace trace = run(*prog, schedule, options);
  const auto [xbar, zbar] = ergodic_average(trace);
  const Evaluation eval = evaluate_solution(
      *base, std::span<const double>{xbar.data(), 1}, risk, 1'000'000, 4242);

  const bool x_ok = std::abs(xbar[0] - (-0.1926)) <= 0.01;
  const bool f_ok = eval.f_hat <= 0.4092;
  const bool g_ok = eval.g_hat[0] <= 0.0050;
  report(4, x_ok && f_ok && g_ok,
         fmt("K_star = %llu: xbar = %.4f (target -0.1926 +- 0.01), F_hat = "
             "%.4f <= 0.4092, G_hat = %.4f <= 0.0050 (zbar = %.4f)",
             static_cast<unsigned long long>(tuned.k_star), xbar[0], eval.f_hat,
             eval.g_hat[0], zbar[0]));
}

// ---- criterion 5: CVaR estimator vs variational minimization + coherence --
void criterion_estimator() {
  Rng rng(505);
  double worst_gap = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + (rng.next_u64() % 80);
    Vec samples(n);
    for (double& y : samples) y = rng.next_uniform(-10.0, 10.0);
    const double delta = rng.next_uniform(0.0, 0.99);
    const VariationalCheck check = cross_check_variational(samples, delta, 1e-8);
    worst_gap = std::max(worst_gap, check.abs_gap);
  }

  int coherence_violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 2 + (rng.next_u64() % 60);
    Vec samples(n);
    for (double& y : samples) y = rng.next_uniform(-5.0, 5.0);
    const double delta = rng.next_uniform(0.0, 0.95);
    const double value = empirical_cvar(samples, delta);

    const double shift = rng.next_uniform(-2.0, 2.0);
    Vec moved = samples;
    for (double& y : moved) y += shift;
    if (std::abs(empirical_cvar(moved, delta) - (value + shift)) > 1e-12 * (1.0 + std::abs(value + shift))) {
      ++coherence_violations;
    }
    const double scale = rng.next_uniform(0.1, 4.0);
    Vec scaled = samples;
    for (double& y : scaled) y *= scale;
    if (std::abs(empirical_cvar(scaled, delta) - value * scale) >
        1e-12 * (1.0 + std::abs(value * scale))) {
      ++coherence_violations;
    }
    const double higher = std::min(0.99, delta + rng.next_uniform(0.0, 0.4));
    if (empirical_cvar(samples, higher) < value - 1e-12) ++coherence_violations;
    const double mean =
        std::accumulate(samples.begin(), samples.end(), 0.0) / double(n);
    const double mx = *std::max_element(samples.begin(), samples.end());
    if (value < mean - 1e-12 || value > mx + 1e-12) ++coherence_violations;
  }

  report(5, worst_gap <= 1e-8 && coherence_violations == 0,
         fmt("variational cross-check worst gap = %.2e over 1000 sets; "
             "coherence violations = %d over 1000 sets",
             worst_gap, coherence_violations));
}

// ---- criterion 6: psi subgradients vs finite differences + norm bounds ----
void criterion_psi_subgradients() {
  Rng rng(606);
  int fd_failures = 0;
  int bound_failures = 0;
  int checked = 0;
  const double c_f = 4.0 / 3.0;
  while (checked < 10000) {
    const double delta = rng.next_uniform(0.0, 0.9);
    const double slope_raw = rng.next_uniform(-1.0, 1.0);
    const double slope = slope_raw * c_f;  // |grad h| <= c_f
    const double x = rng.next_uniform(-2.0, 2.0);
    const double u = rng.next_uniform(-2.0, 2.0);
    const double h = slope * x;
    if (std::abs(h - u) <= 1e-6) continue;
    ++checked;

    const auto [gx, gu] = psi_subgradient(Vec{slope}, h, u, delta);
    const double step = 1e-7;
    const double dx =
        (psi(slope * (x + step), u, delta) - psi(slope * (x - step), u, delta)) /
        (2.0 * step);
    const double du = (psi(h, u + step, delta) - psi(h, u - step, delta)) / (2.0 * step);
    if (std::abs(gx[0] - dx) > 1e-4 * std::max(1.0, std::abs(dx))) ++fd_failures;
    if (std::abs(gu - du) > 1e-4 * std::max(1.0, std::abs(du))) ++fd_failures;

    // norm bound of the combined subgradient
    const double total = gx[0] * gx[0] + gu * gu;
    if (total > (c_f * c_f + 1.0) / ((1.0 - delta) * (1.0 - delta)) + 1e-12) {
      ++bound_failures;
    }
    // value bound for |h| <= d_g and |u| <= d_g
    const double d_g = 2.0;
    const double h_c = std::clamp(h, -d_g, d_g);
    const double u_c = std::clamp(u, -d_g, d_g);
    if (std::abs(psi(h_c, u_c, delta)) > (1.0 + delta) / (1.0 - delta) * d_g + 1e-12) {
      ++bound_failures;
    }
  }
  report(6, fd_failures == 0 && bound_failures == 0,
         fmt("finite-difference mismatches = %d, norm/value bound violations "
             "= %d over 10000 points",
             fd_failures, bound_failures));
}

// ---- criterion 7: monotonicity of the tuned quantities ----
void criterion_monotonicity() {
  const ExampleReference ref = example_reference();
  const BoundSet bounds = build_example_problem()->bounds();

  Vec grid;
  for (int i = 0; i < 10; ++i) grid.push_back(0.1 * i);

  bool monotone = true;
  std::string note = "10x10 grid monotone";
  try {
    // sweep_risk verifies both axes internally and throws on violation
    const auto rows =
        sweep_risk(bounds, ref.x1_dist_sq, ref.z_norm_bound, 5e-3, grid, grid);
    if (rows.size() != 100) monotone = false;
  } catch (const std::exception& e) {
    monotone = false;
    note = e.what();
  }

  // The square law K_star ~ (1-alpha)^-2 is an asymptotic statement; test
  // it on a subgradient-dominated instance where the objective term of P2
  // dwarfs P1 * P3 at alpha >= 0.9.
  const BoundSet dominated = BoundSet::almost_sure(10.0, Vec{0.1}, Vec{0.1});
  auto k_at = [&](double alpha) {
    const PConstants p =
        p_constants_cvar(dominated, RiskParams{alpha, Vec{0.0}}, 1.0, 2.0);
    return static_cast<double>(optimal_step(p, 5e-3).k_star);
  };
  const double k90 = k_at(0.90), k95 = k_at(0.95), k99 = k_at(0.99);
  const double r1 = (k95 / k90) / 4.0;
  const double r2 = (k99 / k95) / 25.0;
  const double r3 = (k99 / k90) / 100.0;
  const bool ratios_ok = std::abs(r1 - 1.0) <= 0.2 && std::abs(r2 - 1.0) <= 0.2 &&
                         std::abs(r3 - 1.0) <= 0.2;

  report(7, monotone && ratios_ok,
         fmt("%s; K_star ratios over (1-alpha)^-2 prediction: %.3f, %.3f, "
             "%.3f (each within 20%%)",
             note.c_str(), r1, r2, r3));
}

// ---- criterion 8: deterministic QP equivalence ----
void criterion_qp() {
  auto prog = build_qp_test_problem();
  const SaddleReference ref = qp_saddle_reference();
  const PConstants p = p_constants_almost_sure(prog->bounds(), 4.0, 3.0);

  // constant steps at K = 1e5
  const std::uint64_t k_const = 100000;
  RunOptions options;
  options.seed = 1;
  options.iterations = k_const;
  const RunTrace trace = run(*prog, StepSchedule::constant(1.0, k_const), options);
  const auto [xbar, zbar] = ergodic_average(trace);
  const bool kkt_ok = std::abs(xbar[0]) <= 0.05 && std::abs(zbar[0] - 2.0) <= 0.3;

  // decaying schedule: running-min saddle gap below 1e-2 within 1e6, and
  // the per-step dissipation inequality with sigma = 0 at every iteration
  auto lagrangian = [&](double x, double z) {
    return ref.objective(Vec{x}) + z * ref.constraints[0](Vec{x});
  };
  PrimalDualSolver solver(*prog, 1, Vec{-2.0});
  Scenario w;
  double running_min = std::numeric_limits<double>::infinity();
  std::uint64_t hit_at = 0;
  int dissipation_violations = 0;
  for (std::uint64_t k = 1; k <= 1'000'000; ++k) {
    const double gamma = 1.0 / static_cast<double>(k);
    const double x_old = solver.state().x[0];
    const double z_old = solver.state().z[0];
    solver.draw(w);
    solver.primal_step(w, gamma);
    solver.draw(w);
    solver.dual_step(w, gamma);
    const double x_new = solver.state().x[0];
    const double z_new = solver.state().z[0];

    const double lhs = gamma * (lagrangian(x_new, 2.0) - lagrangian(0.0, z_old)) +
                       0.5 * x_new * x_new + 0.5 * (z_new - 2.0) * (z_new - 2.0);
    const double rhs = 0.5 * x_old * x_old + 0.5 * (z_old - 2.0) * (z_old - 2.0) +
                       0.25 * p.p2 * gamma * gamma +
                       0.25 * p.p3 * gamma * gamma * z_old * z_old;
    if (lhs > rhs + 1e-12) ++dissipation_violations;

    const double gap = saddle_gap(ref, solver.state().x, solver.state().z);
    if (gap < running_min) {
      running_min = gap;
      if (running_min < 1e-2 && hit_at == 0) hit_at = k;
    }
  }

  const bool gap_ok = hit_at > 0 && hit_at <= 1'000'000;
  report(8, kkt_ok && gap_ok && dissipation_violations == 0,
         fmt("ergodic (x, z) = (%.4f, %.4f) vs (0, 2) within (0.05, 0.3); "
             "running-min gap < 1e-2 at k = %llu; dissipation violations = %d",
             xbar[0], zbar[0], static_cast<unsigned long long>(hit_at),
             dissipation_violations));
}

// ---- criterion 9: sample accounting and reproducibility ----
void criterion_sample_accounting() {
  auto prog = reformulate(build_example_problem(), RiskParams{0.3, Vec{0.2}});
  const std::uint64_t k_iters = 10000;
  const StepSchedule schedule = StepSchedule::constant(0.0808, k_iters);
  RunOptions options;
  options.seed = 321;
  options.iterations = k_iters;
  options.snapshot_count = 32;

  const RunTrace gs1 = run(*prog, schedule, options);
  const RunTrace gs2 = run(*prog, schedule, options);
  const RunTrace jac = run_jacobi(*prog, schedule, options);

  const bool draws_ok =
      gs1.scenario_draws == 2 * k_iters && jac.scenario_draws == k_iters;

  bool identical = gs1.snapshots.size() == gs2.snapshots.size();
  if (identical) {
    for (std::size_t i = 0; i < gs1.snapshots.size(); ++i) {
      identical = identical && gs1.snapshots[i].k == gs2.snapshots[i].k &&
                  gs1.snapshots[i].x == gs2.snapshots[i].x &&
                  gs1.snapshots[i].z == gs2.snapshots[i].z &&
                  gs1.snapshots[i].ergodic_x == gs2.snapshots[i].ergodic_x &&
                  gs1.snapshots[i].ergodic_z == gs2.snapshots[i].ergodic_z;
    }
  }

  report(9, draws_ok && identical,
         fmt("Gauss-Seidel consumed %llu draws (2K), Jacobi %llu (K); "
             "repeated runs bit-identical: %s",
             static_cast<unsigned long long>(gs1.scenario_draws),
             static_cast<unsigned long long>(jac.scenario_draws),
             identical ? "yes" : "no"));
}

// ---- criterion 10: Gauss-Seidel vs Jacobi comparison at K = 1e6 ----
void criterion_gs_vs_jacobi() {
  const std::filesystem::path out_dir =
      std::filesystem::temp_directory_path() / "pdss_acceptance_out";
  ExperimentConfig config;
  config.problem = "example";
  config.alpha = 0.3;
  config.beta = {0.2};
  config.seeds = {21, 22, 23, 24, 25};
  config.schedule.kind = "constant";
  config.schedule.iterations = 1'000'000;
  config.out_dir = out_dir.string();
  config.snapshots = 100;
  config.eval_samples = 1000;

  const CompareReport report_cmp = cmd_compare(config);
  const bool csv_ok = std::filesystem::exists(out_dir / "compare_summary.csv");
  report(10, report_cmp.max_diff <= 0.02 && csv_ok,
         fmt("max |xbar_GS - xbar_J| over 5 matched seeds at K = 1e6: %.5f "
             "<= 0.02; comparison CSVs written: %s",
             report_cmp.max_diff, csv_ok ? "yes" : "no"));
}

}  // namespace

int main(int argc, char** argv) {
  bool long_mode = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--long") == 0) long_mode = true;
  }

  criterion_tuner_reproduction();
  criterion_constant_formulas();
  criterion_desk_scale();
  criterion_long_run(long_mode);
  criterion_estimator();
  criterion_psi_subgradients();
  criterion_monotonicity();
  criterion_qp();
  criterion_sample_accounting();
  criterion_gs_vs_jacobi();

  if (failures == 0) {
    std::printf("acceptance: all criteria passed%s\n",
                long_mode ? " (long mode)" : " (criterion 4 skipped)");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  return 1;
}
