#include "pdss/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>
#include <thread>

namespace pdss {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::max(
      1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                             static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    futures.push_back(std::async(std::launch::async, [&]() {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        body(i);
      }
    }));
  }
  for (auto& f : futures) f.get();
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

/// Iteration count for a run, honoring --long.
std::uint64_t resolve_iterations(const ExperimentConfig& config,
                                 const TuningResult& tuned, bool long_mode) {
  if (long_mode) return tuned.k_star;
  return config.schedule.iterations;
}

StepSchedule resolve_schedule(const ExperimentConfig& config,
                              const TuningResult& tuned,
                              std::uint64_t iterations) {
  if (config.schedule.kind == "decaying") {
    const double c = config.schedule.c.value_or(tuned.gamma_star);
    return StepSchedule::decaying(c, config.schedule.p);
  }
  const double gamma = config.schedule.gamma.value_or(tuned.gamma_star);
  return StepSchedule::constant(gamma, iterations);
}

/// Log-spaced snapshot indices (unique, ascending, ending at the last).
std::vector<std::size_t> log_spaced_indices(std::size_t count, std::size_t points) {
  std::vector<std::size_t> idx;
  if (count == 0) return idx;
  points = std::clamp<std::size_t>(points, 1, count);
  const double denom = points > 1 ? static_cast<double>(points - 1) : 1.0;
  for (std::size_t p = 0; p < points; ++p) {
    const double t = static_cast<double>(p) / denom;
    const auto v = static_cast<std::size_t>(
        std::llround(std::pow(static_cast<double>(count), t)));
    idx.push_back(std::min(count - 1, v > 0 ? v - 1 : 0));
  }
  idx.back() = count - 1;
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

}  // namespace

ProblemSetup resolve_problem(const ExperimentConfig& config) {
  config.validate();

  ProblemSetup setup;
  if (config.problem == "example") {
    setup.program = build_example_problem();
    setup.x1_dist_sq = config.x1_dist_sq.value_or(example_reference().x1_dist_sq);
  } else {
    setup.program = build_qp_test_problem();
    // |x1| <= 2 and x* in [-2, 2]: |x1 - x*|^2 <= 4 from the origin start.
    setup.x1_dist_sq = config.x1_dist_sq.value_or(4.0);
  }
  setup.z_norm_bound = config.z_norm_bound;
  setup.risk.alpha = config.alpha;
  setup.risk.beta = config.beta;
  setup.risk.validate();
  if (setup.risk.beta.size() != setup.program->num_constraints()) {
    throw ConfigError("config field 'beta': needs one entry per constraint");
  }

  setup.reformulated = !setup.risk.risk_neutral();
  if (setup.reformulated) {
    setup.solve_program = reformulate(setup.program, setup.risk);
    setup.constants = p_constants_cvar(setup.program->bounds(), setup.risk,
                                       setup.x1_dist_sq, setup.z_norm_bound);
  } else {
    setup.solve_program = setup.program;
    setup.constants = p_constants_almost_sure(setup.program->bounds(),
                                              setup.x1_dist_sq, setup.z_norm_bound);
  }
  return setup;
}

TuneReport cmd_tune(const ExperimentConfig& config) {
  const ProblemSetup setup = resolve_problem(config);

  TuneReport report;
  report.formula = setup.constants;
  report.tuned = optimal_step(setup.constants, config.epsilon);

  std::ostringstream text;
  text << "problem: " << config.problem << "  alpha=" << fmt6(config.alpha)
       << " beta=" << fmt6(config.beta.empty() ? 0.0 : config.beta[0])
       << " epsilon=" << fmt6(config.epsilon) << "\n";
  auto print_row = [&](const char* label, const PConstants& p,
                       const TuningResult& t) {
    text << label << ": P1=" << fmt6(p.p1) << " P2=" << fmt6(p.p2)
         << " P3=" << fmt6(p.p3) << "  ->  gamma_star=" << fmt6(t.gamma_star)
         << " K_star=" << t.k_star << " eta=" << fmt6(t.eta)
         << " step=" << fmt(t.step) << "\n";
  };
  print_row("formula  ", report.formula, report.tuned);

  if (config.problem == "example") {
    const ExampleReference ref = example_reference();
    if (config.alpha == ref.alpha && config.beta == Vec{ref.beta}) {
      PConstants rp;
      rp.mode = PConstants::Mode::Cvar;
      rp.p1 = ref.p1;
      rp.p2 = ref.p2;
      rp.p3 = ref.p3;
      report.reference = rp;
      report.reference_tuned = optimal_step(rp, config.epsilon);
      print_row("reference", *report.reference, *report.reference_tuned);
      if (std::abs(report.formula.p2 - rp.p2) > 1e-9 * rp.p2) {
        text << "note: the P2 formula value " << fmt6(report.formula.p2)
             << " differs from the published reference constant 8276/93 = "
             << fmt6(rp.p2)
             << " for this instance; the reference row uses the published"
                " value.\n";
      }
    }
  }
  report.text = text.str();
  return report;
}

SolveReport cmd_solve(const ExperimentConfig& config, bool long_mode) {
  const ProblemSetup setup = resolve_problem(config);
  const TuningResult tuned = optimal_step(setup.constants, config.epsilon);
  const std::uint64_t iterations = resolve_iterations(config, tuned, long_mode);
  const StepSchedule schedule = resolve_schedule(config, tuned, iterations);

  fs::create_directories(config.out_dir);

  const std::size_t n_seeds = config.seeds.size();
  std::vector<RunTrace> traces(n_seeds);
  parallel_for(n_seeds, [&](std::size_t s) {
    RunOptions options;
    options.seed = config.seeds[s];
    options.iterations = iterations;
    options.snapshot_count = config.snapshots;
    options.p3 = setup.constants.p3;
    traces[s] = run(*setup.solve_program, schedule, options);
  });

  SolveReport report;
  report.iterations = iterations;
  report.gamma_scale =
      schedule.kind == StepSchedule::Kind::ConstantOverHorizon ? schedule.gamma : 0.0;
  if (schedule.kind == StepSchedule::Kind::ConstantOverHorizon && iterations > 0 &&
      schedule.gamma * schedule.gamma * setup.constants.p3 < 1.0) {
    report.certificate = eta_certificate(setup.constants, schedule.gamma, iterations);
  }

  const std::size_t n_base = setup.program->dimension();
  report.mean_g_hat.assign(setup.program->num_constraints(), 0.0);

  std::ofstream summary = open_out(fs::path(config.out_dir) / "solve_summary.csv");
  summary << "seed";
  for (std::size_t j = 0; j < traces[0].final_state.x.size(); ++j) summary << ",xbar_" << j;
  for (std::size_t i = 0; i < traces[0].final_state.z.size(); ++i) summary << ",zbar_" << i;
  summary << ",F_hat";
  for (std::size_t i = 0; i < report.mean_g_hat.size(); ++i) summary << ",G_hat_" << i;
  summary << "\n";

  for (std::size_t s = 0; s < n_seeds; ++s) {
    const RunTrace& trace = traces[s];
    for (const std::string& w : trace.warnings) report.warnings.push_back(w);

    SeedOutcome outcome;
    outcome.seed = config.seeds[s];
    if (trace.has_ergodic()) {
      std::tie(outcome.xbar, outcome.zbar) = ergodic_average(trace);
    } else {
      outcome.xbar = trace.final_state.x;
      outcome.zbar = trace.final_state.z;
    }
    const std::span<const double> x_block{outcome.xbar.data(), n_base};
    outcome.eval = evaluate_solution(*setup.program, x_block, setup.risk,
                                     config.eval_samples,
                                     config.eval_seed + 1000003 * outcome.seed);

    {
      auto out = open_out(fs::path(config.out_dir) /
                          ("trace_seed" + std::to_string(outcome.seed) + ".csv"));
      write_trace_csv(out, trace);
    }
    {
      auto out = open_out(fs::path(config.out_dir) /
                          ("eval_seed" + std::to_string(outcome.seed) + ".csv"));
      write_eval_csv(out, x_block, outcome.eval);
    }

    // Risk functionals along the trajectory, at log-spaced snapshots.
    {
      auto out = open_out(fs::path(config.out_dir) /
                          ("snapshot_eval_seed" + std::to_string(outcome.seed) + ".csv"));
      out << "k";
      for (std::size_t j = 0; j < n_base; ++j) out << ",xbar_" << j;
      out << ",F_hat";
      for (std::size_t i = 0; i < report.mean_g_hat.size(); ++i) out << ",G_hat_" << i;
      out << "\n";
      for (std::size_t idx :
           log_spaced_indices(trace.snapshots.size(), config.eval_points)) {
        const TraceSnapshot& snap = trace.snapshots[idx];
        if (snap.k == 0) continue;  // no ergodic mean before the first step
        const std::span<const double> xb{snap.ergodic_x.data(), n_base};
        const Evaluation ev =
            evaluate_solution(*setup.program, xb, setup.risk, config.eval_samples,
                              config.eval_seed + 1000003 * outcome.seed + snap.k);
        out << snap.k;
        for (double v : xb) out << "," << fmt(v);
        out << "," << fmt(ev.f_hat);
        for (double g : ev.g_hat) out << "," << fmt(g);
        out << "\n";
      }
    }

    summary << outcome.seed;
    for (double v : outcome.xbar) summary << "," << fmt(v);
    for (double v : outcome.zbar) summary << "," << fmt(v);
    summary << "," << fmt(outcome.eval.f_hat);
    for (double g : outcome.eval.g_hat) summary << "," << fmt(g);
    summary << "\n";

    report.mean_f_hat += outcome.eval.f_hat / static_cast<double>(n_seeds);
    for (std::size_t i = 0; i < report.mean_g_hat.size(); ++i) {
      report.mean_g_hat[i] += outcome.eval.g_hat[i] / static_cast<double>(n_seeds);
    }
    report.outcomes.push_back(std::move(outcome));
  }
  return report;
}

CompareReport cmd_compare(const ExperimentConfig& config) {
  const ProblemSetup setup = resolve_problem(config);
  const TuningResult tuned = optimal_step(setup.constants, config.epsilon);
  const std::uint64_t iterations = config.schedule.iterations;
  const StepSchedule schedule = resolve_schedule(config, tuned, iterations);

  fs::create_directories(config.out_dir);

  const std::size_t n_seeds = config.seeds.size();
  std::vector<RunTrace> gs(n_seeds), jac(n_seeds);
  parallel_for(2 * n_seeds, [&](std::size_t idx) {
    RunOptions options;
    options.seed = config.seeds[idx % n_seeds];
    options.iterations = iterations;
    options.snapshot_count = config.snapshots;
    if (idx < n_seeds) {
      gs[idx] = run(*setup.solve_program, schedule, options);
    } else {
      jac[idx - n_seeds] = run_jacobi(*setup.solve_program, schedule, options);
    }
  });

  CompareReport report;
  report.seeds = config.seeds;
  report.iterations = iterations;
  const std::size_t n_base = setup.program->dimension();

  std::ofstream summary = open_out(fs::path(config.out_dir) / "compare_summary.csv");
  summary << "seed,max_abs_diff\n";

  for (std::size_t s = 0; s < n_seeds; ++s) {
    auto out = open_out(fs::path(config.out_dir) /
                        ("compare_seed" + std::to_string(config.seeds[s]) + ".csv"));
    const std::size_t n_aug = gs[s].final_state.x.size();
    out << "k";
    for (std::size_t j = 0; j < n_aug; ++j) out << ",xbar_gs_" << j;
    for (std::size_t j = 0; j < n_aug; ++j) out << ",xbar_j_" << j;
    for (std::size_t j = 0; j < n_aug; ++j) out << ",diff_" << j;
    out << "\n";
    const std::size_t rows = std::min(gs[s].snapshots.size(), jac[s].snapshots.size());
    for (std::size_t r = 0; r < rows; ++r) {
      const TraceSnapshot& a = gs[s].snapshots[r];
      const TraceSnapshot& b = jac[s].snapshots[r];
      out << a.k;
      for (double v : a.ergodic_x) out << "," << fmt(v);
      for (double v : b.ergodic_x) out << "," << fmt(v);
      for (std::size_t j = 0; j < n_aug; ++j) out << "," << fmt(a.ergodic_x[j] - b.ergodic_x[j]);
      out << "\n";
    }

    // Final difference over the decision block only.
    double diff = 0.0;
    for (std::size_t j = 0; j < n_base; ++j) {
      diff = std::max(diff, std::abs(gs[s].final_state.ergodic_x[j] -
                                     jac[s].final_state.ergodic_x[j]));
    }
    report.per_seed_diff.push_back(diff);
    report.max_diff = std::max(report.max_diff, diff);
    summary << config.seeds[s] << "," << fmt(diff) << "\n";
  }
  return report;
}

std::vector<SweepRow> cmd_sweep(const ExperimentConfig& config) {
  const ProblemSetup setup = resolve_problem(config);
  if (setup.program->num_constraints() != 1) {
    throw ConfigError("sweep expects a single-constraint problem");
  }

  Vec default_grid;
  for (int i = 0; i < 10; ++i) default_grid.push_back(i / 10.0);
  const Vec alpha_grid = config.alpha_grid.value_or(default_grid);
  const Vec beta_grid = config.beta_grid.value_or(default_grid);

  const std::vector<SweepRow> rows =
      sweep_risk(setup.program->bounds(), setup.x1_dist_sq, setup.z_norm_bound,
                 config.epsilon, alpha_grid, beta_grid);

  fs::create_directories(config.out_dir);
  auto out = open_out(fs::path(config.out_dir) / "sweep.csv");
  write_sweep_csv(out, rows);
  return rows;
}

Evaluation cmd_evaluate(const ExperimentConfig& config) {
  const ProblemSetup setup = resolve_problem(config);
  if (!config.eval_x) {
    throw ConfigError("config field 'eval_x': required by the evaluate command");
  }
  if (config.eval_x->size() != setup.program->dimension()) {
    throw ConfigError("config field 'eval_x': wrong dimension");
  }
  const Evaluation eval =
      evaluate_solution(*setup.program, *config.eval_x, setup.risk,
                        config.eval_samples, config.eval_seed);

  fs::create_directories(config.out_dir);
  auto out = open_out(fs::path(config.out_dir) / "eval.csv");
  write_eval_csv(out, *config.eval_x, eval);
  return eval;
}

}  // namespace pdss
