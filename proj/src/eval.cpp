#include "pdss/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <numeric>
#include <ostream>
#include <thread>

namespace pdss {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

double empirical_cvar(std::span<const double> samples, double delta) {
  require(!samples.empty(), "empirical CVaR needs at least one sample");
  require(delta >= 0.0 && delta < 1.0, "risk level must lie in [0, 1)");

  const std::size_t n = samples.size();
  const double lambda = (1.0 - delta) * static_cast<double>(n);
  const std::size_t full = std::min<std::size_t>(
      static_cast<std::size_t>(std::floor(lambda)), n);
  const double frac = lambda - static_cast<double>(full);

  // Top-(full+1) selection; only the boundary element needs its exact rank.
  Vec work(samples.begin(), samples.end());
  double acc = 0.0;
  if (full > 0) {
    std::nth_element(work.begin(), work.begin() + (full - 1), work.end(),
                     std::greater<>());
    acc = std::accumulate(work.begin(), work.begin() + full, 0.0);
  }
  if (frac > 0.0 && full < n) {
    std::nth_element(work.begin() + full, work.begin() + full, work.end(),
                     std::greater<>());
    acc += frac * work[full];
  }
  return acc / lambda;
}

CvarEstimate estimate_cvar(std::span<const double> samples, double delta,
                           std::uint64_t seed) {
  return {empirical_cvar(samples, delta), samples.size(), delta, seed};
}

double Evaluation::total_violation() const {
  double s = 0.0;
  for (double g : g_hat) s += std::max(g, 0.0);
  return s;
}

Evaluation evaluate_solution(const StochasticProgram& problem,
                             std::span<const double> x, const RiskParams& risk,
                             std::size_t n_samples, std::uint64_t seed) {
  risk.validate();
  require(n_samples > 0, "evaluation needs at least one sample");
  require(x.size() == problem.dimension(), "evaluation point has wrong dimension");
  require(risk.beta.size() == problem.num_constraints(),
          "risk beta has wrong dimension");
  {
    Vec projected(x.begin(), x.end());
    problem.project(projected);
    require(distance_sq(projected, x) <= 1e-20,
            "evaluation point lies outside the decision set");
  }

  const std::size_t m = problem.num_constraints();
  Vec f_samples(n_samples);
  std::vector<Vec> g_samples(m, Vec(n_samples));

  Rng rng(seed);
  Scenario w;
  for (std::size_t s = 0; s < n_samples; ++s) {
    problem.draw(rng, w);
    f_samples[s] = problem.objective(w, x);
    for (std::size_t i = 0; i < m; ++i) g_samples[i][s] = problem.constraint(w, x, i);
  }

  Evaluation out;
  out.f_hat = empirical_cvar(f_samples, risk.alpha);
  out.g_hat.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.g_hat[i] = empirical_cvar(g_samples[i], risk.beta[i]);
  }
  out.n_samples = n_samples;
  out.seed = seed;
  return out;
}

VariationalCheck cross_check_variational(std::span<const double> samples,
                                         double delta, double tolerance) {
  VariationalCheck check;
  check.closed_form = empirical_cvar(samples, delta);

  const double scale = 1.0 / ((1.0 - delta) * static_cast<double>(samples.size()));
  auto objective = [&](double u) {
    double s = 0.0;
    for (double y : samples) s += std::max(y - u, 0.0);
    return u + scale * s;
  };

  // The objective is convex piecewise linear with a minimizer among the
  // sample values; golden-section search over a bracket containing them.
  auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  double lo = *mn - 1.0;
  double hi = *mx + 1.0;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - invphi * (hi - lo);
  double b = lo + invphi * (hi - lo);
  double fa = objective(a);
  double fb = objective(b);
  for (int it = 0; it < 300 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++it) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - invphi * (hi - lo);
      fa = objective(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + invphi * (hi - lo);
      fb = objective(b);
    }
  }
  check.minimized = objective(0.5 * (lo + hi));
  check.abs_gap = std::abs(check.minimized - check.closed_form);
  check.flagged = check.abs_gap > tolerance;
  return check;
}

double hoeffding_tail_bound(std::size_t n_replicas, double tau, double eta,
                            double k_iterations, double d_g_i) {
  require(n_replicas >= 1, "tail bound needs at least one replica");
  require(tau > 0.0 && eta > 0.0 && k_iterations > 0.0 && d_g_i > 0.0,
          "tail bound needs positive tau, eta, K, and d_g");
  const double exponent = -static_cast<double>(n_replicas) * tau * tau * eta * eta /
                          (k_iterations * d_g_i * d_g_i);
  return std::exp(exponent);
}

ReplicaAggregate parallel_aggregate(const StochasticProgram& problem,
                                    const RiskParams& risk,
                                    const StepSchedule& schedule,
                                    const AggregateOptions& options) {
  require(options.n_replicas >= 1, "aggregation needs at least one replica");
  risk.validate();

  auto owned = std::shared_ptr<const StochasticProgram>(&problem, [](auto*) {});
  auto reformulated = reformulate(owned, risk);

  const int n = options.n_replicas;
  std::vector<RunTrace> traces(n);

  // Fan replicas out across workers; each run owns its seed, results are
  // merged in replica order.
  const unsigned workers = std::max(1u, std::min<unsigned>(
      std::thread::hardware_concurrency(), static_cast<unsigned>(n)));
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  std::atomic<int> next{0};
  for (unsigned t = 0; t < workers; ++t) {
    futures.push_back(std::async(std::launch::async, [&]() {
      for (int j = next.fetch_add(1); j < n; j = next.fetch_add(1)) {
        RunOptions run_options;
        run_options.seed = options.base_seed + static_cast<std::uint64_t>(j);
        run_options.iterations = options.iterations;
        run_options.snapshot_count = options.snapshot_count;
        traces[j] = run(*reformulated, schedule, run_options);
      }
    }));
  }
  for (auto& f : futures) f.get();

  ReplicaAggregate agg;
  agg.mean_solution.assign(reformulated->dimension(), 0.0);
  agg.replica_evals.reserve(n);
  for (int j = 0; j < n; ++j) {
    const auto [xbar, zbar] = ergodic_average(traces[j]);
    for (std::size_t c = 0; c < xbar.size(); ++c) {
      agg.mean_solution[c] += xbar[c] / static_cast<double>(n);
    }
    agg.replica_evals.push_back(
        evaluate_solution(problem, reformulated->base_part(xbar), risk,
                          options.eval_samples,
                          options.eval_seed + static_cast<std::uint64_t>(j)));
  }

  const Vec& d_g = problem.bounds().d_g;
  agg.tail_bounds.resize(d_g.size());
  for (std::size_t i = 0; i < d_g.size(); ++i) {
    agg.tail_bounds[i] = hoeffding_tail_bound(
        static_cast<std::size_t>(n), options.tau, options.eta,
        static_cast<double>(options.iterations), d_g[i]);
  }
  agg.traces = std::move(traces);
  return agg;
}

void write_eval_csv(std::ostream& os, std::span<const double> x,
                    const Evaluation& eval) {
  os << "x_0";
  for (std::size_t j = 1; j < x.size(); ++j) os << ",x_" << j;
  os << ",F_hat";
  for (std::size_t i = 0; i < eval.g_hat.size(); ++i) os << ",G_hat_" << i;
  os << ",n_samples,seed\n";

  char buf[64];
  auto put = [&](double v, bool lead_comma) {
    std::snprintf(buf, sizeof(buf), lead_comma ? ",%.17g" : "%.17g", v);
    os << buf;
  };
  for (std::size_t j = 0; j < x.size(); ++j) put(x[j], j > 0);
  put(eval.f_hat, true);
  for (double g : eval.g_hat) put(g, true);
  os << "," << eval.n_samples << "," << eval.seed << "\n";
}

}  // namespace pdss
