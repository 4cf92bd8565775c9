// Error metrics, convergence sweeps, the operator run-time benchmark and
// log-log slope fitting.
#pragma once

#include <chrono>
#include <cstdint>
#include <string>

#include "solver.hpp"

namespace pdspec {

/// Per-node |y - exact| / u0_norm on Omega; zero on Gamma. Max and argmax are
/// taken over Omega only.
struct ErrorProfile {
  Field profile;
  double max = 0.0;
  int argmax = -1;
};

inline ErrorProfile relative_error_profile(const Field& y, const Field& exact, double u0_norm,
                                           const MaskField& mask) {
  require_same_grid(y.grid, exact.grid, "relative_error_profile");
  if (!(u0_norm > 0.0))
    throw std::invalid_argument("relative_error_profile: u0_norm must be positive");
  ErrorProfile ep;
  ep.profile = Field(y.grid);
  for (int i = 0; i < y.size(); ++i) {
    if (!mask.in_omega(i)) continue;
    const double e = std::abs(y[i] - exact[i]) / u0_norm;
    ep.profile[i] = e;
    if (e > ep.max) {
      ep.max = e;
      ep.argmax = i;
    }
  }
  if (ep.argmax < 0)
    for (int i = 0; i < y.size(); ++i)
      if (mask.in_omega(i)) {
        ep.argmax = i;
        break;
      }
  return ep;
}

inline double max_relative_error(const Field& y, const Field& exact, double u0_norm,
                                 const MaskField& mask) {
  return relative_error_profile(y, exact, u0_norm, mask).max;
}

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares on (log x, log y). Needs >= 3 points with positive
/// coordinates and at least two distinct abscissas.
inline LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3)
    throw std::invalid_argument("fit_loglog_slope: need at least 3 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0))
      throw std::invalid_argument("fit_loglog_slope: coordinates must be positive");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12 * std::max(1.0, n * sxx))
    throw std::invalid_argument("fit_loglog_slope: abscissas are (nearly) identical");
  LogLogFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (const auto& [x, y] : points) {
    const double ly = std::log(y);
    const double pred = fit.intercept + fit.slope * std::log(x);
    ss_res += (ly - pred) * (ly - pred);
    ss_tot += (ly - mean_y) * (ly - mean_y);
  }
  fit.r_squared = ss_tot > 1e-30 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

enum class SweepParameter { Epsilon, Dx };

struct ConvergenceRow {
  double param = 0.0;  // eps or dx
  double error = 0.0;
};

struct ConvergenceReport {
  SweepParameter kind = SweepParameter::Epsilon;
  std::vector<ConvergenceRow> rows;
  LogLogFit fit;
  double dt_used = 0.0;
};

/// Everything needed to run one solve; the base point sweeps vary from.
struct CaseSetup {
  DomainLayout layout;
  int n = 0;
  KernelSpec kernel;
  ManufacturedProblem problem;
  SolverConfig solver;
};

namespace detail {
inline double sweep_dt(const CaseSetup& base, double eps_min) {
  const double bound = stable_dt(base.solver.nu, base.kernel.beta(), eps_min, 1.0);
  if (base.solver.dt) {
    if (*base.solver.dt > bound * (1.0 + 1e-12))
      throw std::invalid_argument("sweep: configured dt violates the stability bound at the smallest eps");
    return *base.solver.dt;
  }
  return base.solver.dt_safety * bound;
}
}  // namespace detail

/// Penalization-error convergence: fixed grid and dt (stable for the
/// smallest eps), error sampled at final time per eps. Needs >= 3 strictly
/// monotone values spanning at least two decades.
inline ConvergenceReport sweep_epsilon(const CaseSetup& base, const std::vector<double>& eps_values) {
  if (eps_values.size() < 3)
    throw std::invalid_argument("sweep_epsilon: need at least 3 eps values");
  bool increasing = eps_values[1] > eps_values[0];
  double lo = eps_values[0], hi = eps_values[0];
  for (size_t i = 0; i < eps_values.size(); ++i) {
    if (!(eps_values[i] > 0.0)) throw std::invalid_argument("sweep_epsilon: eps must be positive");
    if (i > 0 && (increasing ? !(eps_values[i] > eps_values[i - 1])
                             : !(eps_values[i] < eps_values[i - 1])))
      throw std::invalid_argument("sweep_epsilon: eps values must be strictly monotone");
    lo = std::min(lo, eps_values[i]);
    hi = std::max(hi, eps_values[i]);
  }
  if (hi / lo < 100.0 * (1.0 - 1e-12))
    throw std::invalid_argument("sweep_epsilon: eps values must span at least two decades");
  if (!base.problem.has_exact)
    throw std::invalid_argument("sweep_epsilon: problem has no exact solution to measure against");

  ConvergenceReport report;
  report.kind = SweepParameter::Epsilon;
  report.dt_used = detail::sweep_dt(base, lo);
  const PeriodicGrid grid = build_grid(base.layout, base.n);
  for (double eps : eps_values) {
    SolverConfig sc = base.solver;
    sc.eps = eps;
    sc.dt = report.dt_used;
    sc.record_error = true;
    sc.snapshot_times.clear();
    const SolveResult r = solve(base.problem, base.layout, grid, base.kernel, sc);
    if (r.status != TerminationStatus::Completed)
      throw std::runtime_error("sweep_epsilon: run diverged at eps = " + std::to_string(eps) +
                               " after " + std::to_string(r.steps) + " steps");
    report.rows.push_back({eps, r.error_series.back().second});
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : report.rows) pts.emplace_back(row.param, row.error);
  report.fit = fit_loglog_slope(pts);
  return report;
}

/// Spatial convergence: fixed eps and dt, doubling N, max-over-time error
/// per grid; slope fitted against dx.
inline ConvergenceReport sweep_grid(const CaseSetup& base, const std::vector<int>& n_values) {
  if (n_values.size() < 3)
    throw std::invalid_argument("sweep_grid: need at least 3 grid sizes");
  for (size_t i = 1; i < n_values.size(); ++i)
    if (n_values[i] != 2 * n_values[i - 1])
      throw std::invalid_argument("sweep_grid: grid sizes must double");
  if (!base.problem.has_exact)
    throw std::invalid_argument("sweep_grid: problem has no exact solution to measure against");

  ConvergenceReport report;
  report.kind = SweepParameter::Dx;
  report.dt_used = detail::sweep_dt(base, base.solver.eps);
  for (int n : n_values) {
    const PeriodicGrid grid = build_grid(base.layout, n);
    SolverConfig sc = base.solver;
    sc.dt = report.dt_used;
    sc.record_error = true;
    sc.snapshot_times.clear();
    const SolveResult r = solve(base.problem, base.layout, grid, base.kernel, sc);
    if (r.status != TerminationStatus::Completed)
      throw std::runtime_error("sweep_grid: run diverged at n = " + std::to_string(n));
    report.rows.push_back({grid.dx, r.max_rel_error});
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : report.rows) pts.emplace_back(row.param, row.error);
  report.fit = fit_loglog_slope(pts);
  return report;
}

struct BenchmarkRow {
  int n = 0;
  std::string method;  // "quadrature" | "spectral"
  double seconds = 0.0;
  int repetitions = 0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  LogLogFit quadrature_fit, spectral_fit;
  double max_check_discrepancy = 0.0;  // correctness gate, before any timing
  double sink = 0.0;                   // keeps timed results observable
};

/// Times both Laplacian routes on u = sin(pi x), x in [-1, 1), delta = 0.2.
/// One warm-up run per method, then `repetitions` measurements; short runs
/// are batched so each measurement window is at least ~200 us; the reported
/// time is the minimum. Runs strictly sequentially on the calling thread.
inline BenchmarkReport benchmark_laplacian(const std::vector<int>& n_values, int repetitions) {
  if (repetitions < 3)
    throw std::invalid_argument("benchmark_laplacian: need at least 3 repetitions");
  if (n_values.empty()) throw std::invalid_argument("benchmark_laplacian: empty size list");

  using clock = std::chrono::steady_clock;
  const double kMinWindow = 200e-6;
  const KernelSpec kernel = KernelSpec::triangular(0.2);

  BenchmarkReport report;
  std::vector<std::pair<double, double>> quad_pts, spec_pts;

  for (int n : n_values) {
    const PeriodicGrid grid = make_grid(-1.0, 2.0, n);
    const Field u = Field::sample(grid, [](double x) { return std::sin(M_PI * x); });
    SpectralOperator op(kernel, grid);  // setup excluded from timing
    auto ws = op.make_workspace();
    std::vector<double> out_q(n), out_s(n);

    // Correctness gate before timing.
    laplacian_quadrature(u.values, out_q, kernel, grid);
    op.apply(u.values, out_s, ws);
    double ref = 0.0, disc = 0.0;
    for (int i = 0; i < n; ++i) ref = std::max(ref, std::abs(out_q[i]));
    for (int i = 0; i < n; ++i) disc = std::max(disc, std::abs(out_q[i] - out_s[i]));
    disc /= ref;
    report.max_check_discrepancy = std::max(report.max_check_discrepancy, disc);
    if (disc > 1e-10)
      throw std::runtime_error("benchmark_laplacian: methods disagree at n = " + std::to_string(n));

    auto time_method = [&](auto&& run_once) {
      run_once();  // warm-up
      auto t0 = clock::now();
      run_once();
      double est = std::chrono::duration<double>(clock::now() - t0).count();
      const long batch = est >= kMinWindow ? 1 : std::max(1L, std::lround(kMinWindow / std::max(est, 1e-9)));
      double best = std::numeric_limits<double>::infinity();
      for (int rep = 0; rep < repetitions; ++rep) {
        t0 = clock::now();
        for (long b = 0; b < batch; ++b) run_once();
        const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
        best = std::min(best, elapsed / static_cast<double>(batch));
      }
      return best;
    };

    const double t_quad = time_method([&] {
      laplacian_quadrature(u.values, out_q, kernel, grid);
      report.sink += out_q[0];
    });
    const double t_spec = time_method([&] {
      op.apply(u.values, out_s, ws);
      report.sink += out_s[0];
    });

    report.rows.push_back({n, "quadrature", t_quad, repetitions});
    report.rows.push_back({n, "spectral", t_spec, repetitions});
    quad_pts.emplace_back(static_cast<double>(n), t_quad);
    spec_pts.emplace_back(static_cast<double>(n), t_spec);
  }

  if (quad_pts.size() >= 3) {
    report.quadrature_fit = fit_loglog_slope(quad_pts);
    report.spectral_fit = fit_loglog_slope(spec_pts);
  }
  return report;
}

}  // namespace pdspec
