// Command-line front end: config handling, subcommand dispatch, CSV and
// manifest output.
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdspec/pdspec.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes: 0 success, 1 configuration error, 2 run failure (divergence,
// failed operator check).
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRunFailure = 2;

struct RunFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file (key = value, or a manifest.json)");
  cmd->add_option("--out", args.out_dir, "output directory (overrides output.dir)");
  cmd->add_option("--set", args.overrides, "override a config key, e.g. --set solver.eps=1e-3")
      ->take_all();
  cmd->add_flag("--quiet", args.quiet, "suppress informational output");
}

pdspec::RunConfig resolve_config(const CommonArgs& args) {
  pdspec::RunConfig cfg =
      args.config_path.empty() ? pdspec::RunConfig::defaults() : pdspec::RunConfig::load(args.config_path);
  for (const std::string& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw pdspec::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set_from_string(kv.substr(0, eq), kv.substr(eq + 1), "--set " + kv);
  }
  if (!args.out_dir.empty()) cfg.set_from_string("output.dir", args.out_dir, "--out");
  return cfg;
}

fs::path prepare_out_dir(const pdspec::RunConfig& cfg) {
  const fs::path dir = cfg.text("output.dir");
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const pdspec::RunConfig& cfg, const json& derived) {
  json manifest;
  manifest["command"] = command;
  manifest["config"] = cfg.to_json();
  manifest["derived"] = derived;
  manifest["determinism"] = "single-threaded, no random state; identical config gives identical CSV content";
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
}

int cmd_solve(const CommonArgs& args) {
  pdspec::RunConfig cfg = resolve_config(args);
  pdspec::AssembledCase c = pdspec::assemble_case(cfg);
  const fs::path dir = prepare_out_dir(cfg);

  pdspec::Solver solver(c.problem, c.layout, c.grid, c.kernel, c.solver);
  cfg.set_number("solver.dt", solver.dt());  // resolved value, so a manifest re-run is identical
  const pdspec::SolveResult result = solver.run();

  pdspec::write_snapshots_csv(dir / "snapshots.csv", result, &c.problem);
  if (!result.error_series.empty())
    pdspec::write_error_series_csv(dir / "error_series.csv", result.error_series);
  if (c.problem.has_exact) {
    const pdspec::Field exact = pdspec::Field::sample(
        c.grid, [&](double x) { return c.problem.exact(x, result.final_t); });
    const pdspec::ErrorProfile profile =
        pdspec::relative_error_profile(result.final_y, exact, result.u0_norm, c.mask);
    pdspec::write_profile_csv(dir / "error_profile.csv", profile, c.mask);
  }

  json derived;
  derived["dt"] = result.dt;
  derived["stable_dt_bound"] = pdspec::stable_dt(c.solver.nu, result.beta, c.solver.eps, 1.0);
  derived["beta"] = result.beta;
  derived["dx"] = c.grid.dx;
  derived["n"] = c.grid.n;
  derived["span"] = c.grid.span;
  derived["steps"] = result.steps;
  derived["u0_norm"] = result.u0_norm;
  derived["status"] =
      result.status == pdspec::TerminationStatus::Completed ? "completed" : "diverged";
  derived["max_rel_error"] = result.max_rel_error;
  write_manifest(dir, "solve", cfg, derived);

  if (!args.quiet) {
    std::cout << "solve: n=" << c.grid.n << " dx=" << c.grid.dx << " beta=" << result.beta
              << " dt=" << result.dt << " steps=" << result.steps << " eps=" << c.solver.eps
              << "\n";
    if (!result.error_series.empty())
      std::cout << "  max relative error over run: " << result.max_rel_error << " at t="
                << result.max_rel_error_time << "\n";
    std::cout << "  wall time " << result.timings.total_s << " s (steps "
              << result.timings.step_s << " s, constraints " << result.timings.constraint_s
              << " s)\n";
    std::cout << "  artifacts in " << dir.string() << "\n";
  }
  if (result.status != pdspec::TerminationStatus::Completed)
    throw RunFailure("solve diverged at step " + std::to_string(result.steps) + ", t = " +
                     std::to_string(result.final_t));
  return kExitOk;
}

int cmd_check_operator(const CommonArgs& args) {
  pdspec::RunConfig cfg = resolve_config(args);
  pdspec::AssembledCase c = pdspec::assemble_case(cfg);
  const fs::path dir = prepare_out_dir(cfg);
  const std::vector<int> n_values = cfg.int_list("analysis.check_n");
  const int fields = static_cast<int>(cfg.integer("analysis.check_fields"));

  bool ok = true;
  double worst_disc = 0.0, worst_margin = std::numeric_limits<double>::infinity();
  for (int n : n_values) {
    const pdspec::PeriodicGrid grid = pdspec::build_grid(c.layout, n);
    const pdspec::SpectralOperator op(c.kernel, grid);
    auto ws = op.make_workspace();
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> out_s(n), out_q(n);
    double disc = 0.0;
    for (int f = 0; f < fields; ++f) {
      pdspec::Field u(grid);
      for (int i = 0; i < n; ++i) u[i] = unit(rng);
      op.apply(u.values, out_s, ws);
      pdspec::laplacian_quadrature(u.values, out_q, c.kernel, grid);
      double ref = 0.0, d = 0.0;
      for (int i = 0; i < n; ++i) ref = std::max(ref, std::abs(out_q[i]));
      for (int i = 0; i < n; ++i) d = std::max(d, std::abs(out_q[i] - out_s[i]));
      disc = std::max(disc, d / ref);
    }
    const pdspec::AdmissibilityReport adm = pdspec::check_kernel_admissibility(c.kernel, grid);
    worst_disc = std::max(worst_disc, disc);
    worst_margin = std::min(worst_margin, adm.min_margin);
    const bool n_ok = disc <= 1e-10 && adm.admissible;
    ok = ok && n_ok;
    if (!args.quiet)
      std::cout << "check-operator: n=" << n << " max rel discrepancy=" << disc
                << " (tol 1e-10), min margin=" << adm.min_margin << " (tol -" << adm.tol
                << ", at k=" << adm.worst_k << ") -> " << (n_ok ? "ok" : "FAIL") << "\n";
  }

  json derived;
  derived["max_rel_discrepancy"] = worst_disc;
  derived["min_margin"] = worst_margin;
  derived["fields_per_n"] = fields;
  derived["passed"] = ok;
  write_manifest(dir, "check-operator", cfg, derived);

  if (!ok) throw RunFailure("operator check failed");
  return kExitOk;
}

int cmd_bench(const CommonArgs& args) {
  pdspec::RunConfig cfg = resolve_config(args);
  const fs::path dir = prepare_out_dir(cfg);
  const std::vector<int> n_values = cfg.int_list("analysis.bench_n");
  const int reps = static_cast<int>(cfg.integer("analysis.bench_reps"));

  const pdspec::BenchmarkReport report = pdspec::benchmark_laplacian(n_values, reps);
  pdspec::write_benchmark_csv(dir / "benchmark.csv", report);

  json derived;
  derived["quadrature_exponent"] = report.quadrature_fit.slope;
  derived["spectral_exponent"] = report.spectral_fit.slope;
  derived["max_check_discrepancy"] = report.max_check_discrepancy;
  write_manifest(dir, "bench", cfg, derived);

  if (!args.quiet) {
    for (const auto& row : report.rows)
      std::cout << "bench: n=" << row.n << " " << row.method << " " << row.seconds << " s (min of "
                << row.repetitions << ")\n";
    std::cout << "bench: fitted exponents quadrature=" << report.quadrature_fit.slope
              << " spectral=" << report.spectral_fit.slope << "\n";
    std::cout << "  artifacts in " << dir.string() << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args, pdspec::SweepParameter kind) {
  pdspec::RunConfig cfg = resolve_config(args);
  pdspec::AssembledCase c = pdspec::assemble_case(cfg);
  const fs::path dir = prepare_out_dir(cfg);
  pdspec::CaseSetup base{c.layout, c.grid.n, c.kernel, c.problem, c.solver};

  pdspec::ConvergenceReport report;
  if (kind == pdspec::SweepParameter::Epsilon)
    report = pdspec::sweep_epsilon(base, cfg.list("analysis.eps_list"));
  else
    report = pdspec::sweep_grid(base, cfg.int_list("analysis.n_list"));
  pdspec::write_convergence_csv(dir / "convergence.csv", report);

  json derived;
  derived["slope"] = report.fit.slope;
  derived["intercept"] = report.fit.intercept;
  derived["r_squared"] = report.fit.r_squared;
  derived["dt"] = report.dt_used;
  write_manifest(dir, kind == pdspec::SweepParameter::Epsilon ? "sweep-eps" : "sweep-grid", cfg,
                 derived);

  if (!args.quiet) {
    const char* param = kind == pdspec::SweepParameter::Epsilon ? "eps" : "dx";
    for (const auto& row : report.rows)
      std::cout << "sweep: " << param << "=" << row.param << " error=" << row.error << "\n";
    std::cout << "sweep: fitted slope " << report.fit.slope << " (R^2 " << report.fit.r_squared
              << "), dt=" << report.dt_used << "\n";
    std::cout << "  artifacts in " << dir.string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pdspec: spectral solver for 1D nonlocal diffusion with volume-penalized boundary conditions"};
  app.require_subcommand(1);

  CommonArgs solve_args, check_args, bench_args, eps_args, grid_args;
  CLI::App* solve = app.add_subcommand("solve", "run a transient diffusion solve");
  add_common(solve, solve_args);
  CLI::App* check = app.add_subcommand("check-operator",
                                       "verify spectral/quadrature agreement and kernel admissibility");
  add_common(check, check_args);
  CLI::App* bench = app.add_subcommand("bench", "time both Laplacian routes across grid sizes");
  add_common(bench, bench_args);
  CLI::App* sweep_eps = app.add_subcommand("sweep-eps", "penalization-factor convergence study");
  add_common(sweep_eps, eps_args);
  CLI::App* sweep_grid = app.add_subcommand("sweep-grid", "grid-refinement convergence study");
  add_common(sweep_grid, grid_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (check->parsed()) return cmd_check_operator(check_args);
    if (bench->parsed()) return cmd_bench(bench_args);
    if (sweep_eps->parsed()) return cmd_sweep(eps_args, pdspec::SweepParameter::Epsilon);
    if (sweep_grid->parsed()) return cmd_sweep(grid_args, pdspec::SweepParameter::Dx);
  } catch (const RunFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailure;
  } catch (const pdspec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
