#include <catch2/catch_amalgamated.hpp>

#include "pdspec/solver.hpp"

using namespace pdspec;
using Catch::Approx;

TEST_CASE("stable time-step bound") {
  CHECK(stable_dt(0.2, 300.0, 5e-4, 1.0) == Approx(2.0 / 2120.0).epsilon(1e-15));
  CHECK(stable_dt(0.2, 300.0, 5e-4, 1.0) == Approx(9.434e-4).margin(1e-6));
  CHECK(5e-4 <= stable_dt(0.2, 300.0, 5e-4, 1.0));  // the reference configuration is stable
  // Large eps: the penalization term drops out of the bound.
  CHECK(stable_dt(0.2, 300.0, 1e9, 0.5) == Approx(0.5 / (0.2 * 300.0)).epsilon(1e-8));
  CHECK_THROWS_AS(stable_dt(-0.2, 300.0, 5e-4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(stable_dt(0.2, 300.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("penalized right-hand side") {
  const DomainLayout layout = build_layout(2.0, 0.2);
  const PeriodicGrid g = build_grid(layout, 256);
  const MaskField mask = build_mask(layout, g);
  const KernelSpec kernel = KernelSpec::triangular(0.2);
  const SpectralOperator op(kernel, g);
  const Field y = Field::sample(g, [](double x) { return std::sin(2.0 * x) + 0.1 * x; });

  SECTION("with zero mask it reduces to nu L y") {
    MaskField no_mask = mask;
    std::fill(no_mask.chi.begin(), no_mask.chi.end(), 0.0);
    std::fill(no_mask.region.begin(), no_mask.region.end(), Region::Omega);
    const ConstraintField yg{Field(g), 0.0};
    const Field rhs = penalized_rhs(y, yg, Field(g), no_mask, 0.2, 1e-3, op);
    const Field lap = op.apply(y);
    for (int i = 0; i < g.n; ++i) CHECK(rhs[i] == Approx(0.2 * lap[i]).margin(1e-14 * 300.0));
  }

  SECTION("no penalization where the constraint is already met") {
    ConstraintField yg{Field(g), 0.0};
    for (int i = 0; i < g.n; ++i)
      if (!mask.in_omega(i)) yg.values[i] = y[i];
    const Field rhs = penalized_rhs(y, yg, Field(g), mask, 0.2, 1e-3, op);
    const Field lap = op.apply(y);
    for (int i = 0; i < g.n; ++i)
      if (!mask.in_omega(i)) CHECK(rhs[i] == 0.2 * lap[i]);
  }

  SECTION("hand-evaluated mask term") {
    // nu = 0, f = 0, one Gamma node with y - y_Gamma = 1, eps = 1e-3.
    Field unit(g);
    int gamma_node = -1;
    for (int i = 0; i < g.n; ++i)
      if (!mask.in_omega(i)) {
        gamma_node = i;
        break;
      }
    REQUIRE(gamma_node >= 0);
    unit[gamma_node] = 1.0;
    const ConstraintField yg{Field(g), 0.0};
    const Field rhs = penalized_rhs(unit, yg, Field(g), mask, 0.0, 1e-3, op);
    CHECK(rhs[gamma_node] == -1000.0);
  }
}

namespace {

SolverConfig reference_config() {
  SolverConfig sc;
  sc.nu = 0.2;
  sc.eps = 5e-4;
  sc.dt = 5e-4;
  sc.t_max = 15.0;
  sc.record_error = true;
  return sc;
}

}  // namespace

TEST_CASE("forward Euler stepping") {
  const DomainLayout layout = build_layout(2.0, 0.2);
  const PeriodicGrid g = build_grid(layout, 256);
  const MaskField mask = build_mask(layout, g);
  const KernelSpec kernel = KernelSpec::triangular(0.2);
  const SpectralOperator op(kernel, g);

  SECTION("pure penalization decay contracts by 1 - dt/eps each step") {
    const double eps = 1e-3, dt = 0.4 * eps;
    Field y = Field::sample(g, [](double x) { return std::cos(x); });
    const ConstraintField frozen{Field(g), 0.0};  // constraint target 0 on Gamma
    std::vector<int> gamma_nodes;
    for (int i = 0; i < g.n; ++i)
      if (!mask.in_omega(i)) gamma_nodes.push_back(i);
    const double factor = 1.0 - dt / eps;
    for (int step = 0; step < 5; ++step) {
      const Field before = y;
      const Field rhs = penalized_rhs(y, frozen, Field(g), mask, 0.0, eps, op);
      for (int i = 0; i < g.n; ++i) y[i] += dt * rhs[i];
      for (int i : gamma_nodes)
        CHECK(y[i] == Approx(before[i] * factor).epsilon(1e-12));
    }
  }

  SECTION("zero right-hand side leaves the state untouched") {
    Field y = Field::sample(g, [](double x) { return x; });
    const Field rhs(g);  // identically zero
    Field after = y;
    for (int i = 0; i < g.n; ++i) after[i] += 5e-4 * rhs[i];
    for (int i = 0; i < g.n; ++i) CHECK(after[i] == y[i]);
  }

  SECTION("step counter and time advance together") {
    const ManufacturedProblem p = dirichlet_problem(2.0, 0.2, 0.2);
    SolverConfig sc = reference_config();
    Solver solver(p, layout, g, kernel, sc);
    SolveState s = solver.initial_state();
    REQUIRE(solver.step(s));
    REQUIRE(solver.step(s));
    CHECK(s.step == 2);
    CHECK(s.t == Approx(2 * 5e-4).epsilon(1e-15));
    CHECK(s.y_gamma.time == s.t);
  }
}

TEST_CASE("reference configuration solve") {
  const DomainLayout layout = build_layout(2.0, 0.2);
  const PeriodicGrid g = build_grid(layout, 512);
  const KernelSpec kernel = KernelSpec::triangular(0.2);
  const ManufacturedProblem p = dirichlet_problem(2.0, 0.2, 0.2);

  SolverConfig sc = reference_config();
  sc.snapshot_times = {5.0, 15.0};
  const SolveResult r = solve(p, layout, g, kernel, sc);

  CHECK(r.status == TerminationStatus::Completed);
  CHECK(r.steps == 30000);
  CHECK(r.final_t == Approx(15.0).epsilon(1e-12));
  CHECK(r.snapshots.size() == 2);
  CHECK(r.snapshots[0].t == Approx(5.0).epsilon(1e-12));
  CHECK(r.u0_norm == Approx(1.5508).margin(2e-4));
  CHECK(r.max_rel_error > 0.0);
  CHECK(r.max_rel_error < 0.05);  // bounded error; tight thresholds live in the acceptance suite
  CHECK(r.error_series.size() == static_cast<size_t>(r.steps) + 1);
  CHECK(r.final_y.all_finite());
}

TEST_CASE("degenerate and unstable configurations") {
  const DomainLayout layout = build_layout(2.0, 0.2);
  const PeriodicGrid g = build_grid(layout, 512);
  const KernelSpec kernel = KernelSpec::triangular(0.2);
  const ManufacturedProblem p = dirichlet_problem(2.0, 0.2, 0.2);

  SECTION("t_max = 0 yields only the initial state") {
    SolverConfig sc = reference_config();
    sc.t_max = 0.0;
    sc.snapshot_times = {0.0};
    const SolveResult r = solve(p, layout, g, kernel, sc);
    CHECK(r.steps == 0);
    CHECK(r.final_t == 0.0);
    REQUIRE(r.snapshots.size() == 1);
    for (int i = 0; i < g.n; ++i)
      CHECK(r.snapshots[0].y[i] == Approx(p.initial(g.x(i))).margin(1e-14));
  }

  SECTION("twice the stability bound diverges") {
    SolverConfig sc = reference_config();
    const double bound = stable_dt(sc.nu, kernel.beta(), sc.eps, 1.0);
    sc.dt = 2.0 * bound;
    sc.t_max = 2000 * *sc.dt;
    const SolveResult r = solve(p, layout, g, kernel, sc);
    CHECK(r.status == TerminationStatus::Diverged);
    CHECK(r.steps < 2000);
    CHECK(r.final_y.all_finite());  // last finite state is preserved
  }
}

TEST_CASE("determinism") {
  const DomainLayout layout = build_layout(2.0, 0.2);
  const PeriodicGrid g = build_grid(layout, 256);
  const KernelSpec kernel = KernelSpec::triangular(0.2);
  const ManufacturedProblem p = neumann_problem(2.0, 0.2, 0.2);
  SolverConfig sc = reference_config();
  sc.t_max = 0.5;
  sc.snapshot_times = {0.25};

  const SolveResult a = solve(p, layout, g, kernel, sc);
  const SolveResult b = solve(p, layout, g, kernel, sc);
  REQUIRE(a.error_series.size() == b.error_series.size());
  for (size_t i = 0; i < a.error_series.size(); ++i) {
    CHECK(a.error_series[i].first == b.error_series[i].first);
    CHECK(a.error_series[i].second == b.error_series[i].second);
  }
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (size_t s = 0; s < a.snapshots.size(); ++s)
    for (int i = 0; i < g.n; ++i) CHECK(a.snapshots[s].y[i] == b.snapshots[s].y[i]);
  for (int i = 0; i < g.n; ++i) CHECK(a.final_y[i] == b.final_y[i]);
}

TEST_CASE("zero-data stability at 95 percent of the bound") {
  const DomainLayout layout = build_layout(2.0, 0.2);
  const PeriodicGrid g = build_grid(layout, 512);
  const MaskField mask = build_mask(layout, g);
  const KernelSpec kernel = KernelSpec::triangular(0.2);
  const SpectralOperator op(kernel, g);
  const double eps = 5e-4;
  const double dt = 0.95 * stable_dt(0.2, kernel.beta(), eps, 1.0);

  Field y = Field::sample(g, [](double x) { return std::sin(5.0 * x) + 0.3 * std::cos(11.0 * x); });
  const double initial_norm = y.max_abs();
  const ConstraintField zero_constraint{Field(g), 0.0};
  const Field zero_source(g);
  double worst = 0.0;
  for (int step = 0; step < 5000; ++step) {
    const Field rhs = penalized_rhs(y, zero_constraint, zero_source, mask, 0.2, eps, op);
    for (int i = 0; i < g.n; ++i) y[i] += dt * rhs[i];
    worst = std::max(worst, y.max_abs());
  }
  CHECK(worst <= initial_norm * 1.001);
  CHECK(y.max_abs() < initial_norm);  // diffusion + penalization decay dominate
}
