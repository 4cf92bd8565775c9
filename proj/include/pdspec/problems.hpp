// Manufactured-solution problems: exact fields, matching source terms,
// initial data and boundary conditions, plus a table-driven custom problem.
#pragma once

#include <algorithm>
#include <functional>
#include <utility>
#include <vector>

#include "constraints.hpp"
#include "operator.hpp"

namespace pdspec {

/// Problem definition for the solver. Manufactured problems carry the exact
/// solution split as exact(x,t) = exact_base(x) + exp(-nu t) exact_profile(x)
/// and a separable source f(x,t) = source_profile(x) exp(-decay_rate t), so
/// per-step evaluation needs no transcendentals beyond one exp.
struct ManufacturedProblem {
  double L = 0.0;
  double nu = 0.0;
  double delta = 0.0;
  BoundarySpec bcs;

  bool has_exact = false;
  std::function<double(double)> exact_base;
  std::function<double(double)> exact_profile;
  std::function<double(double)> initial;
  std::function<double(double)> source_profile;  // null means zero source
  double source_decay_rate = 0.0;

  double exact(double x, double t) const {
    return exact_base(x) + std::exp(-nu * t) * exact_profile(x);
  }
  double exact_dt(double x, double t) const {
    return -nu * std::exp(-nu * t) * exact_profile(x);
  }
  double source(double x, double t) const {
    return source_profile ? source_profile(x) * std::exp(-source_decay_rate * t) : 0.0;
  }
};

namespace detail {
inline void require_problem_params(double L, double nu, double delta) {
  if (!(L > 0.0) || !(nu > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("manufactured problem: L, nu, delta must be positive");
}
}  // namespace detail

/// Exact solution 2x/L + exp(-nu t) sin(2 pi x / L) on [-L/2, L/2], Dirichlet
/// values -1 / +1 at the ends. The sinusoid is an eigenfunction of the
/// nonlocal Laplacian, so the source is the same sinusoid scaled by
/// nu (-lambda(2 pi / L) - 1); the linear part is in the operator's null
/// space and contributes nothing.
inline ManufacturedProblem dirichlet_problem(double L, double nu, double delta) {
  detail::require_problem_params(L, nu, delta);
  const double c = 2.0 * M_PI / L;
  const double lambda = pd_laplacian_eigenvalue(c, KernelSpec::triangular(delta));
  const double coeff = nu * (-lambda - 1.0);

  ManufacturedProblem p;
  p.L = L;
  p.nu = nu;
  p.delta = delta;
  p.bcs = {{BCKind::Dirichlet, -1.0}, {BCKind::Dirichlet, 1.0}};
  p.has_exact = true;
  p.exact_base = [L](double x) { return 2.0 * x / L; };
  p.exact_profile = [c](double x) { return std::sin(c * x); };
  p.initial = [L, c](double x) { return 2.0 * x / L + std::sin(c * x); };
  p.source_profile = [coeff, c](double x) { return coeff * std::sin(c * x); };
  p.source_decay_rate = nu;
  return p;
}

/// Cosine variant with unit Neumann slope at both ends:
/// 2x/L + exp(-nu t) cos(2 pi x / L).
inline ManufacturedProblem neumann_problem(double L, double nu, double delta) {
  detail::require_problem_params(L, nu, delta);
  const double c = 2.0 * M_PI / L;
  const double lambda = pd_laplacian_eigenvalue(c, KernelSpec::triangular(delta));
  const double coeff = nu * (-lambda - 1.0);

  ManufacturedProblem p;
  p.L = L;
  p.nu = nu;
  p.delta = delta;
  p.bcs = {{BCKind::Neumann, 1.0}, {BCKind::Neumann, 1.0}};
  p.has_exact = true;
  p.exact_base = [L](double x) { return 2.0 * x / L; };
  p.exact_profile = [c](double x) { return std::cos(c * x); };
  p.initial = [L, c](double x) { return 2.0 * x / L + std::cos(c * x); };
  p.source_profile = [coeff, c](double x) { return coeff * std::cos(c * x); };
  p.source_decay_rate = nu;
  return p;
}

/// Initial condition interpolated from (x, value) samples, user-chosen BCs,
/// zero source, no exact reference.
inline ManufacturedProblem custom_problem(std::vector<std::pair<double, double>> initial_table,
                                          BoundarySpec bcs, double L, double nu, double delta) {
  detail::require_problem_params(L, nu, delta);
  if (initial_table.size() < 2)
    throw std::invalid_argument("custom_problem: initial table needs at least two samples");
  std::sort(initial_table.begin(), initial_table.end());
  for (size_t i = 1; i < initial_table.size(); ++i)
    if (!(initial_table[i].first > initial_table[i - 1].first))
      throw std::invalid_argument("custom_problem: initial table x values must be strictly increasing");

  ManufacturedProblem p;
  p.L = L;
  p.nu = nu;
  p.delta = delta;
  p.bcs = bcs;
  p.has_exact = false;
  p.initial = [table = std::move(initial_table)](double x) {
    if (x <= table.front().first) return table.front().second;
    if (x >= table.back().first) return table.back().second;
    auto it = std::upper_bound(table.begin(), table.end(), x,
                               [](double v, const std::pair<double, double>& s) { return v < s.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (x - lo.first) / (hi.first - lo.first);
    return (1.0 - t) * lo.second + t * hi.second;
  };
  return p;
}

/// Max over Omega of |du/dt - nu L u - f| with the analytic time derivative
/// and the quadrature Laplacian applied to the exact field sampled on all of
/// the periodic domain (Gamma carries the exact continuation). Shrinks
/// O(dx^2) under refinement for the manufactured problems.
inline double pde_residual(const ManufacturedProblem& p, const PeriodicGrid& grid, double t) {
  if (!p.has_exact)
    throw std::invalid_argument("pde_residual: problem has no exact solution");
  const KernelSpec kernel = KernelSpec::triangular(p.delta);
  const DomainLayout layout = build_layout(p.L, p.delta);
  const MaskField mask = build_mask(layout, grid);
  const Field u = Field::sample(grid, [&](double x) { return p.exact(x, t); });
  const Field lap = laplacian_quadrature(u, kernel);
  double worst = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    if (!mask.in_omega(i)) continue;
    const double x = grid.x(i);
    worst = std::max(worst, std::abs(p.exact_dt(x, t) - p.nu * lap[i] - p.source(x, t)));
  }
  return worst;
}

/// Sup norm of the initial data over Omega by dense sampling; the reference
/// normalization for all relative errors.
inline double initial_sup_norm(const ManufacturedProblem& p, const DomainLayout& layout,
                               int samples = 200001) {
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = layout.omega_left +
                     (layout.omega_right - layout.omega_left) * i / (samples - 1.0);
    m = std::max(m, std::abs(p.initial(x)));
  }
  return m;
}

}  // namespace pdspec
