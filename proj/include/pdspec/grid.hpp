// 1D extended periodic domain, uniform grid and penalization mask.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdspec {

/// Physical interval Omega = [omega_left, omega_right] plus a constrained
/// extension of width delta on each side. The periodic computational domain
/// is [omega_left - delta, omega_right + delta), arc length span().
struct DomainLayout {
  double omega_left = 0.0;
  double omega_right = 0.0;
  double delta = 0.0;

  double length() const { return omega_right - omega_left; }
  double span() const { return length() + 2.0 * delta; }
  double left_edge() const { return omega_left - delta; }
};

inline DomainLayout build_layout(double L, double delta, double center = 0.0) {
  if (!(L > 0.0))
    throw std::invalid_argument("build_layout: domain length must be positive");
  if (!(delta > 0.0))
    throw std::invalid_argument("build_layout: horizon delta must be positive");
  return DomainLayout{center - 0.5 * L, center + 0.5 * L, delta};
}

/// Uniform nodes x_i = x0 + i*dx on the half-open interval [x0, x0 + span).
/// The right endpoint is excluded; index arithmetic wraps modulo n.
struct PeriodicGrid {
  int n = 0;
  double x0 = 0.0;
  double dx = 0.0;
  double span = 0.0;

  int wrap(long i) const {
    long m = i % n;
    return static_cast<int>(m < 0 ? m + n : m);
  }
  double x(long i) const { return x0 + wrap(i) * dx; }
};

inline PeriodicGrid make_grid(double x0, double span, int n) {
  if (n < 8)
    throw std::invalid_argument("make_grid: need at least 8 nodes, got " + std::to_string(n));
  if (!(span > 0.0))
    throw std::invalid_argument("make_grid: span must be positive");
  PeriodicGrid g{n, x0, span / n, span};
  if (std::abs(g.dx * n - span) > 1e-12 * span)
    throw std::runtime_error("make_grid: dx*n deviates from span");
  return g;
}

inline PeriodicGrid build_grid(const DomainLayout& layout, int n) {
  return make_grid(layout.left_edge(), layout.span(), n);
}

enum class Region : unsigned char { Omega, Gamma1, Gamma2 };

/// Mask chi (1 on Gamma, 0 on Omega) and per-node region tags.
struct MaskField {
  std::vector<double> chi;
  std::vector<Region> region;
  int gamma_count = 0;

  bool in_omega(int i) const { return region[i] == Region::Omega; }
};

/// Nodes within 1e-9*dx of a boundary point count as Omega: the boundary
/// belongs to the body, Gamma1 is half-open on its right end.
inline MaskField build_mask(const DomainLayout& layout, const PeriodicGrid& grid) {
  if (grid.x0 > layout.omega_left || grid.x0 + grid.span < layout.omega_right)
    throw std::invalid_argument("build_mask: grid does not span the layout");
  MaskField mask;
  mask.chi.resize(grid.n);
  mask.region.resize(grid.n);
  const double tol = 1e-9 * grid.dx;
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    Region r = Region::Omega;
    if (x < layout.omega_left - tol)
      r = Region::Gamma1;
    else if (x > layout.omega_right + tol)
      r = Region::Gamma2;
    mask.region[i] = r;
    mask.chi[i] = (r == Region::Omega) ? 0.0 : 1.0;
    if (r != Region::Omega) ++mask.gamma_count;
  }
  return mask;
}

}  // namespace pdspec
