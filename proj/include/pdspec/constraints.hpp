// Volume-constraint values on the fictitious regions: reflection formulas
// that reproduce local Dirichlet/Neumann conditions at the boundary of Omega.
#pragma once

#include <cmath>

#include "field.hpp"
#include "grid.hpp"

namespace pdspec {

enum class BCKind { Dirichlet, Neumann };

/// One end's condition: u = value (Dirichlet) or du/dx = value (Neumann).
struct BoundaryCondition {
  BCKind kind = BCKind::Dirichlet;
  double value = 0.0;
};

struct BoundarySpec {
  BoundaryCondition left, right;
};

enum class Side { Left, Right };

/// Constraint values u_Gamma per node; identically zero on Omega. `time`
/// tags the solution state the field was assembled from.
struct ConstraintField {
  Field values;
  double time = 0.0;
};

/// Linear interpolation of y at a point inside Omega; exact when the point
/// lands on a node (within 1e-9*dx). Mirror points fall outside Omega only
/// when delta exceeds the domain length or the layout is inconsistent.
inline double mirror_value(const Field& y, const DomainLayout& layout, double x_mirror) {
  const PeriodicGrid& g = y.grid;
  const double tol = 1e-9 * g.dx;
  if (x_mirror < layout.omega_left - tol || x_mirror > layout.omega_right + tol)
    throw std::out_of_range("mirror_value: mirror point lies outside Omega");
  const double s = (x_mirror - g.x0) / g.dx;
  const long j = static_cast<long>(std::floor(s));
  const double frac = s - static_cast<double>(j);
  if (frac * g.dx <= tol) return y[g.wrap(j)];
  if ((1.0 - frac) * g.dx <= tol) return y[g.wrap(j + 1)];
  return (1.0 - frac) * y[g.wrap(j)] + frac * y[g.wrap(j + 1)];
}

/// Ghost value at a Gamma node x, mirrored about the boundary point of the
/// given side. Dirichlet: 2 u_b - y(2 x_b - x). Neumann: the mirrored value
/// plus the slope term -2 q_b (x_b - x) on the left, +2 q_b (x - x_b) on the
/// right, so a linear profile of slope q_b extends exactly.
inline double ghost_value(const Field& y, const DomainLayout& layout, const BoundaryCondition& bc,
                          Side side, double x) {
  const double x_b = (side == Side::Left) ? layout.omega_left : layout.omega_right;
  const double mirrored = mirror_value(y, layout, 2.0 * x_b - x);
  if (bc.kind == BCKind::Dirichlet) return 2.0 * bc.value - mirrored;
  const double offset = (side == Side::Left) ? -2.0 * bc.value * (x_b - x)
                                             : 2.0 * bc.value * (x - x_b);
  return offset + mirrored;
}

namespace detail {
inline Field side_ghost(const Field& y, const DomainLayout& layout, const MaskField& mask,
                        Side side, const BoundaryCondition& bc) {
  const Region target = (side == Side::Left) ? Region::Gamma1 : Region::Gamma2;
  Field out(y.grid);
  for (int i = 0; i < y.size(); ++i)
    if (mask.region[i] == target) out[i] = ghost_value(y, layout, bc, side, y.grid.x(i));
  return out;
}
}  // namespace detail

/// Values on one Gamma side enforcing a Dirichlet condition; zero elsewhere.
inline Field dirichlet_ghost(const Field& y, const DomainLayout& layout, const MaskField& mask,
                             Side side, double u_b) {
  return detail::side_ghost(y, layout, mask, side, {BCKind::Dirichlet, u_b});
}

/// Values on one Gamma side enforcing a Neumann condition; zero elsewhere.
inline Field neumann_ghost(const Field& y, const DomainLayout& layout, const MaskField& mask,
                           Side side, double q_b) {
  return detail::side_ghost(y, layout, mask, side, {BCKind::Neumann, q_b});
}

/// Fill both Gamma sides from the current solution; zero on Omega.
inline ConstraintField assemble_constraints(const Field& y, const DomainLayout& layout,
                                            const MaskField& mask, const BoundarySpec& bcs,
                                            double time = 0.0) {
  ConstraintField cf{Field(y.grid), time};
  for (int i = 0; i < y.size(); ++i) {
    switch (mask.region[i]) {
      case Region::Gamma1:
        cf.values[i] = ghost_value(y, layout, bcs.left, Side::Left, y.grid.x(i));
        break;
      case Region::Gamma2:
        cf.values[i] = ghost_value(y, layout, bcs.right, Side::Right, y.grid.x(i));
        break;
      case Region::Omega:
        break;
    }
  }
  return cf;
}

}  // namespace pdspec
