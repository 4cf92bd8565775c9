// Nodal data containers: real fields and their discrete Fourier coefficients.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "grid.hpp"

namespace pdspec {

/// Real nodal values on a periodic grid (solution, source, kernel samples).
struct Field {
  PeriodicGrid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const PeriodicGrid& g, double fill = 0.0) : grid(g), values(g.n, fill) {}

  int size() const { return grid.n; }
  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }

  template <class Fn>
  static Field sample(const PeriodicGrid& g, Fn&& fn) {
    Field f(g);
    for (int i = 0; i < g.n; ++i) f.values[i] = fn(g.x(i));
    return f;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Complex DFT coefficients of a Field, indexed by frequency k = 0..n-1.
/// For a real field the coefficients satisfy coeff[k] == conj(coeff[n-k]).
struct Spectrum {
  PeriodicGrid grid;
  std::vector<std::complex<double>> coeff;

  int size() const { return grid.n; }
};

inline void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b, const char* what) {
  if (a.n != b.n || a.x0 != b.x0 || a.dx != b.dx)
    throw std::invalid_argument(std::string(what) + ": operands live on different grids");
}

}  // namespace pdspec
