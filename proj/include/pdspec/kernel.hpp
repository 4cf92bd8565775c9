// Nonlocal interaction kernels: evaluation, integral beta, periodic sampling
// and the spectral admissibility check behind the explicit stability bound.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "fft.hpp"
#include "field.hpp"

namespace pdspec {

enum class KernelFamily { TriangularAlpha0, CustomSamples };

/// One entry of a tabulated kernel; offsets are distances from the center,
/// the even extension mu(-x) = mu(x) is implied.
struct KernelSample {
  double offset = 0.0;
  double value = 0.0;
};

/// Even, compactly supported kernel mu(x) with integral beta = int mu dx.
/// Immutable after construction; safe to share between threads.
class KernelSpec {
 public:
  /// mu(x) = (12/delta^3) * (1 - |x|/delta) on |x| <= delta, zero outside.
  /// beta = 12/delta^2 exactly.
  static KernelSpec triangular(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("KernelSpec: delta must be positive");
    KernelSpec k;
    k.family_ = KernelFamily::TriangularAlpha0;
    k.delta_ = delta;
    k.beta_ = 12.0 / (delta * delta);
    return k;
  }

  /// Piecewise-linear kernel from (offset, value) samples on [0, delta] with
  /// zero extension past the last offset. The supplied beta is validated
  /// against the trapezoidal integral of the even-extended table (1e-6
  /// relative); a mismatch means the table and beta describe different
  /// kernels and is rejected.
  static KernelSpec custom(std::vector<KernelSample> samples, double delta, double beta) {
    if (!(delta > 0.0)) throw std::invalid_argument("KernelSpec: delta must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("KernelSpec: beta must be positive");
    if (samples.size() < 2)
      throw std::invalid_argument("KernelSpec: custom kernel needs at least two samples");
    std::sort(samples.begin(), samples.end(),
              [](const KernelSample& a, const KernelSample& b) { return a.offset < b.offset; });
    if (samples.front().offset != 0.0)
      throw std::invalid_argument("KernelSpec: custom table must start at offset 0");
    for (size_t i = 1; i < samples.size(); ++i)
      if (!(samples[i].offset > samples[i - 1].offset))
        throw std::invalid_argument("KernelSpec: custom table offsets must be strictly increasing");
    if (samples.back().offset > delta * (1.0 + 1e-12))
      throw std::invalid_argument("KernelSpec: custom table extends past delta");

    double half = 0.0;  // trapezoid over [0, last offset]
    for (size_t i = 1; i < samples.size(); ++i)
      half += 0.5 * (samples[i].value + samples[i - 1].value) *
              (samples[i].offset - samples[i - 1].offset);
    const double table_beta = 2.0 * half;
    if (std::abs(beta - table_beta) > 1e-6 * std::max(std::abs(table_beta), 1e-300))
      throw std::invalid_argument(
          "KernelSpec: supplied beta disagrees with the trapezoidal integral of the sample table");

    KernelSpec k;
    k.family_ = KernelFamily::CustomSamples;
    k.delta_ = delta;
    k.beta_ = beta;
    k.samples_ = std::move(samples);
    return k;
  }

  /// Total function: zero for |x| past the support.
  double evaluate(double x) const {
    const double a = std::abs(x);
    if (family_ == KernelFamily::TriangularAlpha0) {
      if (a > delta_) return 0.0;
      const double d3 = delta_ * delta_ * delta_;
      return 12.0 / d3 * (1.0 - a / delta_);
    }
    if (a >= samples_.back().offset)
      return a > samples_.back().offset ? 0.0 : samples_.back().value;
    auto it = std::upper_bound(samples_.begin(), samples_.end(), a,
                               [](double v, const KernelSample& s) { return v < s.offset; });
    const KernelSample& hi = *it;
    const KernelSample& lo = *(it - 1);
    const double t = (a - lo.offset) / (hi.offset - lo.offset);
    return (1.0 - t) * lo.value + t * hi.value;
  }

  double delta() const { return delta_; }
  double beta() const { return beta_; }
  KernelFamily family() const { return family_; }

 private:
  KernelSpec() = default;
  KernelFamily family_ = KernelFamily::TriangularAlpha0;
  double delta_ = 0.0;
  double beta_ = 0.0;
  std::vector<KernelSample> samples_;
};

/// Kernel laid out periodically with its center at index 0:
/// w_p = mu(min(p*dx, span - p*dx)). Assigned mirror-wise so w_p == w_{n-p}
/// holds bit-exactly.
inline Field sample_circular_kernel(const KernelSpec& spec, const PeriodicGrid& grid) {
  if (grid.dx > spec.delta())
    throw std::invalid_argument(
        "sample_circular_kernel: grid spacing exceeds the horizon (under-resolved)");
  if (2.0 * spec.delta() > grid.span)
    throw std::invalid_argument(
        "sample_circular_kernel: horizon lobes overlap on the periodic domain (2*delta > span)");
  Field w(grid);
  for (int p = 0; p <= grid.n / 2; ++p) {
    const double d = std::min(p * grid.dx, grid.span - p * grid.dx);
    const double v = spec.evaluate(d);
    w[p] = v;
    w[(grid.n - p) % grid.n] = v;
  }
  return w;
}

/// Margins of the stability condition sum_p w_p cos(k x_p) dx <= beta, i.e.
/// margin_k = beta - Re(DFT(w))_k * dx for k = 0..n/2 (the real field makes
/// the upper half redundant).
///
/// For a nonnegative kernel the binding margin is k = 0, which equals the
/// beta-quadrature defect beta - sum_p w_p dx and vanishes O(dx^2); the
/// default tolerance is exactly that defect, so `admissible` tests the shape
/// of the kernel spectrum rather than pure quadrature error. Kernels with
/// negative lobes push some cosine-weighted sum above the k = 0 one and are
/// reported as violations. Raw margins are included for strict consumers.
struct AdmissibilityReport {
  std::vector<double> margins;
  double min_margin = 0.0;
  int worst_k = 0;
  double quadrature_sum = 0.0;  // sum_p w_p dx
  double tol = 0.0;
  bool admissible = false;
};

inline AdmissibilityReport check_kernel_admissibility(const KernelSpec& spec,
                                                      const PeriodicGrid& grid,
                                                      std::optional<double> tol = {}) {
  const Field w = sample_circular_kernel(spec, grid);
  const Spectrum what = dft_forward(w);
  const double beta = spec.beta();

  AdmissibilityReport report;
  report.quadrature_sum = what.coeff[0].real() * grid.dx;
  report.tol = tol.value_or(std::max(0.0, report.quadrature_sum - beta) + 1e-9 * beta);
  report.margins.resize(static_cast<size_t>(grid.n / 2) + 1);
  report.min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid.n / 2; ++k) {
    const double margin = beta - what.coeff[k].real() * grid.dx;
    report.margins[k] = margin;
    if (margin < report.min_margin) {
      report.min_margin = margin;
      report.worst_k = k;
    }
  }
  report.admissible = report.min_margin >= -report.tol;
  return report;
}

}  // namespace pdspec
