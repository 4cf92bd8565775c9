// The nonlocal Laplacian L u = mu (*) u - beta u, evaluated two ways:
// direct quadrature of the convolution sum, and circular convolution in
// Fourier space. The two are algebraically identical on the grid, which the
// test suite pins down to 1e-10; the spectral route costs O(N log N) instead
// of O(N * delta/dx).
#pragma once

#include <complex>
#include <span>

#include "kernel.hpp"

namespace pdspec {

/// Direct quadrature (L u)_i = sum_{p=-r..r} mu(p dx) u_{i-p} dx - beta u_i
/// with r = round(delta/dx) and periodic index wrap. r covers every nonzero
/// kernel sample because mu(p dx) > 0 needs p dx < delta.
inline void laplacian_quadrature(std::span<const double> u, std::span<double> out,
                                 const KernelSpec& spec, const PeriodicGrid& grid) {
  const int n = grid.n;
  const long r = std::lround(spec.delta() / grid.dx);
  std::vector<double> mu(static_cast<size_t>(r) + 1);
  for (long p = 0; p <= r; ++p) mu[p] = spec.evaluate(p * grid.dx);
  const double beta = spec.beta();
  const double dx = grid.dx;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long p = -r; p <= r; ++p) {
      long j = i - p;
      if (j < 0) j += n;
      if (j >= n) j -= n;
      acc += mu[std::abs(p)] * u[j];
    }
    out[i] = acc * dx - beta * u[i];
  }
}

inline Field laplacian_quadrature(const Field& u, const KernelSpec& spec) {
  Field out(u.grid);
  laplacian_quadrature(u.values, out.values, spec, u.grid);
  return out;
}

/// Spectral route through the full complex spectrum:
/// inverse(kernel_hat * forward(u) * dx) - beta * u. The inverse of a product
/// of conjugate-symmetric spectra is real up to roundoff; its imaginary
/// residue is checked (> 1e-8 relative indicates a normalization or symmetry
/// bug) and then discarded.
inline Field laplacian_spectral(const Field& u, const Spectrum& kernel_hat, double beta,
                                double dx) {
  require_same_grid(u.grid, kernel_hat.grid, "laplacian_spectral");
  const int n = u.size();
  const DftEngine& engine = dft_engine(n);

  std::vector<std::complex<double>> work(n), u_hat(n);
  for (int i = 0; i < n; ++i) work[i] = u[i];
  engine.forward(work.data(), u_hat.data());
  for (int k = 0; k < n; ++k) work[k] = kernel_hat.coeff[k] * u_hat[k] * dx;
  engine.backward(work.data(), u_hat.data());

  double max_re = 0.0, max_im = 0.0;
  for (int k = 0; k < n; ++k) {
    max_re = std::max(max_re, std::abs(u_hat[k].real()));
    max_im = std::max(max_im, std::abs(u_hat[k].imag()));
  }
  const double scale = std::max(max_re, beta * u.max_abs() * static_cast<double>(n));
  if (scale > 0.0 && max_im / scale > 1e-8)
    throw std::runtime_error(
        "laplacian_spectral: imaginary residue above 1e-8 of the output scale "
        "(kernel spectrum not conjugate-symmetric, or normalization bug)");

  Field out(u.grid);
  for (int i = 0; i < n; ++i) out[i] = u_hat[i].real() / n - beta * u[i];
  return out;
}

/// Spectral evaluator with the kernel spectrum computed once per
/// (kernel, grid) pair. Uses real-input transforms (half spectrum), the
/// optimization the full-spectrum contract above allows. Plans are created at
/// construction; apply() runs on caller-provided workspaces, so one operator
/// instance can serve several threads, each with its own workspace.
class SpectralOperator {
 public:
  SpectralOperator(const KernelSpec& spec, const PeriodicGrid& grid)
      : grid_(grid), beta_(spec.beta()) {
    const int n = grid.n;
    const Field w = sample_circular_kernel(spec, grid);
    {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      detail::FftwRealBuffer re(n);
      detail::FftwComplexBuffer cx(n / 2 + 1);
      r2c_ = fftw_plan_dft_r2c_1d(n, re.p, cx.p, FFTW_ESTIMATE);
      c2r_ = fftw_plan_dft_c2r_1d(n, cx.p, re.p, FFTW_ESTIMATE);
      if (!r2c_ || !c2r_) throw std::runtime_error("SpectralOperator: FFTW plan creation failed");
    }
    mu_hat_.resize(static_cast<size_t>(n) / 2 + 1);
    Workspace ws(n);
    std::copy(w.values.begin(), w.values.end(), ws.real.p);
    fftw_execute_dft_r2c(r2c_, ws.real.p, ws.spec.p);
    for (size_t k = 0; k < mu_hat_.size(); ++k) mu_hat_[k] = {ws.spec.p[k][0], ws.spec.p[k][1]};
  }

  ~SpectralOperator() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    if (r2c_) fftw_destroy_plan(r2c_);
    if (c2r_) fftw_destroy_plan(c2r_);
  }
  SpectralOperator(const SpectralOperator&) = delete;
  SpectralOperator& operator=(const SpectralOperator&) = delete;

  struct Workspace {
    detail::FftwRealBuffer real;
    detail::FftwComplexBuffer spec;
    explicit Workspace(int n) : real(n), spec(n / 2 + 1) {}
  };
  Workspace make_workspace() const { return Workspace(grid_.n); }

  void apply(std::span<const double> u, std::span<double> out, Workspace& ws) const {
    const int n = grid_.n;
    const double dx = grid_.dx;
    std::copy(u.begin(), u.end(), ws.real.p);
    fftw_execute_dft_r2c(r2c_, ws.real.p, ws.spec.p);
    for (int k = 0; k <= n / 2; ++k) {
      const std::complex<double> v =
          std::complex<double>(ws.spec.p[k][0], ws.spec.p[k][1]) * mu_hat_[k] * dx;
      ws.spec.p[k][0] = v.real();
      ws.spec.p[k][1] = v.imag();
    }
    fftw_execute_dft_c2r(c2r_, ws.spec.p, ws.real.p);
    const double inv_n = 1.0 / n;
    for (int i = 0; i < n; ++i) out[i] = ws.real.p[i] * inv_n - beta_ * u[i];
  }

  Field apply(const Field& u) const {
    require_same_grid(u.grid, grid_, "SpectralOperator::apply");
    Field out(grid_);
    Workspace ws = make_workspace();
    apply(u.values, out.values, ws);
    return out;
  }

  const PeriodicGrid& grid() const { return grid_; }
  double beta() const { return beta_; }
  std::span<const std::complex<double>> kernel_spectrum_half() const { return mu_hat_; }

 private:
  PeriodicGrid grid_;
  double beta_;
  std::vector<std::complex<double>> mu_hat_;
  fftw_plan r2c_ = nullptr;
  fftw_plan c2r_ = nullptr;
};

/// Symbol of the nonlocal Laplacian on the triangular kernel:
/// lambda(c) = 24 (1 - cos(c delta)) / (delta^4 c^2) - 12/delta^2, the factor
/// that L produces on sin(c x)/cos(c x). lambda(0) = 0 and lambda(c) < 0
/// otherwise. A short series handles the cancellation at small |c delta|.
inline double pd_laplacian_eigenvalue(double c, const KernelSpec& spec) {
  if (spec.family() != KernelFamily::TriangularAlpha0)
    throw std::invalid_argument(
        "pd_laplacian_eigenvalue: closed form only available for the triangular kernel");
  if (c == 0.0) return 0.0;
  const double d = spec.delta();
  const double theta = c * d;
  if (std::abs(theta) < 1e-2) {
    // lambda = -c^2 + c^4 d^2/30 - O(c^6 d^4)
    return -c * c + std::pow(c, 4) * d * d / 30.0;
  }
  const double s = std::sin(0.5 * theta);
  return 48.0 * s * s / (d * d * d * d * c * c) - 12.0 / (d * d);
}

}  // namespace pdspec
