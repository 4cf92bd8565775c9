// Discrete Fourier transforms on top of FFTW3.
//
// Convention: the forward transform is the plain unnormalized sum
//   u_hat[k] = sum_i u[i] * exp(-2*pi*I*k*i/n)
// and the inverse carries the 1/n factor. This is the convention under which
// the elementwise product of two forward transforms is the transform of the
// circular convolution sum, which the operator module relies on.
#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "field.hpp"

namespace pdspec {
namespace detail {

// FFTW plan creation is not thread-safe; executing a plan on new arrays is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwRealBuffer {
  double* p = nullptr;
  explicit FftwRealBuffer(int n) : p(fftw_alloc_real(static_cast<size_t>(n))) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwRealBuffer() { fftw_free(p); }
  FftwRealBuffer(const FftwRealBuffer&) = delete;
  FftwRealBuffer& operator=(const FftwRealBuffer&) = delete;
};

struct FftwComplexBuffer {
  fftw_complex* p = nullptr;
  explicit FftwComplexBuffer(int n) : p(fftw_alloc_complex(static_cast<size_t>(n))) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwComplexBuffer() { fftw_free(p); }
  FftwComplexBuffer(const FftwComplexBuffer&) = delete;
  FftwComplexBuffer& operator=(const FftwComplexBuffer&) = delete;
};

}  // namespace detail

/// Complex-to-complex DFT plans for one transform size.
///
/// Plans use FFTW_ESTIMATE so the chosen algorithm depends only on the size,
/// keeping results bit-reproducible across runs. Execution goes through the
/// new-array interface on per-call fftw-aligned scratch, so a single engine
/// may be used from several threads at once.
class DftEngine {
 public:
  explicit DftEngine(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("DftEngine: size must be positive");
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    detail::FftwComplexBuffer in(n), out(n);
    fwd_ = fftw_plan_dft_1d(n, in.p, out.p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(n, in.p, out.p, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw std::runtime_error("DftEngine: FFTW plan creation failed");
  }
  ~DftEngine() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  DftEngine(const DftEngine&) = delete;
  DftEngine& operator=(const DftEngine&) = delete;

  int size() const { return n_; }

  /// Unnormalized forward transform.
  void forward(const std::complex<double>* in, std::complex<double>* out) const {
    execute(fwd_, in, out);
  }
  /// Unnormalized backward transform; the caller divides by n.
  void backward(const std::complex<double>* in, std::complex<double>* out) const {
    execute(bwd_, in, out);
  }

 private:
  void execute(fftw_plan plan, const std::complex<double>* in, std::complex<double>* out) const {
    detail::FftwComplexBuffer a(n_), b(n_);
    for (int i = 0; i < n_; ++i) {
      a.p[i][0] = in[i].real();
      a.p[i][1] = in[i].imag();
    }
    fftw_execute_dft(plan, a.p, b.p);
    for (int i = 0; i < n_; ++i) out[i] = {b.p[i][0], b.p[i][1]};
  }

  int n_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

/// Process-lifetime engine cache, one engine per transform size.
inline const DftEngine& dft_engine(int n) {
  static std::mutex m;
  static std::map<int, std::unique_ptr<DftEngine>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<DftEngine>(n);
  return *slot;
}

inline Spectrum dft_forward(const Field& f) {
  const int n = f.size();
  Spectrum s{f.grid, std::vector<std::complex<double>>(n)};
  std::vector<std::complex<double>> in(n);
  for (int i = 0; i < n; ++i) in[i] = f[i];
  dft_engine(n).forward(in.data(), s.coeff.data());
  return s;
}

/// Inverse transform, real part. Imaginary content is the caller's concern
/// (see laplacian_spectral for the checked variant).
inline Field dft_inverse(const Spectrum& s) {
  const int n = s.size();
  std::vector<std::complex<double>> out(n);
  dft_engine(n).backward(s.coeff.data(), out.data());
  Field f(s.grid);
  for (int i = 0; i < n; ++i) f[i] = out[i].real() / n;
  return f;
}

}  // namespace pdspec
