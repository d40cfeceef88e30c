#pragma once

// Thin RAII wrappers over FFTW for square periodic grids, plus the spectral
// operators the library needs (symbol multipliers and derivatives).

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstring>
#include <mutex>
#include <vector>

#include "nloc/field.hpp"

namespace nloc::fft {

namespace detail {

// Planner calls are not thread-safe in FFTW.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : p(static_cast<T*>(fftw_malloc(sizeof(T) * n))), size(n) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  T* p;
  std::size_t size;
};

}  // namespace detail

/// Threads used by plans created after this call. Results are reproducible for
/// a fixed thread count.
inline void set_threads(int n) {
  std::lock_guard<std::mutex> lock(detail::planner_mutex());
  static const bool ok = fftw_init_threads() != 0;
  if (ok) fftw_plan_with_nthreads(std::max(1, n));
}

/// Signed wavenumber index of FFT bin m on an n-point grid.
inline int wave_index(int m, int n) { return m <= n / 2 ? m : m - n; }

/// Complex n×n transform. forward() is unnormalised; inverse() divides by n².
class Fft2d {
 public:
  explicit Fft2d(int n) : n_(n), in_(std::size_t(n) * n), out_(std::size_t(n) * n) {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    fwd_ = fftw_plan_dft_2d(n, n, in_.p, out_.p, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_2d(n, n, in_.p, out_.p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2d() {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  int n() const { return n_; }

  void forward(const std::vector<cd>& in, std::vector<cd>& out) { run(fwd_, in, out, 1.0); }
  void inverse(const std::vector<cd>& in, std::vector<cd>& out) {
    run(inv_, in, out, 1.0 / (double(n_) * n_));
  }

 private:
  void run(fftw_plan plan, const std::vector<cd>& in, std::vector<cd>& out, double scale) {
    const std::size_t len = std::size_t(n_) * n_;
    std::memcpy(in_.p, in.data(), len * sizeof(cd));
    fftw_execute(plan);
    out.resize(len);
    const auto* o = reinterpret_cast<const cd*>(out_.p);
    for (std::size_t k = 0; k < len; ++k) out[k] = o[k] * scale;
  }

  int n_;
  detail::FftwBuffer<fftw_complex> in_, out_;
  fftw_plan fwd_ = nullptr, inv_ = nullptr;
};

/// Real n×n transform with a half spectrum of n×(n/2+1) bins.
class RealFft2d {
 public:
  explicit RealFft2d(int n) : n_(n), real_(std::size_t(n) * n), spec_(std::size_t(n) * (n / 2 + 1)) {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    fwd_ = fftw_plan_dft_r2c_2d(n, n, real_.p, spec_.p, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_2d(n, n, spec_.p, real_.p, FFTW_ESTIMATE);
  }
  ~RealFft2d() {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }
  RealFft2d(const RealFft2d&) = delete;
  RealFft2d& operator=(const RealFft2d&) = delete;

  int n() const { return n_; }
  int half() const { return n_ / 2 + 1; }

  void forward(const std::vector<double>& in, std::vector<cd>& out) {
    std::memcpy(real_.p, in.data(), in.size() * sizeof(double));
    fftw_execute(fwd_);
    out.resize(spec_.size);
    std::memcpy(static_cast<void*>(out.data()), spec_.p, spec_.size * sizeof(cd));
  }

  /// Normalised inverse; the input spectrum is preserved.
  void inverse(const std::vector<cd>& in, std::vector<double>& out) {
    std::memcpy(static_cast<void*>(spec_.p), in.data(), spec_.size * sizeof(cd));
    fftw_execute(inv_);
    out.resize(real_.size);
    const double scale = 1.0 / (double(n_) * n_);
    for (std::size_t k = 0; k < real_.size; ++k) out[k] = real_.p[k] * scale;
  }

 private:
  int n_;
  detail::FftwBuffer<double> real_;
  detail::FftwBuffer<fftw_complex> spec_;
  fftw_plan fwd_ = nullptr, inv_ = nullptr;
};

/// Applies a radial multiplier m(|k|) to a complex field.
template <class M>
ComplexField apply_radial_multiplier(const ComplexField& f, M&& m) {
  const int n = f.n();
  const double dk = M_PI / f.half_width();
  Fft2d plan(n);
  std::vector<cd> spec;
  plan.forward(f.data(), spec);
  for (int a = 0; a < n; ++a) {
    const double ky = dk * wave_index(a, n);
    for (int b = 0; b < n; ++b) {
      const double kx = dk * wave_index(b, n);
      spec[std::size_t(a) * n + b] *= m(std::hypot(kx, ky));
    }
  }
  ComplexField out(n, f.half_width());
  plan.inverse(spec, out.data());
  return out;
}

/// Spectral partial derivative ∂_x^{ox} ∂_y^{oy}; odd derivatives drop the
/// Nyquist bin.
inline ComplexField derivative(const ComplexField& f, int ox, int oy) {
  const int n = f.n();
  const double dk = M_PI / f.half_width();
  Fft2d plan(n);
  std::vector<cd> spec;
  plan.forward(f.data(), spec);
  auto factor = [&](int m, int order) -> cd {
    if (order == 0) return 1.0;
    if (m == n / 2 && order % 2 == 1) return 0.0;
    const cd ik(0.0, dk * wave_index(m, n));
    cd r = 1.0;
    for (int o = 0; o < order; ++o) r *= ik;
    return r;
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) spec[std::size_t(a) * n + b] *= factor(b, ox) * factor(a, oy);
  ComplexField out(n, f.half_width());
  plan.inverse(spec, out.data());
  return out;
}

/// ∂_θ = x∂_y - y∂_x, spectrally.
inline ComplexField angular_derivative(const ComplexField& f) {
  const auto fx = derivative(f, 1, 0);
  const auto fy = derivative(f, 0, 1);
  ComplexField out(f.n(), f.half_width());
  for (int i = 0; i < f.n(); ++i)
    for (int j = 0; j < f.n(); ++j) out(i, j) = f.x(j) * fy(i, j) - f.y(i) * fx(i, j);
  return out;
}

inline ComplexField to_complex(const RealField& f) {
  ComplexField out(f.n(), f.half_width());
  for (std::size_t k = 0; k < f.data().size(); ++k) out.data()[k] = f.data()[k];
  return out;
}

inline RealField real_part(const ComplexField& f) {
  RealField out(f.n(), f.half_width());
  for (std::size_t k = 0; k < f.data().size(); ++k) out.data()[k] = f.data()[k].real();
  return out;
}

}  // namespace nloc::fft
