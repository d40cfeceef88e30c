#pragma once

// Angular Fourier modes f(r e^{iθ}) = Σ f_n(r) e^{inθ} of gridded fields, and
// weighted (Kondratiev / weighted Sobolev) norms.

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nloc/error.hpp"
#include "nloc/fft.hpp"
#include "nloc/field.hpp"

namespace nloc::modes {

struct AngularDecomposition {
  int n_max = 0;
  std::vector<double> radial_grid;
  std::vector<std::vector<cd>> profiles;  // profiles[n + n_max][k]

  const std::vector<cd>& mode(int n) const {
    if (std::abs(n) > n_max) throw ShapeError("angular mode " + std::to_string(n) + " not present");
    return profiles[n + n_max];
  }
  std::vector<cd>& mode(int n) {
    if (std::abs(n) > n_max) throw ShapeError("angular mode " + std::to_string(n) + " not present");
    return profiles[n + n_max];
  }
};

namespace detail {

constexpr int kStencil = 8;

// Lagrange weights for nodes at offsets -3..4 evaluated at t ∈ [0, 1).
inline std::array<double, kStencil> lagrange_weights(double t) {
  std::array<double, kStencil> w{};
  for (int k = 0; k < kStencil; ++k) {
    const double xk = k - 3;
    double num = 1.0, den = 1.0;
    for (int m = 0; m < kStencil; ++m) {
      if (m == k) continue;
      num *= t - (m - 3);
      den *= xk - (m - 3);
    }
    w[k] = num / den;
  }
  return w;
}

}  // namespace detail

/// Value of a periodic gridded field at an arbitrary point, by tensor-product
/// 8-point Lagrange interpolation.
template <class T>
T interpolate(const Field2D<T>& f, double x, double y) {
  const int n = f.n();
  const double h = f.spacing();
  const double fx = (x + f.half_width()) / h;
  const double fy = (y + f.half_width()) / h;
  const double jx = std::floor(fx), iy = std::floor(fy);
  const auto wx = detail::lagrange_weights(fx - jx);
  const auto wy = detail::lagrange_weights(fy - iy);
  auto wrap = [n](long k) { return static_cast<int>(((k % n) + n) % n); };
  T acc{};
  for (int a = 0; a < detail::kStencil; ++a) {
    const int i = wrap(static_cast<long>(iy) + a - 3);
    T row{};
    for (int b = 0; b < detail::kStencil; ++b) row += wx[b] * f(i, wrap(static_cast<long>(jx) + b - 3));
    acc += wy[a] * row;
  }
  return acc;
}

template <class T>
AngularDecomposition decompose_angular(const Field2D<T>& field, int n_max, const std::vector<double>& radial_grid) {
  if (n_max < 0) throw RangeError("n_max must be non-negative");
  for (std::size_t k = 0; k < radial_grid.size(); ++k) {
    if (!(radial_grid[k] >= 0.0) || !(radial_grid[k] < field.half_width())) {
      throw RangeError("radial sample outside [0, L)");
    }
    if (k > 0 && !(radial_grid[k] > radial_grid[k - 1])) throw RangeError("radial grid must be strictly increasing");
  }
  const int m = std::max(64, 8 * n_max);
  AngularDecomposition dec;
  dec.n_max = n_max;
  dec.radial_grid = radial_grid;
  dec.profiles.assign(2 * n_max + 1, std::vector<cd>(radial_grid.size()));
  std::vector<cd> samples(m);
  std::vector<cd> twiddle(m);
  for (int q = 0; q < m; ++q) twiddle[q] = std::polar(1.0, -2.0 * M_PI * q / m);
  for (std::size_t k = 0; k < radial_grid.size(); ++k) {
    const double r = radial_grid[k];
    for (int q = 0; q < m; ++q) {
      const double th = 2.0 * M_PI * q / m;
      samples[q] = interpolate(field, r * std::cos(th), r * std::sin(th));
    }
    for (int n = -n_max; n <= n_max; ++n) {
      cd acc = 0.0;
      for (int q = 0; q < m; ++q) acc += samples[q] * twiddle[((static_cast<long>(n) * q) % m + m) % m];
      dec.profiles[n + n_max][k] = acc / double(m);
    }
  }
  return dec;
}

/// Σ f_n(r) e^{inθ} with linear interpolation in r.
inline cd reconstruct(const AngularDecomposition& dec, double r, double theta) {
  const auto& g = dec.radial_grid;
  if (g.empty() || r < g.front() || r > g.back()) throw RangeError("radius outside the decomposition grid");
  std::size_t k = std::upper_bound(g.begin(), g.end(), r) - g.begin();
  k = std::min(std::max<std::size_t>(k, 1), g.size() - 1);
  const double t = g.size() == 1 ? 0.0 : (r - g[k - 1]) / (g[k] - g[k - 1]);
  cd acc = 0.0;
  for (int n = -dec.n_max; n <= dec.n_max; ++n) {
    const auto& p = dec.mode(n);
    const cd v = g.size() == 1 ? p[0] : (1 - t) * p[k - 1] + t * p[k];
    acc += v * std::polar(1.0, n * theta);
  }
  return acc;
}

enum class NormKind { Kondratiev, WeightedSobolev };

struct WeightedNormSpec {
  int s = 0;
  double gamma = 0.0;
  NormKind kind = NormKind::Kondratiev;
};

/// (Σ_{|α|≤s} ‖w_α D^α u‖²_{L²})^{1/2} with w_α = ⟨x⟩^{γ+|α|} (Kondratiev) or
/// ⟨x⟩^γ (weighted Sobolev), ⟨x⟩ = (1+|x|²)^{1/2}.
inline double weighted_norm(const ComplexField& f, const WeightedNormSpec& spec) {
  if (spec.s < 0 || spec.s > 2) throw RangeError("derivative order must be 0, 1 or 2");
  const double h = f.spacing();
  double total = 0.0;
  for (int order = 0; order <= spec.s; ++order) {
    const double expo = spec.kind == NormKind::Kondratiev ? spec.gamma + order : spec.gamma;
    for (int ox = order; ox >= 0; --ox) {
      const int oy = order - ox;
      const ComplexField d = order == 0 ? f : fft::derivative(f, ox, oy);
      double acc = 0.0;
      for (int i = 0; i < f.n(); ++i)
        for (int j = 0; j < f.n(); ++j) {
          const double br2 = 1.0 + f.x(j) * f.x(j) + f.y(i) * f.y(i);
          acc += std::pow(br2, expo) * std::norm(d(i, j));
        }
      total += acc * h * h;
    }
  }
  return std::sqrt(total);
}

inline double weighted_norm(const RealField& f, const WeightedNormSpec& spec) {
  return weighted_norm(fft::to_complex(f), spec);
}

struct GrowthBound {
  std::vector<double> c_estimates;
  bool monotone_tail = false;
  bool degenerate = false;
  double norm = 0.0;
};

/// c_i = max_{|x| = r_i} |f| r_i^{γ+1} / ‖f‖_{M^{2,2}_γ}, and whether these
/// stop growing beyond the first third of the radii.
template <class T>
GrowthBound growth_bound_check(const Field2D<T>& field, double gamma, const std::vector<double>& radii) {
  GrowthBound out;
  ComplexField cf(field.n(), field.half_width());
  for (std::size_t k = 0; k < cf.data().size(); ++k) cf.data()[k] = field.data()[k];
  out.norm = weighted_norm(cf, {2, gamma, NormKind::Kondratiev});
  if (out.norm == 0.0) {
    out.degenerate = true;
    out.c_estimates.assign(radii.size(), 0.0);
    return out;
  }
  constexpr int kAngles = 256;
  for (double r : radii) {
    if (!(r >= 0.0) || !(r < field.half_width())) throw RangeError("radius outside [0, L)");
    double mx = 0.0;
    for (int q = 0; q < kAngles; ++q) {
      const double th = 2.0 * M_PI * q / kAngles;
      mx = std::max(mx, std::abs(interpolate(field, r * std::cos(th), r * std::sin(th))));
    }
    out.c_estimates.push_back(mx * std::pow(r, gamma + 1.0) / out.norm);
  }
  double peak = 0.0;
  for (double c : out.c_estimates) peak = std::max(peak, c);
  out.monotone_tail = true;
  for (std::size_t i = radii.size() / 3; i + 1 < radii.size(); ++i) {
    if (out.c_estimates[i + 1] > out.c_estimates[i] + 1e-12 * peak) out.monotone_tail = false;
  }
  return out;
}

/// One CSV per mode: `<prefix>_n<mode>.csv` with columns r,re,im.
inline std::vector<std::string> write_csv(const AngularDecomposition& dec, const std::string& prefix) {
  std::vector<std::string> paths;
  for (int n = -dec.n_max; n <= dec.n_max; ++n) {
    const std::string path = prefix + "_n" + std::to_string(n) + ".csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.precision(17);
    out << "r,re,im\n";
    const auto& p = dec.mode(n);
    for (std::size_t k = 0; k < dec.radial_grid.size(); ++k) {
      out << dec.radial_grid[k] << "," << p[k].real() << "," << p[k].imag() << "\n";
    }
    paths.push_back(path);
  }
  return paths;
}

}  // namespace nloc::modes
