#pragma once

// Pseudo-spectral integration of the nonlocal FitzHugh–Nagumo system
//
//     u_t = K ∗ u + (u − u³ − v)/τ,   v_t = βu + δ
//
// on a periodic square, in deviations from (u*, v*). Each wavenumber carries
// the 2×2 linear part A(k) = [[K̂(|k|) + λ/τ, −1/τ], [β, 0]], λ = 1 − 3u*²;
// the remainder −(3u*u² + u³)/τ is treated explicitly.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "nloc/error.hpp"
#include "nloc/fft.hpp"
#include "nloc/field.hpp"
#include "nloc/io.hpp"
#include "nloc/kernel.hpp"
#include "nloc/normalform.hpp"

namespace nloc::simulate {

enum class Scheme { ETDRK4, ImexEuler };

enum class IcKind { RandomPerturbation, CrossGradient, File };

struct InitialCondition {
  IcKind kind = IcKind::RandomPerturbation;
  double amplitude = 0.5;
  std::string path;
};

struct SimConfig {
  int n = 256;
  double half_width = 64.0;
  double dt = 0.02;
  double t_end = 100.0;
  Scheme scheme = Scheme::ETDRK4;
  normalform::FhnParameters model{};
  kernel::KernelSymbol kernel = kernel::KernelSymbol::rational(5.0, 0.5);
  std::uint64_t seed = 1;
  InitialCondition ic{};
  int snapshot_every = 500;
  bool nonlinear = true;

  void check() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
    if (n < 8 || (n & (n - 1)) != 0) throw ConfigError("grid size must be a power of two >= 8");
    if (!(half_width > 0.0)) throw ConfigError("half-width must be positive");
    if (snapshot_every < 1) throw ConfigError("snapshot_every must be >= 1");
    if (ic.kind == IcKind::RandomPerturbation && !(ic.amplitude > 0.0)) {
      throw ConfigError("random initial condition needs a positive amplitude");
    }
    if (!(model.tau > 0.0) || !(model.beta > 0.0)) throw ConfigError("tau and beta must be positive");
  }
  int steps() const { return static_cast<int>(std::llround(t_end / dt)); }
};

using Mat = std::array<double, 4>;  // row-major 2×2

namespace detail {

using CMat = std::array<cd, 4>;

inline CMat inverse(const CMat& m) {
  const cd det = m[0] * m[3] - m[1] * m[2];
  return {m[3] / det, -m[1] / det, -m[2] / det, m[0] / det};
}

// f(A) = (1/2πi)∮ f(z)(zI − A)⁻¹dz on a circle around both eigenvalues that
// stays at least 1/2 away from the origin.
template <class F>
Mat contour(const Mat& a, F&& f) {
  constexpr int kPoints = 64;
  const double c = 0.5 * (a[0] + a[3]);
  const cd disc = std::sqrt(cd(0.25 * (a[0] - a[3]) * (a[0] - a[3]) + a[1] * a[2]));
  double r = std::abs(disc) + 1.0;
  if (std::abs(r - std::abs(c)) < 0.5) r = std::abs(c) + 0.5;
  CMat acc{};
  for (int j = 0; j < kPoints; ++j) {
    const cd e = std::polar(1.0, 2.0 * M_PI * (j + 0.5) / kPoints);
    const cd z = c + r * e;
    const CMat res = inverse({z - a[0], -cd(a[1]), -cd(a[2]), z - a[3]});
    const cd w = f(z) * r * e;
    for (int q = 0; q < 4; ++q) acc[q] += w * res[q];
  }
  Mat out;
  for (int q = 0; q < 4; ++q) out[q] = acc[q].real() / kPoints;
  return out;
}

inline Mat scale(const Mat& m, double s) { return {m[0] * s, m[1] * s, m[2] * s, m[3] * s}; }

}  // namespace detail

/// Exponential-integrator coefficients of one wavenumber.
struct ModeCoefficients {
  Mat e, e2;               // e^{hA}, e^{hA/2}
  Mat q;                   // A⁻¹(e^{hA/2} − I)
  Mat f1, f2, f3;          // Cox–Matthews weights
  Mat imex;                // (I − hA)⁻¹
};

inline Mat linear_matrix(const normalform::FhnParameters& p, double khat) {
  const double us = p.u_star();
  const double lam = 1.0 - 3.0 * us * us;
  return {khat + lam / p.tau, -1.0 / p.tau, p.beta, 0.0};
}

inline ModeCoefficients mode_coefficients(const Mat& a, double h) {
  ModeCoefficients m;
  const Mat ha = detail::scale(a, h);
  m.e = detail::contour(ha, [](cd z) { return std::exp(z); });
  m.e2 = detail::contour(ha, [](cd z) { return std::exp(0.5 * z); });
  m.q = detail::scale(detail::contour(ha, [](cd z) { return (std::exp(0.5 * z) - 1.0) / z; }), h);
  m.f1 = detail::scale(
      detail::contour(ha, [](cd z) { return (-4.0 - z + std::exp(z) * (4.0 - 3.0 * z + z * z)) / (z * z * z); }), h);
  m.f2 = detail::scale(detail::contour(ha, [](cd z) { return (2.0 + z + std::exp(z) * (z - 2.0)) / (z * z * z); }), h);
  m.f3 = detail::scale(
      detail::contour(ha, [](cd z) { return (-4.0 - 3.0 * z - z * z + std::exp(z) * (4.0 - z)) / (z * z * z); }), h);
  const double det = (1 - ha[0]) * (1 - ha[3]) - ha[1] * ha[2];
  m.imex = {(1 - ha[3]) / det, ha[1] / det, ha[2] / det, (1 - ha[0]) / det};
  return m;
}

inline FieldState homogeneous_state(const SimConfig& cfg) {
  const double us = cfg.model.u_star(), vs = cfg.model.v_star();
  return {0.0, RealField(cfg.n, cfg.half_width, us), RealField(cfg.n, cfg.half_width, vs)};
}

inline FieldState initial_state(const SimConfig& cfg) {
  cfg.check();
  FieldState s = homogeneous_state(cfg);
  switch (cfg.ic.kind) {
    case IcKind::RandomPerturbation: {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> dist(-cfg.ic.amplitude, cfg.ic.amplitude);
      for (auto& x : s.u.data()) x += dist(rng);
      for (auto& x : s.v.data()) x += dist(rng);
      break;
    }
    case IcKind::CrossGradient:
      for (int i = 0; i < cfg.n; ++i)
        for (int j = 0; j < cfg.n; ++j) {
          s.u(i, j) += cfg.ic.amplitude * std::sin(M_PI * s.u.x(j) / cfg.half_width);
          s.v(i, j) += cfg.ic.amplitude * std::sin(M_PI * s.u.y(i) / cfg.half_width);
        }
      break;
    case IcKind::File: {
      s = io::read_dump(cfg.ic.path);
      if (s.u.n() != cfg.n || std::abs(s.u.half_width() - cfg.half_width) > 1e-12 * cfg.half_width) {
        throw ConfigError("initial-condition file grid does not match the config");
      }
      break;
    }
  }
  return s;
}

/// Time stepper holding the spectral state of (u − u*, v − v*).
class Integrator {
 public:
  explicit Integrator(const SimConfig& cfg) : cfg_(cfg), fft_(cfg.n) {
    cfg_.check();
    if (!cfg_.kernel.validated()) cfg_.kernel = kernel::validate(cfg_.kernel);
    us_ = cfg_.model.u_star();
    vs_ = cfg_.model.v_star();
    const int n = cfg_.n, half = fft_.half();
    const double dk = M_PI / cfg_.half_width;
    std::unordered_map<long, std::size_t> cache;
    index_.resize(std::size_t(n) * half);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < half; ++b) {
        const long ka = fft::wave_index(a, n), kb = b;
        const long key = ka * ka + kb * kb;
        auto it = cache.find(key);
        if (it == cache.end()) {
          const double k = dk * std::sqrt(double(key));
          coeffs_.push_back(mode_coefficients(linear_matrix(cfg_.model, cfg_.kernel(k)), cfg_.dt));
          it = cache.emplace(key, coeffs_.size() - 1).first;
        }
        index_[std::size_t(a) * half + b] = it->second;
      }
  }

  const SimConfig& config() const { return cfg_; }
  double time() const { return t_; }
  long steps_taken() const { return steps_; }

  void load(const FieldState& s) {
    if (s.u.n() != cfg_.n || !s.u.same_shape(s.v)) throw ShapeError("state grid does not match the config");
    std::vector<double> buf(s.u.data().size());
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] = s.u.data()[k] - us_;
    fft_.forward(buf, uh_);
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] = s.v.data()[k] - vs_;
    fft_.forward(buf, vh_);
    symmetrize(uh_);
    symmetrize(vh_);
    t_ = t0_ = s.t;
    since_load_ = 0;
  }

  /// Largest anti-Hermitian component of the stored half spectra.
  double hermitian_defect() const {
    double d = 0.0;
    for (const auto* h : {&uh_, &vh_}) {
      for_each_self_conjugate_column(*h, [&](cd x, cd y) { d = std::max(d, std::abs(x - std::conj(y))); });
    }
    return d;
  }

  FieldState state() {
    FieldState s{t_, RealField(cfg_.n, cfg_.half_width), RealField(cfg_.n, cfg_.half_width)};
    fft_.inverse(uh_, s.u.data());
    fft_.inverse(vh_, s.v.data());
    for (auto& x : s.u.data()) x += us_;
    for (auto& x : s.v.data()) x += vs_;
    return s;
  }

  /// Physical u at the start of the last step (available after step()).
  const std::vector<double>& last_u() const { return u_real_; }

  void step() {
    const std::size_t m = uh_.size();
    if (cfg_.scheme == Scheme::ImexEuler) {
      nonlinear(uh_, nu_, true);
      for (std::size_t k = 0; k < m; ++k) {
        const auto& c = coeffs_[index_[k]].imex;
        const cd ru = uh_[k] + cfg_.dt * nu_[k], rv = vh_[k];
        uh_[k] = c[0] * ru + c[1] * rv;
        vh_[k] = c[2] * ru + c[3] * rv;
      }
    } else {
      nonlinear(uh_, nu_, true);
      au_.resize(m);
      av_.resize(m);
      for (std::size_t k = 0; k < m; ++k) {
        const auto& c = coeffs_[index_[k]];
        au_[k] = c.e2[0] * uh_[k] + c.e2[1] * vh_[k] + c.q[0] * nu_[k];
        av_[k] = c.e2[2] * uh_[k] + c.e2[3] * vh_[k] + c.q[2] * nu_[k];
      }
      nonlinear(au_, na_, false);
      bu_.resize(m);
      for (std::size_t k = 0; k < m; ++k) {
        const auto& c = coeffs_[index_[k]];
        bu_[k] = c.e2[0] * uh_[k] + c.e2[1] * vh_[k] + c.q[0] * na_[k];
      }
      nonlinear(bu_, nb_, false);
      cu_.resize(m);
      for (std::size_t k = 0; k < m; ++k) {
        const auto& c = coeffs_[index_[k]];
        cu_[k] = c.e2[0] * au_[k] + c.e2[1] * av_[k] + c.q[0] * (2.0 * nb_[k] - nu_[k]);
      }
      nonlinear(cu_, nc_, false);
      for (std::size_t k = 0; k < m; ++k) {
        const auto& c = coeffs_[index_[k]];
        const cd u = uh_[k], v = vh_[k];
        const cd nab = na_[k] + nb_[k];
        uh_[k] = c.e[0] * u + c.e[1] * v + c.f1[0] * nu_[k] + 2.0 * c.f2[0] * nab + c.f3[0] * nc_[k];
        vh_[k] = c.e[2] * u + c.e[3] * v + c.f1[2] * nu_[k] + 2.0 * c.f2[2] * nab + c.f3[2] * nc_[k];
      }
    }
    symmetrize(uh_);
    symmetrize(vh_);
    ++steps_;
    t_ = t0_ + double(++since_load_) * cfg_.dt;
    for (const double x : u_real_) {
      if (!std::isfinite(x)) throw DivergenceError("non-finite field at step " + std::to_string(steps_ - 1));
    }
  }

 private:
  // The kx = 0 and kx = Nyquist columns of the half spectrum hold both k and
  // −k. c2r never shows their anti-Hermitian part, so on linearly unstable
  // modes it would grow unseen until it swamps the visible part. Project it out.
  template <class F>
  void for_each_self_conjugate_column(const std::vector<cd>& h, F&& f) const {
    const int n = cfg_.n, half = n / 2 + 1;
    for (int b : {0, n / 2})
      for (int a = 0; a <= n / 2; ++a) {
        const int a2 = (n - a) % n;
        f(h[std::size_t(a) * half + b], h[std::size_t(a2) * half + b]);
      }
  }

  void symmetrize(std::vector<cd>& h) const {
    const int n = cfg_.n, half = n / 2 + 1;
    for (int b : {0, n / 2})
      for (int a = 0; a <= n / 2; ++a) {
        const int a2 = (n - a) % n;
        cd& x = h[std::size_t(a) * half + b];
        cd& y = h[std::size_t(a2) * half + b];
        const cd m = 0.5 * (x + std::conj(y));
        x = m;
        y = std::conj(m);
      }
  }

  // Spectrum of −(3u*u² + u³)/τ (zero when the nonlinearity is disabled).
  void nonlinear(const std::vector<cd>& uh, std::vector<cd>& out, bool keep) {
    fft_.inverse(uh, work_);
    if (keep) {
      u_real_.resize(work_.size());
      for (std::size_t k = 0; k < work_.size(); ++k) u_real_[k] = work_[k] + us_;
    }
    if (!cfg_.nonlinear) {
      out.assign(uh.size(), 0.0);
      return;
    }
    const double tau = cfg_.model.tau;
    for (auto& u : work_) u = -(3.0 * us_ * u * u + u * u * u) / tau;
    fft_.forward(work_, out);
  }

  SimConfig cfg_;
  fft::RealFft2d fft_;
  double us_ = 0.0, vs_ = 0.0, t_ = 0.0, t0_ = 0.0;
  long steps_ = 0, since_load_ = 0;
  std::vector<ModeCoefficients> coeffs_;
  std::vector<std::size_t> index_;
  std::vector<cd> uh_, vh_, nu_, na_, nb_, nc_, au_, av_, bu_, cu_;
  std::vector<double> work_, u_real_;
};

/// One step of the configured scheme.
inline FieldState step(const FieldState& state, const SimConfig& cfg) {
  Integrator it(cfg);
  it.load(state);
  it.step();
  return it.state();
}

struct Core {
  double x = 0.0, y = 0.0;
  int winding = 0;
};

struct SpiralDiagnostics {
  std::vector<Core> cores;
  double period_estimate = 0.0;  // 0 when no estimate is available
  RealField coherence;
};

namespace detail {

inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * M_PI);
  return a;
}

inline RealField phase(const FieldState& s, double u_ref, double v_ref) {
  RealField p(s.u.n(), s.u.half_width());
  for (std::size_t k = 0; k < p.data().size(); ++k) {
    p.data()[k] = std::atan2(s.v.data()[k] - v_ref, s.u.data()[k] - u_ref);
  }
  return p;
}

}  // namespace detail

/// Plaquettes whose discrete phase circulation is ±2π. Plaquettes straddling
/// the periodic seam are skipped (on the torus the total winding is zero).
inline std::vector<Core> detect_cores(const FieldState& state, double u_ref, double v_ref) {
  const auto ph = detail::phase(state, u_ref, v_ref);
  const int n = ph.n();
  const double h = ph.spacing();
  std::vector<Core> cores;
  for (int i = 0; i + 1 < n; ++i)
    for (int j = 0; j + 1 < n; ++j) {
      const int i1 = i + 1, j1 = j + 1;
      const double c = detail::wrap_angle(ph(i, j1) - ph(i, j)) + detail::wrap_angle(ph(i1, j1) - ph(i, j1)) +
                       detail::wrap_angle(ph(i1, j) - ph(i1, j1)) + detail::wrap_angle(ph(i, j) - ph(i1, j));
      const int w = static_cast<int>(std::lround(c / (2.0 * M_PI)));
      if (w != 0) cores.push_back({ph.x(j) + 0.5 * h, ph.y(i) + 0.5 * h, w});
    }
  return cores;
}

/// |mean of e^{iφ}| over the disk of the given radius around each point.
inline RealField local_coherence(const FieldState& state, double radius, double u_ref, double v_ref) {
  const int n = state.u.n();
  const double h = state.u.spacing();
  if (!(radius >= 2.0 * h)) throw RangeError("coherence radius must cover at least 2 grid cells");
  const auto ph = detail::phase(state, u_ref, v_ref);
  ComplexField z(n, state.u.half_width()), disk(n, state.u.half_width());
  double count = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      z(i, j) = std::polar(1.0, ph(i, j));
      const int di = std::min(i, n - i), dj = std::min(j, n - j);
      if (std::hypot(di * h, dj * h) <= radius) {
        disk(i, j) = 1.0;
        count += 1.0;
      }
    }
  fft::Fft2d plan(n);
  std::vector<cd> zs, ds, prod(std::size_t(n) * n), out;
  plan.forward(z.data(), zs);
  plan.forward(disk.data(), ds);
  for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = zs[k] * ds[k];
  plan.inverse(prod, out);
  RealField c(n, state.u.half_width());
  for (std::size_t k = 0; k < out.size(); ++k) c.data()[k] = std::min(1.0, std::abs(out[k]) / count);
  return c;
}

/// Mean spacing of upward mean-crossings of a sampled series (0 if fewer than two).
inline double crossing_period(const std::vector<double>& t, const std::vector<double>& x) {
  if (x.size() < 3) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= x.size();
  std::vector<double> up;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double a = x[k] - mean, b = x[k + 1] - mean;
    if (a < 0.0 && b >= 0.0) up.push_back(t[k] + (t[k + 1] - t[k]) * (-a) / (b - a));
  }
  if (up.size() < 2) return 0.0;
  return (up.back() - up.front()) / (up.size() - 1);
}

/// Median over probes of the crossing period.
inline double estimate_period(const std::vector<double>& t, const std::vector<std::vector<double>>& probes) {
  std::vector<double> ps;
  for (const auto& s : probes) {
    const double p = crossing_period(t, s);
    if (p > 0.0) ps.push_back(p);
  }
  if (ps.empty()) return 0.0;
  std::sort(ps.begin(), ps.end());
  return ps.size() % 2 ? ps[ps.size() / 2] : 0.5 * (ps[ps.size() / 2 - 1] + ps[ps.size() / 2]);
}

inline SpiralDiagnostics detect_spiral(const FieldState& state, double u_ref, double v_ref,
                                       double coherence_radius = 0.0) {
  SpiralDiagnostics d;
  d.cores = detect_cores(state, u_ref, v_ref);
  if (coherence_radius > 0.0) d.coherence = local_coherence(state, coherence_radius, u_ref, v_ref);
  return d;
}

struct Probe {
  double x = 0.0, y = 0.0;
};

/// 3×3 probe lattice at ±L/2.
inline std::vector<Probe> default_probes(double half_width) {
  std::vector<Probe> p;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) p.push_back({0.5 * a * half_width, 0.5 * b * half_width});
  return p;
}

struct RunResult {
  std::vector<FieldState> snapshots;
  std::vector<SpiralDiagnostics> diagnostics;
  std::vector<double> probe_times;
  std::vector<std::vector<double>> probe_series;  // [probe][sample]
};

struct RunOptions {
  double coherence_radius = 0.0;  // 0 disables the coherence field
  std::vector<Probe> probes;      // empty means default_probes
  std::function<void(const FieldState&, const SpiralDiagnostics&)> on_snapshot;
};

/// Integrates to t_end with snapshots every `snapshot_every` steps. The period
/// at a snapshot uses the probe samples since the previous snapshot.
inline RunResult run(const SimConfig& cfg, const RunOptions& opt = {}) {
  Integrator it(cfg);
  FieldState init = initial_state(cfg);
  it.load(init);
  const double us = cfg.model.u_star(), vs = cfg.model.v_star();
  const auto probes = opt.probes.empty() ? default_probes(cfg.half_width) : opt.probes;
  std::vector<std::size_t> probe_index;
  {
    const RealField grid(cfg.n, cfg.half_width);
    const double h = grid.spacing();
    for (const auto& p : probes) {
      const int j = static_cast<int>(std::lround((p.x + cfg.half_width) / h)) % cfg.n;
      const int i = static_cast<int>(std::lround((p.y + cfg.half_width) / h)) % cfg.n;
      probe_index.push_back(std::size_t(i) * cfg.n + j);
    }
  }
  RunResult out;
  out.probe_series.assign(probes.size(), {});
  std::size_t window_start = 0;
  auto snapshot = [&](std::optional<FieldState> given) {
    FieldState s = given ? std::move(*given) : it.state();
    SpiralDiagnostics d = detect_spiral(s, us, vs, opt.coherence_radius);
    std::vector<double> t(out.probe_times.begin() + window_start, out.probe_times.end());
    std::vector<std::vector<double>> series;
    for (const auto& ps : out.probe_series) series.emplace_back(ps.begin() + window_start, ps.end());
    d.period_estimate = estimate_period(t, series);
    window_start = out.probe_times.size();
    if (opt.on_snapshot) opt.on_snapshot(s, d);
    out.snapshots.push_back(std::move(s));
    out.diagnostics.push_back(std::move(d));
  };
  snapshot(std::move(init));
  const int steps = cfg.steps();
  for (int k = 0; k < steps; ++k) {
    const double t0 = it.time();
    it.step();
    const auto& u = it.last_u();
    out.probe_times.push_back(t0);
    for (std::size_t p = 0; p < probes.size(); ++p) out.probe_series[p].push_back(u[probe_index[p]]);
    if ((k + 1) % cfg.snapshot_every == 0 || k + 1 == steps) snapshot(std::nullopt);
  }
  return out;
}

}  // namespace nloc::simulate
