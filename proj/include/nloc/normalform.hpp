#pragma once

// Hopf data and cubic normal-form coefficients for two-component reaction
// terms F(U;λ) = A₀U + λA₁U + M(U,U) + N(U,U,U) + ...
//
// ⟨a, b⟩ below is the bilinear pairing Σ aᵢbᵢ (no conjugation).

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nloc/error.hpp"
#include "nloc/modes.hpp"

namespace nloc::normalform {

using cd = std::complex<double>;
using Vec2 = std::array<cd, 2>;
using Mat2 = std::array<std::array<cd, 2>, 2>;
using RealVec2 = std::array<double, 2>;

inline cd pair(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline Vec2 conj(const Vec2& a) { return {std::conj(a[0]), std::conj(a[1])}; }
inline Vec2 operator*(cd s, const Vec2& a) { return {s * a[0], s * a[1]}; }
inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }

inline Vec2 mat_vec(const Mat2& m, const Vec2& x) {
  return {m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]};
}

inline double max_abs(const Vec2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

inline double max_abs(const Mat2& m) {
  return std::max({std::abs(m[0][0]), std::abs(m[0][1]), std::abs(m[1][0]), std::abs(m[1][1])});
}

/// Symmetric bilinear map, M(a,b)_i = Σ t[i][j][k] a_j b_k.
struct Tensor3 {
  cd t[2][2][2] = {};
  Vec2 operator()(const Vec2& a, const Vec2& b) const {
    Vec2 out{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) out[i] += t[i][j][k] * a[j] * b[k];
    return out;
  }
};

/// Symmetric trilinear map, N(a,b,c)_i = Σ t[i][j][k][l] a_j b_k c_l.
struct Tensor4 {
  cd t[2][2][2][2] = {};
  Vec2 operator()(const Vec2& a, const Vec2& b, const Vec2& c) const {
    Vec2 out{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) out[i] += t[i][j][k][l] * a[j] * b[k] * c[l];
    return out;
  }
};

struct ReactionModel {
  std::function<RealVec2(const RealVec2&, double)> f;
  Mat2 a0{};
  Mat2 a1_slope{};
  Tensor3 m0, m1_slope;
  Tensor4 n0, n1_slope;
};

/// FitzHugh–Nagumo kinetics u' = (u − u³ − v)/τ, v' = βu + δ written in
/// deviations from the rest state (u*, v*) = (−δ/β, u* − u*³), with the
/// linear u-coefficient λ (physically λ = 1 − 3u*²) as the parameter.
struct FhnParameters {
  double tau = 0.2;
  double beta = 1.0;
  double delta = 0.1;

  double u_star() const { return -delta / beta; }
  double v_star() const { return u_star() - u_star() * u_star() * u_star(); }
  double lambda() const { return 1.0 - 3.0 * u_star() * u_star(); }
};

inline ReactionModel fhn_model(const FhnParameters& p) {
  if (!(p.tau > 0.0) || !(p.beta > 0.0)) throw RangeError("FitzHugh-Nagumo needs tau > 0 and beta > 0");
  const double tau = p.tau, beta = p.beta, us = p.u_star();
  ReactionModel m;
  m.f = [=](const RealVec2& x, double lambda) -> RealVec2 {
    const double u = x[0], v = x[1];
    return {(lambda * u - v - 3.0 * us * u * u - u * u * u) / tau, beta * u};
  };
  m.a0 = {{{0.0, -1.0 / tau}, {beta, 0.0}}};
  m.a1_slope = {{{1.0 / tau, 0.0}, {0.0, 0.0}}};
  m.m0.t[0][0][0] = -3.0 * us / tau;
  m.n0.t[0][0][0][0] = -1.0 / tau;
  return m;
}

struct ModelCheck {
  double zero_residual = 0.0;
  double m0_asymmetry = 0.0;
  double n0_asymmetry = 0.0;
  double jacobian_error = 0.0;
  bool ok() const {
    return zero_residual <= 1e-12 && m0_asymmetry <= 1e-14 && n0_asymmetry <= 1e-14 && jacobian_error <= 1e-6;
  }
};

/// Numerical checks of the structural assumptions on a model.
inline ModelCheck check_model(const ReactionModel& m) {
  ModelCheck c;
  for (double lam : {-1.0, -0.1, 0.0, 0.3, 2.0}) {
    const auto f = m.f({0.0, 0.0}, lam);
    c.zero_residual = std::max({c.zero_residual, std::abs(f[0]), std::abs(f[1])});
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        c.m0_asymmetry = std::max(c.m0_asymmetry, std::abs(m.m0.t[i][j][k] - m.m0.t[i][k][j]));
        for (int l = 0; l < 2; ++l) {
          const cd v = m.n0.t[i][j][k][l];
          for (cd w : {m.n0.t[i][k][j][l], m.n0.t[i][l][k][j], m.n0.t[i][j][l][k]}) {
            c.n0_asymmetry = std::max(c.n0_asymmetry, std::abs(v - w));
          }
        }
      }
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    RealVec2 xp{0, 0}, xm{0, 0};
    xp[j] = h;
    xm[j] = -h;
    const auto fp = m.f(xp, 0.0), fm = m.f(xm, 0.0);
    for (int i = 0; i < 2; ++i) {
      const double d = (fp[i] - fm[i]) / (2 * h);
      c.jacobian_error = std::max(c.jacobian_error, std::abs(d - m.a0[i][j]));
    }
  }
  return c;
}

struct HopfData {
  double omega = 0.0;
  Vec2 w1{};
  Vec2 w1_star{};
  double c_star = 0.0;
  int n0 = 1;
};

/// Critical eigenpair of A₀. W₁ is rephased so its first component is real
/// and negative; W₁* is normalised by ⟨W₁*, W₁⟩ = 1.
inline HopfData hopf_data(const ReactionModel& model, int n0) {
  if (n0 == 0) throw RangeError("critical angular mode n0 must be nonzero");
  const Mat2& a = model.a0;
  const cd tr = a[0][0] + a[1][1];
  const cd det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  const double scale = std::max(max_abs(a), 1e-300);
  if (std::abs(tr) > 1e-8 * scale || !(std::norm(tr) < 4.0 * det.real()) || std::abs(det.imag()) > 1e-12 * scale * scale) {
    std::ostringstream msg;
    msg << "linearization has no purely imaginary eigenvalue pair (trace = " << tr.real() << ", det = " << det.real()
        << ")";
    throw NotHopfError(msg.str());
  }
  HopfData h;
  h.omega = std::sqrt(det.real() - 0.25 * std::norm(tr));
  h.n0 = n0;
  h.c_star = h.omega / n0;
  const cd iw(0.0, h.omega);
  Vec2 w{a[0][1], iw - a[0][0]};
  if (max_abs(w) <= 1e-14 * scale) w = {iw - a[1][1], a[1][0]};
  if (std::abs(w[0]) > 0.0) w = (-std::abs(w[0]) / w[0]) * w;
  Vec2 ws{a[1][0], iw - a[0][0]};
  if (max_abs(ws) <= 1e-14 * scale) ws = {iw - a[1][1], a[0][1]};
  ws = (1.0 / pair(ws, w)) * ws;
  h.w1 = w;
  h.w1_star = ws;
  return h;
}

struct ModeMatrix {
  Mat2 b{};
  std::array<cd, 2> eigenvalues{};
};

/// B_n = A₀ − i c* n I.
inline ModeMatrix mode_matrix(const HopfData& hopf, const Mat2& a0, int n) {
  ModeMatrix out;
  out.b = a0;
  const cd shift(0.0, hopf.c_star * n);
  out.b[0][0] -= shift;
  out.b[1][1] -= shift;
  const cd tr = out.b[0][0] + out.b[1][1];
  const cd det = out.b[0][0] * out.b[1][1] - out.b[0][1] * out.b[1][0];
  const cd disc = std::sqrt(tr * tr - 4.0 * det);
  cd l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
  // Recover the small root without cancellation.
  if (std::abs(l1) < std::abs(l2)) std::swap(l1, l2);
  if (std::abs(l1) > 0.0) l2 = det / l1;
  out.eigenvalues = {l1, l2};
  return out;
}

namespace detail {

inline Vec2 solve2(const Mat2& m, const Vec2& rhs, const std::string& name) {
  const cd det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double scale = std::max(max_abs(m), 1e-300);
  if (std::abs(det) <= 1e-12 * scale * scale) throw ResonanceError("resonant linear system: " + name + " is singular");
  return {(m[1][1] * rhs[0] - m[0][1] * rhs[1]) / det, (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det};
}

inline Mat2 shifted(const Mat2& a0, cd s) {
  // s·I − A₀
  return {{{s - a0[0][0], -a0[0][1]}, {-a0[1][0], s - a0[1][1]}}};
}

}  // namespace detail

struct ResonantVectors {
  Vec2 v1{}, v0{}, vm1{};
};

/// Second-order coefficients of U₂ = V₁w²e^{2in₀θ} + V₀|w|² + V₋₁w̄²e^{−2in₀θ}.
inline ResonantVectors resonant_vectors(const ReactionModel& model, const HopfData& hopf) {
  const cd s(0.0, 2.0 * hopf.n0 * hopf.c_star);
  const Vec2 w = hopf.w1, wb = conj(hopf.w1);
  ResonantVectors v;
  v.v1 = detail::solve2(detail::shifted(model.a0, s), model.m0(w, w), "(2 i n0 c* - A0)");
  v.vm1 = detail::solve2(detail::shifted(model.a0, -s), model.m0(wb, wb), "(-2 i n0 c* - A0)");
  v.v0 = detail::solve2(detail::shifted(model.a0, 0.0), 2.0 * model.m0(w, wb), "A0");
  return v;
}

struct NormalFormCoefficients {
  cd nu1, a1, a2;
  Vec2 v1{}, v0{}, vm1{};
  cd a() const { return a1 + a2; }
};

inline NormalFormCoefficients coefficients(const ReactionModel& model, const HopfData& hopf) {
  const auto v = resonant_vectors(model, hopf);
  const Vec2 w = hopf.w1, wb = conj(hopf.w1), ws = hopf.w1_star;
  NormalFormCoefficients c;
  c.v1 = v.v1;
  c.v0 = v.v0;
  c.vm1 = v.vm1;
  c.nu1 = pair(ws, mat_vec(model.a1_slope, w));
  c.a1 = pair(ws, 2.0 * (model.m0(w, v.v0) + model.m0(wb, v.v1)));
  // Three resonant orderings of W₁W₁W̄₁ in the cube of U₁.
  c.a2 = pair(ws, 3.0 * model.n0(w, w, wb));
  return c;
}

/// Radial samples on an arbitrary increasing grid.
struct RadialSamples {
  std::vector<double> radius;
  std::vector<cd> values;
};

/// w(r) = ⟨W₁*, U_{n₀}(r)⟩ from the angular decompositions of the two
/// components.
inline RadialSamples project_parallel(const modes::AngularDecomposition& u, const modes::AngularDecomposition& v,
                                      const HopfData& hopf) {
  if (u.radial_grid != v.radial_grid) throw ShapeError("component decompositions use different radial grids");
  const auto& pu = u.mode(hopf.n0);
  const auto& pv = v.mode(hopf.n0);
  RadialSamples out;
  out.radius = u.radial_grid;
  out.values.resize(pu.size());
  for (std::size_t k = 0; k < pu.size(); ++k) out.values[k] = pair(hopf.w1_star, Vec2{pu[k], pv[k]});
  return out;
}

}  // namespace nloc::normalform
