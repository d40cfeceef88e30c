#pragma once

// Discrete order-n Hankel transforms on Bessel-zero grids, and the radial
// operators that are diagonal under them.
//
//   P_n[g](ρ)    = (-i)^n ∫ g(r) J_n(rρ) r dr
//   P_n⁻¹[ğ](r)  =   i^n ∫ ğ(ρ) J_n(rρ) ρ dρ
//
// With j_k the zeros of J_|n| and S = j_{N+1}, nodes are r_k = j_k Rmax/S and
// ρ_k = j_k/Rmax. Both integrals reduce to the same symmetric matrix
// T_km = 2 J_n(j_k j_m / S) / (S |J_{n+1}(j_k)| |J_{n+1}(j_m)|)
// sandwiched between diagonal scalings.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <memory>
#include <sstream>
#include <vector>

#include "nloc/bessel.hpp"
#include "nloc/error.hpp"
#include "nloc/kernel.hpp"

namespace nloc::hankel {

using cd = std::complex<double>;

class HankelPlan {
 public:
  HankelPlan(int order, double r_max, int size) : order_(order), r_max_(r_max), size_(size) {
    if (size < 16) throw SizeError("Hankel plan needs N >= 16 nodes");
    if (!(r_max > 0.0)) throw RangeError("Hankel plan needs Rmax > 0");
    const int m = std::abs(order);
    const auto z = bessel::zeros(m, size + 1);
    s_ = z[size];
    band_ = s_ / r_max;
    r_.resize(size);
    rho_.resize(size);
    a_.resize(size);
    for (int k = 0; k < size; ++k) {
      r_[k] = z[k] * r_max / s_;
      rho_[k] = z[k] / r_max;
      a_[k] = std::abs(bessel::j(m + 1, z[k]));
    }
    t_.resize(size, size);
    for (int k = 0; k < size; ++k) {
      for (int l = k; l < size; ++l) {
        const double v = 2.0 * bessel::j(m, z[k] * z[l] / s_) / (s_ * a_[k] * a_[l]);
        t_(k, l) = v;
        t_(l, k) = v;
      }
    }
    // T is an involution up to quadrature error; polish it to the nearest
    // orthogonal symmetric matrix so the discrete transform pair is exact.
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(size, size);
    for (int it = 0; it < 6; ++it) {
      const Eigen::MatrixXd t2 = t_ * t_;
      if ((t2 - id).cwiseAbs().maxCoeff() < 1e-14) break;
      t_ = 0.5 * (3.0 * t_ - t_ * t2);
      t_ = 0.5 * (t_ + t_.transpose()).eval();
    }
  }

  int order() const { return order_; }
  int size() const { return size_; }
  double r_max() const { return r_max_; }
  /// Largest represented frequency, j_{N+1}/Rmax.
  double band_limit() const { return band_; }
  const std::vector<double>& nodes() const { return r_; }
  const std::vector<double>& frequencies() const { return rho_; }
  const Eigen::MatrixXd& transform_matrix() const { return t_; }

  /// Quadrature weights for ∫ f(r) r dr on the radial nodes.
  std::vector<double> weights() const {
    std::vector<double> w(size_);
    for (int k = 0; k < size_; ++k) w[k] = 2.0 / (band_ * band_ * a_[k] * a_[k]);
    return w;
  }

  /// Quadrature weights for ∫ ğ(ρ) ρ dρ on the frequency nodes.
  std::vector<double> frequency_weights() const {
    std::vector<double> w(size_);
    for (int k = 0; k < size_; ++k) w[k] = 2.0 / (r_max_ * r_max_ * a_[k] * a_[k]);
    return w;
  }

  /// (-i)^|n|
  cd forward_phase() const { return ipow(-abs_order()); }
  cd inverse_phase() const { return ipow(abs_order()); }

  // Unitary-frame coordinates: F_k = f(r_k) Rmax/|J_{n+1}(j_k)|,
  // G_m = ğ(ρ_m) V/|J_{n+1}(j_m)|, with G = T F up to the phase.
  double radial_scale(int k) const { return r_max_ / a_[k]; }
  double frequency_scale(int k) const { return band_ / a_[k]; }

  bool same_grid(const HankelPlan& o) const {
    return std::abs(order_) == std::abs(o.order_) && size_ == o.size_ && r_max_ == o.r_max_;
  }

 private:
  int abs_order() const { return std::abs(order_); }
  static cd ipow(int p) {
    switch (((p % 4) + 4) % 4) {
      case 0: return {1, 0};
      case 1: return {0, 1};
      case 2: return {-1, 0};
      default: return {0, -1};
    }
  }

  int order_;
  double r_max_;
  int size_;
  double s_ = 0.0;
  double band_ = 0.0;
  std::vector<double> r_, rho_, a_;
  Eigen::MatrixXd t_;
};

using PlanPtr = std::shared_ptr<const HankelPlan>;

inline PlanPtr make_plan(int n, double r_max, int size) {
  return std::make_shared<const HankelPlan>(n, r_max, size);
}

enum class Domain { Radius, Frequency };

/// Complex samples on the radial nodes (Domain::Radius) or on the conjugate
/// frequency nodes (Domain::Frequency) of a plan.
struct RadialProfile {
  PlanPtr plan;
  std::vector<cd> values;
  Domain domain = Domain::Radius;
  bool truncation_warning = false;

  static RadialProfile zeros(PlanPtr p, Domain d = Domain::Radius) {
    RadialProfile out{p, std::vector<cd>(p->size()), d, false};
    return out;
  }

  template <class F>
  static RadialProfile sample(PlanPtr p, F&& f) {
    RadialProfile out = zeros(p);
    for (int k = 0; k < p->size(); ++k) out.values[k] = f(p->nodes()[k]);
    return out;
  }
};

namespace detail {

inline void check(const RadialProfile& g, Domain d) {
  if (!g.plan) throw ShapeError("radial profile has no plan");
  if (static_cast<int>(g.values.size()) != g.plan->size()) {
    throw ShapeError("radial profile length does not match its plan");
  }
  if (g.domain != d) throw ShapeError("radial profile is sampled on the wrong grid");
}

// Applies T to the real and imaginary parts separately.
inline Eigen::VectorXcd apply_t(const HankelPlan& p, const Eigen::VectorXcd& x) {
  const Eigen::MatrixXd& t = p.transform_matrix();
  Eigen::VectorXcd y(x.size());
  y.real() = t * x.real();
  y.imag() = t * x.imag();
  return y;
}

inline Eigen::VectorXcd to_unitary_radius(const RadialProfile& g) {
  const auto& p = *g.plan;
  Eigen::VectorXcd f(p.size());
  for (int k = 0; k < p.size(); ++k) f[k] = g.values[k] * p.radial_scale(k);
  return f;
}

inline std::vector<cd> from_unitary_radius(const HankelPlan& p, const Eigen::VectorXcd& f) {
  std::vector<cd> out(p.size());
  for (int k = 0; k < p.size(); ++k) out[k] = f[k] / p.radial_scale(k);
  return out;
}

}  // namespace detail

inline RadialProfile hankel_forward(const RadialProfile& g) {
  detail::check(g, Domain::Radius);
  const auto& p = *g.plan;
  const Eigen::VectorXcd G = detail::apply_t(p, detail::to_unitary_radius(g));
  RadialProfile out = RadialProfile::zeros(g.plan, Domain::Frequency);
  const cd ph = p.forward_phase();
  double sup = 0.0;
  for (const auto& v : g.values) sup = std::max(sup, std::abs(v));
  for (int k = 0; k < p.size(); ++k) out.values[k] = ph * G[k] / p.frequency_scale(k);
  out.truncation_warning = g.truncation_warning || std::abs(g.values.back()) > 1e-8 * sup;
  return out;
}

inline RadialProfile hankel_inverse(const RadialProfile& gh) {
  detail::check(gh, Domain::Frequency);
  const auto& p = *gh.plan;
  Eigen::VectorXcd G(p.size());
  for (int k = 0; k < p.size(); ++k) G[k] = gh.values[k] * p.frequency_scale(k);
  const Eigen::VectorXcd F = detail::apply_t(p, G);
  RadialProfile out = RadialProfile::zeros(gh.plan, Domain::Radius);
  const cd ph = p.inverse_phase();
  for (int k = 0; k < p.size(); ++k) out.values[k] = ph * F[k] / p.radial_scale(k);
  out.truncation_warning = gh.truncation_warning;
  return out;
}

/// Applies the frequency multiplier m(ρ_k) between a forward and an inverse
/// transform. The (-i)^n, i^n phases cancel and are skipped.
template <class Multiplier>
RadialProfile apply_multiplier(const RadialProfile& u, Multiplier&& m) {
  detail::check(u, Domain::Radius);
  const auto& p = *u.plan;
  Eigen::VectorXcd G = detail::apply_t(p, detail::to_unitary_radius(u));
  for (int k = 0; k < p.size(); ++k) G[k] *= m(p.frequencies()[k]);
  RadialProfile out{u.plan, detail::from_unitary_radius(p, detail::apply_t(p, G)), Domain::Radius,
                    u.truncation_warning};
  return out;
}

/// P_n⁻¹[K̂(ρ) P_n[u]], i.e. K ∗ (u(r)e^{inθ}) restricted to mode n.
inline RadialProfile radial_convolve(const kernel::KernelSymbol& sym, const RadialProfile& u) {
  if (!sym.validated()) throw StateError("radial_convolve requires a validated symbol");
  return apply_multiplier(u, [&](double rho) { return cd(sym(rho), 0.0); });
}

inline RadialProfile radial_convolve(const kernel::KernelSymbol& sym, const HankelPlan& plan,
                                     const RadialProfile& u) {
  detail::check(u, Domain::Radius);
  if (!plan.same_grid(*u.plan)) throw ShapeError("profile was sampled on a different Hankel plan");
  return radial_convolve(sym, u);
}

/// P_n⁻¹[(K̂(ρ)+β) P_n[u]].
inline RadialProfile apply_mode_operator(const kernel::KernelSymbol& sym, cd beta, const RadialProfile& u) {
  return apply_multiplier(u, [&](double rho) { return sym(rho) + beta; });
}

/// Solves (K ∗ · + β) u = f on mode n through the symbol inverse.
inline RadialProfile solve_mode_operator(const kernel::KernelSymbol& sym, cd beta, const RadialProfile& f) {
  detail::check(f, Domain::Radius);
  const double floor = 1e-12 * std::max(1.0, std::abs(beta));
  for (double rho : f.plan->frequencies()) {
    if (std::abs(sym(rho) + beta) <= floor) {
      std::ostringstream msg;
      msg << "symbol K(rho) + beta vanishes at rho = " << rho << " (beta = " << beta.real() << "+"
          << beta.imag() << "i)";
      throw SingularOperatorError(msg.str(), rho);
    }
  }
  return apply_multiplier(f, [&](double rho) { return 1.0 / (sym(rho) + beta); });
}

inline RadialProfile solve_mode_operator(const kernel::KernelSymbol& sym, cd beta, const HankelPlan& plan,
                                         const RadialProfile& f) {
  detail::check(f, Domain::Radius);
  if (!plan.same_grid(*f.plan)) throw ShapeError("profile was sampled on a different Hankel plan");
  return solve_mode_operator(sym, beta, f);
}

/// Evaluates the band-limited Fourier–Bessel interpolant of g at arbitrary
/// radii in [0, Rmax].
inline std::vector<cd> interpolate(const RadialProfile& g, const std::vector<double>& radii) {
  const RadialProfile gh = hankel_forward(g);
  const auto& p = *g.plan;
  const auto w = p.frequency_weights();
  const int m = std::abs(p.order());
  const cd ph = p.inverse_phase();
  std::vector<cd> out(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] >= 0.0) || radii[i] > p.r_max() * (1 + 1e-12)) {
      throw RangeError("interpolation radius outside [0, Rmax]");
    }
    cd acc = 0.0;
    for (int k = 0; k < p.size(); ++k) acc += gh.values[k] * (w[k] * bessel::j(m, p.frequencies()[k] * radii[i]));
    out[i] = ph * acc;
  }
  return out;
}

/// Discrete L² norm (∫|g|² r dr)^{1/2} on the radial nodes.
inline double l2_norm(const RadialProfile& g) {
  const auto w = g.plan->weights();
  double s = 0.0;
  for (int k = 0; k < g.plan->size(); ++k) s += w[k] * std::norm(g.values[k]);
  return std::sqrt(s);
}

inline double sup_norm(const RadialProfile& g) {
  double s = 0.0;
  for (const auto& v : g.values) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace nloc::hankel
