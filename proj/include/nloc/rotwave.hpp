#pragma once

// Radial profiles of the reduced amplitude equation
//
//     K̃ ∗ (w(R) e^{in₀θ}) + β w + a|w|²w + h(w) = 0,   β = λ_c + s·i(μ*+μ)n₀,
//
// the two-term ansatz built from them, and the steady residual of the full
// two-component system in a frame rotating with speed c.
//
// A profile is w = w̄ + w₀T with w̄ carried by the Hankel plan (vanishing at
// Rmax) and a bounded tail w₀T, T(R) = (1 − e^{−R²})^{|n₀|/2}. The convolution
// of the tail uses K̂ = −q(ρ)ρ²: K̃ ∗ (T e^{in₀θ}) = Q ∗ (Δ_{n₀}T) computed on
// an enlarged plan.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <vector>

#include "nloc/error.hpp"
#include "nloc/fft.hpp"
#include "nloc/field.hpp"
#include "nloc/hankel.hpp"
#include "nloc/kernel.hpp"
#include "nloc/modes.hpp"
#include "nloc/normalform.hpp"

namespace nloc::rotwave {

using hankel::PlanPtr;
using hankel::RadialProfile;

struct ReducedProblem {
  kernel::KernelSymbol sym_rescaled = kernel::KernelSymbol::laplacian(1.0);
  cd lambda_c = 1.0;
  double mu_star = 0.0;
  double mu = 0.0;
  int n0 = 1;
  int rotation_sign = 1;
  cd a = -1.0;
  /// Pointwise higher-order term h(w); empty means zero.
  std::function<cd(cd)> hot;

  cd beta() const { return lambda_c + cd(0.0, rotation_sign * (mu_star + mu) * n0); }
};

/// Constructor enforcing μ* ≠ 0 and a ≠ 0.
inline ReducedProblem scaled_problem(kernel::KernelSymbol sym_rescaled, cd lambda_c, double mu_star, double mu, int n0,
                                    cd a, int rotation_sign = 1) {
  if (mu_star == 0.0) throw RangeError("mu_star must be nonzero");
  if (a == cd(0.0, 0.0)) throw RangeError("cubic coefficient a must be nonzero");
  if (rotation_sign != 1 && rotation_sign != -1) throw RangeError("rotation_sign must be +1 or -1");
  ReducedProblem p;
  p.sym_rescaled = std::move(sym_rescaled);
  p.lambda_c = lambda_c;
  p.mu_star = mu_star;
  p.mu = mu;
  p.n0 = n0;
  p.rotation_sign = rotation_sign;
  p.a = a;
  return p;
}

struct ProfileSolution {
  PlanPtr plan;
  RadialProfile w_decaying;
  cd w_const = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  double mu = 0.0;  // rotation offset used (solved for in free-rotation mode)
  std::vector<double> residual_history;

  /// w̄ + w₀T at the plan nodes.
  std::vector<cd> node_values() const;
};

/// Bounded tail shape, regular at the origin for mode n.
inline double tail_shape(int n, double r) {
  const int m = std::abs(n);
  if (m == 0) return 1.0;
  return std::pow(-std::expm1(-r * r), 0.5 * m);
}

/// Δ_n T = T'' + T'/R − n²T/R².
inline double tail_laplacian(int n, double r) {
  const int m = std::abs(n);
  if (m == 0) return 0.0;
  const double e = std::exp(-r * r);
  const double s = -std::expm1(-r * r);
  const double t = std::pow(s, 0.5 * m);
  const double d1 = m * r * e * std::pow(s, 0.5 * m - 1.0);
  const double d2 = m * e * std::pow(s, 0.5 * m - 2.0) * (s - 2.0 * r * r * s + (m - 2.0) * r * r * e);
  if (r == 0.0) return 0.0;
  return d2 + d1 / r - double(m) * m * t / (r * r);
}

inline std::vector<cd> ProfileSolution::node_values() const {
  std::vector<cd> w(plan->size());
  for (int k = 0; k < plan->size(); ++k) {
    w[k] = w_decaying.values[k] + w_const * tail_shape(plan->order(), plan->nodes()[k]);
  }
  return w;
}

namespace detail {

inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

}  // namespace detail

/// Radial part of K ∗ (T e^{inθ}) at the nodes of `plan`.
inline std::vector<double> tail_convolution(const kernel::KernelSymbol& sym, const hankel::HankelPlan& plan) {
  const int n = plan.order();
  std::vector<double> out(plan.size(), 0.0);
  if (n == 0) return out;
  if (sym.is_laplacian_limit()) {
    const double alpha = std::get<kernel::LaplacianLimit>(sym.family()).alpha;
    for (int k = 0; k < plan.size(); ++k) out[k] = alpha * tail_laplacian(n, plan.nodes()[k]);
    return out;
  }
  const double r_max = plan.r_max();
  const auto aux = hankel::make_plan(n, 3.0 * r_max, 3 * plan.size());
  const auto f = RadialProfile::sample(aux, [&](double r) {
    const double window = detail::smooth_step((2.8 * r_max - r) / (0.8 * r_max));
    return cd(window * tail_laplacian(n, r), 0.0);
  });
  const auto h = hankel::apply_multiplier(f, [&](double rho) { return cd(sym.quotient(rho), 0.0); });
  const auto v = hankel::interpolate(h, plan.nodes());
  for (int k = 0; k < plan.size(); ++k) out[k] = v[k].real();
  return out;
}

/// Discretized reduced operator on one plan; owns the dense matrices.
class ReducedOperator {
 public:
  ReducedOperator(const ReducedProblem& p, PlanPtr plan) : problem_(p), plan_(std::move(plan)) {
    if (std::abs(plan_->order()) != std::abs(p.n0)) throw ShapeError("plan order does not match n0");
    if (!p.sym_rescaled.validated()) throw StateError("reduced problem needs a validated symbol");
    const int N = plan_->size();
    const auto& t = plan_->transform_matrix();
    Eigen::VectorXd d(N), kh(N);
    for (int k = 0; k < N; ++k) {
      d[k] = plan_->radial_scale(k);
      kh[k] = p.sym_rescaled(plan_->frequencies()[k]);
    }
    conv_ = d.cwiseInverse().asDiagonal() * (t * kh.asDiagonal() * t) * d.asDiagonal();
    tail_.resize(N);
    for (int k = 0; k < N; ++k) tail_[k] = tail_shape(p.n0, plan_->nodes()[k]);
    const auto g = tail_convolution(p.sym_rescaled, *plan_);
    tail_conv_ = Eigen::Map<const Eigen::VectorXd>(g.data(), N);
    // w₀ = w_N/T_N, so K(w̄ + w₀T) = conv (w − w_N T/T_N) + w_N G/T_N.
    full_ = conv_;
    full_.col(N - 1) += (tail_conv_ - conv_ * tail_) / tail_[N - 1];
    d_ = d;
    kh_ = kh;
  }

  const ReducedProblem& problem() const { return problem_; }
  const PlanPtr& plan() const { return plan_; }
  const Eigen::VectorXd& tail() const { return tail_; }
  const Eigen::VectorXd& tail_convolution_values() const { return tail_conv_; }

  /// K(w̄ + w₀T) for given w̄, w₀.
  Eigen::VectorXcd convolve(const Eigen::VectorXcd& w_bar, cd w0) const {
    Eigen::VectorXcd out(w_bar.size());
    out.real() = conv_ * w_bar.real();
    out.imag() = conv_ * w_bar.imag();
    return out + w0 * tail_conv_.cast<cd>();
  }

  /// Residual with the node values w as unknowns, using rotation offset mu.
  Eigen::VectorXcd residual(const Eigen::VectorXcd& w, double mu) const {
    Eigen::VectorXcd out(w.size());
    out.real() = full_ * w.real();
    out.imag() = full_ * w.imag();
    const cd beta = beta_for(mu);
    for (int k = 0; k < w.size(); ++k) {
      out[k] += beta * w[k] + problem_.a * std::norm(w[k]) * w[k];
      if (problem_.hot) out[k] += problem_.hot(w[k]);
    }
    return out;
  }

  cd beta_for(double mu) const {
    return problem_.lambda_c + cd(0.0, problem_.rotation_sign * (problem_.mu_star + mu) * problem_.n0);
  }

  /// Real 2N×2N Jacobian of residual() in (Re w, Im w) ordering.
  Eigen::MatrixXd jacobian(const Eigen::VectorXcd& w, double mu) const {
    const int N = static_cast<int>(w.size());
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    j.topLeftCorner(N, N) = full_;
    j.bottomRightCorner(N, N) = full_;
    const cd beta = beta_for(mu);
    for (int k = 0; k < N; ++k) {
      // ∂/∂x and ∂/∂y of the pointwise part at w_k = x + iy.
      const cd a = problem_.a;
      cd dx = beta + a * (2.0 * std::norm(w[k]) + w[k] * w[k]);
      cd dy = cd(0, 1) * beta + a * (2.0 * std::norm(w[k]) * cd(0, 1) - cd(0, 1) * w[k] * w[k]);
      if (problem_.hot) {
        const double h = 1e-7 * (1.0 + std::abs(w[k]));
        dx += (problem_.hot(w[k] + h) - problem_.hot(w[k] - h)) / (2 * h);
        dy += (problem_.hot(w[k] + cd(0, h)) - problem_.hot(w[k] - cd(0, h))) / (2 * h);
      }
      j(k, k) += dx.real();
      j(k, N + k) += dy.real();
      j(N + k, k) += dx.imag();
      j(N + k, N + k) += dy.imag();
    }
    return j;
  }

  /// Real form of the symbol-inverse preconditioner P = P_n⁻¹ diag(1/(K̂+β)) P_n.
  Eigen::MatrixXd preconditioner(double mu) const {
    const int N = plan_->size();
    const cd beta = beta_for(mu);
    const double floor = 1e-12 * std::max(1.0, std::abs(beta));
    Eigen::VectorXd re(N), im(N);
    for (int k = 0; k < N; ++k) {
      const cd s = kh_[k] + beta;
      if (std::abs(s) <= floor) {
        std::ostringstream msg;
        msg << "preconditioner symbol vanishes at rho = " << plan_->frequencies()[k] << " for beta = " << beta.real()
            << (beta.imag() < 0 ? "" : "+") << beta.imag() << "i";
        throw SingularOperatorError(msg.str(), plan_->frequencies()[k]);
      }
      re[k] = (1.0 / s).real();
      im[k] = (1.0 / s).imag();
    }
    const auto& t = plan_->transform_matrix();
    const Eigen::MatrixXd pr = d_.cwiseInverse().asDiagonal() * (t * re.asDiagonal() * t) * d_.asDiagonal();
    const Eigen::MatrixXd pi = d_.cwiseInverse().asDiagonal() * (t * im.asDiagonal() * t) * d_.asDiagonal();
    Eigen::MatrixXd p(2 * N, 2 * N);
    p << pr, -pi, pi, pr;
    return p;
  }

 private:
  ReducedProblem problem_;
  PlanPtr plan_;
  Eigen::MatrixXd conv_, full_;
  Eigen::VectorXd tail_, tail_conv_, d_, kh_;
};

/// K̃ ∗ w + βw + a|w|²w + h(w) at the plan nodes, with the bounded tail
/// convolved separately.
inline RadialProfile reduced_residual(const ReducedProblem& p, const ProfileSolution& w) {
  if (!w.plan) throw ShapeError("profile has no plan");
  hankel::detail::check(w.w_decaying, hankel::Domain::Radius);
  const ReducedOperator op(p, w.plan);
  const int N = w.plan->size();
  Eigen::VectorXcd wb(N);
  for (int k = 0; k < N; ++k) wb[k] = w.w_decaying.values[k];
  const Eigen::VectorXcd kw = op.convolve(wb, w.w_const);
  const cd beta = op.beta_for(w.mu);
  const auto full = w.node_values();
  RadialProfile out = RadialProfile::zeros(w.plan);
  for (int k = 0; k < N; ++k) {
    out.values[k] = kw[k] + beta * full[k] + p.a * std::norm(full[k]) * full[k];
    if (p.hot) out.values[k] += p.hot(full[k]);
  }
  return out;
}

enum class InitKind { Zero, TanhFront, Given };

struct Init {
  InitKind kind = InitKind::Zero;
  double amplitude = 1.0;
  double width = 1.0;
  std::vector<cd> given;  // node values w

  static Init zero() { return {}; }
  static Init tanh_front(double amplitude, double width) { return {InitKind::TanhFront, amplitude, width, {}}; }
  static Init from_values(std::vector<cd> w) { return {InitKind::Given, 1.0, 1.0, std::move(w)}; }
};

/// Supercritical far-field amplitude √(−Re λ_c / Re a).
inline double balance_amplitude(const ReducedProblem& p) {
  const double r = -p.lambda_c.real() / p.a.real();
  if (!(r > 0.0)) throw RangeError("no supercritical amplitude balance: -Re(lambda_c)/Re(a) <= 0");
  return std::sqrt(r);
}

/// μ* balancing the rotation term against the far-field frequency shift of a
/// constant-amplitude state (used as the default rotation in tests and CLI).
inline double balance_mu_star(const ReducedProblem& p) {
  if (p.n0 == 0) throw RangeError("rotation balance needs n0 != 0");
  const double amp2 = balance_amplitude(p) * balance_amplitude(p);
  return -(p.lambda_c.imag() + p.a.imag() * amp2) / (p.rotation_sign * p.n0);
}

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 50;
  /// Treat μ as an extra unknown fixed by the rotation balance.
  bool free_rotation = false;
};

namespace detail {

inline ProfileSolution package(const ReducedOperator& op, const Eigen::VectorXcd& w, double mu) {
  const auto& plan = op.plan();
  const int N = plan->size();
  ProfileSolution s;
  s.plan = plan;
  s.w_const = w[N - 1] / op.tail()[N - 1];
  s.w_decaying = RadialProfile::zeros(plan);
  for (int k = 0; k < N; ++k) s.w_decaying.values[k] = w[k] - s.w_const * op.tail()[k];
  s.mu = mu;
  return s;
}

inline double sup(const Eigen::VectorXcd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace detail

/// Damped Newton with symbol-inverse preconditioning and a phase condition
/// Im⟨w_k, w⟩ = 0 against the current iterate to remove the gauge direction.
inline ProfileSolution solve_profile(const ReducedProblem& p, PlanPtr plan, const Init& init,
                                     const SolveOptions& opt = {}) {
  const ReducedOperator op(p, plan);
  const int N = plan->size();
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(N);
  switch (init.kind) {
    case InitKind::Zero:
      break;
    case InitKind::TanhFront:
      for (int k = 0; k < N; ++k) {
        const double t = std::tanh(plan->nodes()[k] / init.width);
        w[k] = init.amplitude * (p.n0 == 0 ? t : std::pow(t, std::abs(p.n0)));
      }
      break;
    case InitKind::Given:
      if (static_cast<int>(init.given.size()) != N) throw ShapeError("initial profile length does not match plan");
      for (int k = 0; k < N; ++k) w[k] = init.given[k];
      break;
  }
  double mu = p.mu;
  const Eigen::MatrixXd precond = op.preconditioner(mu);
  const auto weights = plan->weights();

  std::vector<double> history;
  Eigen::VectorXcd f = op.residual(w, mu);
  double res = detail::sup(f);
  history.push_back(res);
  auto merit = [&](const Eigen::VectorXcd& r, double m) {
    Eigen::VectorXd rr(2 * N);
    rr << r.real(), r.imag();
    const Eigen::MatrixXd pm = opt.free_rotation ? op.preconditioner(m) : precond;
    return (pm * rr).norm();
  };

  int it = 0;
  while (res > opt.tol) {
    if (it >= opt.max_iter) {
      std::ostringstream msg;
      msg << "Newton did not converge in " << opt.max_iter << " iterations (residual " << res << ")";
      throw MaxIterationsError(msg.str());
    }
    const Eigen::MatrixXd pm = opt.free_rotation ? op.preconditioner(mu) : precond;
    const Eigen::MatrixXd jac = pm * op.jacobian(w, mu);
    Eigen::VectorXd rr(2 * N);
    rr << f.real(), f.imag();
    const Eigen::VectorXd rhs_top = -(pm * rr);

    const bool gauge = w.norm() > 0.0;
    const int cols = 2 * N + (opt.free_rotation ? 1 : 0);
    const int rows = 2 * N + (gauge ? 1 : 0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
    a.topLeftCorner(2 * N, 2 * N) = jac;
    b.head(2 * N) = rhs_top;
    if (opt.free_rotation) {
      Eigen::VectorXd dmu(2 * N);
      const cd s(0.0, p.rotation_sign * p.n0);
      for (int k = 0; k < N; ++k) {
        dmu[k] = (s * w[k]).real();
        dmu[N + k] = (s * w[k]).imag();
      }
      a.col(2 * N).head(2 * N) = pm * dmu;
    }
    if (gauge) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(cols);
      for (int k = 0; k < N; ++k) {
        row[k] = -weights[k] * w[k].imag();
        row[N + k] = weights[k] * w[k].real();
      }
      a.row(2 * N) = row.transpose() / row.norm();
    }
    const Eigen::VectorXd step = a.colPivHouseholderQr().solve(b);
    Eigen::VectorXcd dw(N);
    for (int k = 0; k < N; ++k) dw[k] = cd(step[k], step[N + k]);
    const double dmu_step = opt.free_rotation ? step[2 * N] : 0.0;

    const double m0 = merit(f, mu);
    double t = 1.0;
    Eigen::VectorXcd w_try, f_try;
    double mu_try = mu;
    for (;;) {
      w_try = w + t * dw;
      mu_try = mu + t * dmu_step;
      f_try = op.residual(w_try, mu_try);
      if (merit(f_try, mu_try) <= (1.0 - 1e-4 * t) * m0 || t <= std::ldexp(1.0, -10)) break;
      t *= 0.5;
    }
    w = w_try;
    mu = mu_try;
    f = f_try;
    res = detail::sup(f);
    if (!std::isfinite(res)) throw DivergenceError("Newton iterate became non-finite");
    history.push_back(res);
    ++it;
  }
  ProfileSolution s = detail::package(op, w, mu);
  s.residual_norm = res;
  s.iterations = it;
  s.residual_history = std::move(history);
  return s;
}

/// Wave speed c = c* + ε²μ̄ with μ̄ = −s(μ* + μ).
inline double wave_speed(const normalform::HopfData& hopf, const ReducedProblem& p, double mu, double eps) {
  return hopf.c_star - eps * eps * p.rotation_sign * (p.mu_star + mu);
}

/// Dense table of w(R) on [0, Rmax] for cheap off-node evaluation.
class ProfileTable {
 public:
  explicit ProfileTable(const ProfileSolution& s, int oversample = 16) : n_(s.plan->order()), w0_(s.w_const) {
    const int m = oversample * s.plan->size();
    r_max_ = s.plan->r_max();
    dr_ = r_max_ / m;
    std::vector<double> r(m + 1);
    for (int j = 0; j <= m; ++j) r[j] = j * dr_;
    r[m] = r_max_;
    bar_ = hankel::interpolate(s.w_decaying, r);
  }

  double r_max() const { return r_max_; }

  cd operator()(double R) const {
    if (!(R >= 0.0) || R > r_max_ * (1 + 1e-12)) throw RangeError("profile evaluated beyond Rmax");
    // four-point Lagrange on the uniform table
    const int m = static_cast<int>(bar_.size()) - 1;
    const double x = R / dr_;
    int j = std::clamp(static_cast<int>(std::floor(x)) - 1, 0, m - 3);
    const double t = x - j;
    const double l0 = -(t - 1) * (t - 2) * (t - 3) / 6.0, l1 = t * (t - 2) * (t - 3) / 2.0,
                 l2 = -t * (t - 1) * (t - 3) / 2.0, l3 = t * (t - 1) * (t - 2) / 6.0;
    const cd bar = l0 * bar_[j] + l1 * bar_[j + 1] + l2 * bar_[j + 2] + l3 * bar_[j + 3];
    return bar + w0_ * tail_shape(n_, R);
  }

 private:
  int n_;
  cd w0_;
  double r_max_ = 0.0, dr_ = 0.0;
  std::vector<cd> bar_;
};

/// U = εU₁ + ε²U₂ on the n×n grid of half-width L, with
/// U₁ = W₁w e^{in₀θ} + c.c. and U₂ = V₁w²e^{2in₀θ} + V₀|w|² + V₋₁w̄²e^{−2in₀θ}.
inline FieldState reconstruct(const normalform::HopfData& hopf, const normalform::NormalFormCoefficients& nf,
                              const ProfileSolution& sol, double eps, int n, double half_width) {
  if (!(eps > 0.0)) throw RangeError("eps must be positive");
  if (std::sqrt(2.0) * half_width * eps > sol.plan->r_max() * (1 + 1e-12)) {
    throw RangeError("grid corner radius exceeds Rmax/eps");
  }
  const ProfileTable table(sol);
  const int n0 = hopf.n0;
  FieldState s;
  s.u = RealField(n, half_width);
  s.v = RealField(n, half_width);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = s.u.x(j), y = s.u.y(i);
      const cd w = table(eps * std::hypot(x, y));
      const cd e = std::polar(1.0, n0 * std::atan2(y, x));
      normalform::Vec2 u{};
      for (int c = 0; c < 2; ++c) {
        const cd u1 = hopf.w1[c] * w * e;
        const cd u2 = nf.v1[c] * w * w * e * e + nf.v0[c] * std::norm(w) + nf.vm1[c] * std::conj(w * w * e * e);
        u[c] = eps * (u1 + std::conj(u1)) + eps * eps * u2;
      }
      s.u(i, j) = u[0].real();
      s.v(i, j) = u[1].real();
    }
  return s;
}

/// Multiplies both components by a C^∞ radial window that is 1 for
/// |x| ≤ lo·L and 0 for |x| ≥ hi·L. A profile with a constant tail winds
/// around the box and jumps across the periodic seam; without the window that
/// jump pollutes every spectral derivative.
inline void radial_taper(FieldState& s, double lo, double hi) {
  if (!(0.0 < lo && lo < hi)) throw RangeError("taper needs 0 < lo < hi");
  const double L = s.u.half_width();
  for (int i = 0; i < s.u.n(); ++i)
    for (int j = 0; j < s.u.n(); ++j) {
      const double r = std::hypot(s.u.x(j), s.u.y(i)) / L;
      const double w = r <= lo ? 1.0 : r >= hi ? 0.0 : 1.0 - detail::smooth_step((r - lo) / (hi - lo));
      s.u(i, j) *= w;
      s.v(i, j) *= w;
    }
}

struct SteadyResidual {
  double sup_norm = 0.0;
  double l2_norm = 0.0;
  RealField field;  // pointwise Euclidean norm of the residual vector
  FieldState components;
};

/// K ∗ U − c ∂_θU + F(U;λ), with K acting on the components selected by
/// `kernel_mask`; norms over the disk |x| ≤ mask_fraction·L.
inline SteadyResidual steady_residual(const normalform::ReactionModel& model, const kernel::KernelSymbol& sym, double c,
                                      const FieldState& state, double lambda,
                                      std::array<bool, 2> kernel_mask = {true, false}, double mask_fraction = 0.8) {
  if (!state.u.same_shape(state.v)) throw ShapeError("u and v grids differ");
  const auto cu = fft::to_complex(state.u), cv = fft::to_complex(state.v);
  const std::array<const ComplexField*, 2> comp{&cu, &cv};
  std::array<ComplexField, 2> lin;
  for (int q = 0; q < 2; ++q) {
    const auto rot = fft::angular_derivative(*comp[q]);
    ComplexField acc(cu.n(), cu.half_width());
    if (kernel_mask[q]) acc = fft::apply_radial_multiplier(*comp[q], [&](double k) { return cd(sym(k), 0.0); });
    for (std::size_t k = 0; k < acc.data().size(); ++k) acc.data()[k] -= c * rot.data()[k];
    lin[q] = std::move(acc);
  }
  SteadyResidual out;
  const int n = state.u.n();
  const double L = state.u.half_width();
  out.field = RealField(n, L);
  out.components.t = state.t;
  out.components.u = RealField(n, L);
  out.components.v = RealField(n, L);
  double l2 = 0.0;
  const double h2 = state.u.spacing() * state.u.spacing();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto f = model.f({state.u(i, j), state.v(i, j)}, lambda);
      const double ru = lin[0](i, j).real() + f[0];
      const double rv = lin[1](i, j).real() + f[1];
      out.components.u(i, j) = ru;
      out.components.v(i, j) = rv;
      const double mag = std::hypot(ru, rv);
      out.field(i, j) = mag;
      if (std::hypot(state.u.x(j), state.u.y(i)) <= mask_fraction * L) {
        out.sup_norm = std::max(out.sup_norm, mag);
        l2 += mag * mag * h2;
      }
    }
  out.l2_norm = std::sqrt(l2);
  return out;
}

}  // namespace nloc::rotwave
