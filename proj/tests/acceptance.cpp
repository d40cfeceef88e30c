// Acceptance suite. Prints one PASS/FAIL line per criterion.
//   acceptance          run all criteria
//   acceptance 3 7      run criteria 3 and 7
// Exit status is nonzero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "nloc/cli.hpp"

using namespace nloc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string sci(double x) { return fmt("%.2e", x); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(cd got, cd want) { return want == cd(0) ? std::abs(got) : std::abs(got - want) / std::abs(want); }

double rel(const normalform::Vec2& got, const normalform::Vec2& want) {
  const double n = std::hypot(std::abs(want[0]), std::abs(want[1]));
  const double d = std::hypot(std::abs(got[0] - want[0]), std::abs(got[1] - want[1]));
  return n == 0.0 ? d : d / n;
}

// ---- 1 ----
Outcome normal_form_oracle() {
  constexpr cd I(0.0, 1.0);
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> ut(0.1, 2.0), ub(0.5, 4.0), ud(-0.5, 0.5);
  double e_a1 = 0, e_a2 = 0, e_v0 = 0, e_v1 = 0, e_vm1 = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const normalform::FhnParameters p{ut(rng), ub(rng), ud(rng)};
    const double tau = p.tau, beta = p.beta, us = p.u_star(), s = std::sqrt(beta * tau);
    const auto m = normalform::fhn_model(p);
    const auto h = normalform::hopf_data(m, 1);
    const auto c = normalform::coefficients(m, h);
    const double k = us / (tau * tau);
    e_a1 = std::max(e_a1, rel(c.a1, 6.0 * us * us / (tau * tau * tau) * (3.0 - I / s)));
    e_a2 = std::max(e_a2, rel(c.a2, -3.0 / (2.0 * tau * tau * tau)));
    e_v0 = std::max(e_v0, rel(c.v0, {k * -6.0, 0.0}));
    e_v1 = std::max(e_v1, rel(c.v1, {k * 2.0 * I / s, k}));
    e_vm1 = std::max(e_vm1, rel(c.vm1, {-k * 2.0 * I / s, k}));
  }
  Outcome o;
  o.require(e_a1 <= 1e-12, "a1 rel " + sci(e_a1));
  o.require(e_a2 <= 1e-12, "a2 rel " + sci(e_a2));
  o.require(e_v0 <= 1e-12, "V0 rel " + sci(e_v0));
  o.require(e_v1 <= 1e-12, "V1 rel " + sci(e_v1));
  o.require(e_vm1 <= 1e-12, "V-1 rel " + sci(e_vm1));
  return o;
}

// ---- 2 ----
Outcome eigen_structure() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(0.1, 2.0), ub(0.5, 4.0), ud(-0.5, 0.5);
  double e_omega = 0, e_pair = 0, e_zero = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const normalform::FhnParameters p{ut(rng), ub(rng), ud(rng)};
    const auto m = normalform::fhn_model(p);
    for (int n0 : {1, 2, 3}) {
      const auto h = normalform::hopf_data(m, n0);
      e_omega = std::max(e_omega, std::abs(h.omega - std::sqrt(p.beta / p.tau)) / h.omega);
      e_pair = std::max(e_pair, std::abs(normalform::pair(h.w1_star, h.w1) - 1.0));
      const auto b = normalform::mode_matrix(h, m.a0, n0);
      const double smallest = std::min(std::abs(b.eigenvalues[0]), std::abs(b.eigenvalues[1]));
      e_zero = std::max(e_zero, smallest);
    }
  }
  Outcome o;
  o.require(e_omega <= 1e-12, "omega rel " + sci(e_omega));
  o.require(e_pair <= 1e-12, "<W1*,W1>-1 " + sci(e_pair));
  o.require(e_zero <= 1e-12, "min |eig B_n0| " + sci(e_zero));
  return o;
}

// ---- 3 ----
Outcome hankel_fidelity() {
  double e0 = 0, e1 = 0;
  const auto p0 = hankel::make_plan(0, 10.0, 256), p1 = hankel::make_plan(1, 10.0, 256);
  const auto g0 = hankel::hankel_forward(hankel::RadialProfile::sample(p0, [](double r) { return std::exp(-r * r / 2); }));
  const auto g1 =
      hankel::hankel_forward(hankel::RadialProfile::sample(p1, [](double r) { return r * std::exp(-r * r / 2); }));
  for (int k = 0; k < 256; ++k) {
    const double r0 = p0->frequencies()[k], r1 = p1->frequencies()[k];
    e0 = std::max(e0, std::abs(g0.values[k] - std::exp(-r0 * r0 / 2)));
    e1 = std::max(e1, std::abs(g1.values[k] - cd(0.0, -r1 * std::exp(-r1 * r1 / 2))));
  }
  double orth = 0;
  for (const auto& p : {p0, p1}) {
    const auto& t = p->transform_matrix();
    orth = std::max(orth, (t * t - Eigen::MatrixXd::Identity(256, 256)).cwiseAbs().maxCoeff());
  }
  Outcome o;
  o.require(e0 <= 1e-6, "n=0 Gaussian sup " + sci(e0));
  o.require(e1 <= 1e-6, "n=1 Gaussian sup " + sci(e1));
  o.require(orth <= 1e-8, "forward*inverse - I " + sci(orth));
  return o;
}

// ---- 4 ----
Outcome diagonalization() {
  const auto sym = kernel::validate(kernel::KernelSymbol::rational(5.0, 0.5));
  const int grid = 512;
  const double L = 24.0;
  Outcome o;
  for (int n : {0, 1, 2}) {
    const auto plan = hankel::make_plan(n, 16.0, 192);
    auto g = [n](double r) { return std::pow(r, n) * std::exp(-r * r / 2); };
    const auto rc = hankel::radial_convolve(sym, hankel::RadialProfile::sample(plan, [&](double r) { return cd(g(r), 0); }));
    const auto f = ComplexField::sample(grid, L, [&](double x, double y) {
      return g(std::hypot(x, y)) * std::polar(1.0, n * std::atan2(y, x));
    });
    const auto kf = fft::apply_radial_multiplier(f, [&](double k) { return cd(sym(k), 0.0); });
    std::vector<double> radii;
    for (int k = 0; k < plan->size() && plan->nodes()[k] <= L / 2; ++k) radii.push_back(plan->nodes()[k]);
    const auto dec = modes::decompose_angular(kf, std::max(n, 1), radii);
    double err = 0, scale = 0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
      err = std::max(err, std::abs(dec.mode(n)[k] - rc.values[k]));
      scale = std::max(scale, std::abs(rc.values[k]));
    }
    o.require(err <= 1e-5 * scale, "n=" + std::to_string(n) + " rel " + sci(err / scale));
  }
  return o;
}

// ---- 5 ----
Outcome symbol_bounds() {
  const std::vector<kernel::KernelSymbol> syms{kernel::validate(kernel::KernelSymbol::rational(5.0, 0.5)),
                                               kernel::validate(kernel::KernelSymbol::rational(1.0, 1.0)),
                                               kernel::validate(kernel::KernelSymbol::laplacian(1.0))};
  double worst = -1e300;
  for (const auto& sym : syms)
    for (double c : {-1.3, 0.4, 2.236})
      for (int n = 1; n <= 8; ++n) {
        const auto plan = hankel::make_plan(n, 10.0, 64);
        const int N = plan->size();
        Eigen::MatrixXcd m(N, N);
        for (int j = 0; j < N; ++j) {
          Eigen::VectorXcd e = Eigen::VectorXcd::Zero(N);
          e[j] = 1.0;
          hankel::RadialProfile f{plan, hankel::detail::from_unitary_radius(*plan, e), hankel::Domain::Radius, false};
          m.col(j) = hankel::detail::to_unitary_radius(hankel::solve_mode_operator(sym, cd(0.0, c * n), f));
        }
        const double norm = Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues()[0];
        worst = std::max(worst, norm - 1.0 / std::abs(c * n));
      }
  Outcome o;
  o.require(worst <= 1e-10, "max(||L^-1|| - 1/|cn|) " + sci(worst));
  return o;
}

// ---- 6 ----
Outcome rescaling_identity() {
  Outcome o;
  const std::vector<kernel::KernelSymbol> syms{kernel::validate(kernel::KernelSymbol::rational(5.0, 0.5)),
                                               kernel::validate(kernel::KernelSymbol::rational(1.0, 1.0))};
  double worst = 0;
  for (const auto& sym : syms)
    for (double eps : {0.5, 0.25})
      for (int n : {0, 1, 2}) {
        // nodes of the wide plan are the narrow plan's nodes divided by ε
        const double R = 12.0;
        auto u = [n](double x) { return std::pow(x, n) * std::exp(-x * x / 2); };
        const auto wide = hankel::make_plan(n, R / eps, 256), narrow = hankel::make_plan(n, R, 256);
        const auto lhs = hankel::radial_convolve(sym, hankel::RadialProfile::sample(wide, [&](double r) { return cd(u(eps * r), 0); }));
        const auto rhs = hankel::radial_convolve(kernel::validate(kernel::rescale(sym, eps)),
                                                 hankel::RadialProfile::sample(narrow, [&](double r) { return cd(u(r), 0); }));
        double err = 0, scale = 0, node = 0;
        for (int k = 0; k < 256; ++k) {
          err = std::max(err, std::abs(lhs.values[k] - eps * eps * rhs.values[k]));
          scale = std::max(scale, std::abs(lhs.values[k]));
          node = std::max(node, std::abs(wide->nodes()[k] * eps - narrow->nodes()[k]));
        }
        worst = std::max(worst, err / scale);
        if (node > 1e-9) o.require(false, "node mismatch " + sci(node));
      }
  o.require(worst <= 1e-5, "sup rel " + sci(worst));
  return o;
}

// Finite-difference oracle for α(w'' + w'/R) + λw − w³ = 0, w'(0) = 0, w(rb) = 1.
std::vector<double> fd_front(double rb, double h) {
  const int m = static_cast<int>(std::lround(rb / h));
  std::vector<double> w(m + 1, 1.0);
  for (int it = 0; it < 50; ++it) {
    std::vector<double> a(m, 0), b(m, 0), c(m, 0), d(m, 0);
    double res = 0;
    for (int j = 0; j < m; ++j) {
      double F, dw, dl = 0, dr;
      if (j == 0) {
        F = 4 * (w[1] - w[0]) / (h * h) + w[0] - w[0] * w[0] * w[0];
        dw = -4 / (h * h) + 1 - 3 * w[0] * w[0];
        dr = 4 / (h * h);
      } else {
        const double r = j * h;
        F = (w[j + 1] - 2 * w[j] + w[j - 1]) / (h * h) + (w[j + 1] - w[j - 1]) / (2 * h * r) + w[j] - w[j] * w[j] * w[j];
        dw = -2 / (h * h) + 1 - 3 * w[j] * w[j];
        dl = 1 / (h * h) - 1 / (2 * h * r);
        dr = 1 / (h * h) + 1 / (2 * h * r);
      }
      res = std::max(res, std::abs(F));
      a[j] = dl;
      b[j] = dw;
      c[j] = j + 1 < m ? dr : 0.0;
      d[j] = -F;
    }
    for (int j = 1; j < m; ++j) {
      const double q = a[j] / b[j - 1];
      b[j] -= q * c[j - 1];
      d[j] -= q * d[j - 1];
    }
    std::vector<double> x(m);
    x[m - 1] = d[m - 1] / b[m - 1];
    for (int j = m - 1; j-- > 0;) x[j] = (d[j] - c[j] * x[j + 1]) / b[j];
    for (int j = 0; j < m; ++j) w[j] += x[j];
    if (res < 1e-12) break;
  }
  return w;
}

// ---- 7 ----
Outcome reduced_solve() {
  Outcome o;
  {
    rotwave::ReducedProblem p;
    p.sym_rescaled = kernel::validate(kernel::KernelSymbol::laplacian(1.0));
    p.lambda_c = 1.0;
    p.a = -1.0;
    p.n0 = 0;
    const auto plan = hankel::make_plan(0, 30.0, 256);
    rotwave::SolveOptions opt;
    opt.tol = 1e-8;
    const auto s = rotwave::solve_profile(p, plan, rotwave::Init::tanh_front(1.0, 1.0), opt);
    const double h = 0.01;
    const auto fd = fd_front(30.0, h);
    const auto w = s.node_values();
    double err = 0;
    for (int k = 0; k < plan->size(); ++k) {
      const double x = plan->nodes()[k] / h;
      const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(x), fd.size() - 2);
      const double t = x - j;
      err = std::max(err, std::abs(std::abs(w[k]) - ((1 - t) * fd[j] + t * fd[j + 1])));
    }
    o.require(s.residual_norm <= 1e-8, "GL front residual " + sci(s.residual_norm));
    o.require(err <= 1e-4, "GL vs FD sup " + sci(err));
  }
  {
    const auto model = normalform::fhn_model({0.2, 1.0, 0.1});
    const auto hopf = normalform::hopf_data(model, 1);
    const auto nf = normalform::coefficients(model, hopf);
    const auto sym = kernel::validate(kernel::rescale(kernel::validate(kernel::KernelSymbol::rational(5.0, 0.5)), 0.1));
    auto p = rotwave::scaled_problem(sym, nf.nu1, 1.0, 0.0, 1, nf.a());
    p.mu_star = rotwave::balance_mu_star(p);
    rotwave::SolveOptions opt;
    opt.tol = 1e-10;
    opt.free_rotation = true;
    const auto s = rotwave::solve_profile(p, hankel::make_plan(1, 30.0, 256),
                                          rotwave::Init::tanh_front(rotwave::balance_amplitude(p), 1.5), opt);
    const auto& r = s.residual_history;
    constexpr double kC = 50.0;
    bool quad = r.size() >= 3;
    double worst = 0;
    for (std::size_t k = r.size() >= 3 ? r.size() - 3 : 0; k + 1 < r.size(); ++k) {
      worst = std::max(worst, r[k + 1] / (r[k] * r[k]));
      if (r[k + 1] > kC * r[k] * r[k]) quad = false;
    }
    o.require(s.residual_norm <= 1e-10, "FHN residual " + sci(s.residual_norm));
    o.require(quad, "FHN tail max r_{k+1}/r_k^2 " + fmt("%.1f", worst) + " (C = 50)");
  }
  return o;
}

// ---- 8 ----
Outcome scaling_shadow() {
  const auto model = normalform::fhn_model({0.25, 1.0, 0.1});
  const auto hopf = normalform::hopf_data(model, 1);
  const auto nf = normalform::coefficients(model, hopf);
  const auto sym = kernel::validate(kernel::KernelSymbol::rational(1.0, 1.0));
  const auto plan = hankel::make_plan(1, 18.0, 128);
  rotwave::ProfileSolution s;
  s.plan = plan;
  s.w_decaying = hankel::RadialProfile::sample(plan, [](double r) { return cd(1.0, 0.3) * r * std::exp(-r * r / 4); });
  auto sup_at = [&](double eps) {
    const auto st = rotwave::reconstruct(hopf, nf, s, eps, 128, 12.0 / eps);
    return rotwave::steady_residual(model, sym, hopf.c_star, st, eps * eps * 0.5).sup_norm;
  };
  Outcome o;
  for (double eps : {0.1, 0.05}) {
    const double ratio = sup_at(eps) / sup_at(eps / 2);
    o.require(ratio >= 6.0 && ratio <= 10.0, "ratio(" + fmt("%g", eps) + ") " + fmt("%.2f", ratio));
  }
  return o;
}

// ---- 9 ----
simulate::SimConfig recipe(const std::string& name, double& coherence_radius) {
  const auto doc = toml::parse_file(std::string(NLOC_SOURCE_DIR) + "/configs/" + name);
  const auto& t = doc.table("simulate");
  coherence_radius = t.number("coherence_radius", 3.0);
  return cli::detail::sim_config(t);
}

Outcome pattern_phenomenology() {
  Outcome o;
  {
    const auto t0 = std::chrono::steady_clock::now();
    simulate::RunOptions opt;
    const auto cfg = recipe("spiral.toml", opt.coherence_radius);
    const auto r = simulate::run(cfg, opt);
    const double wall = seconds_since(t0);
    const auto& last = r.diagnostics.back();
    bool unit = !last.cores.empty();
    for (const auto& c : last.cores) unit = unit && std::abs(c.winding) == 1;
    const std::size_t m = r.diagnostics.size();
    double lo = 1e300, hi = 0, mean = 0;
    for (std::size_t k = m - 3; k < m; ++k) {
      const double p = r.diagnostics[k].period_estimate;
      lo = std::min(lo, p);
      hi = std::max(hi, p);
      mean += p / 3;
    }
    const bool stable = m >= 4 && lo > 0 && hi <= 1.05 * mean && lo >= 0.95 * mean;
    o.require(unit, "d=0.5: " + std::to_string(last.cores.size()) + " cores, all |winding|=1");
    o.require(stable, "period " + fmt("%.3f", lo) + ".." + fmt("%.3f", hi) + " (±5% of mean)");
    o.require(wall <= 300.0, fmt("%.0f s", wall));
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    simulate::RunOptions opt;
    const auto cfg = recipe("chimera.toml", opt.coherence_radius);
    const auto r = simulate::run(cfg, opt);
    const double wall = seconds_since(t0);
    const auto& coh = r.diagnostics.back().coherence.data();
    const auto [lo, hi] = std::minmax_element(coh.begin(), coh.end());
    o.require(!coh.empty() && *hi >= 0.8 && *lo <= 0.4,
              "d=1: coherence " + fmt("%.3f", coh.empty() ? 0 : *lo) + ".." + fmt("%.3f", coh.empty() ? 0 : *hi));
    o.require(wall <= 300.0, fmt("%.0f s", wall));
  }
  return o;
}

// ---- 10 ----
Outcome property_suites() {
  Outcome o;
  simulate::SimConfig c;
  c.n = 64;
  c.half_width = 16.0;
  c.dt = 0.02;
  c.t_end = 10.0;
  c.snapshot_every = 100;
  c.kernel = kernel::validate(kernel::KernelSymbol::rational(5.0, 0.5));
  {
    const auto a = simulate::run(c), b = simulate::run(c);
    bool same = a.snapshots.size() == b.snapshots.size();
    for (std::size_t k = 0; same && k < a.snapshots.size(); ++k) {
      const auto &x = a.snapshots[k], &y = b.snapshots[k];
      same = std::memcmp(x.u.data().data(), y.u.data().data(), x.u.data().size() * sizeof(double)) == 0 &&
             std::memcmp(x.v.data().data(), y.v.data().data(), x.v.data().size() * sizeof(double)) == 0;
    }
    o.require(same, "determinism bitwise");
  }
  {
    simulate::Integrator it(c);
    it.load(simulate::initial_state(c));
    for (int k = 0; k < c.steps(); ++k) it.step();
    const auto s = it.state();
    // spectral propagator on the full complex grid must return a real field
    const auto cu = fft::to_complex(s.u), cv = fft::to_complex(s.v);
    fft::Fft2d plan(c.n);
    std::vector<cd> us, vs, uo, vo;
    plan.forward(cu.data(), us);
    plan.forward(cv.data(), vs);
    const double dk = M_PI / c.half_width;
    std::vector<cd> nu(us.size()), nv(us.size());
    for (int a = 0; a < c.n; ++a)
      for (int b = 0; b < c.n; ++b) {
        const std::size_t k = std::size_t(a) * c.n + b;
        const double kk = dk * std::hypot(fft::wave_index(a, c.n), fft::wave_index(b, c.n));
        const auto m = simulate::mode_coefficients(simulate::linear_matrix(c.model, c.kernel(kk)), c.dt);
        nu[k] = m.e[0] * us[k] + m.e[1] * vs[k];
        nv[k] = m.e[2] * us[k] + m.e[3] * vs[k];
      }
    plan.inverse(nu, uo);
    plan.inverse(nv, vo);
    double im = 0;
    for (std::size_t k = 0; k < uo.size(); ++k) im = std::max({im, std::abs(uo[k].imag()), std::abs(vo[k].imag())});
    o.require(im <= 1e-12 && it.hermitian_defect() <= 1e-12,
              "reality imag " + sci(im) + ", hermitian defect " + sci(it.hermitian_defect()));
  }
  {
    rotwave::ReducedProblem p;
    p.sym_rescaled = kernel::validate(kernel::KernelSymbol::rational(1.0, 0.2));
    p.lambda_c = 1.0;
    p.a = cd(-1.0, 0.5);
    p.n0 = 2;
    p.mu_star = -0.3;
    const auto plan = hankel::make_plan(2, 10.0, 48);
    rotwave::ProfileSolution s;
    s.plan = plan;
    s.w_const = cd(0.3, 0.1);
    s.w_decaying = hankel::RadialProfile::sample(plan, [](double r) { return cd(r * r, r) * std::exp(-r * r / 2); });
    const double base = hankel::sup_norm(rotwave::reduced_residual(p, s));
    double dev = 0;
    for (double phi : {0.3, 1.7, -2.4}) {
      auto t = s;
      const cd e = std::polar(1.0, phi);
      t.w_const *= e;
      for (auto& v : t.w_decaying.values) v *= e;
      dev = std::max(dev, std::abs(hankel::sup_norm(rotwave::reduced_residual(p, t)) - base) / (1 + base));
    }
    o.require(dev <= 1e-12, "gauge " + sci(dev));
  }
  {
    const auto m = normalform::fhn_model({0.5, 1.0, 0.1});
    const auto h = normalform::hopf_data(m, 2);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    modes::AngularDecomposition u, v;
    u.n_max = v.n_max = 2;
    for (int k = 0; k < 20; ++k) u.radial_grid.push_back(0.2 * k);
    v.radial_grid = u.radial_grid;
    u.profiles.assign(5, std::vector<cd>(20));
    v.profiles = u.profiles;
    std::vector<cd> w(20);
    for (auto& x : w) x = {nd(rng), nd(rng)};
    for (int k = 0; k < 20; ++k) {
      u.mode(2)[k] = h.w1[0] * w[k];
      v.mode(2)[k] = h.w1[1] * w[k];
    }
    const auto pr = normalform::project_parallel(u, v, h);
    double dev = 0;
    for (int k = 0; k < 20; ++k) dev = std::max(dev, std::abs(pr.values[k] - w[k]) / (1 + std::abs(w[k])));
    o.require(dev <= 1e-12, "projection idempotence " + sci(dev));
  }
  {
    const double L = 16.0;
    std::vector<double> rg;
    for (int k = 0; k < 30; ++k) rg.push_back(0.5 + 13.5 * k / 29.0);
    auto field = [&](auto f) { return RealField::sample(128, L, f); };
    const auto d3 = modes::growth_bound_check(field([](double x, double y) { return std::pow(1 + x * x + y * y, -1.5); }), 1.0, rg);
    const auto ga = modes::growth_bound_check(field([](double x, double y) { return std::exp(-(x * x + y * y) / 2); }), 0.5, rg);
    const auto sl = modes::growth_bound_check(field([](double x, double y) { return std::pow(1 + x * x + y * y, -0.6); }), 1.0, rg);
    o.require(d3.monotone_tail && ga.monotone_tail && !sl.monotone_tail, "growth bound <x>^-3 / Gaussian / <x>^-1.2");
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget;  // seconds
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "normal-form oracle match", 1.0, normal_form_oracle},
      {2, "eigen-structure", 1.0, eigen_structure},
      {3, "Hankel fidelity", 10.0, hankel_fidelity},
      {4, "diagonalization oracle", 30.0, diagonalization},
      {5, "symbol bounds", 5.0, symbol_bounds},
      {6, "rescaling identity", 10.0, rescaling_identity},
      {7, "reduced-equation solve", 60.0, reduced_solve},
      {8, "scaling shadow", 120.0, scaling_shadow},
      {9, "pattern phenomenology", 600.0, pattern_phenomenology},
      {10, "property suites", 60.0, property_suites},
  };
  std::vector<int> pick;
  for (int k = 1; k < argc; ++k) pick.push_back(std::atoi(argv[k]));
  int failed = 0;
  for (const auto& c : all) {
    if (!pick.empty() && std::find(pick.begin(), pick.end(), c.id) == pick.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double wall = seconds_since(t0);
    if (wall > c.budget) o.require(false, "runtime budget " + fmt("%.0f s", c.budget));
    std::printf("%s criterion %2d  %-26s %6.2f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, wall, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
