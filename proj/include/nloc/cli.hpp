#pragma once

// Command-line front end. run_command() is the whole program minus main(), so
// tests can drive it in-process.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nloc/error.hpp"
#include "nloc/fft.hpp"
#include "nloc/hankel.hpp"
#include "nloc/heatmap.hpp"
#include "nloc/io.hpp"
#include "nloc/kernel.hpp"
#include "nloc/manifest.hpp"
#include "nloc/normalform.hpp"
#include "nloc/rotwave.hpp"
#include "nloc/simulate.hpp"
#include "nloc/toml.hpp"

namespace nloc::cli {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline json cplx(cd z) { return json::array({z.real(), z.imag()}); }
inline json vec(const normalform::Vec2& v) { return json::array({cplx(v[0]), cplx(v[1])}); }

inline std::string error_line(const std::string& kind, const std::string& message) {
  return json{{"error", kind}, {"message", message}}.dump();
}

inline kernel::KernelSymbol kernel_from(const toml::Table& t) {
  const std::string fam = t.string("kernel", "rational");
  kernel::KernelSymbol sym = kernel::KernelSymbol::laplacian(1.0);
  if (fam == "rational") {
    sym = kernel::KernelSymbol::rational(t.number("D"), t.number("d"));
  } else if (fam == "laplacian") {
    sym = kernel::KernelSymbol::laplacian(t.number("alpha"));
  } else if (fam == "tabulated") {
    if (t.has("table")) {
      sym = kernel::KernelSymbol::from_csv(t.string("table"));
    } else {
      sym = kernel::KernelSymbol::tabulated(t.numbers("rho"), t.numbers("values"));
    }
  } else {
    throw ConfigError("unknown kernel family '" + fam + "' (rational, laplacian, tabulated)");
  }
  return sym;
}

inline normalform::FhnParameters fhn_from(const toml::Table& t) {
  return {t.number("tau", 0.2), t.number("beta", 1.0), t.number("delta", 0.1)};
}

inline std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline void make_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "'");
}

inline void write_text(manifest::RunManifest& m, const std::string& path, const std::string& text) {
  io::write_file(path, text);
  m.add_output(path);
}

// Everything a reduced-equation solve needs, derived from one config table.
struct WaveSetup {
  normalform::FhnParameters params;
  normalform::ReactionModel model;
  normalform::HopfData hopf;
  normalform::NormalFormCoefficients nf;
  kernel::KernelSymbol sym = kernel::KernelSymbol::laplacian(1.0);
  rotwave::ReducedProblem problem;
  hankel::PlanPtr plan;
  rotwave::Init init = rotwave::Init::zero();
  rotwave::SolveOptions options;
  double lambda_bar = 1.0;
};

inline WaveSetup wave_setup(const toml::Table& t, double eps) {
  WaveSetup w;
  w.params = fhn_from(t);
  w.model = normalform::fhn_model(w.params);
  w.hopf = normalform::hopf_data(w.model, static_cast<int>(t.integer("n0", 1)));
  w.nf = normalform::coefficients(w.model, w.hopf);
  w.sym = kernel::validate(kernel_from(t));
  w.lambda_bar = t.number("lambda_bar", 1.0);
  const auto sym_eps = kernel::validate(kernel::rescale(w.sym, eps));
  const int sign = static_cast<int>(t.integer("rotation_sign", 1));
  // μ* defaults to the value that balances the constant far field
  auto probe = rotwave::scaled_problem(sym_eps, w.lambda_bar * w.nf.nu1, 1.0, 0.0, w.hopf.n0, w.nf.a(), sign);
  const double mu_star = t.number("mu_star", rotwave::balance_mu_star(probe));
  w.problem = rotwave::scaled_problem(sym_eps, w.lambda_bar * w.nf.nu1, mu_star, t.number("mu", 0.0), w.hopf.n0,
                                     w.nf.a(), sign);
  w.plan = hankel::make_plan(w.hopf.n0, t.number("r_max", 30.0), static_cast<int>(t.integer("N", 256)));
  const std::string init = t.string("init", "tanh");
  if (init == "tanh") {
    const double amp = t.has("init_amplitude") ? t.number("init_amplitude") : rotwave::balance_amplitude(w.problem);
    w.init = rotwave::Init::tanh_front(amp, t.number("init_width", 1.5));
  } else if (init != "zero") {
    throw ConfigError("unknown init '" + init + "' (tanh, zero)");
  }
  w.options.tol = t.number("tol", w.options.tol);
  w.options.max_iter = static_cast<int>(t.integer("max_iter", w.options.max_iter));
  w.options.free_rotation = t.boolean("free_rotation", false);
  return w;
}

inline simulate::SimConfig sim_config(const toml::Table& t) {
  simulate::SimConfig c;
  c.n = static_cast<int>(t.integer("n", c.n));
  c.half_width = t.number("half_width", c.half_width);
  c.dt = t.number("dt", c.dt);
  c.t_end = t.number("t_end", c.t_end);
  const std::string scheme = t.string("scheme", "etdrk4");
  if (scheme == "etdrk4") {
    c.scheme = simulate::Scheme::ETDRK4;
  } else if (scheme == "imex-euler") {
    c.scheme = simulate::Scheme::ImexEuler;
  } else {
    throw ConfigError("unknown scheme '" + scheme + "' (etdrk4, imex-euler)");
  }
  c.model = fhn_from(t);
  c.kernel = kernel::validate(kernel_from(t));
  c.seed = static_cast<std::uint64_t>(t.integer("seed", 1));
  const std::string ic = t.string("ic", "random");
  if (ic == "random") {
    c.ic.kind = simulate::IcKind::RandomPerturbation;
  } else if (ic == "cross-gradient") {
    c.ic.kind = simulate::IcKind::CrossGradient;
  } else if (ic == "file") {
    c.ic.kind = simulate::IcKind::File;
    c.ic.path = t.string("ic_path");
  } else {
    throw ConfigError("unknown ic '" + ic + "' (random, cross-gradient, file)");
  }
  c.ic.amplitude = t.number("ic_amplitude", c.ic.amplitude);
  c.snapshot_every = static_cast<int>(t.integer("snapshot_every", c.snapshot_every));
  c.nonlinear = t.boolean("nonlinear", true);
  return c;
}

// Builds a config document from command-line values so flag-driven commands
// hash the same way as config-driven ones.
inline toml::Document flags_document(const std::string& name, const std::vector<std::pair<std::string, toml::Value>>& kv) {
  toml::Document d;
  toml::Table t(name);
  for (const auto& [k, v] : kv) t.set(k, v);
  d.tables[name] = t;
  return d;
}

struct Context {
  std::ostream& out;
  std::string command;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  manifest::RunManifest m;

  void finish(const std::string& dir, const toml::Document& cfg) {
    m.command = command;
    m.config_hash = manifest::sha256_hex(cfg.canonical());
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m.write(path_in(dir, "manifest.json"));
  }
};

inline toml::Document load_config(const std::string& path) {
  if (path.empty()) throw UsageError("--config is required");
  return toml::parse_file(path);
}

// ---- subcommands ----

struct KernelArgs {
  std::string family = "rational", table;
  double D = 0.0, d = 0.0, alpha = 0.0, rho_max = 100.0, tol = 1e3;
  std::string out;
};

inline int cmd_validate_kernel(Context& ctx, const KernelArgs& a) {
  std::vector<std::pair<std::string, toml::Value>> kv{{"kernel", a.family}, {"rho_max", a.rho_max}, {"tol", a.tol}};
  if (a.family == "rational") {
    kv.push_back({"D", a.D});
    kv.push_back({"d", a.d});
  } else if (a.family == "laplacian") {
    kv.push_back({"alpha", a.alpha});
  } else if (a.family == "tabulated") {
    if (a.table.empty()) throw UsageError("--table is required for the tabulated family");
    kv.push_back({"table", a.table});
  }
  const auto cfg = flags_document("validate-kernel", kv);
  const auto& t = cfg.table("validate-kernel");
  const auto sym = kernel_from(t);
  const auto rep = kernel::validate_hypotheses(sym, a.rho_max, a.tol);
  json j{{"family", a.family},
         {"alpha_estimate", rep.alpha_estimate},
         {"zero_order_ok", rep.zero_order_ok},
         {"bounded_ok", rep.bounded_ok},
         {"symbol_sup", rep.symbol_sup},
         {"notes", rep.notes}};
  const auto valid = kernel::validate(sym, a.rho_max, a.tol);
  j["alpha"] = valid.alpha();
  ctx.out << j.dump() << "\n";
  if (!a.out.empty()) {
    make_dir(a.out);
    write_text(ctx.m, path_in(a.out, "kernel.json"), j.dump(2) + "\n");
    ctx.finish(a.out, cfg);
  }
  return 0;
}

struct NormalFormArgs {
  double tau = 0.2, beta = 1.0, delta = 0.1;
  int n0 = 1;
  std::string config, out;
};

inline json normal_form_report(const normalform::HopfData& h, const normalform::NormalFormCoefficients& c) {
  return {{"omega", h.omega}, {"c_star", h.c_star}, {"n0", h.n0},     {"W1", vec(h.w1)},  {"W1_star", vec(h.w1_star)},
          {"V1", vec(c.v1)},  {"V0", vec(c.v0)},    {"Vm1", vec(c.vm1)}, {"nu1", cplx(c.nu1)}, {"a1", cplx(c.a1)},
          {"a2", cplx(c.a2)}, {"a", cplx(c.a())}};
}

inline int cmd_normal_form(Context& ctx, const NormalFormArgs& a) {
  const auto cfg = a.config.empty() ? flags_document("normal-form", {{"tau", a.tau}, {"beta", a.beta},
                                                                     {"delta", a.delta}, {"n0", double(a.n0)}})
                                    : load_config(a.config);
  const auto& t = cfg.table("normal-form");
  const auto p = fhn_from(t);
  const int n0 = static_cast<int>(t.integer("n0", 1));
  t.reject_unused();
  const auto model = normalform::fhn_model(p);
  const auto hopf = normalform::hopf_data(model, n0);
  const auto nf = normalform::coefficients(model, hopf);
  const json j = normal_form_report(hopf, nf);
  ctx.out << j.dump() << "\n";
  if (!a.out.empty()) {
    make_dir(a.out);
    write_text(ctx.m, path_in(a.out, "normal_form.json"), j.dump(2) + "\n");
    ctx.finish(a.out, cfg);
  }
  return 0;
}

struct ConfigArgs {
  std::string config, out = "nloc-out";
};

inline int cmd_simulate(Context& ctx, const ConfigArgs& a) {
  const auto cfg = load_config(a.config);
  const auto& t = cfg.table("simulate");
  const auto sc = sim_config(t);
  simulate::RunOptions opt;
  opt.coherence_radius = t.number("coherence_radius", 3.0);
  const double range = t.number("heatmap_range", 2.0);
  t.reject_unused();
  sc.check();
  make_dir(a.out);

  json diag = json::array();
  int index = 0;
  opt.on_snapshot = [&](const FieldState& s, const simulate::SpiralDiagnostics& d) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "snapshot_%04d", index++);
    const auto bin = path_in(a.out, std::string(stem) + ".bin");
    const auto png = path_in(a.out, std::string(stem) + "_u.png");
    io::write_dump(bin, s);
    ctx.m.add_output(bin);
    heatmap::render(s.u, png, std::pair{-range, range});
    ctx.m.add_output(png);
    json cores = json::array();
    for (const auto& c : d.cores) cores.push_back({{"x", c.x}, {"y", c.y}, {"winding", c.winding}});
    json e{{"t", s.t}, {"file", std::string(stem) + ".bin"}, {"cores", cores}, {"period", d.period_estimate}};
    if (!d.coherence.data().empty()) {
      const auto [lo, hi] = std::minmax_element(d.coherence.data().begin(), d.coherence.data().end());
      e["coherence_min"] = *lo;
      e["coherence_max"] = *hi;
    }
    diag.push_back(e);
  };
  const auto res = simulate::run(sc, opt);
  const auto csv = path_in(a.out, "probes.csv");
  io::write_probe_csv(csv, res.probe_times, res.probe_series);
  ctx.m.add_output(csv);
  write_text(ctx.m, path_in(a.out, "diagnostics.json"), diag.dump(2) + "\n");
  ctx.finish(a.out, cfg);
  const auto& last = diag.back();
  ctx.out << json{{"t", last["t"]}, {"cores", last["cores"].size()}, {"period", last["period"]},
                  {"snapshots", diag.size()}, {"manifest", path_in(a.out, "manifest.json")}}
                 .dump()
          << "\n";
  return 0;
}

inline int cmd_solve_wave(Context& ctx, const ConfigArgs& a) {
  const auto cfg = load_config(a.config);
  const auto& t = cfg.table("solve-wave");
  const double eps = t.number("eps", 0.1);
  const auto w = wave_setup(t, eps);
  const bool write_field = t.boolean("write_field", false);
  const int grid_n = static_cast<int>(t.integer("grid_n", 256));
  const double grid_l = t.number("grid_half_width", w.plan->r_max() / (std::sqrt(2.0) * eps));
  t.reject_unused();
  make_dir(a.out);

  const auto sol = rotwave::solve_profile(w.problem, w.plan, w.init, w.options);
  std::ostringstream prof;
  prof.precision(17);
  prof << "R,re_w,im_w,abs_w\n";
  const auto vals = sol.node_values();
  for (int k = 0; k < w.plan->size(); ++k) {
    prof << w.plan->nodes()[k] << "," << vals[k].real() << "," << vals[k].imag() << "," << std::abs(vals[k]) << "\n";
  }
  write_text(ctx.m, path_in(a.out, "profile.csv"), prof.str());
  const json rep{{"converged", true},
                 {"residual_norm", sol.residual_norm},
                 {"iterations", sol.iterations},
                 {"residual_history", sol.residual_history},
                 {"mu", sol.mu},
                 {"mu_star", w.problem.mu_star},
                 {"w_const", cplx(sol.w_const)},
                 {"balance_amplitude", rotwave::balance_amplitude(w.problem)},
                 {"eps", eps},
                 {"wave_speed", rotwave::wave_speed(w.hopf, w.problem, sol.mu, eps)}};
  write_text(ctx.m, path_in(a.out, "report.json"), rep.dump(2) + "\n");
  if (write_field) {
    const auto st = rotwave::reconstruct(w.hopf, w.nf, sol, eps, grid_n, grid_l);
    const auto bin = path_in(a.out, "field.bin");
    io::write_dump(bin, st);
    ctx.m.add_output(bin);
  }
  ctx.finish(a.out, cfg);
  ctx.out << json{{"residual_norm", sol.residual_norm}, {"iterations", sol.iterations}, {"w_const", cplx(sol.w_const)}}
                 .dump()
          << "\n";
  return 0;
}

inline int cmd_residual_check(Context& ctx, const ConfigArgs& a) {
  const auto cfg = load_config(a.config);
  const auto& t = cfg.table("residual-check");
  std::vector<double> eps_list = t.has("eps") ? t.numbers("eps") : std::vector<double>{0.1, 0.05};
  const int grid_n = static_cast<int>(t.integer("grid_n", 128));
  const double grid_scale = t.number("grid_scale", 12.0);
  const double mask = t.number("mask_fraction", 0.5);
  const double taper_lo = t.number("taper_start", 0.6), taper_hi = t.number("taper_end", 1.0);
  if (eps_list.empty()) throw ConfigError("'residual-check.eps' must not be empty");
  json rows = json::array();
  std::vector<double> sups;
  for (double eps : eps_list) {
    const auto w = wave_setup(t, eps);
    const auto sol = rotwave::solve_profile(w.problem, w.plan, w.init, w.options);
    auto st = rotwave::reconstruct(w.hopf, w.nf, sol, eps, grid_n, grid_scale / eps);
    rotwave::radial_taper(st, taper_lo, taper_hi);
    const double c = rotwave::wave_speed(w.hopf, w.problem, sol.mu, eps);
    const auto r = rotwave::steady_residual(w.model, w.sym, c, st, eps * eps * w.lambda_bar, {true, false}, mask);
    rows.push_back({{"eps", eps}, {"sup", r.sup_norm}, {"l2", r.l2_norm}, {"newton_residual", sol.residual_norm}});
    sups.push_back(r.sup_norm);
  }
  t.reject_unused();
  json ratios = json::array();
  for (std::size_t k = 0; k + 1 < sups.size(); ++k) ratios.push_back(sups[k] / sups[k + 1]);
  const json rep{{"residuals", rows}, {"ratios", ratios}};
  ctx.out << rep.dump() << "\n";
  make_dir(a.out);
  write_text(ctx.m, path_in(a.out, "residual.json"), rep.dump(2) + "\n");
  ctx.finish(a.out, cfg);
  return 0;
}

struct SelftestArgs {
  int size = 256;
  double r_max = 10.0;
  std::string out;
};

inline int cmd_hankel_selftest(Context& ctx, const SelftestArgs& a) {
  const auto cfg = flags_document("hankel-selftest", {{"N", double(a.size)}, {"r_max", a.r_max}});
  std::ostringstream csv;
  csv.precision(17);
  csv << "case,rho,analytic,computed,error\n";
  double worst = 0.0;
  // order 0: e^{−r²/2} is its own transform; order 1: r e^{−r²/2} ↦ −iρ e^{−ρ²/2}
  for (int n : {0, 1}) {
    const auto plan = hankel::make_plan(n, a.r_max, a.size);
    const auto g = hankel::RadialProfile::sample(plan, [n](double r) { return std::pow(r, n) * std::exp(-r * r / 2); });
    const auto gh = hankel::hankel_forward(g);
    for (int k = 0; k < plan->size(); ++k) {
      const double rho = plan->frequencies()[k];
      const double exact = std::pow(rho, n) * std::exp(-rho * rho / 2);
      const double got = n == 0 ? gh.values[k].real() : -gh.values[k].imag();
      const double err = std::abs(gh.values[k] - (n == 0 ? cd(exact, 0) : cd(0, -exact)));
      worst = std::max(worst, err);
      csv << "gaussian_order" << n << "," << rho << "," << exact << "," << got << "," << err << "\n";
    }
  }
  const auto plan = hankel::make_plan(0, a.r_max, a.size);
  const auto& tm = plan->transform_matrix();
  const double orth = (tm * tm - Eigen::MatrixXd::Identity(plan->size(), plan->size())).cwiseAbs().maxCoeff();
  const json summary{{"max_error", worst}, {"orthogonality_defect", orth}};
  if (a.out.empty()) {
    ctx.out << csv.str();
  } else {
    make_dir(a.out);
    write_text(ctx.m, path_in(a.out, "hankel_selftest.csv"), csv.str());
    write_text(ctx.m, path_in(a.out, "hankel_selftest.json"), summary.dump(2) + "\n");
    ctx.finish(a.out, cfg);
    ctx.out << summary.dump() << "\n";
  }
  if (worst > 1e-6 || orth > 1e-8) {
    throw StateError("hankel self-test failed: max error " + std::to_string(worst) + ", orthogonality defect " +
                     std::to_string(orth));
  }
  return 0;
}

inline void apply_thread_env() {
  const char* env = std::getenv("NLOC_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) throw UsageError(std::string("NLOC_THREADS must be a positive integer, got '") + env + "'");
  fft::set_threads(static_cast<int>(n));
}

}  // namespace detail

/// Runs one subcommand. args excludes the program name. Exit codes: 0 success,
/// 1 domain error (one JSON line on err), 2 usage error.
inline int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"Rotating waves in nonlocal oscillatory media", "nloc"};
  app.require_subcommand(1);

  KernelArgs ka;
  auto* vk = app.add_subcommand("validate-kernel", "Check a kernel symbol's hypotheses and report alpha");
  vk->add_option("--family", ka.family, "rational | laplacian | tabulated")
      ->check(CLI::IsMember({"rational", "laplacian", "tabulated"}));
  vk->add_option("--D", ka.D, "rational: numerator D");
  vk->add_option("--d", ka.d, "rational: denominator d");
  vk->add_option("--alpha", ka.alpha, "laplacian: coefficient");
  vk->add_option("--table", ka.table, "tabulated: rho,value CSV");
  vk->add_option("--rho-max", ka.rho_max, "scan range");
  vk->add_option("--tol", ka.tol, "bound tolerance");
  vk->add_option("--out", ka.out, "directory for report and manifest");

  NormalFormArgs na;
  auto* nfc = app.add_subcommand("normal-form", "FitzHugh-Nagumo Hopf data and normal-form coefficients as JSON");
  nfc->add_option("--tau", na.tau);
  nfc->add_option("--beta", na.beta);
  nfc->add_option("--delta", na.delta);
  nfc->add_option("--n0", na.n0, "critical angular mode");
  nfc->add_option("--config", na.config, "TOML with a [normal-form] table (overrides flags)");
  nfc->add_option("--out", na.out, "directory for report and manifest");

  ConfigArgs sa, wa, ra;
  auto* sim = app.add_subcommand("simulate", "2-D pseudo-spectral run from a [simulate] table");
  sim->add_option("--config", sa.config)->required();
  sim->add_option("--out", sa.out, "output directory");
  auto* sw = app.add_subcommand("solve-wave", "Rotating-wave profile from a [solve-wave] table");
  sw->add_option("--config", wa.config)->required();
  sw->add_option("--out", wa.out, "output directory");
  auto* rc = app.add_subcommand("residual-check", "Steady residual of the reconstructed ansatz over several eps");
  rc->add_option("--config", ra.config)->required();
  rc->add_option("--out", ra.out, "output directory");

  SelftestArgs ha;
  auto* hs = app.add_subcommand("hankel-selftest", "Gaussian transform identities as CSV");
  hs->add_option("--N", ha.size, "nodes")->check(CLI::PositiveNumber);
  hs->add_option("--r-max", ha.r_max, "truncation radius")->check(CLI::PositiveNumber);
  hs->add_option("--out", ha.out, "directory for CSV, summary and manifest");

  std::vector<const char*> argv{"nloc"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    out << sub->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_line("usage", e.what()) << "\n";
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Context ctx{out, name, std::chrono::steady_clock::now(), {}};
  try {
    apply_thread_env();
    if (name == "validate-kernel") return cmd_validate_kernel(ctx, ka);
    if (name == "normal-form") return cmd_normal_form(ctx, na);
    if (name == "simulate") return cmd_simulate(ctx, sa);
    if (name == "solve-wave") return cmd_solve_wave(ctx, wa);
    if (name == "residual-check") return cmd_residual_check(ctx, ra);
    return cmd_hankel_selftest(ctx, ha);
  } catch (const UsageError& e) {
    err << error_line("usage", e.what()) << "\n";
    return 2;
  } catch (const Error& e) {
    err << error_line(e.kind(), e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << error_line("internal", e.what()) << "\n";
    return 1;
  }
}

}  // namespace nloc::cli
