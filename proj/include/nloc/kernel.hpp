#pragma once

// Radially symmetric convolution-kernel symbols K̂(ρ).
//
// Kernels are only ever represented by their Fourier multiplier. Convolution
// is defined so that it acts diagonally in frequency:
//
//     (K * u)^(ξ) = K̂(|ξ|) û(ξ),   û(ξ) = (1/2π) ∫ u(x) e^{-iξ·x} dx.
//
// Every symbol is expected to have a second-order zero at the origin,
// K̂(ρ) = -αρ² + O(ρ⁴) with α > 0, and to stay bounded on the real axis.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "nloc/error.hpp"

namespace nloc::kernel {

/// K̂(ρ) = -Dρ² / (1 + dρ²).
struct RationalDiffusive {
  double D = 0.0;
  double d = 0.0;
};

/// K̂(ρ) = -αρ², the ε → 0 limit of a rescaled symbol.
struct LaplacianLimit {
  double alpha = 0.0;
};

namespace detail {

// Monotone (Fritsch–Carlson) cubic Hermite interpolant of samples taken in
// the variable s = ρ². Interpolating in ρ² keeps the interpolant even in ρ,
// so a symbol sampled from a smooth even function keeps its ρ² zero.
class EvenMonotoneCubic {
 public:
  EvenMonotoneCubic(std::vector<double> rho, std::vector<double> values)
      : rho_(std::move(rho)), y_(std::move(values)) {
    if (rho_.size() != y_.size() || rho_.size() < 2) {
      throw SizeError("tabulated symbol needs at least two (rho, value) samples of equal length");
    }
    s_.resize(rho_.size());
    for (std::size_t i = 0; i < rho_.size(); ++i) {
      if (!(rho_[i] >= 0.0) || !std::isfinite(y_[i])) {
        throw RangeError("tabulated symbol samples must have rho >= 0 and finite values");
      }
      if (i > 0 && !(rho_[i] > rho_[i - 1])) {
        throw RangeError("tabulated symbol rho samples must be strictly increasing");
      }
      s_[i] = rho_[i] * rho_[i];
    }
    const std::size_t n = s_.size();
    std::vector<double> secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      secant[i] = (y_[i + 1] - y_[i]) / (s_[i + 1] - s_[i]);
    }
    m_.assign(n, 0.0);
    m_[0] = secant[0];
    m_[n - 1] = secant[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      m_[i] = (secant[i - 1] * secant[i] <= 0.0) ? 0.0 : 0.5 * (secant[i - 1] + secant[i]);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (secant[i] == 0.0) {
        m_[i] = 0.0;
        m_[i + 1] = 0.0;
        continue;
      }
      const double a = m_[i] / secant[i];
      const double b = m_[i + 1] / secant[i];
      const double r2 = a * a + b * b;
      if (r2 > 9.0) {
        const double t = 3.0 / std::sqrt(r2);
        m_[i] = t * a * secant[i];
        m_[i + 1] = t * b * secant[i];
      }
    }
  }

  double rho_min() const { return rho_.front(); }
  double rho_max() const { return rho_.back(); }
  const std::vector<double>& rho() const { return rho_; }
  const std::vector<double>& values() const { return y_; }

  double operator()(double rho) const {
    const double s = rho * rho;
    const std::size_t i = interval(rho);
    const double h = s_[i + 1] - s_[i];
    const double t = (s - s_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] +
           (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * m_[i + 1];
  }

  // -value/ρ², evaluated without cancellation on the first interval when the
  // first sample sits at ρ = 0 with value 0.
  double quotient(double rho) const {
    const std::size_t i = interval(rho);
    if (i == 0 && s_[0] == 0.0 && y_[0] == 0.0) {
      const double s = rho * rho;
      const double h = s_[1];
      const double delta = y_[1] / h;
      const double c2 = (3 * delta - 2 * m_[0] - m_[1]) / h;
      const double c3 = (m_[0] + m_[1] - 2 * delta) / (h * h);
      return -(m_[0] + s * (c2 + s * c3));
    }
    if (rho == 0.0) {
      return -std::copysign(std::numeric_limits<double>::infinity(), y_[0]);
    }
    return -(*this)(rho) / (rho * rho);
  }

 private:
  std::size_t interval(double rho) const {
    if (!(rho >= rho_.front()) || !(rho <= rho_.back())) {
      std::ostringstream msg;
      msg << "rho = " << rho << " outside tabulated range [" << rho_.front() << ", " << rho_.back() << "]";
      throw RangeError(msg.str());
    }
    const double s = rho * rho;
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t i = static_cast<std::size_t>(std::distance(s_.begin(), it));
    i = (i == 0) ? 0 : i - 1;
    return std::min(i, s_.size() - 2);
  }

  std::vector<double> rho_, y_, s_, m_;
};

}  // namespace detail

/// Samples of K̂ on a ρ grid; `scale` ε turns it into P ↦ K̂(εP)/ε².
struct Tabulated {
  std::shared_ptr<const detail::EvenMonotoneCubic> table;
  double scale = 1.0;
};

/// An immutable radial Fourier symbol. Once validated it carries the Taylor
/// coefficient α and may be shared freely between threads.
class KernelSymbol {
 public:
  using Family = std::variant<RationalDiffusive, LaplacianLimit, Tabulated>;

  static KernelSymbol rational(double D, double d) {
    if (!(D > 0.0) || !(d >= 0.0)) {
      throw RangeError("rational symbol requires D > 0 and d >= 0");
    }
    return KernelSymbol(RationalDiffusive{D, d});
  }

  static KernelSymbol laplacian(double alpha) {
    if (!(alpha > 0.0)) throw RangeError("Laplacian-limit symbol requires alpha > 0");
    return KernelSymbol(LaplacianLimit{alpha});
  }

  static KernelSymbol tabulated(std::vector<double> rho, std::vector<double> values) {
    return KernelSymbol(
        Tabulated{std::make_shared<const detail::EvenMonotoneCubic>(std::move(rho), std::move(values)), 1.0});
  }

  /// Reads a two-column `rho,value` CSV with a header line.
  static KernelSymbol from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open symbol table '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("symbol table '" + path + "' is empty");
    std::vector<double> rho, val;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream row(line);
      double r = 0, v = 0;
      if (!(row >> r >> v)) throw ConfigError("malformed row in symbol table '" + path + "': " + line);
      rho.push_back(r);
      val.push_back(v);
    }
    return tabulated(std::move(rho), std::move(val));
  }

  const Family& family() const { return family_; }
  bool is_rational() const { return std::holds_alternative<RationalDiffusive>(family_); }
  bool is_laplacian_limit() const { return std::holds_alternative<LaplacianLimit>(family_); }
  bool is_tabulated() const { return std::holds_alternative<Tabulated>(family_); }

  /// K̂(ρ) for ρ ≥ 0.
  double operator()(double rho) const {
    if (!(rho >= 0.0)) throw RangeError("symbol evaluated at negative rho");
    return std::visit(
        [rho](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, RationalDiffusive>) {
            const double r2 = rho * rho;
            return -f.D * r2 / (1.0 + f.d * r2);
          } else if constexpr (std::is_same_v<T, LaplacianLimit>) {
            return -f.alpha * rho * rho;
          } else {
            const double e = f.scale;
            return (*f.table)(e * rho) / (e * e);
          }
        },
        family_);
  }

  /// q(ρ) = -K̂(ρ)/ρ², continuous through ρ = 0 where q(0) = α.
  double quotient(double rho) const {
    if (!(rho >= 0.0)) throw RangeError("symbol evaluated at negative rho");
    return std::visit(
        [rho](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, RationalDiffusive>) {
            return f.D / (1.0 + f.d * rho * rho);
          } else if constexpr (std::is_same_v<T, LaplacianLimit>) {
            return f.alpha;
          } else {
            return f.table->quotient(f.scale * rho);
          }
        },
        family_);
  }

  /// Largest ρ at which the symbol may be evaluated.
  double rho_limit() const {
    if (const auto* t = std::get_if<Tabulated>(&family_)) return t->table->rho_max() / t->scale;
    return std::numeric_limits<double>::infinity();
  }

  bool validated() const { return alpha_.has_value(); }

  double alpha() const {
    if (!alpha_) throw StateError("kernel symbol has not been validated");
    return *alpha_;
  }

  /// Copy of this symbol with the validated Taylor coefficient attached.
  KernelSymbol with_alpha(double alpha) const {
    KernelSymbol s = *this;
    s.alpha_ = alpha;
    return s;
  }

 private:
  friend KernelSymbol rescale(const KernelSymbol& sym, double eps);

  explicit KernelSymbol(Family f) : family_(std::move(f)) {}

  Family family_;
  std::optional<double> alpha_;
};

struct ValidationReport {
  double alpha_estimate = 0.0;
  bool zero_order_ok = false;
  bool bounded_ok = false;
  double symbol_sup = 0.0;
  std::vector<std::string> notes;
};

inline double eval_symbol(const KernelSymbol& sym, double rho) { return sym(rho); }

/// Checks the second-order zero at the origin and boundedness on [0, rho_max].
/// Failures are reported in the flags, never thrown.
inline ValidationReport validate_hypotheses(const KernelSymbol& sym, double rho_max, double tol) {
  if (!(rho_max > 0.0)) throw RangeError("validate_hypotheses requires rho_max > 0");
  ValidationReport rep;

  // Least-squares fit of K̂(ρ) ≈ -αρ² + c₄ρ⁴ + c₆ρ⁶ on (0, 1e-2], in x = ρ/1e-2.
  constexpr int kFit = 40;
  constexpr double kFitRange = 1e-2;
  const double fit_hi = std::min(kFitRange, sym.rho_limit());
  Eigen::Matrix<double, kFit, 3> design;
  Eigen::Matrix<double, kFit, 1> rhs;
  std::vector<double> xs, ys;
  bool finite_fit = true;
  for (int i = 1; i <= kFit; ++i) {
    const double rho = fit_hi * i / kFit;
    double y = 0.0;
    try {
      y = sym(rho);
    } catch (const RangeError&) {
      finite_fit = false;
      break;
    }
    const double x2 = (rho / fit_hi) * (rho / fit_hi);
    design.row(i - 1) << x2, x2 * x2, x2 * x2 * x2;
    rhs(i - 1) = y;
    xs.push_back(rho);
    ys.push_back(y);
  }
  if (finite_fit) {
    const Eigen::Vector3d c = design.colPivHouseholderQr().solve(rhs);
    rep.alpha_estimate = -c(0) / (fit_hi * fit_hi);
    double value_at_zero = std::numeric_limits<double>::quiet_NaN();
    try {
      value_at_zero = sym(0.0);
    } catch (const RangeError&) {
      rep.notes.push_back("symbol is not tabulated down to rho = 0");
    }
    bool ok = rep.alpha_estimate > 0.0 && value_at_zero == value_at_zero &&
              std::abs(value_at_zero) <= 1e-14;
    for (std::size_t i = 0; ok && i < xs.size(); ++i) {
      const double r = xs[i];
      if (!(std::abs(ys[i] + rep.alpha_estimate * r * r) <= tol * r * r * r * r)) ok = false;
    }
    rep.zero_order_ok = ok;
    if (!ok) rep.notes.push_back("no second-order zero with positive alpha at the origin");
  } else {
    rep.notes.push_back("symbol cannot be evaluated near the origin");
  }

  // Boundedness on the sampled range.
  const double hi = std::min(rho_max, sym.rho_limit());
  if (hi < rho_max) rep.notes.push_back("rho_max clipped to the tabulated range");
  constexpr int kScan = 4000;
  double sup = 0.0;
  bool finite = true;
  for (int i = 0; i <= kScan; ++i) {
    const double v = sym(hi * i / kScan);
    if (!std::isfinite(v)) {
      finite = false;
      break;
    }
    sup = std::max(sup, std::abs(v));
  }
  rep.bounded_ok = finite;
  if (const auto* r = std::get_if<RationalDiffusive>(&sym.family()); r && r->d > 0.0) {
    rep.symbol_sup = r->D / r->d;
  } else {
    rep.symbol_sup = sup;
  }
  if (finite) {
    const double end = std::abs(sym(hi));
    const double before = std::abs(sym(0.9 * hi));
    if (end > 0.0 && std::abs(end - before) > 1e-2 * end) {
      rep.notes.push_back("no horizontal asymptote detected on the sampled range");
    }
  }
  return rep;
}

/// Validates and returns the symbol with α attached; throws StateError when
/// the hypotheses fail.
inline KernelSymbol validate(const KernelSymbol& sym, double rho_max = 100.0, double tol = 1e3) {
  const auto rep = validate_hypotheses(sym, rho_max, tol);
  if (!rep.zero_order_ok || !rep.bounded_ok) {
    std::string why = "kernel symbol fails validation";
    for (const auto& n : rep.notes) why += "; " + n;
    throw StateError(why);
  }
  // The rational and Laplacian families know α exactly.
  if (const auto* r = std::get_if<RationalDiffusive>(&sym.family())) return sym.with_alpha(r->D);
  if (const auto* l = std::get_if<LaplacianLimit>(&sym.family())) return sym.with_alpha(l->alpha);
  return sym.with_alpha(rep.alpha_estimate);
}

struct Decomposition {
  double m_value = 0.0;
  double lnf_value = 0.0;
};

/// K̂(ρ) = m(ρ)·L(ρ) with L(ρ) = -ρ²/(1+ρ²) and m bounded, m(0) = α.
inline Decomposition decompose(const KernelSymbol& sym, double rho) {
  if (!sym.validated()) throw StateError("decompose requires a validated symbol");
  const double r2 = rho * rho;
  return {sym.quotient(rho) * (1.0 + r2), -r2 / (1.0 + r2)};
}

/// P ↦ K̂(εP)/ε². ε = 0 gives the Laplacian limit -αP² with α = m(0).
inline KernelSymbol rescale(const KernelSymbol& sym, double eps) {
  if (!(eps >= 0.0)) throw RangeError("rescale requires eps >= 0");
  const std::optional<double> alpha =
      sym.validated() ? std::optional<double>(sym.alpha()) : std::nullopt;
  auto keep = [&](KernelSymbol s) { return alpha ? s.with_alpha(*alpha) : s; };
  if (eps == 0.0) {
    const double a = alpha ? *alpha : sym.quotient(0.0);
    return KernelSymbol::laplacian(a).with_alpha(a);
  }
  return std::visit(
      [&](const auto& f) -> KernelSymbol {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, RationalDiffusive>) {
          return keep(KernelSymbol::rational(f.D, f.d * eps * eps));
        } else if constexpr (std::is_same_v<T, LaplacianLimit>) {
          return keep(KernelSymbol::laplacian(f.alpha));
        } else {
          KernelSymbol s = sym;
          auto& t = std::get<Tabulated>(s.family_);
          t.scale *= eps;
          return keep(s);
        }
      },
      sym.family());
}

}  // namespace nloc::kernel
