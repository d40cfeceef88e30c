#pragma once

// Scalar fields on the periodic square [-L, L)², row-major with row index
// along y: value(i, j) lives at (x_j, y_i), x_j = -L + j h, h = 2L/n.

#include <cmath>
#include <complex>
#include <vector>

#include "nloc/error.hpp"

namespace nloc {

using cd = std::complex<double>;

template <class T>
class Field2D {
 public:
  Field2D() = default;
  Field2D(int n, double half_width, T fill = T{}) : n_(n), l_(half_width), data_(std::size_t(n) * n, fill) {
    if (n < 8 || (n & (n - 1)) != 0) throw SizeError("grid size must be a power of two >= 8");
    if (!(half_width > 0.0)) throw RangeError("grid half-width must be positive");
  }

  template <class F>
  static Field2D sample(int n, double half_width, F&& f) {
    Field2D out(n, half_width);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) = f(out.x(j), out.y(i));
    return out;
  }

  int n() const { return n_; }
  double half_width() const { return l_; }
  double spacing() const { return 2.0 * l_ / n_; }
  double x(int j) const { return -l_ + j * spacing(); }
  double y(int i) const { return -l_ + i * spacing(); }

  T& operator()(int i, int j) { return data_[std::size_t(i) * n_ + j]; }
  const T& operator()(int i, int j) const { return data_[std::size_t(i) * n_ + j]; }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const Field2D& o) const { return n_ == o.n_ && l_ == o.l_; }

 private:
  int n_ = 0;
  double l_ = 0.0;
  std::vector<T> data_;
};

using RealField = Field2D<double>;
using ComplexField = Field2D<cd>;

/// Two-component state (u, v) at time t.
struct FieldState {
  double t = 0.0;
  RealField u, v;
};

template <class T>
double sup_abs(const Field2D<T>& f) {
  double s = 0.0;
  for (const auto& v : f.data()) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace nloc
