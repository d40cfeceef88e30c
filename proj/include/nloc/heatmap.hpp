#pragma once

// PNG heatmaps of real fields with a diverging blue–white–red colormap.

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nloc/error.hpp"
#include "nloc/field.hpp"

namespace nloc::heatmap {

using Rgb = std::array<unsigned char, 3>;

constexpr Rgb kLow{59, 76, 192};
constexpr Rgb kMid{240, 240, 240};
constexpr Rgb kHigh{180, 4, 38};

/// Colour for s in [0, 1]; s = 0.5 is kMid.
inline Rgb colormap(double s) {
  s = std::clamp(s, 0.0, 1.0);
  const Rgb& a = s < 0.5 ? kLow : kMid;
  const Rgb& b = s < 0.5 ? kMid : kHigh;
  const double t = s < 0.5 ? 2 * s : 2 * s - 1;
  Rgb c;
  for (int k = 0; k < 3; ++k) c[k] = static_cast<unsigned char>(std::lround(a[k] + t * (b[k] - a[k])));
  return c;
}

/// Symmetric range ±max|f|, or (−1, 1) for an identically zero field.
inline std::pair<double, double> default_range(const RealField& f) {
  double m = 0.0;
  for (double x : f.data()) {
    if (!std::isfinite(x)) throw RangeError("heatmap field contains non-finite values");
    m = std::max(m, std::abs(x));
  }
  if (m == 0.0) m = 1.0;
  return {-m, m};
}

/// Row-major RGB pixels, top row = largest y.
inline std::vector<unsigned char> pixels(const RealField& f, std::optional<std::pair<double, double>> range = {}) {
  const auto [lo, hi] = range ? *range : default_range(f);
  if (!(hi > lo)) throw RangeError("heatmap range must satisfy lo < hi");
  const int n = f.n();
  std::vector<unsigned char> px(std::size_t(n) * n * 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = f(n - 1 - i, j);
      if (!std::isfinite(x)) throw RangeError("heatmap field contains non-finite values");
      const Rgb c = colormap((x - lo) / (hi - lo));
      std::copy(c.begin(), c.end(), px.begin() + (std::size_t(i) * n + j) * 3);
    }
  return px;
}

/// Writes an 8-bit RGB PNG. No timestamp or text chunks, so equal inputs give equal bytes.
inline void render(const RealField& f, const std::string& path, std::optional<std::pair<double, double>> range = {}) {
  const auto px = pixels(f, range);
  const int n = f.n();
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot write '" + path + "'");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("libpng failed writing '" + path + "'");
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, n, n, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int i = 0; i < n; ++i) png_write_row(png, px.data() + std::size_t(i) * n * 3);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0) throw IoError("write failed for '" + path + "'");
}

}  // namespace nloc::heatmap
