#pragma once

// Binary field dumps and small CSV writers.
//
// Dump layout: "NLOC", u16 version, u32 n, f64 L, f64 t, then u and v as
// little-endian f64 in row-major order.

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "nloc/error.hpp"
#include "nloc/field.hpp"

namespace nloc::io {

constexpr std::uint16_t kDumpVersion = 1;

namespace detail {

template <class T>
void put_le(std::string& buf, T v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  const U bits = std::bit_cast<U>(v);
  for (std::size_t b = 0; b < sizeof(T); ++b) buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

template <class T>
T get_le(const std::string& buf, std::size_t& pos) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  if (pos + sizeof(T) > buf.size()) throw IoError("truncated field dump");
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) bits |= U(static_cast<unsigned char>(buf[pos + b])) << (8 * b);
  pos += sizeof(T);
  return std::bit_cast<T>(bits);
}

}  // namespace detail

inline std::string encode_dump(const FieldState& s) {
  if (!s.u.same_shape(s.v)) throw ShapeError("u and v grids differ");
  std::string buf = "NLOC";
  detail::put_le(buf, kDumpVersion);
  detail::put_le(buf, static_cast<std::uint32_t>(s.u.n()));
  detail::put_le(buf, s.u.half_width());
  detail::put_le(buf, s.t);
  for (double x : s.u.data()) detail::put_le(buf, x);
  for (double x : s.v.data()) detail::put_le(buf, x);
  return buf;
}

inline FieldState decode_dump(const std::string& buf) {
  if (buf.size() < 4 || buf.compare(0, 4, "NLOC") != 0) throw IoError("not a field dump (bad magic)");
  std::size_t pos = 4;
  const auto version = detail::get_le<std::uint16_t>(buf, pos);
  if (version != kDumpVersion) throw IoError("unsupported dump version " + std::to_string(version));
  const auto n = detail::get_le<std::uint32_t>(buf, pos);
  const double L = detail::get_le<double>(buf, pos);
  const double t = detail::get_le<double>(buf, pos);
  FieldState s{t, RealField(static_cast<int>(n), L), RealField(static_cast<int>(n), L)};
  for (auto& x : s.u.data()) x = detail::get_le<double>(buf, pos);
  for (auto& x : s.v.data()) x = detail::get_le<double>(buf, pos);
  if (pos != buf.size()) throw IoError("trailing bytes in field dump");
  return s;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_dump(const std::string& path, const FieldState& s) { write_file(path, encode_dump(s)); }

inline FieldState read_dump(const std::string& path) { return decode_dump(read_file(path)); }

/// t,p0,p1,... one row per sample.
inline void write_probe_csv(const std::string& path, const std::vector<double>& t,
                            const std::vector<std::vector<double>>& series) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.precision(17);
  out << "t";
  for (std::size_t p = 0; p < series.size(); ++p) out << ",p" << p;
  out << "\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    out << t[k];
    for (const auto& s : series) out << "," << s[k];
    out << "\n";
  }
}

}  // namespace nloc::io
