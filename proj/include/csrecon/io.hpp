#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "sampling.hpp"

namespace csrecon {

// Raw numeric container: magic "RAWF", then three little-endian uint32
// fields (kind: 0 = real, 1 = complex; rows; cols), then row-major float64
// payload (complex samples interleaved re, im).  Used for images,
// measurement vectors and sinograms alike.

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

inline void put_f64(std::ostream& os, double v) {
  static_assert(sizeof(double) == 8);
  os.write(reinterpret_cast<const char*>(&v), 8);  // little-endian host
}

inline double get_f64(std::istream& is) {
  double v;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

}  // namespace detail

struct RawMatrix {
  bool complex_kind = false;
  std::uint32_t rows = 0, cols = 0;
  std::vector<cplx> data;  // imaginary parts zero for real kind
};

inline void write_raw(const std::string& path, const RawMatrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write("RAWF", 4);
  detail::put_u32(os, m.complex_kind ? 1 : 0);
  detail::put_u32(os, m.rows);
  detail::put_u32(os, m.cols);
  for (const auto& v : m.data) {
    detail::put_f64(os, v.real());
    if (m.complex_kind) detail::put_f64(os, v.imag());
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline RawMatrix read_raw(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "RAWF", 4) != 0)
    throw std::runtime_error("not a raw matrix file: " + path);
  RawMatrix m;
  const std::uint32_t kind = detail::get_u32(is);
  if (kind > 1) throw std::runtime_error("bad kind field in " + path);
  m.complex_kind = kind == 1;
  m.rows = detail::get_u32(is);
  m.cols = detail::get_u32(is);
  if (!is) throw std::runtime_error("truncated header in " + path);
  m.data.resize(size_t(m.rows) * m.cols);
  for (auto& v : m.data) {
    const double re = detail::get_f64(is);
    const double im = m.complex_kind ? detail::get_f64(is) : 0.0;
    v = cplx(re, im);
  }
  if (!is) throw std::runtime_error("truncated payload in " + path);
  return m;
}

inline void write_image(const std::string& path, const ImageGrid& u) {
  RawMatrix m;
  m.complex_kind = u.max_imag() > 0.0;
  m.rows = m.cols = std::uint32_t(u.n());
  m.data.assign(u.data(), u.data() + u.size());
  write_raw(path, m);
}

inline ImageGrid read_image(const std::string& path) {
  RawMatrix m = read_raw(path);
  if (m.rows != m.cols || m.rows < 2)
    throw std::runtime_error("raw file is not a square image: " + path);
  return ImageGrid(int(m.rows), std::move(m.data));
}

// Mask container: two little-endian uint32 (n, line_count), then n*n bytes
// of 0/1 in row-major centered layout.
inline void write_mask(const std::string& path, const RadialMask& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  detail::put_u32(os, std::uint32_t(m.n));
  detail::put_u32(os, std::uint32_t(m.line_count));
  os.write(reinterpret_cast<const char*>(m.mask.data()), std::streamsize(m.mask.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline RadialMask read_mask(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  RadialMask m;
  m.n = int(detail::get_u32(is));
  m.line_count = int(detail::get_u32(is));
  if (!is || m.n < 2) throw std::runtime_error("bad mask header in " + path);
  m.mask.resize(size_t(m.n) * m.n);
  is.read(reinterpret_cast<char*>(m.mask.data()), std::streamsize(m.mask.size()));
  if (!is) throw std::runtime_error("truncated mask in " + path);
  for (auto v : m.mask)
    if (v > 1) throw std::runtime_error("mask bytes must be 0/1 in " + path);
  size_t kept = 0;
  for (auto v : m.mask) kept += v;
  m.sampling_rate = double(kept) / double(m.mask.size());
  return m;
}

// 8-bit binary PGM preview of the modulus image, min-max normalized.
inline void write_pgm(const std::string& path, const ImageGrid& u) {
  const int n = u.n();
  double lo = std::abs(u[0]), hi = lo;
  for (size_t l = 0; l < u.size(); ++l) {
    const double a = std::abs(u[l]);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "P5\n" << n << ' ' << n << "\n255\n";
  std::vector<unsigned char> row(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      row[j] = static_cast<unsigned char>(std::lround((std::abs(u.at(i, j)) - lo) * scale));
    os.write(reinterpret_cast<const char*>(row.data()), n);
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

// 24-bit binary PPM (used by the plot renderer).
inline void write_ppm(const std::string& path, int width, int height,
                      const std::vector<unsigned char>& rgb) {
  if (rgb.size() != size_t(width) * height * 3)
    throw std::invalid_argument("write_ppm: buffer size mismatch");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "P6\n" << width << ' ' << height << "\n255\n";
  os.write(reinterpret_cast<const char*>(rgb.data()), std::streamsize(rgb.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace csrecon
