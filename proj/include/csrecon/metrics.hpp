#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "grid.hpp"

namespace csrecon {

// RE = ||ref - rec||_2 / ||ref||_2 on the complex samples.
inline double relative_error(const ImageGrid& ref, const ImageGrid& rec) {
  if (ref.n() != rec.n()) throw std::invalid_argument("relative_error: size mismatch");
  double num = 0, den = 0;
  for (size_t l = 0; l < ref.size(); ++l) {
    num += std::norm(ref[l] - rec[l]);
    den += std::norm(ref[l]);
  }
  if (den == 0.0) throw std::invalid_argument("relative_error: zero reference");
  return std::sqrt(num / den);
}

// Mean structural similarity over all 8x8 sliding windows with uniform
// weights and the standard stabilizers C1 = (0.01 L)^2, C2 = (0.03 L)^2,
// where L is the dynamic range of the reference.  Complex images are
// compared through their moduli.
inline double ssim(const ImageGrid& ref, const ImageGrid& rec) {
  if (ref.n() != rec.n()) throw std::invalid_argument("ssim: size mismatch");
  const int n = ref.n();
  constexpr int W = 8;
  if (n < W) throw std::invalid_argument("ssim: image smaller than the 8x8 window");

  std::vector<double> x(size_t(n) * n), y(size_t(n) * n);
  double lo = std::abs(ref[0]), hi = lo;
  for (size_t l = 0; l < x.size(); ++l) {
    x[l] = std::abs(ref[l]);
    y[l] = std::abs(rec[l]);
    lo = std::min(lo, x[l]);
    hi = std::max(hi, x[l]);
  }
  double L = hi - lo;
  if (L == 0.0) L = 1.0;  // constant reference: any positive stabilizer works
  const double c1 = (0.01 * L) * (0.01 * L);
  const double c2 = (0.03 * L) * (0.03 * L);

  // Summed-area tables over x, y, x^2, y^2, xy (one guard row/column).
  const int m = n + 1;
  std::vector<double> sx(size_t(m) * m, 0), sy(size_t(m) * m, 0), sxx(size_t(m) * m, 0),
      syy(size_t(m) * m, 0), sxy(size_t(m) * m, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const size_t p = size_t(i) * n + j;
      const size_t q = size_t(i + 1) * m + (j + 1), qu = q - m, ql = q - 1, qul = qu - 1;
      sx[q] = x[p] + sx[qu] + sx[ql] - sx[qul];
      sy[q] = y[p] + sy[qu] + sy[ql] - sy[qul];
      sxx[q] = x[p] * x[p] + sxx[qu] + sxx[ql] - sxx[qul];
      syy[q] = y[p] * y[p] + syy[qu] + syy[ql] - syy[qul];
      sxy[q] = x[p] * y[p] + sxy[qu] + sxy[ql] - sxy[qul];
    }
  auto box = [&](const std::vector<double>& s, int i, int j) {
    const size_t a = size_t(i) * m + j, b = size_t(i + W) * m + (j + W);
    return s[b] - s[size_t(i) * m + (j + W)] - s[size_t(i + W) * m + j] + s[a];
  };

  const double inv = 1.0 / double(W * W);
  double acc = 0;
  const int wins = n - W + 1;
  for (int i = 0; i < wins; ++i)
    for (int j = 0; j < wins; ++j) {
      const double mx = box(sx, i, j) * inv;
      const double my = box(sy, i, j) * inv;
      const double vx = box(sxx, i, j) * inv - mx * mx;
      const double vy = box(syy, i, j) * inv - my * my;
      const double cxy = box(sxy, i, j) * inv - mx * my;
      acc += ((2 * mx * my + c1) * (2 * cxy + c2)) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
  return acc / double(wins * wins);
}

}  // namespace csrecon
