#pragma once

#include <algorithm>
#include <cmath>

#include "grid.hpp"

namespace csrecon {

// Soft-thresholding of a complex scalar: shrink the modulus by delta, keep
// the phase.  Exactly zero input stays zero.
inline cplx shrink(cplx c, double delta) {
  const double m = std::abs(c);
  if (m <= delta || m == 0.0) return cplx(0.0);
  return c * ((m - delta) / m);
}

// Joint shrinkage of a 2-vector: shrink the Euclidean magnitude, keep the
// direction.
inline void shrink2(cplx& a, cplx& b, double delta) {
  const double m = std::sqrt(std::norm(a) + std::norm(b));
  if (m <= delta || m == 0.0) {
    a = b = cplx(0.0);
    return;
  }
  const double s = (m - delta) / m;
  a *= s;
  b *= s;
}

// Joint shrinkage of a symmetric 2x2 tensor under the Frobenius norm with
// the off-diagonal counted twice.
inline void shrink_frob(cplx& xx, cplx& xy, cplx& yy, double delta) {
  const double m = std::sqrt(std::norm(xx) + 2.0 * std::norm(xy) + std::norm(yy));
  if (m <= delta || m == 0.0) {
    xx = xy = yy = cplx(0.0);
    return;
  }
  const double s = (m - delta) / m;
  xx *= s;
  xy *= s;
  yy *= s;
}

// Keep a coefficient only if its modulus strictly exceeds the threshold.
inline cplx hard_threshold(cplx c, double delta) {
  return std::abs(c) > delta ? c : cplx(0.0);
}

inline void shrink(ImageGrid& g, double delta) {
  for (size_t l = 0; l < g.size(); ++l) g[l] = shrink(g[l], delta);
}

inline void shrink2(VectorField& p, double delta) {
  for (size_t l = 0; l < p.x.size(); ++l) shrink2(p.x[l], p.y[l], delta);
}

inline void shrink_frob(SymTensorField& t, double delta) {
  for (size_t l = 0; l < t.xx.size(); ++l) shrink_frob(t.xx[l], t.xy[l], t.yy[l], delta);
}

inline void hard_threshold(ImageGrid& g, double delta) {
  for (size_t l = 0; l < g.size(); ++l) g[l] = hard_threshold(g[l], delta);
}

// Per-coefficient thresholds over a stack of planes (layouts must agree).
inline void hard_threshold(std::vector<ImageGrid>& c,
                           const std::vector<std::vector<double>>& delta) {
  if (c.size() != delta.size())
    throw std::invalid_argument("hard_threshold: threshold layout mismatch");
  for (size_t j = 0; j < c.size(); ++j) {
    if (c[j].size() != delta[j].size())
      throw std::invalid_argument("hard_threshold: threshold layout mismatch");
    for (size_t l = 0; l < c[j].size(); ++l) c[j][l] = hard_threshold(c[j][l], delta[j][l]);
  }
}

}  // namespace csrecon
