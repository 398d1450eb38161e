#pragma once

#include <cmath>
#include <numbers>

#include "grid.hpp"

namespace csrecon {

// First-order finite differences on the periodic n-by-n grid.  x runs along
// columns, y along rows.  Forward differences build the image gradient;
// backward differences build the symmetrized gradient of the auxiliary
// field, so that the two stencils interlock at second order.

inline ImageGrid diff_x_forward(const ImageGrid& u) {
  const int n = u.n();
  ImageGrid g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.at(i, j) = u.at(i, (j + 1) % n) - u.at(i, j);
  return g;
}

inline ImageGrid diff_y_forward(const ImageGrid& u) {
  const int n = u.n();
  ImageGrid g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.at(i, j) = u.at((i + 1) % n, j) - u.at(i, j);
  return g;
}

inline ImageGrid diff_x_backward(const ImageGrid& u) {
  const int n = u.n();
  ImageGrid g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.at(i, j) = u.at(i, j) - u.at(i, (j + n - 1) % n);
  return g;
}

inline ImageGrid diff_y_backward(const ImageGrid& u) {
  const int n = u.n();
  ImageGrid g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.at(i, j) = u.at(i, j) - u.at((i + n - 1) % n, j);
  return g;
}

// Adjoints under the standard inner product: (forward diff)^* = -(backward
// diff) and vice versa, both directions.
inline ImageGrid diff_x_forward_adjoint(const ImageGrid& p) {
  ImageGrid a = diff_x_backward(p);
  a *= -1.0;
  return a;
}
inline ImageGrid diff_y_forward_adjoint(const ImageGrid& p) {
  ImageGrid a = diff_y_backward(p);
  a *= -1.0;
  return a;
}
inline ImageGrid diff_x_backward_adjoint(const ImageGrid& p) {
  ImageGrid a = diff_x_forward(p);
  a *= -1.0;
  return a;
}
inline ImageGrid diff_y_backward_adjoint(const ImageGrid& p) {
  ImageGrid a = diff_y_forward(p);
  a *= -1.0;
  return a;
}

inline VectorField forward_gradient(const ImageGrid& u) {
  return VectorField(diff_x_forward(u), diff_y_forward(u));
}

inline ImageGrid forward_gradient_adjoint(const VectorField& p) {
  ImageGrid a = diff_x_forward_adjoint(p.x);
  a += diff_y_forward_adjoint(p.y);
  return a;
}

// Symmetrized gradient of a vector field, built from backward differences:
//   E(v) = [ dx vx            (dy vx + dx vy)/2 ]
//          [ (dy vx + dx vy)/2            dy vy ].
inline SymTensorField sym_gradient(const VectorField& v) {
  SymTensorField t(v.n());
  t.xx = diff_x_backward(v.x);
  t.yy = diff_y_backward(v.y);
  ImageGrid a = diff_y_backward(v.x);
  a += diff_x_backward(v.y);
  a *= 0.5;
  t.xy = std::move(a);
  return t;
}

// Adjoint with respect to the tensor inner product that doubles the
// off-diagonal; the halves from the symmetrization cancel against the
// doubling, leaving plain backward-difference adjoints.
inline VectorField sym_gradient_adjoint(const SymTensorField& t) {
  VectorField v(t.n());
  v.x = diff_x_backward_adjoint(t.xx);
  v.x += diff_y_backward_adjoint(t.xy);
  v.y = diff_x_backward_adjoint(t.xy);
  v.y += diff_y_backward_adjoint(t.yy);
  return v;
}

// Isotropic group norms: pointwise Euclidean magnitude, summed over pixels.
inline double vec_l1_norm(const VectorField& p) {
  double s = 0;
  for (size_t l = 0; l < p.x.size(); ++l)
    s += std::sqrt(std::norm(p.x[l]) + std::norm(p.y[l]));
  return s;
}

// Frobenius magnitude of the symmetric tensor counts xy twice.
inline double tensor_l1_norm(const SymTensorField& t) {
  double s = 0;
  for (size_t l = 0; l < t.xx.size(); ++l)
    s += std::sqrt(std::norm(t.xx[l]) + 2.0 * std::norm(t.xy[l]) + std::norm(t.yy[l]));
  return s;
}

enum class DiffOp { forward_x, forward_y, backward_x, backward_y };

// Eigenvalue grid of a difference operator under the unitary DFT, laid out
// in standard DFT index order: entry (k1, k2) multiplies frequency (k1, k2),
// where k1 indexes rows (y) and k2 indexes columns (x).
inline ImageGrid fourier_symbol(DiffOp op, int n) {
  ImageGrid s(n);
  const double w = 2.0 * std::numbers::pi / n;
  for (int k1 = 0; k1 < n; ++k1) {
    for (int k2 = 0; k2 < n; ++k2) {
      const int k = (op == DiffOp::forward_x || op == DiffOp::backward_x) ? k2 : k1;
      cplx sym;
      if (op == DiffOp::forward_x || op == DiffOp::forward_y)
        sym = std::polar(1.0, w * k) - 1.0;
      else
        sym = 1.0 - std::polar(1.0, -w * k);
      s.at(k1, k2) = sym;
    }
  }
  return s;
}

}  // namespace csrecon
