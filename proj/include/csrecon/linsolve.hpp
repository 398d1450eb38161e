#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "fft.hpp"
#include "grid.hpp"
#include "grid_ops.hpp"
#include "sampling.hpp"
#include "transforms.hpp"

namespace csrecon {

// Which splits participate in the (u, v) subproblem.  with_v implies
// with_grad (the auxiliary field only enters through the gradient split).
struct SystemFlags {
  bool with_transform = true;  // mu1 ||Psi u - w||^2 split present
  bool with_grad = true;       // mu2 ||grad u - v - d||^2 split present
  bool with_v = true;          // v is a free variable (3x3 system); else v = 0
};

struct SplitPenalties {
  double mu1 = 1.0, mu2 = 1.0, mu3 = 1.0, beta = 1.0;
};

// Per-frequency multipliers of the block system
//   [ b1   b4*  b5* ] [u ]   [R1]
//   [ b4   b2   b6* ] [vx] = [R2]
//   [ b5   b6   b3  ] [vy]   [R3]
// where b1 = beta A*A + mu1 Psi*Psi + mu2 grad*grad, b2/b3 carry the
// symmetrized-gradient diagonal, b4/b5 the gradient coupling and b6 the
// mixed second-order term.  Everything except A*A is translation invariant,
// so those blocks are diagonal under the unitary DFT; b1 is included only
// when the sampling operator shares that property.
struct BlockSpectra {
  int n = 0;
  SplitPenalties pen;
  SystemFlags flags;

  bool has_b1 = false;
  ImageGrid b1;      // full u-diagonal including beta * operator diagonal
  ImageGrid u_diag;  // u-diagonal without the beta A*A part
  ImageGrid b2, b3;  // real positive
  ImageGrid b4, b5, b6;
};

inline BlockSpectra assemble_spectra(const SystemFlags& flags, const SplitPenalties& pen,
                                     const MultilevelTransform* t, const SamplingOperator& A) {
  if (!(pen.mu1 > 0 && pen.mu2 > 0 && pen.mu3 > 0 && pen.beta > 0))
    throw std::invalid_argument("assemble_spectra: penalties must be strictly positive");
  if (flags.with_v && !flags.with_grad)
    throw std::invalid_argument("assemble_spectra: v requires the gradient split");
  if (flags.with_transform && t == nullptr)
    throw std::invalid_argument("assemble_spectra: transform split requested without a transform");

  const int n = A.n();
  BlockSpectra S;
  S.n = n;
  S.pen = pen;
  S.flags = flags;

  const ImageGrid sfx = fourier_symbol(DiffOp::forward_x, n);
  const ImageGrid sfy = fourier_symbol(DiffOp::forward_y, n);
  const ImageGrid sbx = fourier_symbol(DiffOp::backward_x, n);
  const ImageGrid sby = fourier_symbol(DiffOp::backward_y, n);

  S.u_diag = ImageGrid(n);
  for (size_t l = 0; l < S.u_diag.size(); ++l) {
    double v = 0.0;
    if (flags.with_transform) v += pen.mu1 * t->gram_fourier_diagonal()[l].real();
    if (flags.with_grad) v += pen.mu2 * (std::norm(sfx[l]) + std::norm(sfy[l]));
    S.u_diag[l] = v;
  }

  if (const ImageGrid* diag = A.fourier_diagonal()) {
    S.has_b1 = true;
    S.b1 = ImageGrid(n);
    for (size_t l = 0; l < S.b1.size(); ++l) S.b1[l] = pen.beta * (*diag)[l] + S.u_diag[l];
  }

  if (flags.with_v) {
    S.b2 = ImageGrid(n);
    S.b3 = ImageGrid(n);
    S.b4 = ImageGrid(n);
    S.b5 = ImageGrid(n);
    S.b6 = ImageGrid(n);
    for (size_t l = 0; l < S.b2.size(); ++l) {
      const double ax = std::norm(sbx[l]), ay = std::norm(sby[l]);
      S.b2[l] = pen.mu3 * ax + 0.5 * pen.mu3 * ay + pen.mu2;
      S.b3[l] = pen.mu3 * ay + 0.5 * pen.mu3 * ax + pen.mu2;
      S.b4[l] = -pen.mu2 * sfx[l];
      S.b5[l] = -pen.mu2 * sfy[l];
      S.b6[l] = 0.5 * pen.mu3 * std::conj(sbx[l]) * sby[l];
    }
  }
  return S;
}

struct RightHandSide {
  ImageGrid r1;
  VectorField r23;  // present only when the system has v rows
};

// Assembles the right-hand side of the (u, v) system from the current
// splitting variables.  `target` is the measurement vector the data term
// currently aims at (y + y_k, or the accumulated y_k depending on the
// configured variant); disabled branches pass null.
inline RightHandSide build_rhs(const SystemFlags& flags, const SplitPenalties& pen,
                               const MultilevelTransform* t, const SamplingOperator& A,
                               const std::vector<cplx>& target, const SubbandStack* w,
                               const SubbandStack* bw, const VectorField* d,
                               const VectorField* bd, const SymTensorField* tt,
                               const SymTensorField* bt) {
  RightHandSide rhs;
  rhs.r1 = A.adjoint(target);
  rhs.r1 *= pen.beta;

  if (flags.with_transform) {
    SubbandStack diff = *w;
    for (size_t j = 0; j < diff.size(); ++j) diff[j] -= (*bw)[j];
    ImageGrid a = t->adjoint_analyze(diff);
    a *= pen.mu1;
    rhs.r1 += a;
  }
  if (flags.with_grad) {
    VectorField diff = *d;
    diff -= *bd;
    ImageGrid a = forward_gradient_adjoint(diff);
    a *= pen.mu2;
    rhs.r1 += a;
  }
  if (flags.with_v) {
    SymTensorField tdiff = *tt;
    tdiff -= *bt;
    // mu2 (b^d - d) + mu3 E^*(t - b^t), componentwise
    rhs.r23 = VectorField(A.n());
    rhs.r23.x = diff_x_backward_adjoint(tdiff.xx);
    rhs.r23.x += diff_y_backward_adjoint(tdiff.xy);
    rhs.r23.x *= pen.mu3;
    rhs.r23.y = diff_x_backward_adjoint(tdiff.xy);
    rhs.r23.y += diff_y_backward_adjoint(tdiff.yy);
    rhs.r23.y *= pen.mu3;
    for (size_t l = 0; l < rhs.r23.x.size(); ++l) {
      rhs.r23.x[l] += pen.mu2 * ((*bd).x[l] - (*d).x[l]);
      rhs.r23.y[l] += pen.mu2 * ((*bd).y[l] - (*d).y[l]);
    }
  }
  return rhs;
}

struct UvSolution {
  ImageGrid u;
  VectorField v;
};

namespace detail {

// Solve a 3x3 complex system by partial-pivot elimination; fallback for
// near-underflow Cramer determinants.
inline std::array<cplx, 3> gauss3(std::array<std::array<cplx, 3>, 3> a, std::array<cplx, 3> r) {
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int i = c + 1; i < 3; ++i)
      if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
    std::swap(a[c], a[piv]);
    std::swap(r[c], r[piv]);
    for (int i = c + 1; i < 3; ++i) {
      const cplx f = a[i][c] / a[c][c];
      for (int j = c; j < 3; ++j) a[i][j] -= f * a[c][j];
      r[i] -= f * r[c];
    }
  }
  std::array<cplx, 3> x{};
  for (int i = 2; i >= 0; --i) {
    cplx s = r[i];
    for (int j = i + 1; j < 3; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace detail

// Exact per-frequency solve (Cramer's rule) for operators whose A*A is
// Fourier-diagonal.
inline UvSolution solve_diagonal(const BlockSpectra& S, const RightHandSide& rhs) {
  if (!S.has_b1) throw std::invalid_argument("solve_diagonal: operator lacks a Fourier diagonal");
  const int n = S.n;
  UvSolution out;

  ImageGrid R1 = Fft::forward(rhs.r1);
  if (!S.flags.with_v) {
    for (size_t l = 0; l < R1.size(); ++l) R1[l] /= S.b1[l];
    out.u = Fft::inverse(R1);
    out.v = VectorField(n);
    return out;
  }

  ImageGrid R2 = Fft::forward(rhs.r23.x);
  ImageGrid R3 = Fft::forward(rhs.r23.y);
  ImageGrid U(n), Vx(n), Vy(n);

  for (size_t l = 0; l < R1.size(); ++l) {
    const cplx a11 = S.b1[l], a12 = std::conj(S.b4[l]), a13 = std::conj(S.b5[l]);
    const cplx a21 = S.b4[l], a22 = S.b2[l], a23 = std::conj(S.b6[l]);
    const cplx a31 = S.b5[l], a32 = S.b6[l], a33 = S.b3[l];
    auto det3 = [](cplx c11, cplx c12, cplx c13, cplx c21, cplx c22, cplx c23, cplx c31, cplx c32,
                   cplx c33) {
      return c11 * (c22 * c33 - c23 * c32) - c12 * (c21 * c33 - c23 * c31) +
             c13 * (c21 * c32 - c22 * c31);
    };
    const cplx det = det3(a11, a12, a13, a21, a22, a23, a31, a32, a33);
    if (std::abs(det) < 1e-300) {
      auto x = detail::gauss3({{{a11, a12, a13}, {a21, a22, a23}, {a31, a32, a33}}},
                              {R1[l], R2[l], R3[l]});
      U[l] = x[0];
      Vx[l] = x[1];
      Vy[l] = x[2];
      continue;
    }
    U[l] = det3(R1[l], a12, a13, R2[l], a22, a23, R3[l], a32, a33) / det;
    Vx[l] = det3(a11, R1[l], a13, a21, R2[l], a23, a31, R3[l], a33) / det;
    Vy[l] = det3(a11, a12, R1[l], a21, a22, R2[l], a31, a32, R3[l]) / det;
  }

  out.u = Fft::inverse(U);
  out.v = VectorField(Fft::inverse(Vx), Fft::inverse(Vy));
  return out;
}

struct CgStats {
  int iterations = 0;
  double rel_residual = 0.0;
};

// Lower-triangular reduction for operators without a Fourier diagonal: the
// v rows stay per-frequency diagonal and are eliminated exactly, leaving a
// single SPD system in u,
//   (beta A*A + F* diag(u_diag - s) F) u = reduced RHS,
// solved by conjugate gradients from the warm start; v is recovered by
// exact back-substitution.  The v part of the warm start is unused (v is
// never iterated on).
inline UvSolution solve_triangular_cg(const BlockSpectra& S, const RightHandSide& rhs,
                                      const SamplingOperator& A, const ImageGrid& warm_u,
                                      const VectorField& /*warm_v*/, int cg_iters, double cg_tol,
                                      CgStats* stats = nullptr) {
  const int n = S.n;
  const size_t nn = size_t(n) * n;
  const bool with_v = S.flags.with_v;

  ImageGrid R1 = Fft::forward(rhs.r1);
  ImageGrid R2(n), R3(n);
  // Per-frequency 2x2 inverse of M = [[b2, conj(b6)], [b6, b3]] and the
  // Schur correction s = z^H M^{-1} z with z = (b4, b5).
  ImageGrid mi11(n), mi12(n), mi22(n);
  std::vector<double> dred(nn);
  if (with_v) {
    R2 = Fft::forward(rhs.r23.x);
    R3 = Fft::forward(rhs.r23.y);
    for (size_t l = 0; l < nn; ++l) {
      const double b2 = S.b2[l].real(), b3 = S.b3[l].real();
      const cplx b6 = S.b6[l];
      const double det = b2 * b3 - std::norm(b6);
      mi11[l] = b3 / det;
      mi22[l] = b2 / det;
      mi12[l] = -std::conj(b6) / det;  // entry (1,2); (2,1) is its conjugate
      const cplx z1 = S.b4[l], z2 = S.b5[l];
      const cplx m1 = mi11[l] * z1 + mi12[l] * z2;
      const cplx m2 = std::conj(mi12[l]) * z1 + mi22[l] * z2;
      const double s = (std::conj(z1) * m1 + std::conj(z2) * m2).real();
      dred[l] = S.u_diag[l].real() - s;
    }
  } else {
    for (size_t l = 0; l < nn; ++l) dred[l] = S.u_diag[l].real();
  }

  // Reduced right-hand side in the u row.
  ImageGrid B(n);
  for (size_t l = 0; l < nn; ++l) {
    cplx corr = 0;
    if (with_v) {
      const cplx m1 = mi11[l] * R2[l] + mi12[l] * R3[l];
      const cplx m2 = std::conj(mi12[l]) * R2[l] + mi22[l] * R3[l];
      corr = std::conj(S.b4[l]) * m1 + std::conj(S.b5[l]) * m2;
    }
    B[l] = R1[l] - corr;
  }
  ImageGrid b = Fft::inverse(B);

  auto apply = [&](const ImageGrid& x) {
    ImageGrid hat = Fft::forward(x);
    for (size_t l = 0; l < nn; ++l) hat[l] *= dred[l];
    ImageGrid out = Fft::inverse(hat);
    ImageGrid ata = A.adjoint(A.forward(x));
    ata *= S.pen.beta;
    out += ata;
    return out;
  };

  // Plain CG on the Hermitian positive definite reduced system.
  ImageGrid u = warm_u.n() == n ? warm_u : ImageGrid(n);
  ImageGrid r = b - apply(u);
  ImageGrid p = r;
  const double bnorm = b.norm2();
  double rs = dot(r, r).real();
  int it = 0;
  for (; it < cg_iters; ++it) {
    if (bnorm > 0 && std::sqrt(rs) / bnorm < cg_tol) break;
    if (rs == 0.0) break;
    ImageGrid q = apply(p);
    const double pq = dot(p, q).real();
    if (!(pq > 0.0)) throw std::runtime_error("cg: operator not positive definite (adjoint mismatch?)");
    const double alpha = rs / pq;
    for (size_t l = 0; l < nn; ++l) {
      u[l] += alpha * p[l];
      r[l] -= alpha * q[l];
    }
    const double rs2 = dot(r, r).real();
    const double beta = rs2 / rs;
    rs = rs2;
    for (size_t l = 0; l < nn; ++l) p[l] = r[l] + beta * p[l];
  }
  if (stats) {
    stats->iterations = it;
    stats->rel_residual = bnorm > 0 ? std::sqrt(rs) / bnorm : 0.0;
  }

  UvSolution out;
  out.u = u;
  out.v = VectorField(n);
  if (with_v) {
    ImageGrid U = Fft::forward(u);
    ImageGrid Vx(n), Vy(n);
    for (size_t l = 0; l < nn; ++l) {
      const cplx c2 = R2[l] - S.b4[l] * U[l];
      const cplx c3 = R3[l] - S.b5[l] * U[l];
      Vx[l] = mi11[l] * c2 + mi12[l] * c3;
      Vy[l] = std::conj(mi12[l]) * c2 + mi22[l] * c3;
    }
    out.v = VectorField(Fft::inverse(Vx), Fft::inverse(Vy));
  }
  return out;
}

// Applies the full block system to (u, v) through the actual operators
// (A used directly, translation-invariant parts via their spectra); used to
// measure solve residuals.
inline RightHandSide apply_system(const BlockSpectra& S, const SamplingOperator& A,
                                  const ImageGrid& u, const VectorField& v) {
  const int n = S.n;
  const size_t nn = size_t(n) * n;
  ImageGrid U = Fft::forward(u);

  RightHandSide out;
  {
    ImageGrid hat(n);
    for (size_t l = 0; l < nn; ++l) hat[l] = S.u_diag[l] * U[l];
    if (S.flags.with_v) {
      ImageGrid Vx = Fft::forward(v.x), Vy = Fft::forward(v.y);
      for (size_t l = 0; l < nn; ++l)
        hat[l] += std::conj(S.b4[l]) * Vx[l] + std::conj(S.b5[l]) * Vy[l];
      out.r23 = VectorField(n);
      ImageGrid h2(n), h3(n);
      for (size_t l = 0; l < nn; ++l) {
        h2[l] = S.b4[l] * U[l] + S.b2[l] * Vx[l] + std::conj(S.b6[l]) * Vy[l];
        h3[l] = S.b5[l] * U[l] + S.b6[l] * Vx[l] + S.b3[l] * Vy[l];
      }
      out.r23.x = Fft::inverse(h2);
      out.r23.y = Fft::inverse(h3);
    }
    out.r1 = Fft::inverse(hat);
    ImageGrid ata = A.adjoint(A.forward(u));
    ata *= S.pen.beta;
    out.r1 += ata;
  }
  return out;
}

}  // namespace csrecon
