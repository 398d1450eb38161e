#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace csrecon {

using cplx = std::complex<double>;

// n-by-n scalar field stored row-major (index i*n + j, i = row, j = column).
// Samples are complex; real images simply carry zero imaginary parts.
class ImageGrid {
public:
  ImageGrid() = default;

  explicit ImageGrid(int n, cplx fill = cplx(0.0)) : n_(n), v_(size_t(n) * n, fill) {
    if (n < 2) throw std::invalid_argument("ImageGrid: side length must be >= 2");
  }

  ImageGrid(int n, std::vector<cplx> data) : n_(n), v_(std::move(data)) {
    if (n < 2) throw std::invalid_argument("ImageGrid: side length must be >= 2");
    if (v_.size() != size_t(n) * n) throw std::invalid_argument("ImageGrid: data length != n^2");
  }

  int n() const { return n_; }
  size_t size() const { return v_.size(); }

  cplx& operator[](size_t l) { return v_[l]; }
  const cplx& operator[](size_t l) const { return v_[l]; }

  cplx& at(int i, int j) { return v_[size_t(i) * n_ + j]; }
  const cplx& at(int i, int j) const { return v_[size_t(i) * n_ + j]; }

  cplx* data() { return v_.data(); }
  const cplx* data() const { return v_.data(); }

  ImageGrid& operator+=(const ImageGrid& o) {
    assert(n_ == o.n_);
    for (size_t l = 0; l < v_.size(); ++l) v_[l] += o.v_[l];
    return *this;
  }
  ImageGrid& operator-=(const ImageGrid& o) {
    assert(n_ == o.n_);
    for (size_t l = 0; l < v_.size(); ++l) v_[l] -= o.v_[l];
    return *this;
  }
  ImageGrid& operator*=(double s) {
    for (auto& x : v_) x *= s;
    return *this;
  }

  friend ImageGrid operator+(ImageGrid a, const ImageGrid& b) { return a += b; }
  friend ImageGrid operator-(ImageGrid a, const ImageGrid& b) { return a -= b; }
  friend ImageGrid operator*(double s, ImageGrid a) { return a *= s; }

  double norm2() const {
    double s = 0;
    for (const auto& x : v_) s += std::norm(x);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0;
    for (const auto& x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  double max_imag() const {
    double m = 0;
    for (const auto& x : v_) m = std::max(m, std::abs(x.imag()));
    return m;
  }

  void drop_imag() {
    for (auto& x : v_) x = cplx(x.real(), 0.0);
  }

  bool all_finite() const {
    for (const auto& x : v_)
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
  }

private:
  int n_ = 0;
  std::vector<cplx> v_;
};

inline cplx dot(const ImageGrid& a, const ImageGrid& b) {
  assert(a.n() == b.n());
  cplx s = 0;
  for (size_t l = 0; l < a.size(); ++l) s += std::conj(a[l]) * b[l];
  return s;
}

// Two-component field, the TGV auxiliary variable v = (v_x, v_y).
struct VectorField {
  ImageGrid x, y;

  VectorField() = default;
  explicit VectorField(int n) : x(n), y(n) {}
  VectorField(ImageGrid vx, ImageGrid vy) : x(std::move(vx)), y(std::move(vy)) {
    if (x.n() != y.n()) throw std::invalid_argument("VectorField: component sizes differ");
  }

  int n() const { return x.n(); }

  VectorField& operator+=(const VectorField& o) { x += o.x; y += o.y; return *this; }
  VectorField& operator-=(const VectorField& o) { x -= o.x; y -= o.y; return *this; }
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }

  double norm2() const { return std::sqrt(std::pow(x.norm2(), 2) + std::pow(y.norm2(), 2)); }
  bool all_finite() const { return x.all_finite() && y.all_finite(); }
};

// Symmetric 2x2 tensor field; the off-diagonal is stored once.
struct SymTensorField {
  ImageGrid xx, xy, yy;

  SymTensorField() = default;
  explicit SymTensorField(int n) : xx(n), xy(n), yy(n) {}

  int n() const { return xx.n(); }

  SymTensorField& operator+=(const SymTensorField& o) { xx += o.xx; xy += o.xy; yy += o.yy; return *this; }
  SymTensorField& operator-=(const SymTensorField& o) { xx -= o.xx; xy -= o.xy; yy -= o.yy; return *this; }
  friend SymTensorField operator+(SymTensorField a, const SymTensorField& b) { return a += b; }
  friend SymTensorField operator-(SymTensorField a, const SymTensorField& b) { return a -= b; }

  bool all_finite() const { return xx.all_finite() && xy.all_finite() && yy.all_finite(); }
};

inline cplx dot(const VectorField& a, const VectorField& b) {
  return dot(a.x, b.x) + dot(a.y, b.y);
}

// Inner product on symmetric tensors counts the off-diagonal twice, so the
// symmetrized-gradient adjoint below is a true adjoint.
inline cplx dot(const SymTensorField& a, const SymTensorField& b) {
  return dot(a.xx, b.xx) + 2.0 * dot(a.xy, b.xy) + dot(a.yy, b.yy);
}

}  // namespace csrecon
