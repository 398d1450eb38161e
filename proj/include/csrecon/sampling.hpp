#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fft.hpp"
#include "grid.hpp"

namespace csrecon {

// Linear measurement operator A mapping an n x n image to m samples.  The
// adjoint is always the exact conjugate transpose of the forward map; when
// F A^* A F^* is diagonal the operator exposes the diagonal so solvers can
// work per frequency instead of iterating.
class SamplingOperator {
public:
  virtual ~SamplingOperator() = default;

  virtual int n() const = 0;
  virtual size_t measurement_count() const = 0;
  virtual std::vector<cplx> forward(const ImageGrid& u) const = 0;
  virtual ImageGrid adjoint(const std::vector<cplx>& y) const = 0;
  virtual std::string name() const = 0;

  // Per-frequency multipliers of F A^* A F^* when that matrix is diagonal;
  // null otherwise.
  virtual const ImageGrid* fourier_diagonal() const { return nullptr; }

  // True when A^* A is diagonal in the pixel domain (masking operators).
  virtual bool pixel_diagonal() const { return false; }

  ImageGrid normal(const ImageGrid& u) const { return adjoint(forward(u)); }
};

// Radial line mask over the centered frequency square.  Stored in centered
// (DC at index n/2) layout; the Fourier operator handles the index shift.
struct RadialMask {
  int n = 0;
  int line_count = 0;
  std::vector<std::uint8_t> mask;  // centered layout, row-major, 0/1
  double sampling_rate = 0.0;

  bool at(int i, int j) const { return mask[size_t(i) * n + j] != 0; }
};

// Rasterizes `line_count` equiangular diameters through the centered
// origin, stepping one pixel along the dominant axis of each line
// (Bresenham-style nearest-pixel).  The seed only rotates the whole fan by
// a random global offset; the DC pixel is always sampled.
inline RadialMask make_radial_mask(int n, int line_count, std::uint64_t seed = 0) {
  if (n < 2) throw std::invalid_argument("make_radial_mask: n must be >= 2");
  if (line_count < 1 || line_count > n)
    throw std::invalid_argument("make_radial_mask: line_count out of range [1, n]");

  RadialMask r;
  r.n = n;
  r.line_count = line_count;
  r.mask.assign(size_t(n) * n, 0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double offset = uni(rng) * std::numbers::pi;

  const int c = n / 2;
  auto put = [&](int i, int j) {
    if (i >= 0 && i < n && j >= 0 && j < n) r.mask[size_t(i) * n + j] = 1;
  };

  for (int l = 0; l < line_count; ++l) {
    const double th = offset + std::numbers::pi * double(l) / double(line_count);
    const double dx = std::cos(th), dy = std::sin(th);
    if (std::abs(dx) >= std::abs(dy)) {
      const double slope = dy / dx;
      for (int q = -c; q <= c; ++q) put(c + int(std::lround(slope * q)), c + q);
    } else {
      const double slope = dx / dy;
      for (int q = -c; q <= c; ++q) put(c + q, c + int(std::lround(slope * q)));
    }
  }

  size_t kept = 0;
  for (auto v : r.mask) kept += v;
  r.sampling_rate = double(kept) / double(r.mask.size());
  return r;
}

// A = P F: unitary DFT followed by selection of the masked frequencies.
// A A^* = I exactly, and F A^* A F^* is the 0/1 mask itself.
class FourierOperator : public SamplingOperator {
public:
  explicit FourierOperator(const RadialMask& mask) : n_(mask.n), diag_(mask.n) {
    const int n = n_;
    const int c = n / 2;
    // Collect sampled frequencies in DFT index order (row-major scan of the
    // unshifted grid) so measurement layout is deterministic.
    for (int k1 = 0; k1 < n; ++k1)
      for (int k2 = 0; k2 < n; ++k2) {
        const int i = (k1 + c) % n, j = (k2 + c) % n;  // centered -> DFT shift
        if (mask.at(i, j)) {
          idx_.push_back(size_t(k1) * n + k2);
          diag_[size_t(k1) * n + k2] = 1.0;
        }
      }
  }

  int n() const override { return n_; }
  size_t measurement_count() const override { return idx_.size(); }
  std::string name() const override { return "fourier"; }
  const ImageGrid* fourier_diagonal() const override { return &diag_; }

  std::vector<cplx> forward(const ImageGrid& u) const override {
    if (u.n() != n_) throw std::invalid_argument("fourier forward: size mismatch");
    ImageGrid hat = Fft::forward(u);
    std::vector<cplx> y(idx_.size());
    for (size_t t = 0; t < idx_.size(); ++t) y[t] = hat[idx_[t]];
    return y;
  }

  ImageGrid adjoint(const std::vector<cplx>& y) const override {
    if (y.size() != idx_.size()) throw std::invalid_argument("fourier adjoint: size mismatch");
    ImageGrid hat(n_);
    for (size_t t = 0; t < idx_.size(); ++t) hat[idx_[t]] = y[t];
    return Fft::inverse(hat);
  }

private:
  int n_;
  std::vector<size_t> idx_;
  ImageGrid diag_;
};

// Pixel masking: A keeps the flagged pixels and zeroes the rest, acting on
// the image domain (m = n^2, measurements are image shaped).  A is an
// orthogonal projection, hence self-adjoint with A^* A = A.
class InpaintingOperator : public SamplingOperator {
public:
  InpaintingOperator(int n, std::vector<std::uint8_t> keep) : n_(n), keep_(std::move(keep)) {
    if (keep_.size() != size_t(n) * n)
      throw std::invalid_argument("inpainting: mask length != n^2");
    for (auto v : keep_) kept_ += v ? 1 : 0;
  }

  int n() const override { return n_; }
  size_t measurement_count() const override { return keep_.size(); }
  std::string name() const override { return "inpaint"; }
  bool pixel_diagonal() const override { return true; }

  size_t kept_count() const { return kept_; }
  double sampling_rate() const { return double(kept_) / double(keep_.size()); }
  const std::vector<std::uint8_t>& keep() const { return keep_; }

  std::vector<cplx> forward(const ImageGrid& u) const override {
    if (u.n() != n_) throw std::invalid_argument("inpaint forward: size mismatch");
    std::vector<cplx> y(keep_.size());
    for (size_t l = 0; l < keep_.size(); ++l) y[l] = keep_[l] ? u[l] : cplx(0.0);
    return y;
  }

  ImageGrid adjoint(const std::vector<cplx>& y) const override {
    if (y.size() != keep_.size()) throw std::invalid_argument("inpaint adjoint: size mismatch");
    ImageGrid u(n_);
    for (size_t l = 0; l < keep_.size(); ++l) u[l] = keep_[l] ? y[l] : cplx(0.0);
    return u;
  }

private:
  int n_;
  std::vector<std::uint8_t> keep_;
  size_t kept_ = 0;
};

struct RadonOptions {
  double step = 0.5;  // ray sampling step in pixel units
};

// Discrete parallel-beam Radon transform: ray-driven line integrals with
// bilinear interpolation, assembled once into a sparse matrix whose
// transpose serves as the exact adjoint.  Rays are clipped to the convex
// hull of pixel centers [0, n-1]^2 and sampled at midpoints of equal
// subintervals, so each row's weights sum to the ray's chord length with
// that square.
class RadonOperator : public SamplingOperator {
public:
  RadonOperator(int n, int angle_count, RadonOptions opt = {})
      : n_(n), angles_(angle_count), detectors_(int(std::ceil(std::numbers::sqrt2 * n))) {
    if (angle_count < 1) throw std::invalid_argument("radon: angle_count must be >= 1");
    if (!(opt.step > 0.0)) throw std::invalid_argument("radon: step must be positive");
    assemble(opt.step);
  }

  int n() const override { return n_; }
  size_t measurement_count() const override { return size_t(angles_) * detectors_; }
  std::string name() const override { return "radon"; }
  int angle_count() const { return angles_; }
  int detector_count() const { return detectors_; }

  std::vector<cplx> forward(const ImageGrid& u) const override {
    if (u.n() != n_) throw std::invalid_argument("radon forward: size mismatch");
    std::vector<cplx> y(measurement_count(), cplx(0.0));
    for (size_t r = 0; r < y.size(); ++r) {
      cplx acc = 0;
      for (size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) acc += w_[e] * u[col_[e]];
      y[r] = acc;
    }
    return y;
  }

  ImageGrid adjoint(const std::vector<cplx>& y) const override {
    if (y.size() != measurement_count()) throw std::invalid_argument("radon adjoint: size mismatch");
    ImageGrid u(n_);
    for (size_t p = 0; p < u.size(); ++p) {
      cplx acc = 0;
      for (size_t e = t_row_ptr_[p]; e < t_row_ptr_[p + 1]; ++e) acc += t_w_[e] * y[t_col_[e]];
      u[p] = acc;
    }
    return u;
  }

  // Weight sum of one ray's matrix row; equals the chord length.
  double row_sum(size_t row) const {
    double s = 0;
    for (size_t e = row_ptr_[row]; e < row_ptr_[row + 1]; ++e) s += w_[e];
    return s;
  }

  // Analytic chord length of the same ray with the pixel-center square.
  double chord_length(size_t row) const { return chords_[row]; }

private:
  void assemble(double step) {
    const int n = n_, na = angles_, nd = detectors_;
    const double c = 0.5 * (n - 1);
    const double s0 = 0.5 * (nd - 1);
    const size_t rows = size_t(na) * nd;

    row_ptr_.assign(rows + 1, 0);
    chords_.assign(rows, 0.0);

    std::vector<std::pair<int, double>> entries;  // per-ray scratch
    std::vector<int> cols_all;
    std::vector<double> w_all;
    cols_all.reserve(rows * 8);
    w_all.reserve(rows * 8);

    for (int a = 0; a < na; ++a) {
      const double th = std::numbers::pi * double(a) / double(na);
      const double es_x = std::cos(th), es_y = std::sin(th);   // detector axis
      const double et_x = -std::sin(th), et_y = std::cos(th);  // ray direction
      for (int d = 0; d < nd; ++d) {
        const size_t row = size_t(a) * nd + d;
        const double s = double(d) - s0;
        const double px = c + s * es_x, py = c + s * es_y;  // point at t = 0

        // Clip the ray p + t*et to [0, n-1]^2.
        double t0 = -std::numeric_limits<double>::infinity();
        double t1 = std::numeric_limits<double>::infinity();
        bool empty = false;
        auto clip = [&](double p0, double dir) {
          if (std::abs(dir) < 1e-14) {
            if (p0 < 0.0 || p0 > double(n - 1)) empty = true;
            return;
          }
          double ta = (0.0 - p0) / dir, tb = (double(n - 1) - p0) / dir;
          if (ta > tb) std::swap(ta, tb);
          t0 = std::max(t0, ta);
          t1 = std::min(t1, tb);
        };
        clip(px, et_x);
        clip(py, et_y);

        entries.clear();
        if (!empty && t1 > t0) {
          const double chord = t1 - t0;
          chords_[row] = chord;
          const int ns = std::max(1, int(std::ceil(chord / step)));
          const double dt = chord / ns;
          for (int i = 0; i < ns; ++i) {
            const double t = t0 + (i + 0.5) * dt;
            double x = px + t * et_x, y = py + t * et_y;
            x = std::clamp(x, 0.0, double(n - 1));
            y = std::clamp(y, 0.0, double(n - 1));
            int jx = std::min(int(x), n - 2);
            int jy = std::min(int(y), n - 2);
            const double fx = x - jx, fy = y - jy;
            entries.push_back({jy * n + jx, dt * (1.0 - fx) * (1.0 - fy)});
            entries.push_back({jy * n + jx + 1, dt * fx * (1.0 - fy)});
            entries.push_back({(jy + 1) * n + jx, dt * (1.0 - fx) * fy});
            entries.push_back({(jy + 1) * n + jx + 1, dt * fx * fy});
          }
          std::sort(entries.begin(), entries.end(),
                    [](const auto& l, const auto& r) { return l.first < r.first; });
        }

        // merge duplicates
        for (size_t e = 0; e < entries.size();) {
          const int cidx = entries[e].first;
          double acc = 0;
          while (e < entries.size() && entries[e].first == cidx) acc += entries[e++].second;
          if (acc != 0.0) {
            cols_all.push_back(cidx);
            w_all.push_back(acc);
          }
        }
        row_ptr_[row + 1] = cols_all.size();
      }
    }

    col_.assign(cols_all.begin(), cols_all.end());
    w_ = std::move(w_all);

    // transpose (counting sort by pixel)
    const size_t np = size_t(n) * n;
    t_row_ptr_.assign(np + 1, 0);
    for (int cidx : col_) ++t_row_ptr_[size_t(cidx) + 1];
    for (size_t p = 0; p < np; ++p) t_row_ptr_[p + 1] += t_row_ptr_[p];
    t_col_.resize(col_.size());
    t_w_.resize(col_.size());
    std::vector<size_t> cur(t_row_ptr_.begin(), t_row_ptr_.end() - 1);
    for (size_t r = 0; r < rows; ++r)
      for (size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) {
        const size_t slot = cur[col_[e]]++;
        t_col_[slot] = int(r);
        t_w_[slot] = w_[e];
      }
  }

  int n_, angles_, detectors_;
  std::vector<size_t> row_ptr_;
  std::vector<int> col_;
  std::vector<double> w_;
  std::vector<size_t> t_row_ptr_;
  std::vector<int> t_col_;
  std::vector<double> t_w_;
  std::vector<double> chords_;
};

inline std::unique_ptr<SamplingOperator> fourier_operator(const RadialMask& mask) {
  return std::make_unique<FourierOperator>(mask);
}

inline std::unique_ptr<SamplingOperator> radon_operator(int n, int angle_count,
                                                        RadonOptions opt = {}) {
  return std::make_unique<RadonOperator>(n, angle_count, opt);
}

inline std::unique_ptr<SamplingOperator> inpainting_operator(int n,
                                                             std::vector<std::uint8_t> keep) {
  return std::make_unique<InpaintingOperator>(n, std::move(keep));
}

}  // namespace csrecon
