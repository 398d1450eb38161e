#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "fft.hpp"
#include "grid.hpp"

namespace csrecon {

// A stack of same-sized coefficient planes, one per subband.  Index 0 is
// always the residual lowpass plane; the generating transform describes the
// rest through its layout().
using SubbandStack = std::vector<ImageGrid>;

inline SubbandStack make_stack(size_t count, int n) {
  return SubbandStack(count, ImageGrid(n));
}

struct SubbandInfo {
  int scale = 0;          // 0 for the lowpass plane, 1 = coarsest detail scale
  std::string direction;  // e.g. "LL", "LH", "HL", "HH" or "cone0:+2"
  bool is_lowpass = false;
};

// Redundant multilevel analysis operator Psi.  Both provided constructions
// are Parseval tight frames (Psi^* Psi = a I with a = 1), so synthesize()
// is simultaneously (1/a) times the adjoint and a left inverse of
// analyze(); the Gram diagonal is kept explicit anyway so downstream code
// never has to assume tightness.
class MultilevelTransform {
public:
  virtual ~MultilevelTransform() = default;

  virtual SubbandStack analyze(const ImageGrid& u) const = 0;
  virtual ImageGrid adjoint_analyze(const SubbandStack& c) const = 0;

  ImageGrid synthesize(const SubbandStack& c) const {
    ImageGrid u = adjoint_analyze(c);
    u *= 1.0 / frame_bound();
    return u;
  }

  virtual int subband_count() const = 0;
  virtual int grid_size() const = 0;
  virtual std::string name() const = 0;
  virtual const std::vector<SubbandInfo>& layout() const = 0;
  virtual double frame_bound() const = 0;

  // Per-frequency spectrum of Psi^* Psi under the unitary DFT (the operator
  // is translation invariant, so its Gram matrix is diagonalized by F).
  virtual const ImageGrid& gram_fourier_diagonal() const = 0;
};

// Shared engine: every subband is a frequency multiplier applied under the
// unitary DFT.  analyze costs one forward FFT plus one inverse FFT per
// band; adjoint_analyze is the mirror image with conjugated multipliers.
class MultiplierBank : public MultilevelTransform {
public:
  SubbandStack analyze(const ImageGrid& u) const override {
    if (u.n() != n_) throw std::invalid_argument(name() + ": analyze size mismatch");
    ImageGrid hat = Fft::forward(u);
    SubbandStack c;
    c.reserve(mult_.size());
    ImageGrid tmp(n_);
    for (const auto& m : mult_) {
      for (size_t l = 0; l < tmp.size(); ++l) tmp[l] = m[l] * hat[l];
      c.push_back(Fft::inverse(tmp));
    }
    return c;
  }

  ImageGrid adjoint_analyze(const SubbandStack& c) const override {
    if (int(c.size()) != subband_count())
      throw std::invalid_argument(name() + ": subband count mismatch");
    ImageGrid acc(n_);
    for (size_t b = 0; b < mult_.size(); ++b) {
      if (c[b].n() != n_) throw std::invalid_argument(name() + ": subband size mismatch");
      ImageGrid hat = Fft::forward(c[b]);
      const auto& m = mult_[b];
      for (size_t l = 0; l < acc.size(); ++l) acc[l] += std::conj(m[l]) * hat[l];
    }
    return Fft::inverse(acc);
  }

  int subband_count() const override { return int(mult_.size()); }
  int grid_size() const override { return n_; }
  const std::vector<SubbandInfo>& layout() const override { return layout_; }
  double frame_bound() const override { return bound_; }
  const ImageGrid& gram_fourier_diagonal() const override { return gram_; }

  const std::vector<ImageGrid>& multipliers() const { return mult_; }

protected:
  MultiplierBank(int n, std::vector<ImageGrid> mult, std::vector<SubbandInfo> layout)
      : n_(n), mult_(std::move(mult)), layout_(std::move(layout)), gram_(n) {
    for (const auto& m : mult_)
      for (size_t l = 0; l < gram_.size(); ++l) gram_[l] += std::norm(m[l]);
    // The constructions below aim for an exact partition of unity; record
    // the realized bound rather than assuming it.
    bound_ = 0.0;
    for (size_t l = 0; l < gram_.size(); ++l) bound_ = std::max(bound_, gram_[l].real());
  }

  int n_;
  std::vector<ImageGrid> mult_;  // per band, DFT index order
  std::vector<SubbandInfo> layout_;
  ImageGrid gram_;
  double bound_ = 1.0;
};

namespace detail {

// Meyer auxiliary polynomial: smooth ramp with nu(0) = 0, nu(1) = 1 and
// nu(x) + nu(1-x) = 1, which makes the cos/sin crossfades below sum to one
// exactly.
inline double meyer_nu(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}

inline double rise(double x) { return std::sin(0.5 * std::numbers::pi * meyer_nu(x)); }
inline double fall(double x) { return std::cos(0.5 * std::numbers::pi * meyer_nu(x)); }

}  // namespace detail

enum class WaveletKind { haar, db2, db4 };

inline const char* to_string(WaveletKind k) {
  switch (k) {
    case WaveletKind::haar: return "haar";
    case WaveletKind::db2: return "db2";
    case WaveletKind::db4: return "db4";
  }
  return "?";
}

namespace detail {

inline std::vector<double> wavelet_lowpass_taps(WaveletKind kind) {
  const double s2 = std::numbers::sqrt2;
  switch (kind) {
    case WaveletKind::haar:
      return {1.0 / s2, 1.0 / s2};
    case WaveletKind::db2: {
      const double r3 = std::sqrt(3.0);
      const double d = 4.0 * s2;
      return {(1.0 + r3) / d, (3.0 + r3) / d, (3.0 - r3) / d, (1.0 - r3) / d};
    }
    case WaveletKind::db4:
      return {0.23037781330885523, 0.71484657055254153, 0.63088076792959036,
              -0.02798376941698385, -0.18703481171888114, 0.03084138183598697,
              0.03288301166698295, -0.01059740178499728};
  }
  throw std::logic_error("unknown wavelet kind");
}

}  // namespace detail

// Undecimated (a-trous) separable wavelet frame.  Stage s applies the base
// quadrature-mirror pair upsampled by 2^(s-1); dividing both filters by
// sqrt(2) per stage makes |H|^2 + |G|^2 = 1 at every frequency, so the
// redundant transform is a Parseval frame (bound a = 1).
//
// Band order: lowpass first, then scales from coarsest to finest, each
// contributing LH, HL, HH detail planes (first letter = filter along x /
// columns, second = filter along y / rows) -> 3*levels + 1 bands.
class StationaryWavelet : public MultiplierBank {
public:
  StationaryWavelet(WaveletKind kind, int levels, int n)
      : MultiplierBank(n, build(kind, levels, n), label(levels)), kind_(kind), levels_(levels) {}

  std::string name() const override {
    return std::string("swt-") + to_string(kind_) + "-" + std::to_string(levels_);
  }
  WaveletKind kind() const { return kind_; }
  int levels() const { return levels_; }

private:
  static std::vector<SubbandInfo> label(int levels) {
    std::vector<SubbandInfo> s{{0, "LL", true}};
    for (int lev = levels; lev >= 1; --lev) {
      const int scale = levels - lev + 1;  // 1 = coarsest detail scale
      s.push_back({scale, "LH", false});
      s.push_back({scale, "HL", false});
      s.push_back({scale, "HH", false});
    }
    return s;
  }

  static std::vector<ImageGrid> build(WaveletKind kind, int levels, int n) {
    if (levels < 1) throw std::invalid_argument("StationaryWavelet: levels must be >= 1");
    if (n % (1 << levels) != 0)
      throw std::invalid_argument("StationaryWavelet: grid side must be divisible by 2^levels");

    const std::vector<double> h = detail::wavelet_lowpass_taps(kind);
    const int taps = int(h.size());
    std::vector<double> g(taps);
    for (int t = 0; t < taps; ++t) g[t] = (t % 2 ? -1.0 : 1.0) * h[taps - 1 - t];

    // 1D DFT response of a filter upsampled by `stride`, with the Parseval
    // 1/sqrt(2) folded in.
    const double w0 = 2.0 * std::numbers::pi / n;
    auto response = [&](const std::vector<double>& f, int stride) {
      std::vector<cplx> r(n);
      for (int k = 0; k < n; ++k) {
        cplx s = 0;
        for (int t = 0; t < taps; ++t)
          s += f[t] * std::polar(1.0, -w0 * double(k) * double(stride) * double(t));
        r[k] = s / std::numbers::sqrt2;
      }
      return r;
    };

    std::vector<std::vector<cplx>> H(levels), G(levels);
    for (int s = 0; s < levels; ++s) {
      H[s] = response(h, 1 << s);
      G[s] = response(g, 1 << s);
    }

    // Accumulated 1D lowpass product through the first s stages.
    std::vector<std::vector<cplx>> A(levels + 1, std::vector<cplx>(n, cplx(1.0)));
    for (int s = 1; s <= levels; ++s)
      for (int k = 0; k < n; ++k) A[s][k] = A[s - 1][k] * H[s - 1][k];

    // Separable 2D multiplier: rows carry the y response, columns the x
    // response.
    auto plane = [&](const std::vector<cplx>& fx, const std::vector<cplx>& fy) {
      ImageGrid m(n);
      for (int k1 = 0; k1 < n; ++k1)
        for (int k2 = 0; k2 < n; ++k2) m.at(k1, k2) = fy[k1] * fx[k2];
      return m;
    };
    auto axis = [&](int s, bool high) {
      std::vector<cplx> r(n);
      const auto& stage = high ? G[s - 1] : H[s - 1];
      for (int k = 0; k < n; ++k) r[k] = A[s - 1][k] * stage[k];
      return r;
    };

    std::vector<ImageGrid> bands;
    bands.push_back(plane(A[levels], A[levels]));  // lowpass
    for (int s = levels; s >= 1; --s) {            // coarsest detail scale first
      bands.push_back(plane(axis(s, false), axis(s, true)));   // LH
      bands.push_back(plane(axis(s, true), axis(s, false)));   // HL
      bands.push_back(plane(axis(s, true), axis(s, true)));    // HH
    }
    return bands;
  }

  WaveletKind kind_;
  int levels_;
};

// Band-limited cone-adapted shearlet frame, built directly in the frequency
// domain.  The square of frequencies is split into dyadic radial rings
// (sup-norm radius, so the outermost ring reaches the grid corners exactly)
// and each ring into shear-indexed wedges per cone.  The two diagonal
// wedges of every ring are shared between the cones at weight 1/sqrt(2)
// each, which keeps the squared multipliers an exact partition of unity.
//
// Band order: lowpass, then per scale (coarsest first): horizontal cone
// shears -K..K, vertical cone shears -K..K, with K = 2^dirs[scale]
// -> 1 + sum_j 2*(2*2^dirs[j] + 1) bands.
class ConeShearlet : public MultiplierBank {
public:
  ConeShearlet(int levels, std::vector<int> dir_exponents, int n)
      : MultiplierBank(n, build(levels, dir_exponents, n), label(levels, dir_exponents)),
        levels_(levels),
        dirs_(std::move(dir_exponents)) {}

  std::string name() const override { return "shearlet-" + std::to_string(levels_); }
  int levels() const { return levels_; }
  const std::vector<int>& dir_exponents() const { return dirs_; }

  static int expected_bands(const std::vector<int>& dirs) {
    int b = 1;
    for (int d : dirs) b += 2 * (2 * (1 << d) + 1);
    return b;
  }

private:
  static std::vector<SubbandInfo> label(int levels, const std::vector<int>& dirs) {
    std::vector<SubbandInfo> s{{0, "LL", true}};
    for (int j = 0; j < levels; ++j) {
      const int K = 1 << dirs[j];
      for (int cone = 0; cone < 2; ++cone)
        for (int l = -K; l <= K; ++l)
          s.push_back({j + 1,
                       "cone" + std::to_string(cone) + ":" + (l >= 0 ? "+" : "") + std::to_string(l),
                       false});
    }
    return s;
  }

  static std::vector<ImageGrid> build(int levels, const std::vector<int>& dirs, int n) {
    if (levels < 1) throw std::invalid_argument("ConeShearlet: levels must be >= 1");
    if (int(dirs.size()) != levels)
      throw std::invalid_argument("ConeShearlet: need one direction exponent per scale");
    for (int d : dirs)
      if (d < 0 || d > 6) throw std::invalid_argument("ConeShearlet: direction exponent out of range");
    if (n < 32 || (n & (n - 1)) != 0)
      throw std::invalid_argument("ConeShearlet: grid side must be a power of two, >= 32");
    if (n < (4 << levels))
      throw std::invalid_argument("ConeShearlet: too many scales for this grid size");

    const double t0 = double(n) / double(2 << levels);  // innermost ring knot

    // Radial ring windows in the sup-norm radius r: the lowpass is flat
    // below t0 and fades out by 2*t0; ring j rises on [t_j, 2 t_j] and
    // falls on [2 t_j, 4 t_j]; the outermost ring stays at one out to the
    // corner so the partition covers the whole square.
    auto ring = [&](int j, double r) -> double {
      const double tj = t0 * double(1 << j);
      if (r < tj) return 0.0;
      if (r < 2.0 * tj) return detail::rise((r - tj) / tj);
      if (j == levels - 1) return 1.0;
      if (r < 4.0 * tj) return detail::fall((r - 2.0 * tj) / (2.0 * tj));
      return 0.0;
    };
    auto low = [&](double r) -> double {
      if (r <= t0) return 1.0;
      if (r < 2.0 * t0) return detail::fall((r - t0) / t0);
      return 0.0;
    };

    // Angular bump in slope space; unit-spaced translates satisfy
    // bump(x)^2 + bump(x-1)^2 = 1 on the overlap.
    auto bump = [](double x) -> double {
      const double a = std::abs(x);
      return a >= 1.0 ? 0.0 : detail::fall(a);
    };

    auto signed_freq = [&](int k) { return k <= n / 2 ? k : k - n; };

    std::vector<ImageGrid> bands;
    ImageGrid lowpass(n);
    for (int k1 = 0; k1 < n; ++k1)
      for (int k2 = 0; k2 < n; ++k2) {
        const double ky = signed_freq(k1), kx = signed_freq(k2);
        lowpass.at(k1, k2) = low(std::max(std::abs(kx), std::abs(ky)));
      }
    bands.push_back(std::move(lowpass));

    const double half = 1.0 / std::numbers::sqrt2;
    for (int j = 0; j < levels; ++j) {
      const int K = 1 << dirs[j];
      for (int cone = 0; cone < 2; ++cone) {
        for (int l = -K; l <= K; ++l) {
          ImageGrid m(n);
          for (int k1 = 0; k1 < n; ++k1) {
            for (int k2 = 0; k2 < n; ++k2) {
              const double ky = signed_freq(k1), kx = signed_freq(k2);
              const double r = std::max(std::abs(kx), std::abs(ky));
              if (r == 0.0) continue;
              const double rad = ring(j, r);
              if (rad == 0.0) continue;
              const bool in_h = std::abs(kx) >= std::abs(ky);
              const bool in_v = std::abs(ky) >= std::abs(kx);
              double ang = 0.0;
              if (std::abs(l) < K) {
                // Interior wedge, confined to its own cone.
                if (cone == 0 ? in_h : in_v) {
                  const double s = cone == 0 ? ky / kx : kx / ky;
                  ang = bump(double(K) * s - double(l));
                }
              } else {
                // Diagonal wedge shared by both cones at half energy,
                // parametrized from whichever cone the point lies in.
                const double sgn = l > 0 ? 1.0 : -1.0;
                if (in_h)
                  ang = half * bump(double(K) * (ky / kx) - sgn * double(K));
                else if (in_v)
                  ang = half * bump(double(K) * (kx / ky) - sgn * double(K));
              }
              m.at(k1, k2) = rad * ang;
            }
          }
          bands.push_back(std::move(m));
        }
      }
    }
    return bands;
  }

  int levels_;
  std::vector<int> dirs_;
};

inline std::unique_ptr<MultilevelTransform> make_wavelet(WaveletKind kind, int levels, int n) {
  return std::make_unique<StationaryWavelet>(kind, levels, n);
}

inline std::unique_ptr<MultilevelTransform> make_shearlet(int levels, std::vector<int> dirs,
                                                          int n) {
  return std::make_unique<ConeShearlet>(levels, std::move(dirs), n);
}

}  // namespace csrecon
