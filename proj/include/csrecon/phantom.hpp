#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "grid.hpp"

namespace csrecon {

// Deterministic test images on [0, 1].  Pixel centers map to normalized
// coordinates x, y in [-1, 1] with y pointing up.

namespace detail {

struct Ellipse {
  double value, a, b, x0, y0, phi_deg;
};

// The standard ten-ellipse head phantom.
inline const Ellipse* shepp_logan_ellipses() {
  static const Ellipse e[10] = {
      {1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
      {-0.80, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
      {-0.20, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
      {-0.20, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
      {0.10, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
      {0.10, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
      {0.10, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
      {0.10, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
      {0.10, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
      {0.10, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
  };
  return e;
}

}  // namespace detail

inline ImageGrid phantom_shepp_logan(int n) {
  ImageGrid u(n);
  const detail::Ellipse* es = detail::shepp_logan_ellipses();
  for (int i = 0; i < n; ++i) {
    const double y = (double(n - 1) - 2.0 * i) / double(n - 1);
    for (int j = 0; j < n; ++j) {
      const double x = (2.0 * j - double(n - 1)) / double(n - 1);
      double val = 0.0;
      for (int e = 0; e < 10; ++e) {
        const auto& el = es[e];
        const double phi = el.phi_deg * std::numbers::pi / 180.0;
        const double c = std::cos(phi), s = std::sin(phi);
        const double dx = x - el.x0, dy = y - el.y0;
        const double xr = c * dx + s * dy, yr = -s * dx + c * dy;
        if ((xr * xr) / (el.a * el.a) + (yr * yr) / (el.b * el.b) <= 1.0) val += el.value;
      }
      u.at(i, j) = std::clamp(val, 0.0, 1.0);
    }
  }
  return u;
}

// Constant and linear-ramp regions only: its gradient is piecewise
// constant, so the second-order penalty vanishes on region interiors.
inline ImageGrid phantom_piecewise_affine(int n) {
  ImageGrid u(n);
  for (int i = 0; i < n; ++i) {
    const double y = double(i) / double(n - 1);
    for (int j = 0; j < n; ++j) {
      const double x = double(j) / double(n - 1);
      double val = 0.20;                                   // background plateau
      if (x < 0.45 && y < 0.45) val = 0.25 + 0.5 * (x + y);  // diagonal ramp
      if (x > 0.55 && y < 0.40) val = 0.85 - 0.6 * y;        // vertical ramp
      const double dx = x - 0.30, dy = y - 0.72;
      if (dx * dx + dy * dy < 0.18 * 0.18) val = 0.90;       // constant disk
      if (x > 0.58 && x < 0.92 && y > 0.58 && y < 0.88)
        val = 0.10 + 0.7 * x;                                // horizontal ramp block
      u.at(i, j) = std::clamp(val, 0.0, 1.0);
    }
  }
  return u;
}

// Piecewise-affine geometry plus an oscillatory patch: one half of the
// image favors a gradient-based prior, the texture favors a multiscale
// sparsity prior.
inline ImageGrid phantom_texture_mix(int n) {
  ImageGrid u(n);
  for (int i = 0; i < n; ++i) {
    const double y = double(i) / double(n - 1);
    for (int j = 0; j < n; ++j) {
      const double x = double(j) / double(n - 1);
      double val = 0.15 + 0.25 * x;  // global gentle ramp
      const double dx = x - 0.70, dy = y - 0.70;
      if (dx * dx + dy * dy < 0.20 * 0.20) val = 0.85;  // constant disk
      if (x > 0.08 && x < 0.48 && y > 0.08 && y < 0.48)
        val = 0.30 + 0.4 * y;  // ramp block
      if (x > 0.10 && x < 0.55 && y > 0.55 && y < 0.92) {
        // oscillatory texture patch
        const double phase = 2.0 * std::numbers::pi * 9.0;
        val = 0.50 + 0.22 * std::sin(phase * x) * std::sin(phase * y);
      }
      u.at(i, j) = std::clamp(val, 0.0, 1.0);
    }
  }
  return u;
}

inline ImageGrid make_phantom(const std::string& name, int n) {
  if (n < 32) throw std::invalid_argument("make_phantom: n must be >= 32");
  if (name == "shepp-logan") return phantom_shepp_logan(n);
  if (name == "piecewise-affine") return phantom_piecewise_affine(n);
  if (name == "texture-mix") return phantom_texture_mix(n);
  throw std::invalid_argument("make_phantom: unknown phantom '" + name + "'");
}

}  // namespace csrecon
