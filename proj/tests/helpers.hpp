#pragma once

// Shared randomized-input helpers for the test suite.  All randomness is
// seeded per call site so every test is reproducible in isolation.

#include <complex>
#include <random>

#include "csrecon/grid.hpp"
#include "csrecon/transforms.hpp"

namespace testutil {

using csrecon::cplx;
using csrecon::ImageGrid;

inline ImageGrid random_grid(int n, std::mt19937_64& rng, bool complex_valued = true) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ImageGrid g(n);
  for (size_t l = 0; l < g.size(); ++l)
    g[l] = complex_valued ? cplx(d(rng), d(rng)) : cplx(d(rng), 0.0);
  return g;
}

inline std::vector<cplx> random_vector(size_t m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<cplx> v(m);
  for (auto& x : v) x = cplx(d(rng), d(rng));
  return v;
}

// <a, b> = sum conj(a_l) b_l.  The grid overload lives in the library
// itself (csrecon::dot); these cover the remaining containers.
inline cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s = 0.0;
  for (size_t l = 0; l < a.size(); ++l) s += std::conj(a[l]) * b[l];
  return s;
}

inline cplx dot(const csrecon::SubbandStack& a, const csrecon::SubbandStack& b) {
  cplx s = 0.0;
  for (size_t j = 0; j < a.size(); ++j) s += csrecon::dot(a[j], b[j]);
  return s;
}

inline double norm(const ImageGrid& a) { return std::sqrt(std::abs(csrecon::dot(a, a))); }

inline double norm(const std::vector<cplx>& a) { return std::sqrt(std::abs(dot(a, a))); }

inline double max_abs_diff(const ImageGrid& a, const ImageGrid& b) {
  double m = 0.0;
  for (size_t l = 0; l < a.size(); ++l) m = std::max(m, std::abs(a[l] - b[l]));
  return m;
}

inline csrecon::SubbandStack random_stack(const csrecon::MultilevelTransform& t,
                                          std::mt19937_64& rng) {
  csrecon::SubbandStack c;
  for (int j = 0; j < t.subband_count(); ++j) c.push_back(random_grid(t.grid_size(), rng));
  return c;
}

}  // namespace testutil
