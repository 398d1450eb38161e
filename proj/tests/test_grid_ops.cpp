#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "csrecon/fft.hpp"
#include "csrecon/grid_ops.hpp"
#include "helpers.hpp"

using namespace csrecon;
using testutil::dot;
using testutil::max_abs_diff;
using testutil::random_grid;

namespace {

cplx tensor_dot(const SymTensorField& a, const SymTensorField& b) {
  // Off-diagonal counts twice: the field stores one of the two equal
  // entries of a symmetric 2x2 matrix.
  return dot(a.xx, b.xx) + 2.0 * dot(a.xy, b.xy) + dot(a.yy, b.yy);
}

cplx vec_dot(const VectorField& a, const VectorField& b) { return dot(a.x, b.x) + dot(a.y, b.y); }

}  // namespace

TEST_CASE("difference operators satisfy the adjoint identity", "[grid_ops]") {
  std::mt19937_64 rng(101);
  const int n = 17;
  for (int trial = 0; trial < 20; ++trial) {
    const ImageGrid u = random_grid(n, rng);
    const ImageGrid p = random_grid(n, rng);
    const auto check = [&](const ImageGrid& Au, const ImageGrid& Atp) {
      const cplx lhs = dot(Au, p);
      const cplx rhs = dot(u, Atp);
      REQUIRE(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
    };
    check(diff_x_forward(u), diff_x_forward_adjoint(p));
    check(diff_y_forward(u), diff_y_forward_adjoint(p));
    check(diff_x_backward(u), diff_x_backward_adjoint(p));
    check(diff_y_backward(u), diff_y_backward_adjoint(p));
  }
}

TEST_CASE("difference operators wrap periodically", "[grid_ops]") {
  const int n = 8;
  ImageGrid u(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) u.at(i, j) = cplx(j, 0.0);  // ramp in x

  const ImageGrid dx = diff_x_forward(u);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n - 1; ++j) REQUIRE(std::abs(dx.at(i, j) - cplx(1.0)) < 1e-14);
    // last column wraps to the first: 0 - (n-1)
    REQUIRE(std::abs(dx.at(i, n - 1) - cplx(1.0 - n)) < 1e-14);
  }
}

TEST_CASE("gradient and its adjoint form an adjoint pair", "[grid_ops]") {
  std::mt19937_64 rng(202);
  const int n = 23;
  for (int trial = 0; trial < 20; ++trial) {
    const ImageGrid u = random_grid(n, rng);
    VectorField p(n);
    p.x = random_grid(n, rng);
    p.y = random_grid(n, rng);
    const cplx lhs = vec_dot(forward_gradient(u), p);
    const cplx rhs = dot(u, forward_gradient_adjoint(p));
    REQUIRE(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("symmetrized gradient is adjoint under the doubled off-diagonal product",
          "[grid_ops]") {
  std::mt19937_64 rng(303);
  const int n = 19;
  for (int trial = 0; trial < 20; ++trial) {
    VectorField v(n);
    v.x = random_grid(n, rng);
    v.y = random_grid(n, rng);
    SymTensorField t(n);
    t.xx = random_grid(n, rng);
    t.xy = random_grid(n, rng);
    t.yy = random_grid(n, rng);
    const cplx lhs = tensor_dot(sym_gradient(v), t);
    const cplx rhs = vec_dot(v, sym_gradient_adjoint(t));
    REQUIRE(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("symmetrized gradient of a constant field vanishes", "[grid_ops]") {
  const int n = 12;
  VectorField v(n);
  for (size_t l = 0; l < v.x.size(); ++l) {
    v.x[l] = cplx(3.25, -1.5);
    v.y[l] = cplx(-0.75, 2.0);
  }
  const SymTensorField t = sym_gradient(v);
  REQUIRE(testutil::norm(t.xx) < 1e-13);
  REQUIRE(testutil::norm(t.xy) < 1e-13);
  REQUIRE(testutil::norm(t.yy) < 1e-13);
}

TEST_CASE("fourier symbols diagonalize the difference operators", "[grid_ops]") {
  std::mt19937_64 rng(404);
  const int n = 16;
  const ImageGrid u = random_grid(n, rng);
  const ImageGrid spec = Fft::forward(u);

  const auto check = [&](DiffOp op, const ImageGrid& direct) {
    const ImageGrid sym = fourier_symbol(op, n);
    ImageGrid prod(n);
    for (size_t l = 0; l < prod.size(); ++l) prod[l] = sym[l] * spec[l];
    const ImageGrid via_fft = Fft::inverse(prod);
    REQUIRE(max_abs_diff(via_fft, direct) < 1e-12);
  };
  check(DiffOp::forward_x, diff_x_forward(u));
  check(DiffOp::forward_y, diff_y_forward(u));
  check(DiffOp::backward_x, diff_x_backward(u));
  check(DiffOp::backward_y, diff_y_backward(u));
}

TEST_CASE("the DFT wrapper is unitary", "[grid_ops]") {
  std::mt19937_64 rng(505);
  const int n = 32;
  const ImageGrid u = random_grid(n, rng);
  const ImageGrid spec = Fft::forward(u);
  REQUIRE(std::abs(testutil::norm(spec) - testutil::norm(u)) < 1e-12);
  const ImageGrid back = Fft::inverse(spec);
  REQUIRE(max_abs_diff(back, u) < 1e-13);
}

TEST_CASE("isotropic group norms match hand-computed values", "[grid_ops]") {
  const int n = 2;
  VectorField p(n);
  p.x[0] = cplx(3.0, 0.0);
  p.y[0] = cplx(4.0, 0.0);  // magnitude 5 at pixel 0
  p.x[3] = cplx(0.0, 1.0);  // magnitude 1 at pixel 3
  REQUIRE(vec_l1_norm(p) == Catch::Approx(6.0).margin(1e-14));

  SymTensorField t(n);
  t.xx[0] = cplx(1.0, 0.0);
  t.xy[0] = cplx(2.0, 0.0);
  t.yy[0] = cplx(2.0, 0.0);  // sqrt(1 + 2*4 + 4) = sqrt(13)
  REQUIRE(tensor_l1_norm(t) == Catch::Approx(std::sqrt(13.0)).margin(1e-14));
}
