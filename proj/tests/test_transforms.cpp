#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "csrecon/transforms.hpp"
#include "helpers.hpp"

using namespace csrecon;
using testutil::dot;
using testutil::max_abs_diff;
using testutil::random_grid;
using testutil::random_stack;

namespace {

void check_transform_contract(const MultilevelTransform& t, std::mt19937_64& rng) {
  const int n = t.grid_size();

  // layout agrees with the band count and starts at the lowpass plane
  REQUIRE(int(t.layout().size()) == t.subband_count());
  REQUIRE(t.layout()[0].is_lowpass);
  for (int j = 1; j < t.subband_count(); ++j) REQUIRE_FALSE(t.layout()[j].is_lowpass);

  // adjoint identity <Psi u, c> = <u, Psi* c>
  for (int trial = 0; trial < 5; ++trial) {
    const ImageGrid u = random_grid(n, rng);
    const SubbandStack c = random_stack(t, rng);
    const cplx lhs = dot(t.analyze(u), c);
    const cplx rhs = dot(u, t.adjoint_analyze(c));
    REQUIRE(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
  }

  // tightness: Psi* Psi = a I with the declared bound a
  const double a = t.frame_bound();
  for (int trial = 0; trial < 3; ++trial) {
    const ImageGrid u = random_grid(n, rng);
    ImageGrid round = t.adjoint_analyze(t.analyze(u));
    round *= 1.0 / a;
    REQUIRE(max_abs_diff(round, u) < 1e-10);
  }

  // synthesize() is a left inverse of analyze()
  const ImageGrid u = random_grid(n, rng);
  REQUIRE(max_abs_diff(t.synthesize(t.analyze(u)), u) < 1e-10);

  // the Gram diagonal is flat at the declared bound (tight frame)
  const ImageGrid& gram = t.gram_fourier_diagonal();
  for (size_t l = 0; l < gram.size(); ++l) {
    REQUIRE(std::abs(std::imag(gram[l])) < 1e-12);
    REQUIRE(std::abs(std::real(gram[l]) - a) < 1e-10);
  }
}

}  // namespace

TEST_CASE("stationary wavelet transforms are Parseval tight frames", "[transforms]") {
  std::mt19937_64 rng(7001);
  for (const WaveletKind k : {WaveletKind::haar, WaveletKind::db2, WaveletKind::db4}) {
    for (const int levels : {1, 2, 3}) {
      StationaryWavelet t(k, levels, 32);
      INFO("wavelet " << t.name());
      REQUIRE(t.subband_count() == 3 * levels + 1);
      REQUIRE(std::abs(t.frame_bound() - 1.0) < 1e-10);
      check_transform_contract(t, rng);
    }
  }
}

TEST_CASE("wavelet band layout runs coarse to fine in LH/HL/HH triplets", "[transforms]") {
  StationaryWavelet t(WaveletKind::haar, 3, 32);
  const auto& lay = t.layout();
  REQUIRE(lay[0].direction == "LL");
  REQUIRE(lay[0].scale == 0);
  for (int j = 0; j < 3; ++j) {
    REQUIRE(lay[1 + 3 * j + 0].direction == "LH");
    REQUIRE(lay[1 + 3 * j + 1].direction == "HL");
    REQUIRE(lay[1 + 3 * j + 2].direction == "HH");
    for (int b = 0; b < 3; ++b) REQUIRE(lay[1 + 3 * j + b].scale == j + 1);
  }
}

TEST_CASE("lowpass filter taps have unit-energy quadrature normalization", "[transforms]") {
  for (const WaveletKind k : {WaveletKind::haar, WaveletKind::db2, WaveletKind::db4}) {
    const std::vector<double> h = detail::wavelet_lowpass_taps(k);
    double sum = 0.0, energy = 0.0;
    for (double v : h) {
      sum += v;
      energy += v * v;
    }
    // orthonormal scaling filters: sum = sqrt(2), sum of squares = 1
    REQUIRE(sum == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
    REQUIRE(energy == Catch::Approx(1.0).margin(1e-12));
  }
  REQUIRE(detail::wavelet_lowpass_taps(WaveletKind::haar).size() == 2);
  REQUIRE(detail::wavelet_lowpass_taps(WaveletKind::db2).size() == 4);
  REQUIRE(detail::wavelet_lowpass_taps(WaveletKind::db4).size() == 8);
}

TEST_CASE("wavelet analysis of a constant image concentrates in the lowpass plane",
          "[transforms]") {
  const int n = 16;
  ImageGrid u(n, cplx(1.0));
  StationaryWavelet t(WaveletKind::haar, 2, n);
  const SubbandStack c = t.analyze(u);
  for (int j = 1; j < t.subband_count(); ++j)
    for (size_t l = 0; l < c[j].size(); ++l) REQUIRE(std::abs(c[j][l]) < 1e-12);
  // Parseval: total coefficient energy equals image energy
  double e = 0.0;
  for (const auto& band : c)
    for (size_t l = 0; l < band.size(); ++l) e += std::norm(band[l]);
  REQUIRE(e == Catch::Approx(double(n) * n).margin(1e-9));
}

TEST_CASE("cone shearlet is a Parseval tight frame with the advertised band count",
          "[transforms]") {
  std::mt19937_64 rng(7002);
  ConeShearlet t(2, {2, 2}, 32);
  REQUIRE(t.subband_count() == ConeShearlet::expected_bands({2, 2}));
  REQUIRE(std::abs(t.frame_bound() - 1.0) < 1e-10);
  check_transform_contract(t, rng);
}

TEST_CASE("shearlet bands are organized per scale and cone", "[transforms]") {
  ConeShearlet t(2, {1, 2}, 64);
  const auto& lay = t.layout();
  REQUIRE(lay[0].is_lowpass);
  // scale 1 with exponent 1: 2 cones x (2*2+1) directions
  int idx = 1;
  for (int cone = 0; cone < 2; ++cone)
    for (int l = -2; l <= 2; ++l) {
      REQUIRE(lay[idx].scale == 1);
      REQUIRE(lay[idx].direction.find("cone" + std::to_string(cone)) == 0);
      ++idx;
    }
  // scale 2 with exponent 2: 2 cones x (2*4+1) directions
  for (int cone = 0; cone < 2; ++cone)
    for (int l = -4; l <= 4; ++l) {
      REQUIRE(lay[idx].scale == 2);
      ++idx;
    }
  REQUIRE(idx == t.subband_count());
}

TEST_CASE("factory helpers build the configured transforms", "[transforms]") {
  const auto w = make_wavelet(WaveletKind::db2, 3, 32);
  REQUIRE(w->subband_count() == 10);
  REQUIRE(w->grid_size() == 32);
  const auto s = make_shearlet(2, {2, 2}, 32);
  REQUIRE(s->subband_count() == ConeShearlet::expected_bands({2, 2}));
  REQUIRE(s->grid_size() == 32);
}
