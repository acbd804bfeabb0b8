#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nslab/error.hpp"
#include "nslab/fft.hpp"
#include "nslab/grid.hpp"
#include "support.hpp"

using namespace nslab;

TEST_CASE("make_grid layout and validation") {
  const Grid3 g = make_grid(8, 2.0 * std::numbers::pi);
  for (int i = 0; i < 8; ++i) CHECK(g.signed_index(i) == (i < 4 ? i : i - 8));
  CHECK(g.k0() == doctest::Approx(1.0));
  int zeros = 0;
  for (int i = 0; i < 8; ++i) zeros += g.signed_index(i) == 0;
  CHECK(zeros == 1);

  const Grid3 h = make_grid(64, 40.0);
  CHECK(h.dx() == doctest::Approx(0.625));
  CHECK(h.cell_volume() == doctest::Approx(0.244140625));

  CHECK_THROWS_AS(make_grid(7, 10.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(6, 10.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(8, 0.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(8, -1.0), InvalidArgument);
}

TEST_CASE("coordinates are minimum image") {
  const Grid3 g = make_grid(8, 4.0);
  CHECK(g.coord(0) == 0.0);
  CHECK(g.coord(4) == doctest::Approx(-2.0));
  CHECK(g.coord(7) == doctest::Approx(-0.5));
}

TEST_CASE("constant field has a single coefficient") {
  const Grid3 g = make_grid(8, 3.0);
  ScalarField f(g);
  for (double& x : f.data) x = 2.5;
  const SpectralScalarField s = transform_forward(f);
  CHECK(std::abs(s.coeffs[0] - cplx{2.5, 0.0}) < 1e-14);
  for (std::size_t i = 1; i < s.coeffs.size(); ++i) CHECK(std::abs(s.coeffs[i]) < 1e-14);
}

TEST_CASE("sine mode lands on +-k0") {
  const Grid3 g = make_grid(16, 5.0);
  ScalarField f(g);
  for (int iz = 0; iz < g.n; ++iz)
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix)
        f.data[g.physical_index(ix, iy, iz)] = std::sin(g.k0() * g.coord(ix));
  const SpectralScalarField s = transform_forward(f);
  // sin = (e^{ix} - e^{-ix}) / 2i; the half layout stores +k0 only.
  const std::size_t plus = g.spectral_index(1, 0, 0);
  CHECK(std::abs(s.coeffs[plus] - cplx{0.0, -0.5}) < 1e-14);
  double rest = 0.0;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i)
    if (i != plus) rest = std::max(rest, std::abs(s.coeffs[i]));
  CHECK(rest < 1e-14);
}

TEST_CASE("round trip and Parseval") {
  const Grid3 g = make_grid(16, 7.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  VectorField f(g);
  for (auto& c : f.comp)
    for (double& x : c) x = normal(rng);
  const SpectralVectorField s = transform_forward(f);
  const VectorField back = transform_backward(s);
  double err = 0.0, ref = 0.0, phys = 0.0;
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < f.comp[j].size(); ++i) {
      err += std::pow(back.comp[j][i] - f.comp[j][i], 2);
      ref += f.comp[j][i] * f.comp[j][i];
      phys += f.comp[j][i] * f.comp[j][i] * g.cell_volume();
    }
  CHECK(std::sqrt(err / ref) < 1e-12);
  const double spec = l2_norm(s);
  CHECK(std::abs(spec * spec - phys) / phys < 1e-10);
}

TEST_CASE("transform rejects mismatched samples") {
  const Grid3 g = make_grid(8, 1.0);
  ScalarField f(g);
  f.data.pop_back();
  CHECK_THROWS_AS(transform_forward(f), InvalidArgument);
}

TEST_CASE("multiplier composition is a pointwise product") {
  const Grid3 g = make_grid(8, 2.0);
  const auto f = testsupport::random_field(g, 11);
  const FourierMultiplier r0 = riesz_multiplier(g, 0), r1 = riesz_multiplier(g, 1);
  const auto a = (r0 * r1).apply(f);
  const auto b = r0.apply(r1.apply(f));
  CHECK(l2_norm(a - b) <= 1e-14 * l2_norm(f));
  const auto id = FourierMultiplier::identity(g).apply(f);
  CHECK(l2_norm(id - f) == 0.0);
}

TEST_CASE("sum of squared Riesz transforms is minus the identity off zero") {
  const Grid3 g = make_grid(8, 2.0);
  const auto f = testsupport::random_field(g, 5);
  SpectralVectorField acc(g);
  for (int j = 0; j < 3; ++j) {
    const auto r = riesz_multiplier(g, j);
    acc += r.apply(r.apply(f));
  }
  acc += f;
  // Only Nyquist slots, where odd symbols vanish, may survive.
  double off_nyquist = 0.0;
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    if (kx == g.n / 2 || ky == g.n / 2 || kz == g.n / 2) return;
    for (const auto& c : acc.coeffs) off_nyquist = std::max(off_nyquist, std::abs(c[s]));
  });
  CHECK(off_nyquist < 1e-14);
}
