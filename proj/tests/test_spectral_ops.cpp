#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nslab/error.hpp"
#include "nslab/fft.hpp"
#include "nslab/kernels.hpp"
#include "nslab/spectral_ops.hpp"
#include "support.hpp"

using namespace nslab;
using testsupport::random_field;
using testsupport::rel_diff;

namespace {

double max_coeff_diff(const SpectralVectorField& a, const SpectralVectorField& b) {
  double m = 0.0;
  for (int j = 0; j < 3; ++j)
    for (std::size_t s = 0; s < a.coeffs[j].size(); ++s)
      m = std::max(m, std::abs(a.coeffs[j][s] - b.coeffs[j][s]));
  return m;
}

SpectralVectorField taylor_green(const Grid3& g, double amp) {
  VectorField f(g);
  const double k = g.k0();
  for (int iz = 0; iz < g.n; ++iz)
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix) {
        const double x = g.coord(ix), y = g.coord(iy), z = g.coord(iz);
        const std::size_t i = g.physical_index(ix, iy, iz);
        f.comp[0][i] = amp * std::sin(k * x) * std::cos(k * y) * std::cos(k * z);
        f.comp[1][i] = -amp * std::cos(k * x) * std::sin(k * y) * std::cos(k * z);
        f.comp[2][i] = amp * 0.3 * std::sin(2 * k * x) * std::cos(k * y);
      }
  return leray_project(transform_forward(f));
}

}  // namespace

TEST_CASE("Leray projection is idempotent and orthogonal") {
  const Grid3 g = make_grid(16, 6.0);
  const auto f = random_field(g, 1);
  const auto p = leray_project(f);
  const auto pp = leray_project(p);
  CHECK(max_coeff_diff(p, pp) <= 1e-15 * l2_norm(f));
  CHECK(p.is_solenoidal);
  CHECK(max_divergence_ratio(p) <= kDivergenceTolerance);
  CHECK(std::abs(inner_product(p, f - p)) <= 1e-10 * l2_norm(f) * l2_norm(f));
}

TEST_CASE("Leray projection annihilates gradients and keeps the mean") {
  const Grid3 g = make_grid(8, 3.0);
  SpectralScalarField phi = transform_forward([&] {
    ScalarField s(g);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal;
    for (double& x : s.data) x = normal(rng);
    return s;
  }());
  // Odd symbols vanish on Nyquist planes, so keep phi off them.
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    if (kx == g.n / 2 || ky == g.n / 2 || kz == g.n / 2) phi.coeffs[s] = cplx{};
  });
  const auto grad = gradient(phi);
  CHECK(l2_norm(leray_project(grad)) <= 1e-14 * l2_norm(grad));

  SpectralVectorField mean(g);
  mean.coeffs[0][0] = 1.5;
  CHECK(leray_project(mean).coeffs[0][0] == cplx{1.5, 0.0});
}

TEST_CASE("transverse shear is unchanged by projection") {
  const Grid3 g = make_grid(16, 10.0);
  VectorField f(g);
  for (int iz = 0; iz < g.n; ++iz)
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix)
        f.comp[0][g.physical_index(ix, iy, iz)] = std::sin(g.k0() * g.coord(iy));
  const auto s = transform_forward(f);
  CHECK(max_coeff_diff(leray_project(s), s) < 1e-15);
}

TEST_CASE("divergence of gradient is the spectral Laplacian") {
  const Grid3 g = make_grid(8, 2.0);
  ScalarField s(g);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (double& x : s.data) x = normal(rng);
  const auto phi = transform_forward(s);
  const auto lap = divergence(gradient(phi));
  double err = 0.0;
  for_each_mode(g, [&](std::size_t i, int kx, int ky, int kz) {
    if (kx == g.n / 2 || ky == g.n / 2 || kz == g.n / 2) return;  // odd symbols vanish there
    err = std::max(err, std::abs(lap.coeffs[i] + wavenumber_sq(g, kx, ky, kz) * phi.coeffs[i]));
  });
  CHECK(err < 1e-12);
}

TEST_CASE("gradient of cos is -k sin") {
  const Grid3 g = make_grid(16, 9.0);
  ScalarField s(g);
  for (int iz = 0; iz < g.n; ++iz)
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix) s.data[g.physical_index(ix, iy, iz)] = std::cos(g.k0() * g.coord(ix));
  const VectorField grad = transform_backward(gradient(transform_forward(s)));
  double err = 0.0;
  for (int ix = 0; ix < g.n; ++ix) {
    const std::size_t i = g.physical_index(ix, 3, 5);
    err = std::max(err, std::abs(grad.comp[0][i] + g.k0() * std::sin(g.k0() * g.coord(ix))));
    err = std::max({err, std::abs(grad.comp[1][i]), std::abs(grad.comp[2][i])});
  }
  CHECK(err < 1e-13);
}

TEST_CASE("dealias zeroes the outer band only") {
  const Grid3 g = make_grid(16, 1.0);
  const auto f = random_field(g, 9);
  const auto d = dealias(f);
  CHECK(l2_norm(d) <= l2_norm(f));
  const int cut = g.dealias_cutoff();
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    const bool inside = std::abs(g.signed_index(kx)) <= cut && std::abs(g.signed_index(ky)) <= cut &&
                        std::abs(g.signed_index(kz)) <= cut;
    for (int j = 0; j < 3; ++j) {
      if (inside) CHECK(d.coeffs[j][s] == f.coeffs[j][s]);
      else CHECK(d.coeffs[j][s] == cplx{});
    }
  });
  CHECK(max_coeff_diff(dealias(d), d) == 0.0);
}

TEST_CASE("pseudo-spectral product matches the convolution oracle") {
  for (int n : {8, 16}) {
    const Grid3 g = make_grid(n, 2.0 * std::numbers::pi);
    const auto u = random_field(g, 100 + n), v = random_field(g, 200 + n);
    const auto fast = tensor_divergence(u, v);
    const auto slow = testsupport::direct_tensor_divergence(u, v);
    CHECK(rel_diff(fast, slow) <= 1e-10);
  }
  const Grid3 g = make_grid(16, 2.0 * std::numbers::pi);
  const auto tg = taylor_green(g, 1.0);
  CHECK(rel_diff(tensor_divergence(tg, tg), testsupport::direct_tensor_divergence(tg, tg)) <= 1e-10);
}

TEST_CASE("nonlinear term basics") {
  const Grid3 g = make_grid(16, 5.0);
  const auto u = testsupport::smooth_random_field(g, 3, 4);
  const auto v = testsupport::smooth_random_field(g, 4, 4);
  const SpectralVectorField zero(g);
  CHECK(l2_norm(nonlinear_term(zero, v)) == 0.0);

  SpectralVectorField c(g), d(g);
  c.coeffs[0][0] = 1.0;
  c.coeffs[2][0] = -0.5;
  d.coeffs[1][0] = 2.0;
  CHECK(l2_norm(nonlinear_term(c, d)) < 1e-14);

  const auto n1 = nonlinear_term(u, v);
  CHECK(n1.is_solenoidal);
  CHECK(max_divergence_ratio(n1) <= kDivergenceTolerance);

  // Bilinearity.
  const auto w = testsupport::smooth_random_field(g, 5, 4);
  const auto lhs = nonlinear_term(2.0 * u + (-3.0) * w, v);
  const auto rhs = 2.0 * n1 + (-3.0) * nonlinear_term(w, v);
  CHECK(rel_diff(lhs, rhs) <= 1e-12);

  // Skew symmetry of the advective form for solenoidal u.
  const auto adv = tensor_divergence(u, u);
  CHECK(std::abs(inner_product(adv, dealias(u))) <= 1e-8 * l2_norm(adv) * l2_norm(u));
}

TEST_CASE("mollified nonlinear term") {
  const Grid3 g = make_grid(16, 8.0);
  const auto u = testsupport::smooth_random_field(g, 7, 5);
  const auto v = testsupport::smooth_random_field(g, 8, 5);
  CHECK(max_coeff_diff(mollified_nonlinear_term(u, v, 0.0), nonlinear_term(u, v)) == 0.0);

  // A constant field is left unchanged by the mollifier.
  SpectralVectorField c(g);
  c.coeffs[0][0] = 0.7;
  const auto sym = mollifier_symbol(g, 2.0);
  CHECK(max_coeff_diff(sym.symbol.apply(c), c) == 0.0);

  // Difference to the plain term is O(kappa^2).
  const auto base = nonlinear_term(u, v);
  const double h = g.dx();
  const double d1 = l2_norm(mollified_nonlinear_term(u, v, 0.5 * h) - base);
  const double d2 = l2_norm(mollified_nonlinear_term(u, v, 0.25 * h) - base);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("operations reject mismatched grids") {
  const auto a = random_field(make_grid(8, 1.0), 1);
  const auto b = random_field(make_grid(8, 2.0), 1);
  CHECK_THROWS_AS(nonlinear_term(a, b), InvalidArgument);
}
