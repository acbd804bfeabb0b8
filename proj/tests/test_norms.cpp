#include <algorithm>
#include <cmath>
#include <numbers>
#include <functional>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nslab/error.hpp"
#include "nslab/fft.hpp"
#include "nslab/kernels.hpp"
#include "nslab/norms.hpp"
#include "support.hpp"

using namespace nslab;

namespace {

constexpr double kPi = std::numbers::pi;

// Exact sup over every nonempty subset of a small sample.
double weak_by_enumeration(const std::vector<double>& f, double dv, double p) {
  const double q = p / (p - 1.0);
  const std::size_t n = f.size();
  double best = 0.0;
  for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
    double integral = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) {
        integral += std::abs(f[i]) * dv;
        ++count;
      }
    best = std::max(best, integral / std::pow(count * dv, 1.0 / q));
  }
  return best;
}

ScalarField radial_field(const Grid3& g, const std::function<double(double)>& f) {
  ScalarField s(g);
  for (int iz = 0; iz < g.n; ++iz)
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix) {
        const double x = g.coord(ix), y = g.coord(iy), z = g.coord(iz);
        s.data[g.physical_index(ix, iy, iz)] = f(std::sqrt(x * x + y * y + z * z));
      }
  return s;
}

SpectralScalarField scalar_of(const Grid3& g, const std::vector<cplx>& c) {
  SpectralScalarField s(g);
  s.coeffs = c;
  return s;
}

}  // namespace

TEST_CASE("Lp norm basics") {
  const Grid3 g = make_grid(16, 4.0);
  ScalarField box(g);
  int count = 0;
  for (int iz = 0; iz < 4; ++iz)
    for (int iy = 0; iy < 8; ++iy)
      for (int ix = 0; ix < 8; ++ix, ++count) box.data[g.physical_index(ix, iy, iz)] = 1.0;
  const double V = count * g.cell_volume();
  for (double p : {1.0, 2.0, 3.5}) CHECK(lp_norm(box, p) == doctest::Approx(std::pow(V, 1.0 / p)));
  CHECK(lp_norm(box, INFINITY) == 1.0);
  for (double p : {1.5, 4.0}) CHECK(weak_lp_norm(box, p) == doctest::Approx(std::pow(V, 1.0 / p)));

  ScalarField scaled = box;
  for (double& x : scaled.data) x *= -2.5;
  CHECK(lp_norm(scaled, 3.0) == doctest::Approx(2.5 * lp_norm(box, 3.0)));
  CHECK(weak_lp_norm(scaled, 3.0) == doctest::Approx(2.5 * weak_lp_norm(box, 3.0)));

  CHECK_THROWS_AS(lp_norm(box, 0.5), InvalidArgument);
  CHECK_THROWS_AS(weak_lp_norm(box, 1.0), InvalidArgument);
  CHECK_THROWS_AS(weak_lp_norm(box, INFINITY), InvalidArgument);
}

TEST_CASE("vector norms use the magnitude or the component maximum") {
  const Grid3 g = make_grid(8, 2.0);
  VectorField v(g);
  std::fill(v.comp[0].begin(), v.comp[0].end(), 3.0);
  std::fill(v.comp[1].begin(), v.comp[1].end(), 4.0);
  const double vol = g.box_volume();
  CHECK(lp_norm(v, 2.0) == doctest::Approx(5.0 * std::sqrt(vol)));
  CHECK(lp_norm(v, 2.0, VectorNorm::ComponentMax) == doctest::Approx(4.0 * std::sqrt(vol)));
}

TEST_CASE("sorted weak norm equals the exact supremum over subsets") {
  std::mt19937_64 rng(17);
  std::lognormal_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> f(12);
    for (double& x : f) x = dist(rng) * (trial % 2 ? -1.0 : 1.0);
    for (double p : {1.5, 3.0, 6.0}) {
      const double dv = 0.37;
      CHECK(weak_lp_norm(f, dv, p) == doctest::Approx(weak_by_enumeration(f, dv, p)).epsilon(1e-13));
    }
  }
}

TEST_CASE("weak norm is bounded by the strong norm") {
  const Grid3 g = make_grid(16, 3.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 20; ++k) {
    ScalarField f(g);
    for (double& x : f.data) x = std::exp(normal(rng));
    for (double p : {1.5, 3.0, 6.0}) CHECK(weak_lp_norm(f, p) <= lp_norm(f, p) * (1 + 1e-12));
  }
}

TEST_CASE("capped |x|^-1: weak L3 settles while L3 grows") {
  // Continuum limit of the set-average norm over centred balls.
  const double limit = 2.0 * kPi * std::pow(4.0 * kPi / 3.0, -2.0 / 3.0);
  const Grid3 g = make_grid(96, 4.0);
  std::vector<double> weak, strong;
  for (double cap : {4.0, 8.0, 16.0}) {
    const ScalarField f = radial_field(g, [cap](double r) { return r == 0.0 ? cap : std::min(1.0 / r, cap); });
    weak.push_back(weak_lp_norm(f, 3.0));
    strong.push_back(lp_norm(f, 3.0));
  }
  for (double w : weak) CHECK(w == doctest::Approx(limit).epsilon(0.02));
  CHECK(std::abs(weak[2] / weak[1] - 1.0) < 0.01);
  CHECK(strong[1] > strong[0]);
  CHECK(strong[2] > strong[1]);
}

TEST_CASE("weak Hoelder: aligned power laws exceed constant 1 but not r'") {
  // f = |x|^{-1}, g = |x|^{-1}, fg = |x|^{-2}: (p, q, r) = (3, 3, 3/2).
  // In the continuum the ratio is r' / (p' q') = 4/3.
  const Grid3 g = make_grid(64, 8.0);
  const double eps = g.dx();
  const ScalarField f = radial_field(g, [eps](double r) { return 1.0 / std::max(r, eps); });
  ScalarField fg = f;
  for (double& x : fg.data) x *= x;
  const double ratio = weak_lp_norm(fg, 1.5) / (weak_lp_norm(f, 3.0) * weak_lp_norm(f, 3.0));
  CHECK(ratio > 1.0 + 1e-9);
  CHECK(ratio == doctest::Approx(4.0 / 3.0).epsilon(0.05));
  CHECK(ratio <= 3.0);
}

TEST_CASE("weak Hoelder holds with constant 1 on random pairs") {
  const Grid3 g = make_grid(16, 2.0);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    ScalarField f(g), h(g), fh(g);
    for (std::size_t i = 0; i < f.data.size(); ++i) {
      f.data[i] = normal(rng);
      h.data[i] = normal(rng) * normal(rng);
      fh.data[i] = f.data[i] * h.data[i];
    }
    worst = std::max(worst, weak_lp_norm(fh, 1.5) / (weak_lp_norm(f, 3.0) * weak_lp_norm(h, 3.0)));
  }
  CHECK(worst <= 1.0 + 1e-9);
}

TEST_CASE("weak Young constant is stable under refinement") {
  // f smooth random, g Gaussian; (p, q, r) = (2, 3/2, 6).
  std::vector<double> C;
  for (int n : {16, 32}) {
    const Grid3 g = make_grid(n, 8.0);
    SpectralVectorField f(g);
    {
      std::mt19937_64 rng(3);
      std::normal_distribution<double> normal;
      for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
        if (std::abs(g.signed_index(kx)) > 3 || std::abs(g.signed_index(ky)) > 3 ||
            std::abs(g.signed_index(kz)) > 3)
          return;
        // Seeded by wavenumber so both grids see the same field.
        std::mt19937_64 local(1000 + 49 * (g.signed_index(kx) + 3) + 7 * (g.signed_index(ky) + 3) +
                              (g.signed_index(kz) + 3));
        f.coeffs[0][s] = cplx{normal(local), normal(local)};
      });
      f = transform_forward(transform_backward(f));
    }
    const auto gauss = heat_multiplier(g, 0.5);
    const ScalarField fp = transform_backward(scalar_of(g, f.coeffs[0]));
    const ScalarField conv = transform_backward(gauss.apply(scalar_of(g, f.coeffs[0])));
    ScalarField kern = transform_backward(gauss.apply([&] {
      SpectralScalarField d(g);
      for (auto& c : d.coeffs) c = cplx{1.0 / g.box_volume(), 0.0};
      return d;
    }()));
    C.push_back(weak_lp_norm(conv, 6.0) / (weak_lp_norm(fp, 2.0) * weak_lp_norm(kern, 1.5)));
  }
  CHECK(std::isfinite(C[0]));
  CHECK(C[1] == doctest::Approx(C[0]).epsilon(0.05));
}

TEST_CASE("heat Besov norm") {
  const Grid3 g = make_grid(64, 16.0);
  auto gaussian = [&](double var) {
    SpectralVectorField f(g);
    f.coeffs[0] = transform_forward(radial_field(g, [var](double r) {
                    return std::pow(2 * kPi * var, -1.5) * std::exp(-0.5 * r * r / var);
                  })).coeffs;
    return f;
  };
  const auto f = gaussian(1.0);
  const auto grid = log_time_grid(1e-3, 4.0, 25);

  const BesovResult zero = besov_heat_norm(f, 0.0, 2.0, grid);
  CHECK(zero.t_max == grid.front());
  CHECK_FALSE(zero.interior);

  // L1 data: t^{a/2} ||S(t) f||_p <= ||p(t)||_p t^{a/2} ||f||_1 with a = 3(1 - 1/p).
  const double p = 3.0, a = 3.0 * (1.0 - 1.0 / p);
  const double bound = std::pow(4.0 * kPi, -a / 2.0) * std::pow(p, -1.5 / p);
  const BesovResult l1 = besov_heat_norm(f, a, p, grid);
  CHECK(l1.value <= bound * (1 + 1e-9));

  // f(2x) is a Gaussian of a quarter of the variance, scaled by 2^3.
  const double lambda = 2.0, alpha = 0.5;
  auto f_lambda = gaussian(0.25);
  f_lambda *= std::pow(lambda, -3.0);
  const BesovResult b1 = besov_heat_norm(f, alpha, 2.0, log_time_grid(1e-3, 4.0, 100));
  const BesovResult b2 = besov_heat_norm(f_lambda, alpha, 2.0, log_time_grid(1e-3, 4.0, 100));
  CHECK(b1.interior);
  CHECK(b2.interior);
  CHECK(b2.value / b1.value == doctest::Approx(std::pow(lambda, -1.5 - alpha)).epsilon(0.01));

  CHECK_THROWS_AS(besov_heat_norm(f, 0.0, 2.0, std::vector<double>{}), InvalidArgument);
}

TEST_CASE("decay functional and slope fit") {
  const Grid3 g = make_grid(8, 4.0);
  const auto shape = testsupport::random_field(g, 2);
  const double p = 4.0, A = 0.7;
  TimeGridSolution u;
  for (double t : log_time_grid(0.1, 10.0, 5)) {
    u.times.push_back(t);
    u.fields.push_back((A * std::pow(t, -(1 - 3 / p) / 2)) * shape);
  }
  DecayCurve c = decay_functional(u, p, NormKind::Tag::Lp);
  const double v0 = c.values.front();
  for (double v : c.values) CHECK(v == doctest::Approx(v0).epsilon(1e-12));
  const SlopeFit fit = fit_slope(c, 0.1, 10.0);
  CHECK(std::abs(fit.slope) < 1e-12);
  CHECK(fit.points == int(c.times.size()));
  CHECK(fit_slope(c, 0.1, 10.0).slope == fit.slope);

  DecayCurve power;
  for (double t : log_time_grid(1.0, 100.0, 4)) {
    power.times.push_back(t);
    power.values.push_back(3.0 * std::pow(t, -0.3));
  }
  const SlopeFit pf = fit_slope(power, 1.0, 100.0);
  CHECK(pf.slope == doctest::Approx(-0.3).epsilon(1e-12));
  CHECK(std::exp(pf.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(pf.stderr_ < 1e-12);
  CHECK_THROWS_AS(fit_slope(power, 1.0, 1.5), InvalidArgument);

  TimeGridSolution zero;
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    zero.times.push_back(t);
    zero.fields.emplace_back(g);
  }
  DecayCurve zc = decay_functional(zero, p, NormKind::Tag::WeakLp);
  for (double v : zc.values) CHECK(v == 0.0);
  CHECK_THROWS_AS(fit_slope(zc, 0.1, 10.0), InvalidArgument);

  CHECK(decay_weight(4.0, 4.0) == doctest::Approx(std::pow(4.0, 0.125)));
}

TEST_CASE("curve CSV layout") {
  DecayCurve c;
  c.functional = "t^a||u||_4";
  c.kind = NormKind::lp(4.0);
  c.times = {1.0, 2.0, 4.0};
  c.values = {1.0, 0.5, 0.25};
  fit_slope_in_place(c, 1.0, 4.0);
  std::ostringstream os;
  write_curves_csv(os, {c});
  const std::string s = os.str();
  CHECK(s.rfind("t,value,functional,p,kind\n", 0) == 0);
  CHECK(s.find("\n# ") != std::string::npos);
}
