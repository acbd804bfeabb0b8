#include "nslab/kernels.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "nslab/error.hpp"
#include "nslab/fft.hpp"

namespace nslab {
namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_time(double t, const char* where) {
  if (!(t >= 0.0)) throw InvalidArgument(std::string(where) + ": time must be nonnegative");
}

void require_order(double ell, const char* where) {
  if (!(ell > 0.0)) throw InvalidArgument(std::string(where) + ": order ell must be positive");
}

FourierMultiplier exp_multiplier(const Grid3& g, double t, double heat_coeff, double ell,
                                 std::string label) {
  std::vector<cplx> v(g.spectral_size());
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    const double k2 = wavenumber_sq(g, kx, ky, kz);
    double rate = heat_coeff * k2;
    if (ell > 0.0) rate += std::pow(k2, 0.5 * ell);
    v[s] = cplx{std::exp(-t * rate), 0.0};
  });
  return FourierMultiplier(g, std::move(v), std::move(label));
}

bool is_even_integer(double ell) {
  return std::abs(ell - 2.0 * std::round(0.5 * ell)) < 1e-12;
}

// Upper limit beyond which e^{-rho^ell} < 1e-16.
double rho_cutoff(double ell) { return std::pow(std::log(1e16), 1.0 / ell); }

}  // namespace

FourierMultiplier heat_multiplier(const Grid3& g, double t) {
  require_time(t, "heat_multiplier");
  return exp_multiplier(g, t, 1.0, 0.0, "heat(t=" + std::to_string(t) + ")");
}

FourierMultiplier hyper_multiplier(const Grid3& g, double t, double ell) {
  require_time(t, "hyper_multiplier");
  require_order(ell, "hyper_multiplier");
  return exp_multiplier(g, t, 0.0, ell, "hyper(t=" + std::to_string(t) + ",ell=" + std::to_string(ell) + ")");
}

FourierMultiplier combined_multiplier(const Grid3& g, double t, double ell) {
  require_time(t, "combined_multiplier");
  require_order(ell, "combined_multiplier");
  return exp_multiplier(g, t, 1.0, ell, "combined(t=" + std::to_string(t) + ",ell=" + std::to_string(ell) + ")");
}

std::vector<double> decay_rate(const Grid3& g, double ell) {
  std::vector<double> rate(g.spectral_size());
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    const double k2 = wavenumber_sq(g, kx, ky, kz);
    rate[s] = ell > 0.0 ? k2 + std::pow(k2, 0.5 * ell) : k2;
  });
  return rate;
}

// --- p_ell(r, 1) -------------------------------------------------------------

KernelValue kernel_realspace(double ell, double r, double tol) {
  require_order(ell, "kernel_realspace");
  if (!(r >= 0.0)) throw InvalidArgument("kernel_realspace: radius must be nonnegative");
  constexpr double norm = 1.0 / (2.0 * kPi * kPi);  // (2 pi)^-3 * 4 pi
  if (r == 0.0) {
    // int_0^inf e^{-rho^ell} rho^2 d rho = Gamma(3/ell) / ell
    return {norm * std::tgamma(3.0 / ell) / ell, 0.0};
  }
  const double top = rho_cutoff(ell);
  auto f = [ell, r](double rho) {
    return std::exp(-std::pow(rho, ell)) * rho * (std::sin(rho * r) / r);
  };
  const double half_period = kPi / r;
  double sum = 0.0, err_sum = 0.0, l1_sum = 0.0;
  double a = 0.0;
  while (a < top) {
    const double b = std::min(top, a + half_period);
    double err = 0.0, l1 = 0.0;
    sum += gauss_kronrod<double, 15>::integrate(f, a, b, 6, tol, &err, &l1);
    err_sum += err;
    l1_sum += l1;
    a = b;
  }
  // The reported error includes the rounding floor of the panel sum.
  const KernelValue out{norm * sum, norm * (err_sum + 16.0 * kEps * l1_sum)};
  // Reject when the estimate is large on the scale of the integrand itself.
  if (norm * err_sum > 1e-9 * std::max(norm * l1_sum, 1e-300) && norm * err_sum > 1e-15)
    throw ConvergenceError("kernel_realspace: quadrature did not converge (ell=" +
                               std::to_string(ell) + ", r=" + std::to_string(r) + ")",
                           out.error);
  return out;
}

double RadialKernelTable::at_time(double r, double t) const {
  if (!(t > 0.0)) throw InvalidArgument("RadialKernelTable::at_time: t must be positive");
  return std::pow(t, -3.0 / ell) * kernel_realspace(ell, r * std::pow(t, -1.0 / ell)).value;
}

RadialKernelTable build_kernel_table(double ell, std::vector<double> radii) {
  require_order(ell, "build_kernel_table");
  if (radii.empty()) throw InvalidArgument("build_kernel_table: no radii");
  if (!std::is_sorted(radii.begin(), radii.end()) ||
      std::adjacent_find(radii.begin(), radii.end()) != radii.end())
    throw InvalidArgument("build_kernel_table: radii must be strictly increasing");
  RadialKernelTable table;
  table.ell = ell;
  table.values.reserve(radii.size());
  for (double r : radii) table.values.push_back(kernel_realspace(ell, r).value);
  const double R = radii.back();
  const double pR = std::abs(table.values.back());
  // Algebraic tail r^{-3-ell} unless the symbol is smooth (even ell).
  table.tail_bound = 4.0 * kPi * pR * R * R * R / (is_even_integer(ell) ? 1.0 : ell);
  table.radii = std::move(radii);
  return table;
}

// --- C_ell ---------------------------------------------------------------------

namespace {

struct RadialIntegral {
  double absolute = 0.0;
  double signed_mass = 0.0;
  double tail = 0.0;
  double signed_tail = 0.0;
};

std::vector<double> scan_radii(double R) {
  std::vector<double> rs;
  for (double r = 0.0; r < std::min(R, 20.0); r += 0.05) rs.push_back(r);
  for (double r = 20.0; r < R; r += 0.2) rs.push_back(r);
  rs.push_back(R);
  return rs;
}

bool below_noise(const KernelValue& v) { return std::abs(v.value) <= 10.0 * v.error; }

// Cutoff radius for even ell (super-algebraic decay): first radius past 4
// after which p stays at the quadrature noise floor, or 4 pi |p| r^3 below
// 1e-16, for two length units.
double smooth_cutoff(double ell) {
  double quiet_since = -1.0;
  for (double r = 4.0; r < 80.0; r += 0.05) {
    const KernelValue k = kernel_realspace(ell, r);
    if (below_noise(k) || 4.0 * kPi * std::abs(k.value) * r * r * r < 1e-16) {
      if (quiet_since < 0.0) quiet_since = r;
      if (r - quiet_since >= 2.0) return quiet_since;
    } else {
      quiet_since = -1.0;
    }
  }
  return 80.0;
}

std::vector<double> find_sign_changes(double ell, double R) {
  std::vector<double> roots;
  const auto rs = scan_radii(R);
  auto p = [ell](double r) { return kernel_realspace(ell, r).value; };
  // Values at the noise floor carry no sign information and are skipped.
  double r_prev = rs.front(), p_prev = p(r_prev);
  for (std::size_t i = 1; i < rs.size(); ++i) {
    const double r = rs[i];
    const KernelValue k = kernel_realspace(ell, r);
    if (below_noise(k)) continue;
    const double v = k.value;
    if ((v < 0.0) != (p_prev < 0.0)) {
      boost::uintmax_t iters = 200;
      auto tol = [](double a, double b) { return std::abs(b - a) < 1e-13 * std::max(1.0, std::abs(a)); };
      const auto bracket = boost::math::tools::toms748_solve(p, r_prev, r, p_prev, v, tol, iters);
      roots.push_back(0.5 * (bracket.first + bracket.second));
    }
    r_prev = r;
    p_prev = v;
  }
  return roots;
}

RadialIntegral radial_integral(double ell, double R, const std::vector<double>& roots,
                               double inner_tol, double outer_tol) {
  std::vector<double> cuts{0.0, R};
  for (double r : roots)
    if (r < R) cuts.push_back(r);
  for (double r = 1.0; r < R; r += 1.0) cuts.push_back(r);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-9; }),
             cuts.end());

  // p keeps its sign between consecutive cuts, so |int p| = int |p| there.
  RadialIntegral out;
  auto f = [&](double r) { return kernel_realspace(ell, r, inner_tol).value * r * r; };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double piece = gauss_kronrod<double, 15>::integrate(f, cuts[i], cuts[i + 1], 4, outer_tol);
    out.absolute += std::abs(piece);
    out.signed_mass += piece;
  }
  out.absolute *= 4.0 * kPi;
  out.signed_mass *= 4.0 * kPi;
  // Even ell: the cutoff was chosen where the integrand is below 1e-16.
  if (!is_even_integer(ell)) {
    const double pR = kernel_realspace(ell, R, inner_tol).value;
    out.tail = 4.0 * kPi * std::abs(pR) * R * R * R / ell;
    out.signed_tail = std::copysign(out.tail, pR);
  }
  return out;
}

}  // namespace

ClResult compute_Cl(double ell, double max_error) {
  require_order(ell, "compute_Cl");
  const double R = is_even_integer(ell) ? smooth_cutoff(ell) : 60.0;
  const double R_wide = 1.5 * R;
  const auto roots = find_sign_changes(ell, R_wide);
  std::vector<double> roots_R;
  for (double r : roots)
    if (r < R) roots_R.push_back(r);

  const RadialIntegral fine = radial_integral(ell, R, roots_R, 1e-12, 1e-10);
  const RadialIntegral coarse = radial_integral(ell, R, roots_R, 1e-10, 1e-8);
  const RadialIntegral wide = radial_integral(ell, R_wide, roots, 1e-12, 1e-10);

  const double c_fine = fine.absolute + fine.tail;
  const double c_coarse = coarse.absolute + coarse.tail;
  const double c_wide = wide.absolute + wide.tail;

  ClResult res;
  res.value = c_fine;
  res.error = std::max(std::abs(c_fine - c_coarse), std::abs(c_fine - c_wide));
  res.mass = fine.signed_mass + fine.signed_tail;
  res.tail = fine.tail;
  res.cutoff = R;
  res.sign_changes = roots_R;
  if (res.error > max_error)
    throw GuardError("compute_Cl: tail bound failure for ell=" + std::to_string(ell) +
                     " (spread " + std::to_string(res.error) + ")");
  return res;
}

// --- L^1 gap -------------------------------------------------------------------

double gaussian_tail_mass(double R, double sigma2) {
  const double x = R / std::sqrt(sigma2);
  return std::erfc(x / std::numbers::sqrt2) +
         std::sqrt(2.0 / kPi) * x * std::exp(-0.5 * x * x);
}

GapResult l1_semigroup_gap(double ell, double t, const Grid3& g) {
  require_order(ell, "l1_semigroup_gap");
  if (!(t > 0.0)) throw InvalidArgument("l1_semigroup_gap: t must be positive");
  GapResult res;
  // Both sampled functions carry the heat factor p(t/2), of width sqrt(t).
  res.cells_per_width = std::sqrt(t) / g.dx();
  if (res.cells_per_width < 4.0)
    throw GuardError("l1_semigroup_gap: kernels under-resolved (" +
                     std::to_string(res.cells_per_width) + " cells per width)");
  // Variance proxy: heat part t per axis, hyperviscous part 2 t^{2/ell}.
  const double sigma2 = t + 2.0 * std::pow(t, 2.0 / ell);
  res.outside_mass = gaussian_tail_mass(0.25 * g.L, sigma2);
  if (res.outside_mass > 1e-10)
    throw GuardError("l1_semigroup_gap: kernel not contained in the box (outside mass " +
                     std::to_string(res.outside_mass) + ")");

  SpectralScalarField diff(g);
  const double inv_vol = 1.0 / g.box_volume();
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    const double k2 = wavenumber_sq(g, kx, ky, kz);
    const double heat = std::exp(-0.5 * t * k2);
    diff.coeffs[s] = cplx{(std::exp(-t * std::pow(k2, 0.5 * ell)) - 1.0) * heat * inv_vol, 0.0};
  });
  const ScalarField samples = transform_backward(diff);
  double acc = 0.0;
  for (double v : samples.data) acc += std::abs(v);
  res.gap = acc * g.cell_volume();
  return res;
}

// --- Mollifier -------------------------------------------------------------------

namespace {

double bump_raw(double r) {
  if (r >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r * r));
}

double bump_transform_unnormalized(double k) {
  auto f = [k](double r) {
    const double kr = k * r;
    const double sinc = kr == 0.0 ? 1.0 : std::sin(kr) / kr;
    return bump_raw(r) * r * r * sinc;
  };
  return 4.0 * kPi * gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 10, 1e-13);
}

double bump_mass() {
  static const double m = bump_transform_unnormalized(0.0);
  return m;
}

}  // namespace

double mollifier_profile(double r, MollifierProfile) { return bump_raw(r) / bump_mass(); }

double mollifier_transform(double k, MollifierProfile) {
  return bump_transform_unnormalized(k) / bump_mass();
}

MollifierSpec mollifier_symbol(const Grid3& g, double kappa, MollifierProfile profile) {
  if (!(kappa >= 0.0)) throw InvalidArgument("mollifier_symbol: kappa must be nonnegative");
  if (kappa > 0.5 * g.L) throw GuardError("mollifier_symbol: mollifier support exceeds the box");
  std::vector<cplx> v(g.spectral_size(), cplx{1.0, 0.0});
  if (kappa > 0.0) {
    std::map<long, double> cache;
    for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
      const long a = g.signed_index(kx), b = g.signed_index(ky), c = g.signed_index(kz);
      const long key = a * a + b * b + c * c;
      auto it = cache.find(key);
      if (it == cache.end()) {
        const double k = kappa * g.k0() * std::sqrt(double(key));
        it = cache.emplace(key, mollifier_transform(k, profile)).first;
      }
      v[s] = cplx{it->second, 0.0};
    });
    v[0] = cplx{1.0, 0.0};
  }
  return MollifierSpec{kappa, profile,
                       FourierMultiplier(g, std::move(v), "mollifier(kappa=" + std::to_string(kappa) + ")")};
}

}  // namespace nslab
