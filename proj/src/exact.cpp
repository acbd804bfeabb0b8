#include "nslab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nslab/error.hpp"
#include "nslab/fft.hpp"
#include "nslab/spectral_ops.hpp"

namespace nslab {
namespace {

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

}  // namespace

LandauSolution::LandauSolution(double c) : c_(c) {
  if (!(std::abs(c) > 1.0)) throw InvalidArgument("LandauSolution: need |c| > 1");
}

LandauValue LandauSolution::eval(const Vec3& x) const {
  const double r = norm3(x);
  if (r == 0.0) throw InvalidArgument("LandauSolution::eval: x = 0 is singular");
  const double c = c_, x1 = x[0];
  const double d = c * r - x1;
  const double den = r * d * d;
  const double s = c * x1 - r;
  LandauValue v;
  v.u[0] = 2.0 * (c * r * r - 2.0 * x1 * r + c * x1 * x1) / den;
  v.u[1] = 2.0 * x[1] * s / den;
  v.u[2] = 2.0 * x[2] * s / den;
  v.p = 4.0 * s / den;
  return v;
}

LandauValue landau_eval(double c, const Vec3& x) { return LandauSolution(c).eval(x); }

LandauResidual landau_residual(double c, const std::vector<Vec3>& samples, double h) {
  const LandauSolution sol(c);
  if (!(h > 0.0)) throw InvalidArgument("landau_residual: h must be positive");
  if (samples.empty()) throw InvalidArgument("landau_residual: no samples");
  constexpr double kEps = 1e-14;
  LandauResidual out;
  for (const Vec3& x : samples) {
    if (norm3(x) < 0.5) throw InvalidArgument("landau_residual: sample closer than 0.5 to the origin");
    const LandauValue v0 = sol.eval(x);
    double du[3][3];  // du[j][i] = d_j u_i
    double dp[3], lap[3] = {0.0, 0.0, 0.0};
    for (int j = 0; j < 3; ++j) {
      LandauValue f[5];
      for (int s = -2; s <= 2; ++s) {
        Vec3 y = x;
        y[j] += s * h;
        f[s + 2] = s == 0 ? v0 : sol.eval(y);
      }
      for (int i = 0; i < 3; ++i) {
        du[j][i] = (-f[4].u[i] + 8.0 * f[3].u[i] - 8.0 * f[1].u[i] + f[0].u[i]) / (12.0 * h);
        lap[i] += (-f[4].u[i] + 16.0 * f[3].u[i] - 30.0 * f[2].u[i] + 16.0 * f[1].u[i] - f[0].u[i]) /
                  (12.0 * h * h);
      }
      dp[j] = (-f[4].p + 8.0 * f[3].p - 8.0 * f[1].p + f[0].p) / (12.0 * h);
    }
    double grad_norm = 0.0;
    for (auto& row : du)
      for (double d : row) grad_norm += d * d;
    grad_norm = std::sqrt(grad_norm);
    const double scale = norm3(v0.u) * grad_norm + norm3({dp[0], dp[1], dp[2]}) + kEps;

    double res2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      double adv = 0.0;
      for (int j = 0; j < 3; ++j) adv += v0.u[j] * du[j][i];
      const double r = -lap[i] + adv + dp[i];
      out.component_max[i] = std::max(out.component_max[i], std::abs(r) / scale);
      res2 += r * r;
    }
    const double rel = std::sqrt(res2) / scale;
    out.per_sample.push_back(rel);
    out.max = std::max(out.max, rel);
    const double div = du[0][0] + du[1][1] + du[2][2];
    out.max_divergence = std::max(out.max_divergence, std::abs(div) / (grad_norm + kEps));
  }
  std::vector<double> sorted = out.per_sample;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  out.median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  return out;
}

std::vector<Vec3> landau_shell_samples(int count, double rmin, double rmax, std::uint64_t seed) {
  if (count < 1 || !(rmin > 0.0) || !(rmax >= rmin))
    throw InvalidArgument("landau_shell_samples: need count >= 1 and 0 < rmin <= rmax");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  const double a = rmin * rmin * rmin, b = rmax * rmax * rmax;
  std::vector<Vec3> pts;
  pts.reserve(count);
  while (int(pts.size()) < count) {
    Vec3 d{normal(rng), normal(rng), normal(rng)};
    const double len = norm3(d);
    if (len < 1e-12) continue;
    const double r = std::cbrt(a + (b - a) * unit(rng));
    pts.push_back({r * d[0] / len, r * d[1] / len, r * d[2] / len});
  }
  return pts;
}

double smooth_cutoff(double r, double a, double b) {
  if (r <= a) return 1.0;
  if (r >= b) return 0.0;
  const double s = (r - a) / (b - a);
  const double f0 = std::exp(-1.0 / (1.0 - s)), f1 = std::exp(-1.0 / s);
  return f0 / (f0 + f1);
}

Vec3 homogeneous_profile(const HomogeneousData& spec, const Grid3& g, const Vec3& x) {
  const double delta = spec.delta_cells * g.dx();
  const double den = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + delta * delta;
  switch (spec.profile) {
    case HomogeneousProfile::Swirl:
      return {-spec.amplitude * x[1] / den, spec.amplitude * x[0] / den, 0.0};
  }
  return {};
}

HomogeneousField homogeneous_data(const HomogeneousData& spec, const Grid3& g) {
  if (spec.delta_cells < 2.0)
    throw GuardError("homogeneous_data: core smoothing under 2 cells is not resolved");
  VectorField f(g);
  const double a = g.L / 4.0, b = 3.0 * g.L / 8.0;
  for (int iz = 0; iz < g.n; ++iz)
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix) {
        const Vec3 x{g.coord(ix), g.coord(iy), g.coord(iz)};
        const double w = smooth_cutoff(norm3(x), a, b);
        if (w == 0.0) continue;
        const Vec3 v = homogeneous_profile(spec, g, x);
        const std::size_t i = g.physical_index(ix, iy, iz);
        for (int j = 0; j < 3; ++j) f.comp[j][i] = w * v[j];
      }
  SpectralVectorField raw = transform_forward(f);
  for (auto& c : raw.coeffs) c[0] = cplx{};
  HomogeneousField out;
  out.field = leray_project(raw);
  const double base = l2_norm(raw);
  out.projection_correction = base > 0.0 ? l2_norm(out.field - raw) / base : 0.0;
  if (out.projection_correction > 0.01)
    throw GuardError("homogeneous_data: projection changed the sampled field by more than 1%");
  return out;
}

SpectralVectorField rescale(const SpectralVectorField& u, double lambda, double alias_tol) {
  if (!(lambda > 0.0)) throw InvalidArgument("rescale: lambda must be positive");
  const Grid3& g = u.grid;
  const int n = g.n, nh = g.nh();
  if (lambda == 1.0) return u;

  if (lambda > 1.0) {
    const double limit = n / (2.0 * lambda);
    double total = 0.0, above = 0.0;
    for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
      double e = 0.0;
      for (const auto& c : u.coeffs) e += std::norm(c[s]);
      e *= g.mode_weight(kx);
      total += e;
      const int m = std::max({std::abs(g.signed_index(kx)), std::abs(g.signed_index(ky)),
                              std::abs(g.signed_index(kz))});
      if (m > limit) above += e;
    });
    if (total > 0.0 && above / total > alias_tol)
      throw GuardError("rescale: lambda pushes energy past Nyquist (fraction " +
                       std::to_string(above / total) + ")");
  }

  std::vector<double> target(n);
  std::vector<bool> inside(n);
  for (int i = 0; i < n; ++i) {
    target[i] = lambda * g.coord(i);
    inside[i] = target[i] >= -0.5 * g.L && target[i] < 0.5 * g.L;
  }

  VectorField out(g);
  const double rl = std::round(lambda);
  if (std::abs(lambda - rl) < 1e-14) {
    const int m = int(rl);
    const VectorField src = transform_backward(u);
    auto slot = [&](int i) {
      const int s = m * g.signed_index(i);
      return s < 0 ? s + n : s;
    };
    for (int iz = 0; iz < n; ++iz)
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
          if (!inside[ix] || !inside[iy] || !inside[iz]) continue;
          const std::size_t d = g.physical_index(ix, iy, iz);
          const std::size_t s = g.physical_index(slot(ix), slot(iy), slot(iz));
          for (int j = 0; j < 3; ++j) out.comp[j][d] = lambda * src.comp[j][s];
        }
  } else {
    // Separable evaluation of the trigonometric interpolant at lambda x;
    // Nyquist slots are dropped.
    std::vector<cplx> phase(std::size_t(n) * n);  // phase[k*n + i] = e^{i xi_k X_i}
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        phase[std::size_t(k) * n + i] = std::polar(1.0, g.derivative_wavenumber(k) * target[i]);
    const std::size_t plane = std::size_t(nh) * n;
    std::vector<cplx> A(plane * n), B(plane * n);
    for (int j = 0; j < 3; ++j) {
      const auto& c = u.coeffs[j];
      std::fill(A.begin(), A.end(), cplx{});
      for (int kz = 0; kz < n; ++kz) {
        if (kz == n / 2) continue;
        for (int iz = 0; iz < n; ++iz) {
          if (!inside[iz]) continue;
          const cplx ph = phase[std::size_t(kz) * n + iz];
          for (std::size_t q = 0; q < plane; ++q) A[q + plane * iz] += c[q + plane * kz] * ph;
        }
      }
      std::fill(B.begin(), B.end(), cplx{});
      for (int iz = 0; iz < n; ++iz) {
        if (!inside[iz]) continue;
        for (int ky = 0; ky < n; ++ky) {
          if (ky == n / 2) continue;
          for (int iy = 0; iy < n; ++iy) {
            if (!inside[iy]) continue;
            const cplx ph = phase[std::size_t(ky) * n + iy];
            const cplx* a = &A[std::size_t(nh) * (ky + std::size_t(n) * iz)];
            cplx* b = &B[std::size_t(nh) * (iy + std::size_t(n) * iz)];
            for (int kx = 0; kx < nh; ++kx) b[kx] += a[kx] * ph;
          }
        }
      }
      for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy) {
          if (!inside[iz] || !inside[iy]) continue;
          const cplx* b = &B[std::size_t(nh) * (iy + std::size_t(n) * iz)];
          for (int ix = 0; ix < n; ++ix) {
            if (!inside[ix]) continue;
            double acc = 0.0;
            for (int kx = 0; kx < nh - 1; ++kx)
              acc += g.mode_weight(kx) * (b[kx] * phase[std::size_t(kx) * n + ix]).real();
            out.comp[j][g.physical_index(ix, iy, iz)] = lambda * acc;
          }
        }
    }
  }
  SpectralVectorField res = transform_forward(out);
  res.is_solenoidal = u.is_solenoidal && lambda < 1.0;
  return res;
}

}  // namespace nslab
