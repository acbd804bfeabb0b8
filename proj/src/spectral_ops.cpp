#include "nslab/spectral_ops.hpp"

#include <cstdlib>

#include "nslab/error.hpp"
#include "nslab/fft.hpp"
#include "nslab/kernels.hpp"

namespace nslab {
namespace {

bool in_band(const Grid3& g, int kx, int ky, int kz) {
  const int cut = g.dealias_cutoff();
  return std::abs(g.signed_index(kx)) <= cut && std::abs(g.signed_index(ky)) <= cut &&
         std::abs(g.signed_index(kz)) <= cut;
}

}  // namespace

SpectralVectorField leray_project(const SpectralVectorField& f) {
  const Grid3& g = f.grid;
  SpectralVectorField out = f;
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    const double xi[3] = {g.wavenumber(kx), g.wavenumber(ky), g.wavenumber(kz)};
    const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if (k2 == 0.0) return;
    const cplx dot = (xi[0] * f.coeffs[0][s] + xi[1] * f.coeffs[1][s] + xi[2] * f.coeffs[2][s]) / k2;
    for (int j = 0; j < 3; ++j) out.coeffs[j][s] -= xi[j] * dot;
  });
  out.is_solenoidal = true;
  return out;
}

SpectralScalarField divergence(const SpectralVectorField& f) {
  const Grid3& g = f.grid;
  SpectralScalarField out(g);
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    const double xi[3] = {g.derivative_wavenumber(kx), g.derivative_wavenumber(ky),
                          g.derivative_wavenumber(kz)};
    const cplx dot = xi[0] * f.coeffs[0][s] + xi[1] * f.coeffs[1][s] + xi[2] * f.coeffs[2][s];
    out.coeffs[s] = cplx{0.0, 1.0} * dot;
  });
  return out;
}

SpectralVectorField gradient(const SpectralScalarField& phi) {
  const Grid3& g = phi.grid;
  SpectralVectorField out(g);
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    const double xi[3] = {g.derivative_wavenumber(kx), g.derivative_wavenumber(ky),
                          g.derivative_wavenumber(kz)};
    for (int j = 0; j < 3; ++j) out.coeffs[j][s] = cplx{0.0, xi[j]} * phi.coeffs[s];
  });
  return out;
}

SpectralVectorField dealias(const SpectralVectorField& f) {
  const Grid3& g = f.grid;
  SpectralVectorField out = f;
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    if (in_band(g, kx, ky, kz)) return;
    for (auto& c : out.coeffs) c[s] = cplx{};
  });
  return out;
}

SpectralScalarField dealias(const SpectralScalarField& f) {
  const Grid3& g = f.grid;
  SpectralScalarField out = f;
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    if (!in_band(g, kx, ky, kz)) out.coeffs[s] = cplx{};
  });
  return out;
}

SpectralVectorField tensor_divergence(const SpectralVectorField& u, const SpectralVectorField& v) {
  require_same_grid(u.grid, v.grid, "nonlinear_term");
  const Grid3& g = u.grid;
  const VectorField up = transform_backward(dealias(u));
  const VectorField vp = (&u == &v) ? up : transform_backward(dealias(v));

  SpectralVectorField out(g);
  ScalarField prod(g);
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      for (std::size_t i = 0; i < prod.data.size(); ++i) prod.data[i] = up.comp[j][i] * vp.comp[k][i];
      const SpectralScalarField ph = transform_forward(prod);
      // out_k += i xi_j (u_j v_k)^
      auto& dst = out.coeffs[k];
      for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
        const int idx[3] = {kx, ky, kz};
        dst[s] += cplx{0.0, g.derivative_wavenumber(idx[j])} * ph.coeffs[s];
      });
    }
  }
  return dealias(out);
}

SpectralVectorField nonlinear_term(const SpectralVectorField& u, const SpectralVectorField& v) {
  return leray_project(tensor_divergence(u, v));
}

SpectralVectorField mollified_nonlinear_term(const SpectralVectorField& u,
                                             const SpectralVectorField& v,
                                             const MollifierSpec& mollifier) {
  require_same_grid(u.grid, mollifier.symbol.grid, "mollified_nonlinear_term");
  return nonlinear_term(mollifier.symbol.apply(u), v);
}

SpectralVectorField mollified_nonlinear_term(const SpectralVectorField& u,
                                             const SpectralVectorField& v, double kappa) {
  return mollified_nonlinear_term(u, v, mollifier_symbol(u.grid, kappa));
}

}  // namespace nslab
