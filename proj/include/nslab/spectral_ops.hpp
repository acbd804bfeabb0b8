#pragma once

#include "nslab/field.hpp"

namespace nslab {

/// Tolerance for the per-mode solenoidality check |xi.f| <= eps |xi||f|.
inline constexpr double kDivergenceTolerance = 1e-10;

/// Leray projection, symbol I - xi xi^T / |xi|^2. The mean (xi = 0) is kept.
SpectralVectorField leray_project(const SpectralVectorField& f);

/// (div f)(xi) = i xi . f(xi)
SpectralScalarField divergence(const SpectralVectorField& f);
/// (grad phi)(xi) = i xi phi(xi)
SpectralVectorField gradient(const SpectralScalarField& phi);

// Odd symbols (i xi_j) vanish on Nyquist slots so that derivatives of real
// fields stay real; even symbols use the full wavenumber.

/// Zero every mode with some |signed index| >= n/3 (2/3 rule).
SpectralVectorField dealias(const SpectralVectorField& f);
SpectralScalarField dealias(const SpectralScalarField& f);

/// Dealiased div(u (x) v), component k = sum_j d_j (u_j v_k), without
/// projection. Both inputs are truncated to the retained band before the
/// product, so the result equals the exact convolution on that band.
SpectralVectorField tensor_divergence(const SpectralVectorField& u, const SpectralVectorField& v);

/// P div(u (x) v), pseudo-spectral and dealiased. Output is solenoidal.
SpectralVectorField nonlinear_term(const SpectralVectorField& u, const SpectralVectorField& v);

struct MollifierSpec;

/// P div((u * omega_kappa) (x) v).
SpectralVectorField mollified_nonlinear_term(const SpectralVectorField& u,
                                             const SpectralVectorField& v,
                                             const MollifierSpec& mollifier);

/// Convenience overload building the default bump mollifier of width kappa.
SpectralVectorField mollified_nonlinear_term(const SpectralVectorField& u,
                                             const SpectralVectorField& v, double kappa);

}  // namespace nslab
