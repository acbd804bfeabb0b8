#pragma once

#include "nslab/field.hpp"

namespace nslab {

// Forward transforms return Fourier-series coefficients (normalized by n^3),
// so a constant field c has the single coefficient c at xi = 0 and
// sum |f|^2 dV = L^3 * sum |c|^2 over the full spectrum.
// Plans are cached per grid size; all functions are safe to call
// concurrently.

SpectralScalarField transform_forward(const ScalarField& f);
ScalarField transform_backward(const SpectralScalarField& f);

SpectralVectorField transform_forward(const VectorField& f);
VectorField transform_backward(const SpectralVectorField& f);

}  // namespace nslab
