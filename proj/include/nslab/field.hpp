#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "nslab/grid.hpp"

namespace nslab {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

/// Real samples of a scalar field.
struct ScalarField {
  Grid3 grid;
  std::vector<double> data;

  ScalarField() = default;
  explicit ScalarField(const Grid3& g) : grid(g), data(g.physical_size(), 0.0) {}
};

/// Real samples of a three-component field.
struct VectorField {
  Grid3 grid;
  std::array<std::vector<double>, 3> comp;

  VectorField() = default;
  explicit VectorField(const Grid3& g) : grid(g) {
    for (auto& c : comp) c.assign(g.physical_size(), 0.0);
  }
  /// Pointwise Euclidean magnitude.
  ScalarField magnitude() const;
};

/// Fourier coefficients of a real scalar field, f(x) = sum_xi c(xi) e^{i xi.x}.
struct SpectralScalarField {
  Grid3 grid;
  std::vector<cplx> coeffs;

  SpectralScalarField() = default;
  explicit SpectralScalarField(const Grid3& g) : grid(g), coeffs(g.spectral_size()) {}
};

/// Fourier coefficients of a real three-component field. Hermitian symmetry
/// is structural (half layout). `is_solenoidal` is maintained by the
/// operations that produce or preserve divergence-free fields.
struct SpectralVectorField {
  Grid3 grid;
  std::array<std::vector<cplx>, 3> coeffs;
  bool is_solenoidal = false;

  SpectralVectorField() = default;
  explicit SpectralVectorField(const Grid3& g) : grid(g) {
    for (auto& c : coeffs) c.assign(g.spectral_size(), cplx{});
  }

  SpectralVectorField& operator+=(const SpectralVectorField& o);
  SpectralVectorField& operator-=(const SpectralVectorField& o);
  SpectralVectorField& operator*=(double a);
  /// this += a * o
  SpectralVectorField& axpy(double a, const SpectralVectorField& o);
};

SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b);
SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b);
SpectralVectorField operator*(double a, SpectralVectorField b);

/// L^2 inner product over the box (Parseval, full-spectrum weights).
double inner_product(const SpectralVectorField& a, const SpectralVectorField& b);
double l2_norm(const SpectralVectorField& f);
double l2_norm(const SpectralScalarField& f);

/// max |xi.f(xi)| / |xi| over xi != 0, relative to the largest |f(xi)|.
double max_divergence_ratio(const SpectralVectorField& f);

/// Energy (sum of full-spectrum |c|^2, times box volume) in modes with
/// |xi| above `k_min`.
double energy_above(const SpectralVectorField& f, double k_min);

/// A diagonal operator in Fourier space: (M f)(xi) = m(xi) f(xi).
struct FourierMultiplier {
  Grid3 grid;
  std::vector<cplx> values;
  std::string label;

  FourierMultiplier() = default;
  FourierMultiplier(const Grid3& g, std::vector<cplx> v, std::string lbl)
      : grid(g), values(std::move(v)), label(std::move(lbl)) {}

  /// Identity multiplier.
  static FourierMultiplier identity(const Grid3& g);

  SpectralVectorField apply(const SpectralVectorField& f) const;
  SpectralScalarField apply(const SpectralScalarField& f) const;
};

/// Composition is the pointwise product of symbols.
FourierMultiplier operator*(const FourierMultiplier& a, const FourierMultiplier& b);

/// Riesz transform R_j with symbol -i xi_j / |xi| (zero at xi = 0).
FourierMultiplier riesz_multiplier(const Grid3& g, int j);

}  // namespace nslab
