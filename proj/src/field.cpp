#include "nslab/field.hpp"

#include <cmath>

#include "nslab/error.hpp"

namespace nslab {

ScalarField VectorField::magnitude() const {
  ScalarField m(grid);
  for (std::size_t i = 0; i < m.data.size(); ++i)
    m.data[i] = std::sqrt(comp[0][i] * comp[0][i] + comp[1][i] * comp[1][i] +
                          comp[2][i] * comp[2][i]);
  return m;
}

SpectralVectorField& SpectralVectorField::operator+=(const SpectralVectorField& o) {
  return axpy(1.0, o);
}

SpectralVectorField& SpectralVectorField::operator-=(const SpectralVectorField& o) {
  return axpy(-1.0, o);
}

SpectralVectorField& SpectralVectorField::operator*=(double a) {
  for (auto& c : coeffs)
    for (auto& v : c) v *= a;
  return *this;
}

SpectralVectorField& SpectralVectorField::axpy(double a, const SpectralVectorField& o) {
  require_same_grid(grid, o.grid, "SpectralVectorField::axpy");
  for (int j = 0; j < 3; ++j) {
    auto& c = coeffs[j];
    const auto& d = o.coeffs[j];
    for (std::size_t s = 0; s < c.size(); ++s) c[s] += a * d[s];
  }
  is_solenoidal = is_solenoidal && o.is_solenoidal;
  return *this;
}

SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b) {
  a += b;
  return a;
}

SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b) {
  a -= b;
  return a;
}

SpectralVectorField operator*(double a, SpectralVectorField b) {
  b *= a;
  return b;
}

double inner_product(const SpectralVectorField& a, const SpectralVectorField& b) {
  require_same_grid(a.grid, b.grid, "inner_product");
  const Grid3& g = a.grid;
  double acc = 0.0;
  for (int j = 0; j < 3; ++j) {
    const auto& x = a.coeffs[j];
    const auto& y = b.coeffs[j];
    for_each_mode(g, [&](std::size_t s, int kx, int, int) {
      acc += g.mode_weight(kx) * (x[s].real() * y[s].real() + x[s].imag() * y[s].imag());
    });
  }
  return acc * g.box_volume();
}

double l2_norm(const SpectralVectorField& f) { return std::sqrt(inner_product(f, f)); }

double l2_norm(const SpectralScalarField& f) {
  const Grid3& g = f.grid;
  double acc = 0.0;
  for_each_mode(g, [&](std::size_t s, int kx, int, int) {
    acc += g.mode_weight(kx) * std::norm(f.coeffs[s]);
  });
  return std::sqrt(acc * g.box_volume());
}

double max_divergence_ratio(const SpectralVectorField& f) {
  const Grid3& g = f.grid;
  double worst = 0.0, largest = 0.0;
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    const double xi[3] = {g.wavenumber(kx), g.wavenumber(ky), g.wavenumber(kz)};
    const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if (k2 == 0.0) return;
    const cplx dot = xi[0] * f.coeffs[0][s] + xi[1] * f.coeffs[1][s] + xi[2] * f.coeffs[2][s];
    largest = std::max(largest, std::sqrt(std::norm(f.coeffs[0][s]) + std::norm(f.coeffs[1][s]) +
                                          std::norm(f.coeffs[2][s])));
    worst = std::max(worst, std::abs(dot) / std::sqrt(k2));
  });
  return largest > 0.0 ? worst / largest : 0.0;
}

double energy_above(const SpectralVectorField& f, double k_min) {
  const Grid3& g = f.grid;
  const double k2min = k_min * k_min;
  double acc = 0.0;
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    if (wavenumber_sq(g, kx, ky, kz) <= k2min) return;
    for (int j = 0; j < 3; ++j) acc += g.mode_weight(kx) * std::norm(f.coeffs[j][s]);
  });
  return acc * g.box_volume();
}

FourierMultiplier FourierMultiplier::identity(const Grid3& g) {
  return FourierMultiplier(g, std::vector<cplx>(g.spectral_size(), cplx{1.0, 0.0}), "identity");
}

SpectralVectorField FourierMultiplier::apply(const SpectralVectorField& f) const {
  require_same_grid(grid, f.grid, "FourierMultiplier::apply");
  SpectralVectorField out = f;
  for (auto& c : out.coeffs)
    for (std::size_t s = 0; s < c.size(); ++s) c[s] *= values[s];
  return out;
}

SpectralScalarField FourierMultiplier::apply(const SpectralScalarField& f) const {
  require_same_grid(grid, f.grid, "FourierMultiplier::apply");
  SpectralScalarField out = f;
  for (std::size_t s = 0; s < out.coeffs.size(); ++s) out.coeffs[s] *= values[s];
  return out;
}

FourierMultiplier operator*(const FourierMultiplier& a, const FourierMultiplier& b) {
  require_same_grid(a.grid, b.grid, "FourierMultiplier composition");
  std::vector<cplx> v(a.values.size());
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = a.values[s] * b.values[s];
  return FourierMultiplier(a.grid, std::move(v), a.label + "*" + b.label);
}

FourierMultiplier riesz_multiplier(const Grid3& g, int j) {
  if (j < 0 || j > 2) throw InvalidArgument("riesz_multiplier: component must be 0, 1 or 2");
  std::vector<cplx> v(g.spectral_size());
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    const double k2 = wavenumber_sq(g, kx, ky, kz);
    if (k2 == 0.0) return;
    const int idx[3] = {kx, ky, kz};
    v[s] = cplx{0.0, -g.derivative_wavenumber(idx[j]) / std::sqrt(k2)};
  });
  return FourierMultiplier(g, std::move(v), "riesz" + std::to_string(j + 1));
}

}  // namespace nslab
