#pragma once

#include <cstddef>

namespace nslab {

/// Periodic cubic box [-L/2, L/2)^3 sampled with n points per axis.
///
/// Physical samples are stored x-fastest: index = ix + n*(iy + n*iz).
/// Spectral coefficients use the real-to-complex half layout:
/// index = kx + nh*(ky + n*kz) with kx in [0, n/2] and nh = n/2 + 1.
/// Signed frequency indices run over {-n/2, ..., n/2-1}; the half-layout
/// slot kx = n/2 therefore carries the frequency -n/2.
struct Grid3 {
  int n = 0;
  double L = 0.0;

  double dx() const { return L / n; }
  double cell_volume() const { const double h = dx(); return h * h * h; }
  double box_volume() const { return L * L * L; }
  /// Fundamental wavenumber 2*pi/L.
  double k0() const;
  int nh() const { return n / 2 + 1; }
  std::size_t physical_size() const { return std::size_t(n) * n * n; }
  std::size_t spectral_size() const { return std::size_t(nh()) * n * n; }

  /// Signed frequency index of array slot i (valid for all three axes).
  int signed_index(int i) const { return i < n / 2 ? i : i - n; }
  double wavenumber(int i) const { return k0() * signed_index(i); }
  /// Wavenumber used by odd (first-derivative) symbols: zero at Nyquist.
  double derivative_wavenumber(int i) const {
    return signed_index(i) == -n / 2 ? 0.0 : wavenumber(i);
  }
  /// Minimum-image coordinate of sample i, in [-L/2, L/2).
  double coord(int i) const { return signed_index(i) * dx(); }
  /// Largest retained |signed index| under the 2/3 rule (|k| < n/3).
  int dealias_cutoff() const { return (n - 1) / 3; }

  std::size_t physical_index(int ix, int iy, int iz) const {
    return std::size_t(ix) + std::size_t(n) * (std::size_t(iy) + std::size_t(n) * iz);
  }
  std::size_t spectral_index(int kx, int ky, int kz) const {
    return std::size_t(kx) + std::size_t(nh()) * (std::size_t(ky) + std::size_t(n) * kz);
  }
  /// Multiplicity of a half-layout slot in the full spectrum (1 or 2).
  double mode_weight(int kx) const { return (kx == 0 || kx == n / 2) ? 1.0 : 2.0; }

  friend bool operator==(const Grid3&, const Grid3&) = default;
};

/// Validated constructor: n even and >= 8, L > 0.
Grid3 make_grid(int n, double L);

/// Throws InvalidArgument unless both grids are identical.
void require_same_grid(const Grid3& a, const Grid3& b, const char* where);

/// Calls f(slot, kx, ky, kz) for every half-layout spectral slot, with the
/// slot indices (not the signed ones).
template <class F>
void for_each_mode(const Grid3& g, F&& f) {
  const int n = g.n, nh = g.nh();
  std::size_t s = 0;
  for (int kz = 0; kz < n; ++kz)
    for (int ky = 0; ky < n; ++ky)
      for (int kx = 0; kx < nh; ++kx, ++s) f(s, kx, ky, kz);
}

/// |xi|^2 of a half-layout slot.
inline double wavenumber_sq(const Grid3& g, int kx, int ky, int kz) {
  const double a = g.wavenumber(kx), b = g.wavenumber(ky), c = g.wavenumber(kz);
  return a * a + b * b + c * c;
}

}  // namespace nslab
