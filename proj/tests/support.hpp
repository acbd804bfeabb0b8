#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "nslab/fft.hpp"
#include "nslab/field.hpp"
#include "nslab/spectral_ops.hpp"

namespace testsupport {

using nslab::cplx;
using nslab::Grid3;
using nslab::SpectralVectorField;

// Gaussian white noise in physical space, transformed.
inline SpectralVectorField random_field(const Grid3& g, std::uint64_t seed, bool mean_free = true) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  nslab::VectorField f(g);
  for (auto& c : f.comp)
    for (double& x : c) x = normal(rng);
  SpectralVectorField s = nslab::transform_forward(f);
  if (mean_free)
    for (auto& c : s.coeffs) c[0] = cplx{};
  return s;
}

// Random solenoidal field confined to a few low modes.
inline SpectralVectorField smooth_random_field(const Grid3& g, std::uint64_t seed, int kmax) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  SpectralVectorField s(g);
  nslab::for_each_mode(g, [&](std::size_t i, int kx, int ky, int kz) {
    const int a = g.signed_index(kx), b = g.signed_index(ky), c = g.signed_index(kz);
    if (std::abs(a) > kmax || std::abs(b) > kmax || std::abs(c) > kmax) return;
    for (auto& comp : s.coeffs) comp[i] = cplx{normal(rng), normal(rng)};
  });
  // Round trip restores Hermitian consistency on the kx = 0 plane.
  s = nslab::transform_forward(nslab::transform_backward(s));
  for (auto& c : s.coeffs) c[0] = cplx{};
  return nslab::leray_project(s);
}

inline double rel_diff(const SpectralVectorField& a, const SpectralVectorField& b) {
  const double base = nslab::l2_norm(b);
  return nslab::l2_norm(a - b) / (base > 0.0 ? base : 1.0);
}

// Full n^3 spectrum of one half-layout component, indexed by slots.
inline std::vector<cplx> full_spectrum(const Grid3& g, const std::vector<cplx>& half) {
  const int n = g.n, nh = g.nh();
  std::vector<cplx> full(std::size_t(n) * n * n);
  auto idx = [n](int x, int y, int z) { return std::size_t(x) + std::size_t(n) * (y + std::size_t(n) * z); };
  for (int kz = 0; kz < n; ++kz)
    for (int ky = 0; ky < n; ++ky)
      for (int kx = 0; kx < n; ++kx) {
        if (kx < nh) {
          full[idx(kx, ky, kz)] = half[g.spectral_index(kx, ky, kz)];
        } else {
          const int mx = (n - kx) % n, my = (n - ky) % n, mz = (n - kz) % n;
          full[idx(kx, ky, kz)] = std::conj(half[g.spectral_index(mx, my, mz)]);
        }
      }
  return full;
}

// div(u (x) v) on the retained band by explicit convolution sums of the
// band-limited inputs.
inline SpectralVectorField direct_tensor_divergence(const SpectralVectorField& u,
                                                   const SpectralVectorField& v) {
  const Grid3& g = u.grid;
  const int n = g.n, cut = g.dealias_cutoff();
  std::vector<int> band;
  for (int k = -cut; k <= cut; ++k) band.push_back(k);
  auto slot = [n](int k) { return k < 0 ? k + n : k; };
  auto fidx = [n](int x, int y, int z) { return std::size_t(x) + std::size_t(n) * (y + std::size_t(n) * z); };
  std::vector<cplx> U[3], V[3];
  for (int j = 0; j < 3; ++j) {
    U[j] = full_spectrum(g, u.coeffs[j]);
    V[j] = full_spectrum(g, v.coeffs[j]);
  }
  SpectralVectorField out(g);
  for (int a : band)
    for (int b : band)
      for (int c : band) {
        if (a < 0) continue;  // half layout keeps kx >= 0
        cplx prod[3][3] = {};
        for (int p : band)
          for (int q : band)
            for (int r : band) {
              const int s1 = a - p, s2 = b - q, s3 = c - r;
              if (std::abs(s1) > cut || std::abs(s2) > cut || std::abs(s3) > cut) continue;
              const std::size_t i = fidx(slot(p), slot(q), slot(r));
              const std::size_t k = fidx(slot(s1), slot(s2), slot(s3));
              for (int j = 0; j < 3; ++j)
                for (int m = 0; m < 3; ++m) prod[j][m] += U[j][i] * V[m][k];
            }
        const double xi[3] = {g.k0() * a, g.k0() * b, g.k0() * c};
        const std::size_t s = g.spectral_index(a, slot(b), slot(c));
        for (int m = 0; m < 3; ++m) {
          cplx acc{};
          for (int j = 0; j < 3; ++j) acc += cplx{0.0, xi[j]} * prod[j][m];
          out.coeffs[m][s] = acc;
        }
      }
  return out;
}

}  // namespace testsupport
