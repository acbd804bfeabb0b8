#pragma once

#include <vector>

#include "nslab/field.hpp"

namespace nslab {

// --- Semigroup multipliers -------------------------------------------------

/// e^{-t|xi|^2}
FourierMultiplier heat_multiplier(const Grid3& g, double t);
/// e^{-t|xi|^ell}
FourierMultiplier hyper_multiplier(const Grid3& g, double t, double ell);
/// e^{-t(|xi|^2 + |xi|^ell)}, the symbol of S_ell(t) S(t).
FourierMultiplier combined_multiplier(const Grid3& g, double t, double ell);

/// Decay rate lambda(xi) per spectral slot: |xi|^2, plus |xi|^ell when
/// `ell > 0`. Propagators are exp(-t lambda).
std::vector<double> decay_rate(const Grid3& g, double ell = 0.0);

// --- Real-space kernel p_ell(x, 1) -----------------------------------------

struct KernelValue {
  double value = 0.0;
  double error = 0.0;  ///< quadrature error estimate (absolute)
};

/// p_ell(r, 1) = (2 pi)^-3 (4 pi / r) int_0^inf e^{-rho^ell} rho sin(rho r) d rho,
/// by adaptive Gauss-Kronrod on half-period panels of sin(rho r).
/// `tol` is the relative tolerance handed to each panel.
KernelValue kernel_realspace(double ell, double r, double tol = 1e-12);

/// Sampled radial kernel p_ell(r_i, 1).
struct RadialKernelTable {
  double ell = 0.0;
  std::vector<double> radii;
  std::vector<double> values;
  /// Estimated |4 pi int_{r_last}^inf p r^2 dr|.
  double tail_bound = 0.0;

  /// p_ell(x, t) = t^{-3/ell} p_ell(x t^{-1/ell}, 1), evaluated by
  /// fresh quadrature at the rescaled radius.
  double at_time(double r, double t) const;
};

RadialKernelTable build_kernel_table(double ell, std::vector<double> radii);

struct ClResult {
  double value = 0.0;         ///< C_ell = ||p_ell(., 1)||_1
  double error = 0.0;         ///< certified error (max spread of the resolution pairs)
  double mass = 0.0;          ///< signed integral of p_ell(., 1)
  double tail = 0.0;          ///< tail contribution added beyond the cutoff
  double cutoff = 0.0;        ///< radial cutoff used by the primary evaluation
  std::vector<double> sign_changes;  ///< radii where p_ell(., 1) changes sign
};

/// C_ell = 4 pi int_0^inf |p_ell(r, 1)| r^2 dr, computed at two quadrature
/// tolerances and two radial cutoffs. Throws GuardError when the spread
/// exceeds `max_error`.
ClResult compute_Cl(double ell, double max_error = 1e-4);

// --- L^1 semigroup gap ------------------------------------------------------

struct GapResult {
  double gap = 0.0;              ///< || p_ell(t) * p(t/2) - p(t/2) ||_1 on the torus
  double outside_mass = 0.0;     ///< Gaussian-tail estimate of mass beyond |x| = L/4
  double cells_per_width = 0.0;  ///< heat width sqrt(t) in cells
};

/// Gaussian-tail mass of an isotropic 3D Gaussian (variance sigma2 per axis)
/// outside the ball of radius R.
double gaussian_tail_mass(double R, double sigma2);

/// Throws GuardError when sqrt(t) spans fewer than 4 cells or the
/// estimated mass outside |x| <= L/4 exceeds 1e-10.
GapResult l1_semigroup_gap(double ell, double t, const Grid3& g);

// --- Mollifier ---------------------------------------------------------------

enum class MollifierProfile {
  /// omega(x) = c exp(-1/(1-|x|^2)) on |x| < 1
  StandardBump,
};

struct MollifierSpec {
  double kappa = 0.0;
  MollifierProfile profile = MollifierProfile::StandardBump;
  FourierMultiplier symbol;  ///< omega_kappa^(xi), equal to 1 at xi = 0
};

/// Unit-mass profile value omega(r), r = |x|.
double mollifier_profile(double r, MollifierProfile profile = MollifierProfile::StandardBump);
/// Continuous Fourier transform of the unit-width profile at |xi| = k (value 1 at k = 0).
double mollifier_transform(double k, MollifierProfile profile = MollifierProfile::StandardBump);

/// Samples omega_kappa^(xi) = omega_1^(kappa |xi|) on the grid. Throws
/// InvalidArgument for kappa < 0 and GuardError when kappa > L/2.
MollifierSpec mollifier_symbol(const Grid3& g, double kappa,
                               MollifierProfile profile = MollifierProfile::StandardBump);

}  // namespace nslab
