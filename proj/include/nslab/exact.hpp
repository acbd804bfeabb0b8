#pragma once

#include <cstdint>
#include <vector>

#include "nslab/field.hpp"

namespace nslab {

// --- Landau solutions ------------------------------------------------------

struct LandauValue {
  Vec3 u{};
  double p = 0.0;
};

/// The one-point singular stationary solution with parameter c, |c| > 1:
///   u1 = 2 (c|x|^2 - 2 x1|x| + c x1^2) / (|x| (c|x| - x1)^2)
///   uj = 2 xj (c x1 - |x|) / (|x| (c|x| - x1)^2),  j = 2, 3
///   p  = 4 (c x1 - |x|) / (|x| (c|x| - x1)^2)
class LandauSolution {
 public:
  /// Throws InvalidArgument for |c| <= 1.
  explicit LandauSolution(double c);
  double c() const { return c_; }
  /// Throws InvalidArgument at x = 0.
  LandauValue eval(const Vec3& x) const;

 private:
  double c_;
};

LandauValue landau_eval(double c, const Vec3& x);

struct LandauResidual {
  double max = 0.0;     ///< max relative momentum residual
  double median = 0.0;
  Vec3 component_max{}; ///< max relative residual per momentum component
  double max_divergence = 0.0;  ///< max |div u| / (|grad u| + eps)
  std::vector<double> per_sample;
};

/// Residual of -Lap u + (u.grad) u + grad p = 0 and div u = 0 at the
/// samples, by 4th-order central differences of the closed form with step h.
/// Each sample is scaled by |u||grad u| + |grad p| + eps. Throws
/// InvalidArgument for samples with |x| < 0.5 or h <= 0.
LandauResidual landau_residual(double c, const std::vector<Vec3>& samples, double h);

/// Points uniform in the shell rmin <= |x| <= rmax.
std::vector<Vec3> landau_shell_samples(int count, double rmin, double rmax, std::uint64_t seed);

// --- Homogeneous data --------------------------------------------------------

enum class HomogeneousProfile {
  /// a (-x2, x1, 0) / |x|^2
  Swirl,
};

struct HomogeneousData {
  HomogeneousProfile profile = HomogeneousProfile::Swirl;
  double amplitude = 1.0;
  /// Core smoothing |x|^2 -> |x|^2 + delta^2, in grid cells.
  double delta_cells = 4.0;
};

struct HomogeneousField {
  SpectralVectorField field;
  /// ||P f - f||_2 / ||f||_2 of the sampled field.
  double projection_correction = 0.0;
};

/// Smooth radial cutoff: 1 for r <= a, 0 for r >= b, C^infinity between.
double smooth_cutoff(double r, double a, double b);

/// Samples the regularized profile times the box window (1 inside L/4, 0
/// outside 3L/8), then projects. Throws GuardError for a core under two
/// cells or a projection correction above 1%.
HomogeneousField homogeneous_data(const HomogeneousData& spec, const Grid3& g);

/// Closed form of the regularized profile before windowing.
Vec3 homogeneous_profile(const HomogeneousData& spec, const Grid3& g, const Vec3& x);

// --- Parabolic rescaling -----------------------------------------------------

/// u_lambda(x) = lambda u(lambda x), zero where lambda x leaves the box.
/// Integer lambda samples the grid exactly; other values use separable
/// trigonometric interpolation. Throws GuardError when a fraction above
/// `alias_tol` of the energy sits at |signed index| > n / (2 lambda).
SpectralVectorField rescale(const SpectralVectorField& u, double lambda, double alias_tol = 1e-6);

}  // namespace nslab
