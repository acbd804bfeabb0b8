#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nslab/field.hpp"
#include "nslab/trajectory.hpp"

namespace nslab {

struct NormKind {
  enum class Tag { Lp, WeakLp, BesovHeat };
  Tag tag = Tag::Lp;
  double p = 2.0;
  double alpha = 0.0;

  static NormKind lp(double p);
  static NormKind weak_lp(double p);
  static NormKind besov_heat(double alpha, double p);
  std::string name() const;
};

/// How a vector field is reduced to a scalar before a norm is taken.
enum class VectorNorm {
  Euclidean,     ///< norm of the pointwise magnitude |u(x)|
  ComponentMax,  ///< max_j ||u_j||
};

/// (sum |f_i|^p dV)^{1/p}, or max |f_i| for p = infinity.
double lp_norm(std::span<const double> samples, double cell_volume, double p);
double lp_norm(const ScalarField& f, double p);
double lp_norm(const VectorField& f, double p, VectorNorm mode = VectorNorm::Euclidean);

/// Set-average Marcinkiewicz norm sup_E |E|^{1/p - 1} int_E |f|, evaluated
/// exactly on the cell measure: the supremum is attained on superlevel sets.
double weak_lp_norm(std::span<const double> samples, double cell_volume, double p);
double weak_lp_norm(const ScalarField& f, double p);
double weak_lp_norm(const VectorField& f, double p, VectorNorm mode = VectorNorm::Euclidean);

/// Dispatch on an Lp / WeakLp kind for a spectral field.
double field_norm(const SpectralVectorField& u, const NormKind& kind,
                  VectorNorm mode = VectorNorm::Euclidean);

struct BesovResult {
  double value = 0.0;
  double t_max = 0.0;     ///< maximizing heat time
  bool interior = false;  ///< false when the max sits on an endpoint of t_grid
};

/// max over t_grid of t^{alpha/2} || S(t) f ||_p.
BesovResult besov_heat_norm(const SpectralVectorField& f, double alpha, double p,
                            std::span<const double> t_grid,
                            VectorNorm mode = VectorNorm::Euclidean);

/// Log-spaced grid with `per_decade` points per decade on [t_lo, t_hi].
std::vector<double> log_time_grid(double t_lo, double t_hi, int per_decade = 25);

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  int points = 0;
};

struct DecayCurve {
  std::string functional;  ///< human-readable name, e.g. "t^a||u-v||_4"
  NormKind kind;
  std::vector<double> times;
  std::vector<double> values;
  bool has_fit = false;
  SlopeFit fit;
  double window_lo = 0.0, window_hi = 0.0;
};

/// Curve of t^{(1-3/p)/2} ||u(t)|| over stored nodes with t > 0.
DecayCurve decay_functional(const TimeGridSolution& u, double p, NormKind::Tag kind,
                            VectorNorm mode = VectorNorm::Euclidean);
/// Same for the difference u - v.
DecayCurve decay_functional(const TimeGridSolution& u, const TimeGridSolution& v, double p,
                            NormKind::Tag kind, VectorNorm mode = VectorNorm::Euclidean);
/// Weight t^{(1-3/p)/2} of the decay functionals.
double decay_weight(double t, double p);

/// Ordinary least squares of log(value) on log(t) over t in [lo, hi].
/// Throws InvalidArgument with fewer than 3 points or a nonpositive value.
SlopeFit fit_slope(const DecayCurve& curve, double lo, double hi);
/// Fits and stores the result in the curve.
void fit_slope_in_place(DecayCurve& curve, double lo, double hi);

/// CSV "t,value,functional,p,kind", one header line; fitted slopes are
/// appended as '#' comment lines.
void write_curves_csv(std::ostream& os, const std::vector<DecayCurve>& curves);

}  // namespace nslab
