#pragma once

#include <cstddef>
#include <vector>

#include "nslab/field.hpp"

namespace nslab {

/// Time nodes 0 = t_0 < t_1 < ... < t_M.
struct TimeGrid {
  std::vector<double> t;

  /// Graded grid t_m = T (m/M)^gamma.
  static TimeGrid graded(double T, int M, double gamma = 2.0);
  /// Validates and wraps explicit nodes (must start at 0, strictly increasing).
  static TimeGrid from_nodes(std::vector<double> nodes);

  std::size_t size() const { return t.size(); }
  double final_time() const { return t.back(); }
  double step(std::size_t m) const { return t[m + 1] - t[m]; }
  /// Index of the node closest to `time`.
  std::size_t nearest(double time) const;
};

/// Per-sweep diagnostics of an iterative solve.
struct SolveHistory {
  std::vector<double> residuals;  ///< relative sup-node residual per sweep
  double contraction_ratio = 0.0; ///< last residual(k+1)/residual(k)
  int sweeps = 0;
  int steps = 0;                  ///< time steps taken by a marcher
};

/// A velocity trajectory sampled at (a subset of) the nodes of a time grid.
struct TimeGridSolution {
  std::vector<double> times;
  std::vector<SpectralVectorField> fields;
  SolveHistory history;

  std::size_t size() const { return times.size(); }
  const SpectralVectorField& at(std::size_t i) const { return fields.at(i); }
  /// Stored field at the node nearest to t.
  const SpectralVectorField& nearest(double t) const;
};

/// Node-wise difference a - b; both must share their stored times.
TimeGridSolution difference(const TimeGridSolution& a, const TimeGridSolution& b);

}  // namespace nslab
