#pragma once

#include <filesystem>

#include "nslab/solver.hpp"
#include "nslab/trajectory.hpp"

namespace nslab {

/// Writes one NSF1 snapshot per stored node (`u_0000.nsf`, ...) and a
/// `manifest.json` with the model, grid, times and residual history.
void save_trajectory(const std::filesystem::path& dir, const TimeGridSolution& sol,
                     const ModelSpec& model);

struct LoadedTrajectory {
  TimeGridSolution solution;
  ModelKind kind = ModelKind::NavierStokes;
  double kappa = 0.0;
  double ell = 0.0;
  Grid3 grid;
};

LoadedTrajectory load_trajectory(const std::filesystem::path& dir);

}  // namespace nslab
