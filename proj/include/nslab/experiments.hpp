#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nslab/norms.hpp"

namespace nslab {

/// Parameters of one experiment, in box units unless a name says "cells".
struct ExperimentConfig {
  std::string name;

  // Grid and time grid.
  int n = 64;
  double L = 40.0;
  double T = 25.0;
  int M = 200;
  double gamma = 2.0;

  // Initial data: regularized swirl.
  double amplitude = 0.5;
  double delta_cells = 4.0;

  // Measurement.
  double window_lo = 0.2;
  double window_hi = 25.0;
  int per_decade = 12;
  std::vector<double> p_values{4.0, 6.0};

  // mollified
  std::vector<double> kappa_cells{2.0, 4.0};
  // hyper: the first entry is asserted, the rest are recorded.
  std::vector<double> ells{4.0, 3.0, 2.0};
  double forcing_amplitude = 0.05;
  double forcing_width = 2.0;

  // stability: divergence-free Gaussian bump added to the data.
  double bump_amplitude = 0.05;
  double bump_width = 2.0;

  // kernels
  std::vector<double> kernel_ells{2.0, 3.0, 4.0, 6.0};
  std::vector<double> cl_ells{1.0, 1.5, 2.0, 3.0, 4.0, 6.0};
  double kernel_t_lo = 1.0;
  double kernel_t_hi = 64.0;
  int kernel_points = 7;
  int kernel_n = 192;

  // landau
  std::vector<double> landau_c{-3.0, -1.5, 1.5, 2.0, 5.0};
  int landau_samples = 100;
  double landau_h = 1e-3;
  double landau_rmin = 0.5;
  double landau_rmax = 4.0;
  int force_n = 32;
  double force_L = 10.0;
  double force_T = 25.0;
  double force_sigma_cells = 6.0;
  double force_b = 0.5;
  double rescale_t0 = 3.0;
  double rescale_radius = 3.75;

  // norms-selftest
  int selftest_n = 16;
  int selftest_fields = 100;
  int selftest_sets = 10000;

  std::uint64_t seed = 1;
  int threads = 1;

  /// Sorted key=value lines covering every field.
  std::string canonical() const;
  /// 64-bit FNV-1a of canonical().
  std::uint64_t hash() const;
};

/// Defaults for a named experiment.
ExperimentConfig default_config(const std::string& experiment);

/// INI file: keys in [default] apply to every experiment, keys in
/// [<experiment>] override them. Lists are comma separated. Unknown keys
/// throw InvalidArgument.
ExperimentConfig load_config(const std::filesystem::path& path, const std::string& experiment);

struct CriterionResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string requirement;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t config_hash = 0;
  double window_lo = 0.0, window_hi = 0.0;
  std::vector<std::string> guards;
  std::vector<std::string> notes;
  std::vector<CriterionResult> criteria;
  std::vector<DecayCurve> curves;
  /// Extra CSV tables keyed by file stem, e.g. "kernels".
  std::vector<std::pair<std::string, std::string>> tables;

  bool passed() const;
  const CriterionResult* find(const std::string& name) const;
};

/// Writes <experiment>_curves.csv, <experiment>_report.txt and the extra
/// tables into `dir`. Each file starts with a "# config_hash=" line.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);
/// Human-readable per-criterion table.
void print_report(std::ostream& os, const ExperimentReport& report);

// --- Measurement helpers ------------------------------------------------------

/// Decay regime of a curve: from its maximum over [lo, hi] to the last
/// sample inside [lo, hi].
struct DecayWindow {
  double t_start = 0.0, t_end = 0.0;
  double v_start = 0.0, v_end = 0.0;
  double drop_per_decade = 0.0;  ///< (v_start / v_end)^(1 / log10(t_end / t_start))
  bool monotone = false;         ///< nonincreasing over the regime
  double span = 0.0;             ///< t_end / t_start
};
DecayWindow decay_window(const DecayCurve& c, double lo, double hi);

/// Factor-8 window centred (in log t) on the curve's maximum over [lo, hi];
/// returns max/min - 1 of the samples inside it.
struct PlateauWindow {
  double t_lo = 0.0, t_hi = 0.0;
  double spread = 0.0;
  int points = 0;
};
PlateauWindow plateau_window(const DecayCurve& c, double lo, double hi, double factor = 8.0);

// --- Experiments ------------------------------------------------------------------

ExperimentReport run_stability(const ExperimentConfig& cfg);
ExperimentReport run_mollified(const ExperimentConfig& cfg);
ExperimentReport run_hyper(const ExperimentConfig& cfg);
ExperimentReport run_kernels(const ExperimentConfig& cfg);
ExperimentReport run_landau(const ExperimentConfig& cfg);
ExperimentReport run_norms_selftest(const ExperimentConfig& cfg);
/// Self-similarity harness and rescaling consistency for NS from
/// homogeneous data (part of run_landau).
ExperimentReport run_selfsimilar(const ExperimentConfig& cfg);

/// Dispatch by subcommand name.
ExperimentReport run_experiment(const std::string& name, const ExperimentConfig& cfg);

}  // namespace nslab
