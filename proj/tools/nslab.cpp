// Experiment runner.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "nslab/error.hpp"
#include "nslab/exact.hpp"
#include "nslab/experiments.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "INI config file")->check(CLI::ExistingFile);
  app->add_option("--out", f.out, "output directory");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--threads", f.threads, "worker threads for independent runs")->check(CLI::PositiveNumber);
}

int run(const std::string& name, const CommonFlags& f) {
  nslab::ExperimentConfig cfg =
      f.config.empty() ? nslab::default_config(name) : nslab::load_config(f.config, name);
  if (f.seed) cfg.seed = *f.seed;
  cfg.threads = f.threads;
  const nslab::ExperimentReport report = nslab::run_experiment(name, cfg);
  nslab::write_report(report, f.out);
  nslab::print_report(std::cout, report);
  if (report.passed()) return 0;
  std::cout << "\nfailed criteria:\n";
  for (const auto& c : report.criteria)
    if (!c.passed)
      std::cout << "  " << c.name << ": value " << c.value << ", need " << c.requirement << '\n';
  return 1;
}

int exact_landau(double c, int samples, double h, double rmin, double rmax, std::uint64_t seed) {
  const auto pts = nslab::landau_shell_samples(samples, rmin, rmax, seed);
  const nslab::LandauResidual r = nslab::landau_residual(c, pts, h);
  std::printf("c,samples,h,max,median,component1,component2,component3,max_divergence\n");
  std::printf("%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", c, samples, h, r.max, r.median,
              r.component_max[0], r.component_max[1], r.component_max[2], r.max_divergence);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mild-solution experiments for Navier-Stokes and two regularized variants"};
  app.require_subcommand(1);

  CommonFlags flags;
  const std::vector<std::string> names{"stability", "mollified", "hyper", "kernels", "landau", "norms-selftest"};
  for (const auto& n : names) add_common(app.add_subcommand(n, "run the " + n + " experiment"), flags);

  auto* exact = app.add_subcommand("exact", "closed-form checks");
  exact->require_subcommand(1);
  auto* landau = exact->add_subcommand("landau", "residual report for a Landau solution (CSV)");
  landau->set_help_flag("--help", "print this help message and exit");
  double c = 2.0, h = 1e-3, rmin = 0.5, rmax = 4.0;
  int samples = 100;
  std::uint64_t seed = 1;
  landau->add_option("--c", c, "parameter, |c| > 1")->required();
  landau->add_option("--samples", samples, "number of shell samples")->check(CLI::PositiveNumber);
  landau->add_option("--h", h, "difference step")->check(CLI::PositiveNumber);
  landau->add_option("--rmin", rmin, "inner shell radius");
  landau->add_option("--rmax", rmax, "outer shell radius");
  landau->add_option("--seed", seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (landau->parsed()) return exact_landau(c, samples, h, rmin, rmax, seed);
    for (const auto& n : names)
      if (app.got_subcommand(n)) return run(n, flags);
  } catch (const nslab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
