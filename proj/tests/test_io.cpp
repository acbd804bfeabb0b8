#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nslab/error.hpp"
#include "nslab/experiments.hpp"
#include "nslab/fft.hpp"
#include "nslab/snapshot.hpp"
#include "nslab/solver.hpp"
#include "nslab/trajectory_io.hpp"
#include "support.hpp"

using namespace nslab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nslab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("NSF1 snapshot round trip") {
  const Grid3 g = make_grid(8, 3.5);
  const VectorField f = transform_backward(testsupport::random_field(g, 2));
  std::stringstream ss;
  write_snapshot(ss, f, 1.25);
  const Snapshot s = read_snapshot(ss);
  CHECK(s.time == 1.25);
  CHECK(s.field.grid == g);
  for (int j = 0; j < 3; ++j) CHECK(s.field.comp[j] == f.comp[j]);

  std::stringstream bad("NSF2 n=8 L=1 t=0 components=3\n");
  CHECK_THROWS_AS(read_snapshot(bad), Error);

  std::stringstream truncated;
  write_snapshot(truncated, f, 0.0);
  std::string text = truncated.str();
  text.resize(text.size() - 16);
  std::stringstream cut(text);
  CHECK_THROWS_AS(read_snapshot(cut), Error);
}

TEST_CASE("trajectory save and load") {
  const Grid3 g = make_grid(8, 6.0);
  const ModelSpec model = ModelSpec::mollified(g, 0.5);
  auto u0 = testsupport::smooth_random_field(g, 4, 2);
  const TimeGridSolution sol = etd_march(u0, model, TimeGrid::graded(0.5, 4));
  const fs::path dir = scratch_dir("traj");
  save_trajectory(dir, sol, model);
  const LoadedTrajectory back = load_trajectory(dir);
  CHECK(back.kind == ModelKind::Mollified);
  CHECK(back.kappa == 0.5);
  CHECK(back.grid == g);
  REQUIRE(back.solution.size() == sol.size());
  for (std::size_t m = 0; m < sol.size(); ++m) {
    CHECK(back.solution.times[m] == sol.times[m]);
    CHECK(testsupport::rel_diff(back.solution.fields[m], sol.fields[m]) <= 1e-13);
  }
  CHECK_THROWS_AS(load_trajectory(scratch_dir("empty")), InvalidArgument);
}

TEST_CASE("config hashing") {
  const ExperimentConfig a = default_config("hyper");
  ExperimentConfig b = default_config("hyper");
  CHECK(a.hash() == b.hash());
  b.threads = 8;
  CHECK(a.hash() == b.hash());
  b.amplitude = 0.25;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("INI config loading") {
  const fs::path dir = scratch_dir("ini");
  {
    std::ofstream os(dir / "ok.ini");
    os << "[default]\nn = 32\np_values = 3, 5\n[hyper]\nn = 48\nthreads = 2\n";
  }
  const ExperimentConfig h = load_config(dir / "ok.ini", "hyper");
  CHECK(h.n == 48);
  CHECK(h.threads == 2);
  CHECK(h.p_values == std::vector<double>{3.0, 5.0});
  CHECK(load_config(dir / "ok.ini", "mollified").n == 32);

  {
    std::ofstream os(dir / "bad.ini");
    os << "[default]\nno_such_key = 1\n";
  }
  CHECK_THROWS_AS(load_config(dir / "bad.ini", "hyper"), InvalidArgument);
}
