#include "nslab/trajectory_io.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "nslab/error.hpp"
#include "nslab/fft.hpp"
#include "nslab/snapshot.hpp"

namespace nslab {
namespace {

using json = nlohmann::json;

std::string snapshot_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u_%04zu.nsf", i);
  return buf;
}

const char* kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::NavierStokes: return "navier_stokes";
    case ModelKind::Mollified: return "mollified";
    case ModelKind::Hyperviscous: return "hyperviscous";
  }
  return "?";
}

ModelKind kind_from(const std::string& s) {
  if (s == "navier_stokes") return ModelKind::NavierStokes;
  if (s == "mollified") return ModelKind::Mollified;
  if (s == "hyperviscous") return ModelKind::Hyperviscous;
  throw InvalidArgument("load_trajectory: unknown model kind '" + s + "'");
}

}  // namespace

void save_trajectory(const std::filesystem::path& dir, const TimeGridSolution& sol,
                     const ModelSpec& model) {
  std::filesystem::create_directories(dir);
  json m;
  m["format"] = "NSF1";
  m["model"] = {{"kind", kind_name(model.kind)},
                {"kappa", model.kappa},
                {"ell", model.ell},
                {"forcing", model.forcing.name()},
                {"nonlinear", model.nonlinear}};
  m["grid"] = {{"n", model.grid.n}, {"L", model.grid.L}};
  m["times"] = sol.times;
  m["residuals"] = sol.history.residuals;
  m["sweeps"] = sol.history.sweeps;
  m["steps"] = sol.history.steps;
  json files = json::array();
  for (std::size_t i = 0; i < sol.size(); ++i) {
    const std::string name = snapshot_name(i);
    write_snapshot(dir / name, transform_backward(sol.fields[i]), sol.times[i]);
    files.push_back(name);
  }
  m["snapshots"] = files;
  std::ofstream os(dir / "manifest.json");
  if (!os) throw Error("save_trajectory: cannot write manifest in " + dir.string());
  os << m.dump(2) << '\n';
}

LoadedTrajectory load_trajectory(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw InvalidArgument("load_trajectory: no manifest.json in " + dir.string());
  json m;
  try {
    is >> m;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("load_trajectory: malformed manifest: ") + e.what());
  }
  LoadedTrajectory out;
  out.kind = kind_from(m.at("model").at("kind").get<std::string>());
  out.kappa = m.at("model").at("kappa").get<double>();
  out.ell = m.at("model").at("ell").get<double>();
  out.grid = make_grid(m.at("grid").at("n").get<int>(), m.at("grid").at("L").get<double>());
  auto& sol = out.solution;
  sol.times = m.at("times").get<std::vector<double>>();
  sol.history.residuals = m.value("residuals", std::vector<double>{});
  sol.history.sweeps = m.value("sweeps", 0);
  sol.history.steps = m.value("steps", 0);
  const auto files = m.at("snapshots").get<std::vector<std::string>>();
  if (files.size() != sol.times.size())
    throw InvalidArgument("load_trajectory: snapshot count does not match time nodes");
  for (const auto& f : files) {
    Snapshot s = read_snapshot(dir / f);
    if (!(s.field.grid == out.grid)) throw InvalidArgument("load_trajectory: grid mismatch in " + f);
    SpectralVectorField u = transform_forward(s.field);
    u.is_solenoidal = true;
    sol.fields.push_back(std::move(u));
  }
  return out;
}

}  // namespace nslab
