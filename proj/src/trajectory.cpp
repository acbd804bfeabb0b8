#include "nslab/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "nslab/error.hpp"

namespace nslab {

TimeGrid TimeGrid::graded(double T, int M, double gamma) {
  if (!(T > 0.0) || M < 1 || !(gamma >= 1.0))
    throw InvalidArgument("TimeGrid::graded: need T > 0, M >= 1, gamma >= 1");
  TimeGrid g;
  g.t.resize(std::size_t(M) + 1);
  for (int m = 0; m <= M; ++m) g.t[m] = T * std::pow(double(m) / M, gamma);
  g.t.back() = T;
  return g;
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2 || nodes.front() != 0.0)
    throw InvalidArgument("TimeGrid: need at least two nodes starting at t = 0");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1])) throw InvalidArgument("TimeGrid: nodes must increase strictly");
  return TimeGrid{std::move(nodes)};
}

std::size_t TimeGrid::nearest(double time) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs(t[i] - time) < std::abs(t[best] - time)) best = i;
  return best;
}

const SpectralVectorField& TimeGridSolution::nearest(double t) const {
  if (times.empty()) throw InvalidArgument("TimeGridSolution::nearest: empty trajectory");
  std::size_t best = 0;
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
  return fields[best];
}

TimeGridSolution difference(const TimeGridSolution& a, const TimeGridSolution& b) {
  if (a.times != b.times) throw InvalidArgument("difference: trajectories sampled at different times");
  TimeGridSolution out;
  out.times = a.times;
  out.fields.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.fields.push_back(a.fields[i] - b.fields[i]);
  return out;
}

}  // namespace nslab
