#include "nslab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "nslab/error.hpp"
#include "nslab/fft.hpp"
#include "nslab/kernels.hpp"

namespace nslab {
namespace {

void require_lp(double p) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm: p must lie in [1, inf]");
}

void require_weak(double p) {
  if (!(p > 1.0) || std::isinf(p)) throw InvalidArgument("weak_lp_norm: p must lie in (1, inf)");
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

NormKind NormKind::lp(double p) {
  require_lp(p);
  return {Tag::Lp, p, 0.0};
}

NormKind NormKind::weak_lp(double p) {
  require_weak(p);
  return {Tag::WeakLp, p, 0.0};
}

NormKind NormKind::besov_heat(double alpha, double p) {
  require_lp(p);
  if (!(alpha >= 0.0)) throw InvalidArgument("besov_heat: alpha must be nonnegative");
  return {Tag::BesovHeat, p, alpha};
}

std::string NormKind::name() const {
  switch (tag) {
    case Tag::Lp: return "Lp";
    case Tag::WeakLp: return "WeakLp";
    case Tag::BesovHeat: return "BesovHeat";
  }
  return "?";
}

double lp_norm(std::span<const double> samples, double cell_volume, double p) {
  require_lp(p);
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : samples) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  if (p == 2.0) {
    for (double v : samples) acc += v * v;
  } else {
    for (double v : samples) acc += std::pow(std::abs(v), p);
  }
  return std::pow(acc * cell_volume, 1.0 / p);
}

double lp_norm(const ScalarField& f, double p) {
  return lp_norm(f.data, f.grid.cell_volume(), p);
}

double lp_norm(const VectorField& f, double p, VectorNorm mode) {
  if (mode == VectorNorm::Euclidean) return lp_norm(f.magnitude(), p);
  double m = 0.0;
  for (const auto& c : f.comp) m = std::max(m, lp_norm(c, f.grid.cell_volume(), p));
  return m;
}

double weak_lp_norm(std::span<const double> samples, double cell_volume, double p) {
  require_weak(p);
  std::vector<double> a(samples.size());
  std::transform(samples.begin(), samples.end(), a.begin(), [](double v) { return std::abs(v); });
  std::sort(a.begin(), a.end(), std::greater<>());
  const double inv_q = 1.0 - 1.0 / p;
  double best = 0.0, partial = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    partial += a[k];
    const double measure = double(k + 1) * cell_volume;
    best = std::max(best, partial * cell_volume / std::pow(measure, inv_q));
  }
  return best;
}

double weak_lp_norm(const ScalarField& f, double p) {
  return weak_lp_norm(f.data, f.grid.cell_volume(), p);
}

double weak_lp_norm(const VectorField& f, double p, VectorNorm mode) {
  if (mode == VectorNorm::Euclidean) return weak_lp_norm(f.magnitude(), p);
  double m = 0.0;
  for (const auto& c : f.comp) m = std::max(m, weak_lp_norm(c, f.grid.cell_volume(), p));
  return m;
}

double field_norm(const SpectralVectorField& u, const NormKind& kind, VectorNorm mode) {
  switch (kind.tag) {
    case NormKind::Tag::Lp: return lp_norm(transform_backward(u), kind.p, mode);
    case NormKind::Tag::WeakLp: return weak_lp_norm(transform_backward(u), kind.p, mode);
    case NormKind::Tag::BesovHeat: break;
  }
  throw InvalidArgument("field_norm: Besov norms need a time grid; use besov_heat_norm");
}

BesovResult besov_heat_norm(const SpectralVectorField& f, double alpha, double p,
                            std::span<const double> t_grid, VectorNorm mode) {
  NormKind::besov_heat(alpha, p);
  if (t_grid.empty()) throw InvalidArgument("besov_heat_norm: empty time grid");
  BesovResult res;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    if (!(t > 0.0)) throw InvalidArgument("besov_heat_norm: times must be positive");
    const double v = std::pow(t, 0.5 * alpha) *
                     lp_norm(transform_backward(heat_multiplier(f.grid, t).apply(f)), p, mode);
    if (i == 0 || v > res.value) {
      res.value = v;
      arg = i;
    }
  }
  res.t_max = t_grid[arg];
  res.interior = arg > 0 && arg + 1 < t_grid.size();
  return res;
}

std::vector<double> log_time_grid(double t_lo, double t_hi, int per_decade) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || per_decade < 1)
    throw InvalidArgument("log_time_grid: need 0 < t_lo < t_hi and per_decade >= 1");
  const double decades = std::log10(t_hi / t_lo);
  const int count = std::max(2, int(std::ceil(decades * per_decade)) + 1);
  std::vector<double> ts(count);
  for (int i = 0; i < count; ++i)
    ts[i] = t_lo * std::pow(10.0, decades * double(i) / double(count - 1));
  ts.back() = t_hi;
  return ts;
}

double decay_weight(double t, double p) {
  return std::isinf(p) ? std::sqrt(t) : std::pow(t, 0.5 * (1.0 - 3.0 / p));
}

namespace {

DecayCurve make_curve(const TimeGridSolution& u, const TimeGridSolution* v, double p,
                      NormKind::Tag tag, VectorNorm mode) {
  const NormKind kind = tag == NormKind::Tag::WeakLp ? NormKind::weak_lp(p) : NormKind::lp(p);
  DecayCurve c;
  c.kind = kind;
  std::ostringstream name;
  name << "t^" << fmt(0.5 * (1.0 - 3.0 / p)) << "*" << kind.name() << "(" << fmt(p) << ")"
       << (v ? "[u-v]" : "[u]");
  c.functional = name.str();
  if (v && u.times != v->times)
    throw InvalidArgument("decay_functional: trajectories sampled at different times");
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = u.times[i];
    if (!(t > 0.0)) continue;
    const double norm = v ? field_norm(u.fields[i] - v->fields[i], kind, mode)
                          : field_norm(u.fields[i], kind, mode);
    c.times.push_back(t);
    c.values.push_back(decay_weight(t, p) * norm);
  }
  return c;
}

}  // namespace

DecayCurve decay_functional(const TimeGridSolution& u, double p, NormKind::Tag kind,
                            VectorNorm mode) {
  return make_curve(u, nullptr, p, kind, mode);
}

DecayCurve decay_functional(const TimeGridSolution& u, const TimeGridSolution& v, double p,
                            NormKind::Tag kind, VectorNorm mode) {
  return make_curve(u, &v, p, kind, mode);
}

SlopeFit fit_slope(const DecayCurve& curve, double lo, double hi) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    const double t = curve.times[i];
    if (t < lo || t > hi) continue;
    if (!(curve.values[i] > 0.0))
      throw InvalidArgument("fit_slope: nonpositive value in window (log undefined)");
    pts.emplace_back(std::log(t), std::log(curve.values[i]));
  }
  if (pts.size() < 3) throw InvalidArgument("fit_slope: fewer than 3 points in window");
  // Sorted accumulation makes the fit independent of input order.
  std::sort(pts.begin(), pts.end());
  const double n = double(pts.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  SlopeFit fit;
  fit.points = int(pts.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& [x, y] : pts) {
    const double r = y - (fit.intercept + fit.slope * x);
    ssr += r * r;
  }
  fit.stderr_ = pts.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
  return fit;
}

void fit_slope_in_place(DecayCurve& curve, double lo, double hi) {
  curve.fit = fit_slope(curve, lo, hi);
  curve.has_fit = true;
  curve.window_lo = lo;
  curve.window_hi = hi;
}

void write_curves_csv(std::ostream& os, const std::vector<DecayCurve>& curves) {
  os << "t,value,functional,p,kind\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.times.size(); ++i)
      os << fmt(c.times[i]) << ',' << fmt(c.values[i]) << ',' << c.functional << ','
         << fmt(c.kind.p) << ',' << c.kind.name() << '\n';
  for (const auto& c : curves)
    if (c.has_fit)
      os << "# slope functional=" << c.functional << " window=[" << fmt(c.window_lo) << ","
         << fmt(c.window_hi) << "] slope=" << fmt(c.fit.slope) << " stderr="
         << fmt(c.fit.stderr_) << " points=" << c.fit.points << '\n';
}

}  // namespace nslab
