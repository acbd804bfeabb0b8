#include "nslab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "nslab/error.hpp"
#include "nslab/fft.hpp"
#include "nslab/kernels.hpp"
#include "nslab/norms.hpp"
#include "nslab/spectral_ops.hpp"

namespace nslab {
namespace {

// phi1(z) = (e^z - 1)/z, phi2(z) = (e^z - 1 - z)/z^2 for z = -lambda h <= 0.
struct Phi {
  double e, phi1, phi2;
};

Phi phi_functions(double z) {
  if (std::abs(z) < 1e-2) {
    const double z2 = z * z, z3 = z2 * z, z4 = z2 * z2, z5 = z4 * z;
    return {std::exp(z), 1.0 + z / 2 + z2 / 6 + z3 / 24 + z4 / 120 + z5 / 720,
            0.5 + z / 6 + z2 / 24 + z3 / 120 + z4 / 720 + z5 / 5040};
  }
  const double em1 = std::expm1(z);
  return {em1 + 1.0, em1 / z, (em1 - z) / (z * z)};
}

void require_grid_match(const ModelSpec& model, const Grid3& g, const char* where) {
  require_same_grid(model.grid, g, where);
}

void require_time_nodes(const std::vector<double>& t, const char* where) {
  if (t.size() < 2 || t.front() != 0.0)
    throw InvalidArgument(std::string(where) + ": trajectory must start at t = 0 with >= 2 nodes");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw InvalidArgument(std::string(where) + ": times must increase");
}

double sup_norm(const SpectralVectorField& u) {
  return lp_norm(transform_backward(u), INFINITY);
}

double max_l2(const TimeGridSolution& s) {
  double m = 0.0;
  for (const auto& f : s.fields) m = std::max(m, l2_norm(f));
  return m;
}

// Shared per-model state: the mollifier symbol is built once.
class ModelOperator {
 public:
  explicit ModelOperator(const ModelSpec& model) : model_(model), rate_(model.decay_rate()) {
    if (model.kind == ModelKind::Mollified && model.kappa > 0.0)
      mollifier_ = mollifier_symbol(model.grid, model.kappa);
    if (model.forcing.kind != ForcingSpec::Kind::None)
      forcing_shape_ = projected_forcing_shape();
  }

  const std::vector<double>& rate() const { return rate_; }

  SpectralVectorField nonlinear(const SpectralVectorField& u, const SpectralVectorField& v) const {
    if (!model_.nonlinear) {
      SpectralVectorField z(model_.grid);
      z.is_solenoidal = true;
      return z;
    }
    if (mollifier_) return mollified_nonlinear_term(u, v, *mollifier_);
    return nonlinear_term(u, v);
  }

  /// -N(u) + P F(t): right-hand side without the linear part.
  SpectralVectorField rhs(const SpectralVectorField& u, double t) const {
    SpectralVectorField r = nonlinear(u, u);
    r *= -1.0;
    if (forcing_shape_) r.axpy(forcing_amplitude(t), *forcing_shape_);
    return r;
  }

  double forcing_amplitude(double t) const {
    switch (model_.forcing.kind) {
      case ForcingSpec::Kind::None: return 0.0;
      case ForcingSpec::Kind::SteadySurrogateDelta: return 1.0;
      case ForcingSpec::Kind::DivergenceForm: return model_.forcing.profile(t);
    }
    return 0.0;
  }

  const std::optional<SpectralVectorField>& forcing_shape() const { return forcing_shape_; }

 private:
  SpectralVectorField projected_forcing_shape() const {
    const Grid3& g = model_.grid;
    const ForcingSpec& f = model_.forcing;
    SpectralVectorField shape(g);
    if (f.kind == ForcingSpec::Kind::DivergenceForm) {
      require_same_grid(f.V0.grid, g, "projected_forcing");
      shape = tensor_field_divergence(f.V0);
    } else {
      const double s = 0.5 * f.sigma * f.sigma;
      const double inv_vol = 1.0 / g.box_volume();
      for_each_mode(g, [&](std::size_t idx, int kx, int ky, int kz) {
        const double w = std::exp(-s * wavenumber_sq(g, kx, ky, kz)) * inv_vol;
        for (int j = 0; j < 3; ++j) shape.coeffs[j][idx] = cplx{f.b[j] * w, 0.0};
      });
    }
    for (auto& c : shape.coeffs) c[0] = cplx{};
    return leray_project(shape);
  }

  const ModelSpec& model_;
  std::vector<double> rate_;
  std::optional<MollifierSpec> mollifier_;
  std::optional<SpectralVectorField> forcing_shape_;
};

// acc <- E acc + W_L left + W_R right, per mode, for the interval of length h.
void product_integration_step(const std::vector<double>& rate, double h,
                              SpectralVectorField& acc, const SpectralVectorField& left,
                              double left_scale, const SpectralVectorField& right,
                              double right_scale) {
  for (std::size_t s = 0; s < rate.size(); ++s) {
    const Phi ph = phi_functions(-rate[s] * h);
    const double wl = h * (ph.phi1 - ph.phi2) * left_scale;
    const double wr = h * ph.phi2 * right_scale;
    for (int j = 0; j < 3; ++j)
      acc.coeffs[j][s] = ph.e * acc.coeffs[j][s] + wl * left.coeffs[j][s] + wr * right.coeffs[j][s];
  }
}

void require_finite(const SpectralVectorField& f, const char* where) {
  for (const auto& c : f.coeffs)
    for (const auto& x : c)
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
        throw ConvergenceError(std::string(where) + ": quadrature produced non-finite values", NAN);
}

}  // namespace

DuhamelAccumulator::DuhamelAccumulator(const Grid3& g, std::vector<double> rate)
    : rate_(std::move(rate)), acc_(g), last_(g) {
  if (rate_.size() != g.spectral_size())
    throw InvalidArgument("DuhamelAccumulator: rate does not match the grid");
}

void DuhamelAccumulator::push(double t, const SpectralVectorField& integrand) {
  require_same_grid(acc_.grid, integrand.grid, "DuhamelAccumulator::push");
  if (started_) {
    if (!(t > t_)) throw InvalidArgument("DuhamelAccumulator::push: times must increase");
    product_integration_step(rate_, t - t_, acc_, last_, 1.0, integrand, 1.0);
    require_finite(acc_, "DuhamelAccumulator");
  }
  acc_.is_solenoidal = (started_ ? acc_.is_solenoidal : true) && integrand.is_solenoidal;
  last_ = integrand;
  t_ = t;
  started_ = true;
}

SpectralVectorField tensor_field_divergence(const TensorField& V) {
  const Grid3& g = V.grid;
  SpectralVectorField out(g);
  for_each_mode(g, [&](std::size_t s, int kx, int ky, int kz) {
    const double xi[3] = {g.derivative_wavenumber(kx), g.derivative_wavenumber(ky),
                          g.derivative_wavenumber(kz)};
    for (int k = 0; k < 3; ++k) {
      cplx acc{};
      for (int j = 0; j < 3; ++j) acc += xi[j] * V.coeffs[3 * j + k][s];
      out.coeffs[k][s] = cplx{0.0, 1.0} * acc;
    }
  });
  return out;
}

ForcingSpec ForcingSpec::divergence_form(TensorField V0, std::function<double(double)> profile) {
  if (!profile) throw InvalidArgument("ForcingSpec::divergence_form: missing time profile");
  ForcingSpec f;
  f.kind = Kind::DivergenceForm;
  f.V0 = std::move(V0);
  f.profile = std::move(profile);
  return f;
}

ForcingSpec ForcingSpec::steady_delta(const Vec3& b, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("ForcingSpec::steady_delta: sigma must be positive");
  ForcingSpec f;
  f.kind = Kind::SteadySurrogateDelta;
  f.b = b;
  f.sigma = sigma;
  return f;
}

std::string ForcingSpec::name() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::DivergenceForm: return "divergence_form";
    case Kind::SteadySurrogateDelta: return "steady_surrogate_delta";
  }
  return "?";
}

ModelSpec ModelSpec::navier_stokes(const Grid3& g, ForcingSpec f) {
  ModelSpec m;
  m.kind = ModelKind::NavierStokes;
  m.grid = g;
  m.forcing = std::move(f);
  return m;
}

ModelSpec ModelSpec::mollified(const Grid3& g, double kappa, ForcingSpec f) {
  if (!(kappa >= 0.0)) throw InvalidArgument("ModelSpec::mollified: kappa must be nonnegative");
  ModelSpec m = navier_stokes(g, std::move(f));
  m.kind = ModelKind::Mollified;
  m.kappa = kappa;
  return m;
}

ModelSpec ModelSpec::hyperviscous(const Grid3& g, double ell, ForcingSpec f) {
  if (!(ell >= 2.0)) throw InvalidArgument("ModelSpec::hyperviscous: ell must be >= 2");
  ModelSpec m = navier_stokes(g, std::move(f));
  m.kind = ModelKind::Hyperviscous;
  m.ell = ell;
  return m;
}

std::string ModelSpec::name() const {
  std::ostringstream os;
  switch (kind) {
    case ModelKind::NavierStokes: os << "NS"; break;
    case ModelKind::Mollified: os << "Mollified(kappa=" << kappa << ")"; break;
    case ModelKind::Hyperviscous: os << "Hyperviscous(ell=" << ell << ")"; break;
  }
  return os.str();
}

std::vector<double> ModelSpec::decay_rate() const {
  return nslab::decay_rate(grid, kind == ModelKind::Hyperviscous ? ell : 0.0);
}

SpectralVectorField projected_forcing(const ModelSpec& model, double t) {
  ModelOperator op(model);
  SpectralVectorField out(model.grid);
  out.is_solenoidal = true;
  if (op.forcing_shape()) out.axpy(op.forcing_amplitude(t), *op.forcing_shape());
  return out;
}

SpectralVectorField model_nonlinear_term(const ModelSpec& model, const SpectralVectorField& u,
                                         const SpectralVectorField& v) {
  require_grid_match(model, u.grid, "model_nonlinear_term");
  return ModelOperator(model).nonlinear(u, v);
}

TimeGridSolution duhamel_bilinear(const TimeGridSolution& u, const TimeGridSolution& v,
                                  const ModelSpec& model) {
  if (u.times != v.times) throw InvalidArgument("duhamel_bilinear: time grid mismatch");
  require_time_nodes(u.times, "duhamel_bilinear");
  require_grid_match(model, u.fields.front().grid, "duhamel_bilinear");
  const ModelOperator op(model);
  TimeGridSolution out;
  out.times = u.times;
  out.fields.reserve(u.size());
  DuhamelAccumulator acc(model.grid, op.rate());
  for (std::size_t m = 0; m < u.size(); ++m) {
    acc.push(u.times[m], op.nonlinear(u.fields[m], v.fields[m]));
    out.fields.push_back(-1.0 * acc.value());
    out.fields.back().is_solenoidal = true;
  }
  return out;
}

TimeGridSolution linear_forced_term(const SpectralVectorField& u0, const ModelSpec& model,
                                    const TimeGrid& grid) {
  require_grid_match(model, u0.grid, "linear_forced_term");
  require_time_nodes(grid.t, "linear_forced_term");
  const ModelOperator op(model);
  const auto& rate = op.rate();
  const std::size_t M = grid.size();

  TimeGridSolution y;
  y.times = grid.t;
  y.fields.reserve(M);
  for (std::size_t m = 0; m < M; ++m) {
    const double t = grid.t[m];
    SpectralVectorField f = u0;
    for (std::size_t s = 0; s < rate.size(); ++s) {
      const double e = std::exp(-t * rate[s]);
      for (int j = 0; j < 3; ++j) f.coeffs[j][s] *= e;
    }
    y.fields.push_back(std::move(f));
  }

  const auto& shape = op.forcing_shape();
  if (!shape) return y;

  if (model.forcing.kind == ForcingSpec::Kind::SteadySurrogateDelta) {
    // int_0^t e^{-(t-s) lambda} ds = (1 - e^{-t lambda}) / lambda, exact.
    for (std::size_t m = 0; m < M; ++m) {
      const double t = grid.t[m];
      for (std::size_t s = 1; s < rate.size(); ++s) {
        const double w = -std::expm1(-t * rate[s]) / rate[s];
        for (int j = 0; j < 3; ++j) y.fields[m].coeffs[j][s] += w * shape->coeffs[j][s];
      }
    }
    return y;
  }

  SpectralVectorField acc(model.grid);
  for (std::size_t m = 0; m + 1 < M; ++m) {
    const double h = grid.step(m);
    product_integration_step(rate, h, acc, *shape, op.forcing_amplitude(grid.t[m]), *shape,
                             op.forcing_amplitude(grid.t[m + 1]));
    y.fields[m + 1] += acc;
  }
  for (auto& f : y.fields) f.is_solenoidal = u0.is_solenoidal;
  return y;
}

TimeGridSolution picard_solve(const TimeGridSolution& y, const ModelSpec& model,
                              const PicardOptions& opts) {
  require_time_nodes(y.times, "picard_solve");
  const double scale = max_l2(y);
  TimeGridSolution u = y;
  int growth_run = 0;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    const TimeGridSolution B = duhamel_bilinear(u, u, model);
    double res = 0.0;
    TimeGridSolution next;
    next.times = y.times;
    next.fields.reserve(y.size());
    for (std::size_t m = 0; m < y.size(); ++m) {
      next.fields.push_back(y.fields[m] + B.fields[m]);
      res = std::max(res, l2_norm(next.fields[m] - u.fields[m]));
    }
    if (scale > 0.0) res /= scale;
    auto& hist = u.history;
    next.history = hist;
    next.history.residuals.push_back(res);
    next.history.sweeps = sweep;
    const auto& r = next.history.residuals;
    if (r.size() >= 2 && r[r.size() - 2] > 0.0)
      next.history.contraction_ratio = r.back() / r[r.size() - 2];
    u = std::move(next);
    if (res <= opts.tol) return u;
    growth_run = (r.size() >= 2 && r.back() > r[r.size() - 2]) ? growth_run + 1 : 0;
    if (growth_run >= 3)
      throw ConvergenceError("picard_solve: residual increased over 3 sweeps (data too large)", res);
  }
  throw ConvergenceError("picard_solve: max_sweeps exceeded (data too large?)",
                         u.history.residuals.empty() ? NAN : u.history.residuals.back());
}

TimeGridSolution etd_march(const SpectralVectorField& u0, const ModelSpec& model,
                           const TimeGrid& grid, const EtdOptions& opts) {
  require_grid_match(model, u0.grid, "etd_march");
  require_time_nodes(grid.t, "etd_march");
  if (max_divergence_ratio(u0) > 1e-8)
    throw InvalidArgument("etd_march: initial data is not solenoidal");
  const ModelOperator op(model);
  const auto& rate = op.rate();

  std::vector<bool> keep(grid.size(), opts.store.empty());
  for (std::size_t i : opts.store) {
    if (i >= grid.size()) throw InvalidArgument("etd_march: store index out of range");
    keep[i] = true;
  }

  TimeGridSolution out;
  SpectralVectorField u = u0;
  u.is_solenoidal = true;
  if (opts.observer) opts.observer(0, grid.t[0], u);
  if (keep[0]) {
    out.times.push_back(grid.t[0]);
    out.fields.push_back(u);
  }
  const double ref = sup_norm(u0);

  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double h = grid.step(n);
    const SpectralVectorField Nn = op.rhs(u, grid.t[n]);
    SpectralVectorField a = u;
    for (std::size_t s = 0; s < rate.size(); ++s) {
      const Phi ph = phi_functions(-rate[s] * h);
      for (int j = 0; j < 3; ++j) a.coeffs[j][s] = ph.e * u.coeffs[j][s] + h * ph.phi1 * Nn.coeffs[j][s];
    }
    const SpectralVectorField Na = op.rhs(a, grid.t[n + 1]);
    for (std::size_t s = 0; s < rate.size(); ++s) {
      const Phi ph = phi_functions(-rate[s] * h);
      for (int j = 0; j < 3; ++j)
        a.coeffs[j][s] += h * ph.phi2 * (Na.coeffs[j][s] - Nn.coeffs[j][s]);
    }
    u = std::move(a);
    u.is_solenoidal = true;
    if (ref > 0.0) {
      const double sup = sup_norm(u);
      if (!(sup <= opts.blowup_factor * ref))
        throw ConvergenceError("etd_march: blow-up guard tripped at t=" + std::to_string(grid.t[n + 1]) +
                                   " (||u||_inf grew past " + std::to_string(opts.blowup_factor) +
                                   "x its initial value)",
                               sup / ref);
    }
    if (opts.observer) opts.observer(n + 1, grid.t[n + 1], u);
    if (keep[n + 1]) {
      out.times.push_back(grid.t[n + 1]);
      out.fields.push_back(u);
    }
  }
  out.history.steps = int(grid.size()) - 1;
  return out;
}

TimeGridSolution solve(const ModelSpec& model, const SpectralVectorField& u0, const TimeGrid& grid,
                       const SolveOptions& opts) {
  if (opts.method == SolveMethod::ETD) return etd_march(u0, model, grid, opts.etd);
  if (max_divergence_ratio(u0) > 1e-8) throw InvalidArgument("solve: initial data is not solenoidal");
  return picard_solve(linear_forced_term(u0, model, grid), model, opts.picard);
}

}  // namespace nslab
