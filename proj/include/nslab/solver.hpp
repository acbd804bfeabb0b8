#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "nslab/field.hpp"
#include "nslab/trajectory.hpp"

namespace nslab {

/// Spectral coefficients of a 3x3 tensor field, component (j,k) at 3*j + k.
struct TensorField {
  Grid3 grid;
  std::array<std::vector<cplx>, 9> coeffs;

  TensorField() = default;
  explicit TensorField(const Grid3& g) : grid(g) {
    for (auto& c : coeffs) c.assign(g.spectral_size(), cplx{});
  }
};

/// (div V)_k = sum_j d_j V_jk
SpectralVectorField tensor_field_divergence(const TensorField& V);

struct ForcingSpec {
  enum class Kind { None, DivergenceForm, SteadySurrogateDelta };
  Kind kind = Kind::None;

  // DivergenceForm: F(x, t) = profile(t) * div V0(x). The spatial tensor is
  // fixed and the time dependence is a scalar envelope sampled by the
  // solvers at the nodes of their time grid.
  TensorField V0;
  std::function<double(double)> profile;

  // SteadySurrogateDelta: F(x) = b p(x, sigma^2/2), a Gaussian stand-in for
  // b delta_0 whose mean times the box volume equals b.
  Vec3 b{0.0, 0.0, 0.0};
  double sigma = 0.0;

  static ForcingSpec none() { return {}; }
  static ForcingSpec divergence_form(TensorField V0, std::function<double(double)> profile);
  static ForcingSpec steady_delta(const Vec3& b, double sigma);
  std::string name() const;
};

enum class ModelKind { NavierStokes, Mollified, Hyperviscous };

struct ModelSpec {
  ModelKind kind = ModelKind::NavierStokes;
  double kappa = 0.0;  ///< mollifier width (Mollified)
  double ell = 0.0;    ///< dissipation order (Hyperviscous)
  ForcingSpec forcing;
  Grid3 grid;
  /// Set false to drop B entirely (linear runs and reduction checks).
  bool nonlinear = true;

  static ModelSpec navier_stokes(const Grid3& g, ForcingSpec f = {});
  static ModelSpec mollified(const Grid3& g, double kappa, ForcingSpec f = {});
  /// ell >= 2; ell = 2 is accepted as a control run.
  static ModelSpec hyperviscous(const Grid3& g, double ell, ForcingSpec f = {});

  std::string name() const;
  /// Decay rate of the propagator per spectral slot.
  std::vector<double> decay_rate() const;
};

/// P F(t) for the model's forcing, mean removed.
SpectralVectorField projected_forcing(const ModelSpec& model, double t);

/// The model's nonlinear integrand P div(u~ (x) v), u~ = u * omega_kappa for
/// the mollified model. Zero when `model.nonlinear` is false.
SpectralVectorField model_nonlinear_term(const ModelSpec& model, const SpectralVectorField& u,
                                         const SpectralVectorField& v);

/// B(u, v)(t_m) = -int_0^{t_m} Prop(t_m - s) P div(u~ (x) v)(s) ds by
/// product integration: the propagator is exact, the integrand is linear
/// between nodes. `u` and `v` must be stored at every node of one time grid.
TimeGridSolution duhamel_bilinear(const TimeGridSolution& u, const TimeGridSolution& v,
                                  const ModelSpec& model);

/// y(t_m) = Prop(t_m) u0 + int_0^{t_m} Prop(t_m - s) P F(s) ds.
TimeGridSolution linear_forced_term(const SpectralVectorField& u0, const ModelSpec& model,
                                    const TimeGrid& grid);

/// Running product-integration value of int_0^t e^{-(t-s) lambda} N(s) ds,
/// with N linear between the pushed nodes.
class DuhamelAccumulator {
 public:
  DuhamelAccumulator(const Grid3& g, std::vector<double> rate);
  /// Appends the integrand at time t (strictly after the previous push).
  void push(double t, const SpectralVectorField& integrand);
  const SpectralVectorField& value() const { return acc_; }
  double time() const { return t_; }

 private:
  std::vector<double> rate_;
  SpectralVectorField acc_, last_;
  double t_ = 0.0;
  bool started_ = false;
};

struct PicardOptions {
  double tol = 1e-9;  ///< on max_m ||u^{k+1} - u^k||_2 relative to max_m ||y||_2
  int max_sweeps = 60;
};

/// Fixed point u = y + B(u, u) by whole-trajectory (Jacobi) sweeps. Throws
/// ConvergenceError when max_sweeps is exceeded or the residual grows over
/// three consecutive sweeps.
TimeGridSolution picard_solve(const TimeGridSolution& y, const ModelSpec& model,
                              const PicardOptions& opts = {});

struct EtdOptions {
  /// Node indices to keep; empty keeps every node.
  std::vector<std::size_t> store;
  /// Abort once ||u||_inf exceeds this multiple of ||u0||_inf.
  double blowup_factor = 10.0;
  /// Called with (node index, time, field) at every node, stored or not.
  std::function<void(std::size_t, double, const SpectralVectorField&)> observer;
};

/// Second-order exponential time differencing (ETD2RK) on the nodes of `grid`.
TimeGridSolution etd_march(const SpectralVectorField& u0, const ModelSpec& model,
                           const TimeGrid& grid, const EtdOptions& opts = {});

enum class SolveMethod { Picard, ETD };

struct SolveOptions {
  SolveMethod method = SolveMethod::ETD;
  PicardOptions picard;
  EtdOptions etd;
};

TimeGridSolution solve(const ModelSpec& model, const SpectralVectorField& u0,
                       const TimeGrid& grid, const SolveOptions& opts = {});

}  // namespace nslab
