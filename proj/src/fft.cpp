#include "nslab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "nslab/error.hpp"

namespace nslab {
namespace {

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// fftw planning is not thread safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const std::size_t nr = std::size_t(n) * n * n;
  const std::size_t nc = std::size_t(n) * n * (n / 2 + 1);
  std::vector<double> real(nr);
  std::vector<cplx> spec(nc);
  auto* cptr = reinterpret_cast<fftw_complex*>(spec.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.r2c = fftw_plan_dft_r2c_3d(n, n, n, real.data(), cptr, flags);
  p.c2r = fftw_plan_dft_c2r_3d(n, n, n, cptr, real.data(), flags);
  if (!p.r2c || !p.c2r) throw Error("fftw planning failed");
  return cache.emplace(n, p).first->second;
}

void forward_into(const Grid3& g, const std::vector<double>& in, std::vector<cplx>& out) {
  if (in.size() != g.physical_size())
    throw InvalidArgument("transform_forward: sample array does not match grid");
  const PlanPair& p = plans_for(g.n);
  out.assign(g.spectral_size(), cplx{});
  // r2c preserves its input.
  fftw_execute_dft_r2c(p.r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / double(g.physical_size());
  for (auto& c : out) c *= scale;
}

void backward_into(const Grid3& g, const std::vector<cplx>& in, std::vector<double>& out) {
  if (in.size() != g.spectral_size())
    throw InvalidArgument("transform_backward: coefficient array does not match grid");
  const PlanPair& p = plans_for(g.n);
  std::vector<cplx> work(in);  // c2r destroys its input
  out.assign(g.physical_size(), 0.0);
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(work.data()), out.data());
}

}  // namespace

SpectralScalarField transform_forward(const ScalarField& f) {
  SpectralScalarField out;
  out.grid = f.grid;
  forward_into(f.grid, f.data, out.coeffs);
  return out;
}

ScalarField transform_backward(const SpectralScalarField& f) {
  ScalarField out;
  out.grid = f.grid;
  backward_into(f.grid, f.coeffs, out.data);
  return out;
}

SpectralVectorField transform_forward(const VectorField& f) {
  SpectralVectorField out;
  out.grid = f.grid;
  for (int j = 0; j < 3; ++j) forward_into(f.grid, f.comp[j], out.coeffs[j]);
  return out;
}

VectorField transform_backward(const SpectralVectorField& f) {
  VectorField out;
  out.grid = f.grid;
  for (int j = 0; j < 3; ++j) backward_into(f.grid, f.coeffs[j], out.comp[j]);
  return out;
}

}  // namespace nslab
