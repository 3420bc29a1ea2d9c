#include "fiohardy/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

namespace fiohardy {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// Plans are created once per (dim, points_per_axis) with FFTW_ESTIMATE so that
// results are bit-reproducible across runs (FFTW_MEASURE picks timing-dependent
// algorithms). FFTW_UNALIGNED lets the plans execute on arbitrary buffers.
PlanPair& plans_for(const GridSpec& g) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(g.dim, g.points_per_axis);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const std::size_t n = g.size();
  std::vector<cplx> a(n), b(n);
  int dims[3] = {g.points_per_axis, g.points_per_axis, g.points_per_axis};
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft(g.dim, dims, reinterpret_cast<fftw_complex*>(a.data()),
                            reinterpret_cast<fftw_complex*>(b.data()),
                            FFTW_FORWARD, flags);
  p.backward = fftw_plan_dft(g.dim, dims, reinterpret_cast<fftw_complex*>(a.data()),
                             reinterpret_cast<fftw_complex*>(b.data()),
                             FFTW_BACKWARD, flags);
  if (p.forward == nullptr || p.backward == nullptr)
    throw StructuralError("fft: plan creation failed");
  return cache.emplace(key, p).first->second;
}

// Parity of the summed per-axis storage indices; the sample points are centered
// at -extent/2, which shows up as this alternating sign on the frequency side.
inline int index_parity(const GridSpec& g, std::size_t flat) {
  int parity = 0;
  const int m = g.points_per_axis;
  for (int d = 0; d < g.dim; ++d) {
    parity += static_cast<int>(flat % m);
    flat /= m;
  }
  return parity & 1;
}

std::vector<cplx>& scratch_buffer(std::size_t n) {
  thread_local std::vector<cplx> buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

}  // namespace

void dft_forward(const GridSpec& grid, const cplx* in, cplx* out) {
  PlanPair& p = plans_for(grid);
  fftw_execute_dft(p.forward,
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
  const double scale = grid.cell_measure();
  const std::size_t n = grid.size();
  for (std::size_t k = 0; k < n; ++k)
    out[k] *= index_parity(grid, k) ? -scale : scale;
}

void dft_backward(const GridSpec& grid, const cplx* in, cplx* out) {
  const std::size_t n = grid.size();
  std::vector<cplx>& tmp = scratch_buffer(n);
  for (std::size_t k = 0; k < n; ++k)
    tmp[k] = index_parity(grid, k) ? -in[k] : in[k];
  PlanPair& p = plans_for(grid);
  fftw_execute_dft(p.backward, reinterpret_cast<fftw_complex*>(tmp.data()),
                   reinterpret_cast<fftw_complex*>(out));
  double scale = 1.0;
  for (int d = 0; d < grid.dim; ++d) scale /= grid.extent;
  for (std::size_t j = 0; j < n; ++j) out[j] *= scale;
}

void dft_raw_forward(const GridSpec& grid, const cplx* in, cplx* out) {
  PlanPair& p = plans_for(grid);
  fftw_execute_dft(p.forward,
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void dft_raw_backward(const GridSpec& grid, const cplx* in, cplx* out) {
  PlanPair& p = plans_for(grid);
  fftw_execute_dft(p.backward,
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

SpectralField to_spectrum(const SampledField& f) {
  f.validate();
  SpectralField F;
  F.grid = f.grid;
  F.coefficients.resize(f.grid.size());
  dft_forward(f.grid, f.values.data(), F.coefficients.data());
  return F;
}

SampledField to_field(const SpectralField& F) {
  F.validate();
  SampledField f;
  f.grid = F.grid;
  f.values.resize(F.grid.size());
  dft_backward(F.grid, F.coefficients.data(), f.values.data());
  return f;
}

double spectral_l2_norm(const SpectralField& F) {
  double s = 0.0;
  for (const cplx& c : F.coefficients) s += std::norm(c);
  double scale = 1.0;
  for (int d = 0; d < F.grid.dim; ++d) scale /= F.grid.extent;
  return std::sqrt(s * scale);
}

}  // namespace fiohardy
