#include "fiohardy/transform.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fiohardy/csv.hpp"
#include "fiohardy/errors.hpp"
#include "fiohardy/fft.hpp"

namespace fiohardy {

namespace {

// Relative floor for spectral products: a slice whose products all sit below
// this fraction of (peak spectrum) * (peak symbol) is forward-FFT round-off
// of data with no mass in that packet's window, and is dropped wholesale.
constexpr double kSpectralFloor = 1e-13;

double bump_exp(double v) { return v > 0.0 ? std::exp(-1.0 / v) : 0.0; }

}  // namespace

TransformPlan::TransformPlan(ProfilePair profiles, GridSpec grid,
                             SphereGrid sphere, SigmaGrid sigmas)
    : profiles_(std::move(profiles)),
      grid_(grid),
      sphere_(std::move(sphere)),
      sigmas_(std::move(sigmas)) {
  validate();

  const int dim = grid_.dim;
  const std::size_t n = grid_.size();
  const int packets = sigmas_.packet_count;
  spectra_.assign(static_cast<std::size_t>(sphere_.count()) * packets, {});

  SpectralField probe;
  probe.grid = grid_;

  // Per-level annulus pass, then the angular factor per direction on the
  // annulus only; value arithmetic mirrors the packet symbol evaluator.
  std::vector<std::uint32_t> ann_idx;
  std::vector<double> ann_rad;
  std::vector<Vec3> ann_hat;
  for (int level = 0; level < packets; ++level) {
    const double sigma = sigmas_.levels[level];
    const double inv_root_sigma = 1.0 / std::sqrt(sigma);
    const double c_sigma = profiles_.direction_normalization(dim, sigma);
    ann_idx.clear();
    ann_rad.clear();
    ann_hat.clear();
    for (std::size_t k = 0; k < n; ++k) {
      const Vec3 zeta = probe.frequency(k);
      const double r = norm(zeta, dim);
      if (r == 0.0) continue;
      const double t = sigma * r;
      if (t <= 0.5 || t >= 2.0) continue;
      const double rad = profiles_.radial(t);
      if (rad == 0.0) continue;
      ann_idx.push_back(static_cast<std::uint32_t>(k));
      ann_rad.push_back(rad);
      Vec3 hat{0.0, 0.0, 0.0};
      for (int d = 0; d < dim; ++d) hat[d] = zeta[d] / r;
      ann_hat.push_back(hat);
    }
    for (int dir = 0; dir < sphere_.count(); ++dir) {
      const Vec3& omega = sphere_.dirs[dir];
      SliceSpectrum& out = spectra_[static_cast<std::size_t>(dir) * packets + level];
      for (std::size_t m = 0; m < ann_idx.size(); ++m) {
        double chord2 = 0.0;
        for (int d = 0; d < dim; ++d) {
          const double diff = ann_hat[m][d] - omega[d];
          chord2 += diff * diff;
        }
        const double angular = profiles_.step(std::sqrt(chord2) * inv_root_sigma);
        if (angular == 0.0) continue;
        out.idx.push_back(ann_idx[m]);
        out.val.push_back(c_sigma * angular * ann_rad[m]);
      }
    }
  }

  const double inv_root_measure = 1.0 / std::sqrt(sphere_measure(dim));
  for (std::size_t k = 0; k < n; ++k) {
    const double c = profiles_.cap(norm(probe.frequency(k), dim));
    if (c == 0.0) continue;
    cap_.idx.push_back(static_cast<std::uint32_t>(k));
    cap_.val.push_back(c * inv_root_measure);
  }
}

const TransformPlan::SliceSpectrum& TransformPlan::packet_spectrum(int dir,
                                                                   int level) const {
  const int packets = sigmas_.packet_count;
  if (dir < 0 || dir >= sphere_.count() || level < 0 || level >= packets)
    throw StructuralError("plan: packet index out of range");
  return spectra_[static_cast<std::size_t>(dir) * packets + level];
}

void TransformPlan::validate() const {
  grid_.validate();
  sphere_.validate();
  sigmas_.validate();
  if (sphere_.dim != grid_.dim)
    throw StructuralError("plan: sphere dimension does not match the grid");
  const double nyq = grid_.nyquist();
  for (int j = 0; j < sigmas_.packet_count; ++j) {
    const double top = 2.0 / sigmas_.levels[j];
    if (!(top < nyq))
      throw ConfigError("plan: packet annulus at sigma = " +
                        format_double(sigmas_.levels[j]) +
                        " reaches frequency " + format_double(top) +
                        ", outside the Nyquist ball of radius " +
                        format_double(nyq));
  }
}

PhaseSpaceField analyze(const TransformPlan& plan, const SampledField& f) {
  f.validate();
  if (!(f.grid == plan.grid()))
    throw StructuralError("analyze: field grid does not match the plan");

  const GridSpec& grid = plan.grid();
  const std::size_t n = grid.size();
  const int dirs = plan.sphere().count();
  const int packets = plan.sigmas().packet_count;
  const int cap_level = plan.sigmas().cap_index();

  PhaseSpaceField out(plan.phase_geometry());

  std::vector<cplx> fhat(n);
  dft_forward(grid, f.values.data(), fhat.data());
  double fmax = 0.0;
  for (const cplx& c : fhat) fmax = std::max(fmax, std::abs(c));
  if (fmax == 0.0) return out;

  std::vector<cplx> spec(n), prod;
  for (int dir = 0; dir < dirs; ++dir) {
    for (int level = 0; level < packets; ++level) {
      const TransformPlan::SliceSpectrum& ss = plan.packet_spectrum(dir, level);
      if (ss.idx.empty()) continue;
      prod.resize(ss.idx.size());
      double pmax = 0.0;
      double vmax = 0.0;
      for (std::size_t m = 0; m < ss.idx.size(); ++m) {
        prod[m] = fhat[ss.idx[m]] * ss.val[m];
        pmax = std::max(pmax, std::abs(prod[m]));
        vmax = std::max(vmax, std::fabs(ss.val[m]));
      }
      if (pmax <= kSpectralFloor * fmax * vmax) continue;
      std::fill(spec.begin(), spec.end(), cplx(0.0, 0.0));
      for (std::size_t m = 0; m < ss.idx.size(); ++m) spec[ss.idx[m]] = prod[m];
      dft_backward(grid, spec.data(), out.slice_mut(dir, level).data());
    }
  }

  const TransformPlan::SliceSpectrum& cs = plan.cap_spectrum();
  if (!cs.idx.empty()) {
    prod.resize(cs.idx.size());
    double pmax = 0.0;
    double vmax = 0.0;
    for (std::size_t m = 0; m < cs.idx.size(); ++m) {
      prod[m] = fhat[cs.idx[m]] * cs.val[m];
      pmax = std::max(pmax, std::abs(prod[m]));
      vmax = std::max(vmax, std::fabs(cs.val[m]));
    }
    if (pmax > kSpectralFloor * fmax * vmax) {
      std::fill(spec.begin(), spec.end(), cplx(0.0, 0.0));
      for (std::size_t m = 0; m < cs.idx.size(); ++m) spec[cs.idx[m]] = prod[m];
      std::vector<cplx> band(n);
      dft_backward(grid, spec.data(), band.data());
      for (int dir = 0; dir < dirs; ++dir) out.slice_mut(dir, cap_level) = band;
    }
  }
  return out;
}

SampledField synthesize(const TransformPlan& plan, const PhaseSpaceField& F) {
  F.validate();
  if (!(F.geometry() == plan.phase_geometry()))
    throw StructuralError("synthesize: field geometry does not match the plan");

  const GridSpec& grid = plan.grid();
  const std::size_t n = grid.size();
  const int dirs = plan.sphere().count();
  const int packets = plan.sigmas().packet_count;
  const int cap_level = plan.sigmas().cap_index();

  std::vector<cplx> acc(n, cplx(0.0, 0.0));
  std::vector<cplx> shat(n);
  for (int dir = 0; dir < dirs; ++dir) {
    const double w = plan.sphere().weights[dir];
    for (int level = 0; level <= packets; ++level) {
      const std::vector<cplx>* s = F.slice(dir, level);
      if (!s) continue;
      const TransformPlan::SliceSpectrum& ss =
          level == cap_level ? plan.cap_spectrum() : plan.packet_spectrum(dir, level);
      if (ss.idx.empty()) continue;
      dft_forward(grid, s->data(), shat.data());
      const double scale = plan.sigmas().weights[level] * w;
      for (std::size_t m = 0; m < ss.idx.size(); ++m)
        acc[ss.idx[m]] += scale * ss.val[m] * shat[ss.idx[m]];
    }
  }

  SampledField out;
  out.grid = grid;
  out.values.resize(n);
  dft_backward(grid, acc.data(), out.values.data());
  return out;
}

Multiplier lowfreq_cap(int dim) {
  if (dim != 2 && dim != 3) throw ConfigError("lowfreq cap requires dim 2 or 3");
  return [dim](const Vec3& zeta) {
    const double r = norm(zeta, dim);
    const double u = 0.5 * (4.0 - r);
    if (u >= 1.0) return cplx(1.0, 0.0);
    if (u <= 0.0) return cplx(0.0, 0.0);
    const double a = bump_exp(u);
    return cplx(a / (a + bump_exp(1.0 - u)), 0.0);
  };
}

void HardyNormReport::validate() const {
  if (std::isnan(p) || p < 1.0)
    throw NumericError("hardy report: exponent must lie in [1, inf]");
  for (double v : {value, alt_value, lowfreq})
    if (!std::isfinite(v) || v < 0.0)
      throw NumericError("hardy report: norms must be finite and nonnegative");
}

HardyNormReport hardy_norm(const TransformPlan& plan, const SampledField& f,
                           double p) {
  if (std::isnan(p) || p < 1.0)
    throw DomainError("hardy norm: p must lie in [1, inf]");

  HardyNormReport report;
  report.p = p;

  PhaseSpaceField F = analyze(plan, f);
  report.value = tent_norm(F, p);

  const SampledField qf = apply_multiplier(lowfreq_cap(plan.grid().dim), f);
  report.lowfreq = lp_norm(qf, p);

  const int cap_level = plan.sigmas().cap_index();
  for (int dir = 0; dir < plan.sphere().count(); ++dir) F.drop_slice(dir, cap_level);
  report.alt_value = tent_norm(F, p) + report.lowfreq;

  report.validate();
  return report;
}

double norm_independence(const SampledField& f, const TransformPlan& plan_a,
                         const TransformPlan& plan_b, double p) {
  if (!(plan_a.phase_geometry() == plan_b.phase_geometry()))
    throw StructuralError("norm independence: plans must share grids");
  const double na = hardy_norm(plan_a, f, p).value;
  const double nb = hardy_norm(plan_b, f, p).value;
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (nb == 0.0)
    throw DomainError("norm independence: zero norm under the second plan");
  return na / nb;
}

LowFreqReport lowfreq_equivalence(const TransformPlan& plan, const SampledField& f,
                                  const Multiplier& q, double p) {
  if (std::isnan(p) || p < 1.0)
    throw DomainError("lowfreq equivalence: p must lie in [1, inf]");
  f.validate();
  if (!(f.grid == plan.grid()))
    throw StructuralError("lowfreq equivalence: field grid does not match the plan");

  const GridSpec& grid = plan.grid();
  const std::size_t n = grid.size();

  std::vector<cplx> fhat(n);
  dft_forward(grid, f.values.data(), fhat.data());
  double fmax = 0.0;
  for (const cplx& c : fhat) fmax = std::max(fmax, std::abs(c));

  SpectralField probe;
  probe.grid = grid;
  std::vector<cplx> prod(n);
  double pmax = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx qv = q(probe.frequency(k));
    if (!std::isfinite(qv.real()) || !std::isfinite(qv.imag()))
      throw NumericError("lowfreq equivalence: multiplier is not finite on the lattice");
    prod[k] = qv * fhat[k];
    pmax = std::max(pmax, std::abs(prod[k]));
  }

  LowFreqReport report;
  if (fmax == 0.0 || pmax <= kSpectralFloor * fmax) return report;

  SampledField qf;
  qf.grid = grid;
  qf.values.resize(n);
  dft_backward(grid, prod.data(), qf.values.data());
  report.l1_side = lp_norm(qf, p);

  PhaseSpaceField lift(plan.phase_geometry());
  const int cap_level = plan.sigmas().cap_index();
  for (int dir = 0; dir < plan.sphere().count(); ++dir)
    lift.slice_mut(dir, cap_level) = qf.values;
  report.tent_side = tent_norm(lift, p);
  report.ratio = report.tent_side / report.l1_side;
  return report;
}

}  // namespace fiohardy
