#include "fiohardy/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fiohardy/csv.hpp"
#include "fiohardy/errors.hpp"
#include "fiohardy/fft.hpp"
#include "fiohardy/packets.hpp"
#include "fiohardy/profiles.hpp"
#include "fiohardy/rng.hpp"
#include "fiohardy/tent.hpp"

namespace fiohardy {
namespace {

// Relative spectral floor below which coefficients count as zero in the
// support test.
constexpr double kSupportFloor = 1e-9;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string p_label(double p) {
  return std::isinf(p) ? std::string("inf") : format_double(p);
}

void check_exponent(double p, const char* who) {
  if (std::isnan(p) || p < 1.0)
    throw DomainError(std::string(who) + ": exponent p must be at least one");
}

// Hardy value norms of f for several exponents at once. Matches
// hardy_norm(plan, f, p).value exactly (same square-function path) but runs
// the analysis and the Lusin pass once instead of once per exponent.
std::vector<double> lift_norms(const TransformPlan& plan, const SampledField& f,
                               const std::vector<double>& ps) {
  const PhaseSpaceField F = analyze(plan, f);
  bool need_lusin = false;
  for (double p : ps)
    if (!std::isinf(p)) need_lusin = true;
  DirectionField area;
  if (need_lusin) area = lusin_functional(F);
  std::vector<double> out(ps.size(), 0.0);
  for (std::size_t i = 0; i < ps.size(); ++i)
    out[i] = std::isinf(ps[i]) ? tent_norm(F, kInf) : area.lp_norm(ps[i]);
  return out;
}

// Inverse transform of the packet symbol at direction e1 and scale
// 1/lambda, with the evolution multiplier folded in spectrally. Returns the
// field and its spectrum magnitude profile reused by the caller.
SampledField packet_probe(const GridSpec& g, const ProfilePair& profiles,
                          double lambda, const Multiplier* evolve) {
  PacketIndex idx;
  idx.omega = {1.0, 0.0, 0.0};
  idx.sigma = 1.0 / lambda;
  const PacketSymbol psi(profiles, g.dim, idx);
  SpectralField F;
  F.grid = g;
  F.coefficients.assign(g.size(), cplx(0.0, 0.0));
  bool any = false;
  for (std::size_t k = 0; k < F.coefficients.size(); ++k) {
    const Vec3 z = F.frequency(k);
    const double v = psi(z);
    if (v == 0.0) continue;
    F.coefficients[k] = evolve ? v * (*evolve)(z) : cplx(v, 0.0);
    any = true;
  }
  if (!any)
    throw ResolutionError("packet probe: no lattice frequencies at lambda = " +
                          format_double(lambda));
  return to_field(F);
}

// Annular probe with full angular support: the radial packet factor alone.
SampledField radial_probe(const GridSpec& g, const ProfilePair& profiles,
                          double lambda, const Multiplier* evolve) {
  const double sigma = 1.0 / lambda;
  SpectralField F;
  F.grid = g;
  F.coefficients.assign(g.size(), cplx(0.0, 0.0));
  bool any = false;
  for (std::size_t k = 0; k < F.coefficients.size(); ++k) {
    const Vec3 z = F.frequency(k);
    const double v = profiles.radial(sigma * norm(z, g.dim));
    if (v == 0.0) continue;
    F.coefficients[k] = evolve ? v * (*evolve)(z) : cplx(v, 0.0);
    any = true;
  }
  if (!any)
    throw ResolutionError("radial probe: no lattice frequencies at lambda = " +
                          format_double(lambda));
  return to_field(F);
}

void check_lambdas(const GridSpec& g, const std::vector<double>& lambdas,
                   const char* who) {
  if (lambdas.size() < 4)
    throw ConfigError(std::string(who) + ": need at least four lambdas for the fit");
  for (double lam : lambdas) {
    if (!(lam > 1.0))
      throw ConfigError(std::string(who) + ": lambdas must exceed one");
    if (2.0 * lam > g.nyquist() * (1.0 + 1e-12))
      throw ResolutionError(std::string(who) + ": probe band at lambda = " +
                            format_double(lam) + " leaves the Nyquist ball");
  }
}

// Attaches the power-law fit, withholding the exponent when the fit quality
// is below kFitQuality.
void attach_fit(SweepSeries& s, const std::vector<double>& sweep) {
  const PowerFit fit = fit_power_law(sweep, s.values);
  s.has_fit = true;
  s.r_squared = fit.r_squared;
  if (fit.r_squared >= kFitQuality) {
    s.exponent = fit.exponent;
    s.half_width = fit.half_width;
    s.resolved = true;
  } else {
    s.exponent = 0.0;
    s.half_width = 0.0;
    s.resolved = false;
  }
}

double positive_or_throw(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(what + " must be positive and finite, got " + format_double(v));
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Molecules
// ---------------------------------------------------------------------------

void MoleculeSpec::validate(int dim) const {
  if (dim != 2 && dim != 3)
    throw StructuralError("molecule spec: dim must be 2 or 3");
  if (!std::isfinite(decay_order) || !(decay_order > 0.5 * dim))
    throw ConfigError("molecule spec: decay order must exceed dim/2");
  if (!std::isfinite(scale) || !(scale > 0.0))
    throw ConfigError("molecule spec: scale must be positive");
  if (!std::isfinite(constant) || constant < 0.0)
    throw ConfigError("molecule spec: admissible constant must be nonnegative");
  const double n = norm(center.omega, dim);
  if (std::abs(n - 1.0) > 1e-6)
    throw ConfigError("molecule spec: center direction must be a unit vector");
}

MoleculeReport molecule_check(const SampledField& f, const MoleculeSpec& spec) {
  f.validate();
  const int dim = f.grid.dim;
  spec.validate(dim);
  const double tau = spec.scale;
  const Vec3& nu = spec.center.omega;

  const SpectralField F = to_spectrum(f);
  double peak = 0.0;
  for (const cplx& c : F.coefficients) peak = std::max(peak, std::abs(c));

  MoleculeReport out;
  out.support_pass = true;
  if (peak > 0.0) {
    const double floor = kSupportFloor * peak;
    for (std::size_t k = 0; k < F.coefficients.size(); ++k) {
      if (std::abs(F.coefficients[k]) < floor) continue;
      const Vec3 z = F.frequency(k);
      const double r = norm(z, dim);
      bool inside = r * tau >= 1.0;
      if (inside) {
        double chord2 = 0.0;
        for (int d = 0; d < dim; ++d) {
          const double diff = z[d] / r - nu[d];
          chord2 += diff * diff;
        }
        inside = chord2 <= tau * (1.0 + 1e-12);
      }
      if (!inside) {
        out.support_pass = false;
        break;
      }
    }
  }

  const TorusGeometry torus{dim, f.grid.extent};
  const double two_s = 2.0 * spec.decay_order;
  double sum = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    const double a2 = std::norm(f.values[k]);
    if (a2 == 0.0) continue;
    Vec3 delta = f.position(k);
    for (int d = 0; d < dim; ++d) delta[d] -= spec.center.x[d];
    delta = minimal_image(torus, delta);
    const double along = std::abs(dot(nu, delta, dim));
    const double r2 = norm2(delta, dim);
    const double w = std::pow(1.0 + along / tau, two_s) *
                     std::pow(1.0 + r2 / tau, two_s);
    sum += w * a2;
  }
  out.decay_value = std::pow(tau, dim) * sum * f.grid.cell_measure();
  if (!std::isfinite(out.decay_value))
    throw NumericError("molecule check: decay value is not finite");
  return out;
}

AtomMolecule molecule_from_atom(const TransformPlan& plan, const BallSpec& ball) {
  plan.validate();
  if (!(ball.radius > 0.0) || !(ball.radius <= 2.0))
    throw ConfigError("molecule from atom: ball radius must lie in (0, 2]");

  PhaseSpaceField atom = make_atom(plan.phase_geometry(), ball, AtomShape::kFlat);
  const int band = plan.sigmas().cap_index();
  for (int dir = 0; dir < plan.sphere().count(); ++dir) atom.drop_slice(dir, band);

  AtomMolecule out;
  out.field = synthesize(plan, atom);
  out.spec.decay_order = 1.5;
  out.spec.constant = 0.0;
  out.spec.center = ball.center;
  const double root_tau = (2.0 + 1.0 / kReducedMetricLower) * ball.radius;
  out.spec.scale = root_tau * root_tau;
  out.report = molecule_check(out.field, out.spec);
  return out;
}

// ---------------------------------------------------------------------------
// Fits and reports
// ---------------------------------------------------------------------------

PowerFit fit_power_law(const std::vector<double>& sweep,
                       const std::vector<double>& values) {
  if (sweep.size() != values.size())
    throw StructuralError("power fit: sweep and values have different lengths");
  const std::size_t n = sweep.size();
  if (n < 4) throw ConfigError("power fit: need at least four samples");
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sweep[i] > 0.0) || !std::isfinite(sweep[i]) || !(values[i] > 0.0) ||
        !std::isfinite(values[i]))
      throw DomainError("power fit: samples must be positive and finite");
    xs[i] = std::log(sweep[i]);
    ys[i] = std::log(values[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0))
    throw DomainError("power fit: sweep values must not all coincide");

  PowerFit fit;
  fit.exponent = sxy / sxx;
  const double ss_res = std::max(0.0, syy - fit.exponent * sxy);
  // Variation below rounding scale counts as perfectly flat.
  fit.r_squared = (syy > 1e-24) ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
  const double var = ss_res / static_cast<double>(n - 2);
  fit.half_width = 2.0 * std::sqrt(var / sxx);
  return fit;
}

void ExperimentReport::validate() const {
  if (id.empty()) throw StructuralError("experiment report: empty id");
  if (grid_tag.empty()) throw StructuralError("experiment report: empty grid tag");
  for (double v : sweep)
    if (!std::isfinite(v))
      throw NumericError("experiment report: sweep value is not finite");
  for (const SweepSeries& s : series) {
    if (s.name.empty()) throw StructuralError("experiment report: unnamed series");
    if (s.values.size() != sweep.size())
      throw StructuralError("experiment report: series '" + s.name +
                            "' does not match the sweep length");
    for (double v : s.values)
      if (!std::isfinite(v))
        throw NumericError("experiment report: series '" + s.name +
                           "' has a non-finite value");
    if (s.has_fit && sweep.size() < 4)
      throw StructuralError("experiment report: fitted series '" + s.name +
                            "' needs at least four sweep points");
    if (s.has_fit &&
        (!std::isfinite(s.exponent) || !std::isfinite(s.half_width) ||
         !std::isfinite(s.r_squared)))
      throw NumericError("experiment report: fit of '" + s.name +
                         "' is not finite");
  }
  for (const auto& kv : scalars) {
    if (kv.first.empty())
      throw StructuralError("experiment report: unnamed scalar");
    if (!std::isfinite(kv.second))
      throw NumericError("experiment report: scalar '" + kv.first +
                         "' is not finite");
  }
}

void write_experiment_csv(const std::string& path, const ExperimentReport& report) {
  report.validate();
  CsvWriter w(path);
  w.header({"experiment", "kind", "series", "param", "value", "grid", "seed"});
  const std::string seed = std::to_string(report.seed);
  for (const auto& kv : report.scalars) {
    w.field(report.id).field("scalar").field(kv.first).field("");
    w.field(kv.second).field(report.grid_tag).field(seed);
    w.end_row();
  }
  for (const SweepSeries& s : report.series)
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      w.field(report.id).field("measure").field(s.name).field(report.sweep[i]);
      w.field(s.values[i]).field(report.grid_tag).field(seed);
      w.end_row();
    }
  for (const SweepSeries& s : report.series) {
    if (!s.has_fit) continue;
    if (s.resolved) {
      w.field(report.id).field("exponent").field(s.name).field("");
      w.field(s.exponent).field(report.grid_tag).field(seed);
      w.end_row();
      w.field(report.id).field("half_width").field(s.name).field("");
      w.field(s.half_width).field(report.grid_tag).field(seed);
      w.end_row();
      w.field(report.id).field("r_squared").field(s.name).field("");
      w.field(s.r_squared).field(report.grid_tag).field(seed);
      w.end_row();
    } else {
      w.field(report.id).field("unresolved").field(s.name).field("");
      w.field(s.r_squared).field(report.grid_tag).field(seed);
      w.end_row();
    }
  }
}

// ---------------------------------------------------------------------------
// Shared ingredients
// ---------------------------------------------------------------------------

namespace {
void check_wave_args(int dim, double t) {
  if (dim != 2 && dim != 3)
    throw StructuralError("wave multiplier: dim must be 2 or 3");
  if (!std::isfinite(t))
    throw DomainError("wave multiplier: time must be finite");
}
}  // namespace

Multiplier halfwave_multiplier(int dim, double t) {
  check_wave_args(dim, t);
  return [dim, t](const Vec3& z) { return std::polar(1.0, t * norm(z, dim)); };
}

Multiplier cosine_wave_multiplier(int dim, double t) {
  check_wave_args(dim, t);
  return [dim, t](const Vec3& z) {
    return cplx(std::cos(t * norm(z, dim)), 0.0);
  };
}

Multiplier sine_wave_multiplier(int dim, double t) {
  check_wave_args(dim, t);
  return [dim, t](const Vec3& z) {
    return cplx(std::sin(t * norm(z, dim)), 0.0);
  };
}

std::vector<SampledField> standard_test_family(const GridSpec& g, double band_lo,
                                               double band_hi, std::uint64_t seed) {
  g.validate();
  if (!(band_lo > 0.0) || !(band_hi > band_lo))
    throw ConfigError("test family: need 0 < band_lo < band_hi");
  if (band_hi > g.nyquist() * (1.0 + 1e-12))
    throw ResolutionError("test family: band leaves the Nyquist ball");

  const int dim = g.dim;
  const ProfilePair profiles = build_profiles();
  const SphereGrid dirs =
      (dim == 2) ? SphereGrid::uniform_circle(10) : SphereGrid::fibonacci_sphere(10);

  // Carrier frequencies for the packet and Gaussian members: log-spaced in
  // the part of the band whose two-octave packet annulus stays inside it.
  const double c_lo = std::min(2.0 * band_lo, 0.5 * band_hi);
  const double c_hi = 0.5 * band_hi;
  if (!(c_lo > 1.0))
    throw ResolutionError("test family: band too low for unit-scale packets");

  std::vector<SampledField> family;
  family.reserve(30);

  for (int i = 0; i < 10; ++i) {
    const double u = i / 9.0;
    const double carrier = c_lo * std::pow(c_hi / c_lo, u);
    PacketIndex idx;
    idx.omega = dirs.dirs[i];
    idx.sigma = 1.0 / carrier;
    const PacketSymbol psi(profiles, dim, idx);
    SpectralField F;
    F.grid = g;
    F.coefficients.assign(g.size(), cplx(0.0, 0.0));
    for (std::size_t k = 0; k < F.coefficients.size(); ++k) {
      const double v = psi(F.frequency(k));
      if (v != 0.0) F.coefficients[k] = cplx(v, 0.0);
    }
    SampledField f = to_field(F);
    const double n2 = lp_norm(f, 2.0);
    if (!(n2 > 0.0))
      throw ResolutionError("test family: packet member " + std::to_string(i) +
                            " vanishes on the lattice");
    family.push_back(scale(f, 1.0 / n2));
  }

  CounterRng rng(seed, 0x67617573);
  for (int i = 0; i < 10; ++i) {
    const double u = i / 9.0;
    const double carrier = c_lo * std::pow(c_hi / c_lo, 1.0 - u);
    const Vec3& dir = dirs.dirs[(i * 3) % 10];
    Vec3 k{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) k[d] = carrier * dir[d];
    const double width = g.extent * (0.06 + 0.02 * (i % 5));
    Vec3 center{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d)
      center[d] = rng.uniform(static_cast<std::uint64_t>(i) * 4 + d,
                              -0.5 * g.extent, 0.5 * g.extent);
    SampledField f = modulated_gaussian(g, width, k, center);
    const double n2 = lp_norm(f, 2.0);
    family.push_back(scale(f, 1.0 / n2));
  }

  for (int i = 0; i < 10; ++i) {
    CounterRng member(seed, 0x66616d30u + static_cast<std::uint64_t>(i));
    SpectralField F;
    F.grid = g;
    F.coefficients.assign(g.size(), cplx(0.0, 0.0));
    bool any = false;
    for (std::size_t k = 0; k < F.coefficients.size(); ++k) {
      const Vec3 z = F.frequency(k);
      const double r = norm(z, dim);
      if (r < band_lo || r > band_hi) continue;
      // Key the draw by signed lattice index so refinement reproduces the
      // same coefficients at the same frequencies.
      int idx[3] = {0, 0, 0};
      unflatten(g, k, idx);
      std::uint64_t key = 0;
      for (int d = 0; d < dim; ++d) {
        const int s = g.signed_index(idx[d]);
        key = (key << 16) | static_cast<std::uint64_t>(s + 32768);
      }
      const auto gp = member.gaussian_pair(key);
      F.coefficients[k] = cplx(gp[0], gp[1]);
      any = true;
    }
    if (!any)
      throw ResolutionError("test family: no lattice frequencies in the band");
    SampledField f = to_field(F);
    const double n2 = lp_norm(f, 2.0);
    family.push_back(scale(f, 1.0 / n2));
  }
  return family;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

ExperimentReport sobolev_sharpness_experiment(const TransformPlan& plan, double t,
                                              const std::vector<double>& lambdas) {
  plan.validate();
  if (!std::isfinite(t))
    throw DomainError("sharpness experiment: time must be finite");
  const GridSpec& g = plan.grid();
  check_lambdas(g, lambdas, "sharpness experiment");

  const Multiplier evolve = halfwave_multiplier(g.dim, t);
  SweepSeries l1_series{"l1_ratio", {}, false, 0, 0, 0, true};
  SweepSeries hardy_series{"hardy_ratio", {}, false, 0, 0, 0, true};
  SweepSeries radial_series{"radial_l1_ratio", {}, false, 0, 0, 0, true};
  for (double lam : lambdas) {
    const SampledField f = packet_probe(g, plan.profiles(), lam, nullptr);
    const SampledField ft = packet_probe(g, plan.profiles(), lam, &evolve);
    const double l1 = positive_or_throw(lp_norm(f, 1.0), "sharpness: probe L1 norm");
    l1_series.values.push_back(lp_norm(ft, 1.0) / l1);
    const double h1 =
        positive_or_throw(lift_norms(plan, f, {1.0})[0], "sharpness: probe Hardy norm");
    hardy_series.values.push_back(lift_norms(plan, ft, {1.0})[0] / h1);
    // Diagnostic companion: the same annulus with full angular support (the
    // classical focusing probe). Its evolution spreads onto a sphere and the
    // L1 ratio carries the (dim-1)/2 growth that the directional packet, by
    // design, does not exhibit.
    const SampledField rf = radial_probe(g, plan.profiles(), lam, nullptr);
    const SampledField rft = radial_probe(g, plan.profiles(), lam, &evolve);
    const double rl1 =
        positive_or_throw(lp_norm(rf, 1.0), "sharpness: radial probe L1 norm");
    radial_series.values.push_back(lp_norm(rft, 1.0) / rl1);
  }
  attach_fit(l1_series, lambdas);
  attach_fit(hardy_series, lambdas);
  attach_fit(radial_series, lambdas);

  ExperimentReport report;
  report.id = "sharpness";
  report.sweep = lambdas;
  report.series = {std::move(l1_series), std::move(hardy_series),
                   std::move(radial_series)};
  report.scalars = {{"t", t}};
  report.grid_tag = plan.phase_geometry().tag();
  report.seed = 0;
  report.validate();
  return report;
}

ExperimentReport wave_uniformity_experiment(const TransformPlan& plan,
                                            const std::vector<double>& times,
                                            const std::vector<double>& ps,
                                            double band_lo, double band_hi,
                                            std::uint64_t seed,
                                            bool with_variants) {
  plan.validate();
  if (times.size() < 8)
    throw ConfigError("wave uniformity: need at least eight times");
  for (double t : times)
    if (!std::isfinite(t))
      throw DomainError("wave uniformity: times must be finite");
  if (ps.empty())
    throw ConfigError("wave uniformity: need at least one exponent");
  for (double p : ps) check_exponent(p, "wave uniformity");

  const std::vector<SampledField> family =
      standard_test_family(plan.grid(), band_lo, band_hi, seed);
  std::vector<std::vector<double>> base(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    base[i] = lift_norms(plan, family[i], ps);
    for (std::size_t j = 0; j < ps.size(); ++j)
      positive_or_throw(base[i][j], "wave uniformity: family baseline norm");
  }

  struct Variant {
    std::string prefix;
    Multiplier (*make)(int, double);
  };
  std::vector<Variant> variants = {{"", &halfwave_multiplier}};
  if (with_variants) {
    variants.push_back({"cos_", &cosine_wave_multiplier});
    variants.push_back({"sin_", &sine_wave_multiplier});
  }

  ExperimentReport report;
  report.id = "waveunif";
  report.sweep = times;
  for (const Variant& v : variants)
    for (double p : ps)
      report.series.push_back(
          {v.prefix + "ratio_p" + p_label(p), {}, false, 0, 0, 0, true});

  for (double t : times) {
    std::size_t slot = 0;
    for (const Variant& v : variants) {
      const Multiplier m = v.make(plan.grid().dim, t);
      std::vector<double> worst(ps.size(), 0.0);
      for (std::size_t i = 0; i < family.size(); ++i) {
        const SampledField ft = apply_multiplier(m, family[i]);
        const std::vector<double> norms = lift_norms(plan, ft, ps);
        for (std::size_t j = 0; j < ps.size(); ++j)
          worst[j] = std::max(worst[j], norms[j] / base[i][j]);
      }
      for (std::size_t j = 0; j < ps.size(); ++j)
        report.series[slot++].values.push_back(worst[j]);
    }
  }

  for (const SweepSeries& s : report.series) {
    double m = 0.0;
    for (double v : s.values) m = std::max(m, v);
    report.scalars.push_back({"max_" + s.name, m});
  }
  report.grid_tag = plan.phase_geometry().tag();
  report.seed = seed;
  report.validate();
  return report;
}

ExperimentReport embedding_experiment(const TransformPlan& plan, double p,
                                      const std::vector<double>& lambdas,
                                      double band_lo, double band_hi,
                                      std::uint64_t seed) {
  plan.validate();
  check_exponent(p, "embedding experiment");
  if (std::isinf(p))
    throw DomainError("embedding experiment: p must be finite");
  const GridSpec& g = plan.grid();
  check_lambdas(g, lambdas, "embedding experiment");

  const double s_p = 0.5 * (g.dim - 1) * std::abs(1.0 / p - 0.5);
  const bool with_loss = (p == 1.0);

  SweepSeries into{"into_ratio", {}, false, 0, 0, 0, true};
  SweepSeries outof{"outof_ratio", {}, false, 0, 0, 0, true};
  SweepSeries loss{"loss_ratio", {}, false, 0, 0, 0, true};
  for (double lam : lambdas) {
    const SampledField f = packet_probe(g, plan.profiles(), lam, nullptr);
    const double hardy =
        positive_or_throw(lift_norms(plan, f, {p})[0], "embedding: probe Hardy norm");
    const double up = positive_or_throw(sobolev_norm(f, s_p, p),
                                        "embedding: probe smoothness norm");
    const double down = positive_or_throw(sobolev_norm(f, -s_p, p),
                                          "embedding: probe roughness norm");
    into.values.push_back(hardy / up);
    outof.values.push_back(down / hardy);
    if (with_loss)
      loss.values.push_back(sobolev_norm(f, -s_p - 0.1, p) / hardy);
  }
  attach_fit(into, lambdas);
  attach_fit(outof, lambdas);
  if (with_loss) attach_fit(loss, lambdas);

  double fam_into = 0.0, fam_outof = 0.0;
  const std::vector<SampledField> family =
      standard_test_family(g, band_lo, band_hi, seed);
  for (const SampledField& f : family) {
    const double hardy =
        positive_or_throw(lift_norms(plan, f, {p})[0], "embedding: family Hardy norm");
    fam_into = std::max(fam_into, hardy / sobolev_norm(f, s_p, p));
    fam_outof = std::max(fam_outof, sobolev_norm(f, -s_p, p) / hardy);
  }

  ExperimentReport report;
  report.id = "embedding";
  report.sweep = lambdas;
  report.series = {std::move(into), std::move(outof)};
  if (with_loss) report.series.push_back(std::move(loss));
  report.scalars = {{"p", p},
                    {"s_p", s_p},
                    {"family_max_into", fam_into},
                    {"family_max_outof", fam_outof}};
  report.grid_tag = plan.phase_geometry().tag();
  report.seed = seed;
  report.validate();
  return report;
}

}  // namespace fiohardy
