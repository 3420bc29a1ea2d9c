#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fiohardy/cosphere.hpp"
#include "fiohardy/field_ops.hpp"
#include "fiohardy/grid.hpp"
#include "fiohardy/transform.hpp"

namespace fiohardy {

// ---------------------------------------------------------------------------
// Coherent molecules
// ---------------------------------------------------------------------------

// Membership data for the molecule test attached to the bundle ball
// B_sqrt(scale)(center): frequency support confined to the outgoing cone of
// the ball and weighted spatial decay around its base point. decay_order must
// exceed dim/2 so the weight dominates flat tails; constant is the admissible
// bound callers compare the measured decay value against (not used by the
// check itself).
struct MoleculeSpec {
  double decay_order = 1.5;
  double constant = 1.0;
  CospherePoint center;
  double scale = 0.25;

  void validate(int dim) const;
};

// Result of molecule_check. support_pass: the spectrum is negligible (below
// 1e-9 of its own peak) outside the cone
//   { |zeta| >= 1/scale  and  |zeta/|zeta| - nu| <= sqrt(scale) }.
// decay_value: with delta the minimal torus image of x - y and s the decay
// order,
//   scale^dim * sum_x (1 + |<nu, delta>|/scale)^{2s}
//                     (1 + |delta|^2 /scale)^{2s} |f(x)|^2 h^dim.
struct MoleculeReport {
  bool support_pass = false;
  double decay_value = 0.0;
};

MoleculeReport molecule_check(const SampledField& f, const MoleculeSpec& spec);

// Frozen lower equivalence constant between the reduced and the full
// quasi-distance on the sampled bundle (the measured two-sided ratio stays
// inside [1, sqrt(2)], so the reduced distance is bounded below by the full
// one times 1/sqrt(2)). Used to inflate atom balls into molecule cones.
inline constexpr double kReducedMetricLower = 0.7071067811865476;

// Atom synthesized from a tent ball together with its derived molecule data.
struct AtomMolecule {
  SampledField field;
  MoleculeSpec spec;
  MoleculeReport report;
};

// Builds the flat atom of the ball (radius at most 2), drops the band level,
// synthesizes the packet part, and runs molecule_check against the inflated
// ball B_{(2 + 1/c2) * radius}(center) with c2 = kReducedMetricLower and
// decay order 3/2. The spec's admissible constant is left at zero; callers
// compare decay values across a collection themselves.
AtomMolecule molecule_from_atom(const TransformPlan& plan, const BallSpec& ball);

// ---------------------------------------------------------------------------
// Experiment reports
// ---------------------------------------------------------------------------

// Minimum fit quality: a log-log fit with R^2 below this is reported as
// unresolved and its exponent is withheld.
inline constexpr double kFitQuality = 0.95;

// Power-law fit of value against the sweep variable in log-log coordinates.
struct PowerFit {
  double exponent = 0.0;
  double half_width = 0.0;  // two standard errors of the slope
  double r_squared = 0.0;
};

// Least-squares slope of log(values) against log(sweep). Requires at least
// four strictly positive pairs; a perfectly flat series reports R^2 = 1.
PowerFit fit_power_law(const std::vector<double>& sweep,
                       const std::vector<double>& values);

// One measured quantity per sweep entry, with an optional power-law fit.
// resolved is false when the fit quality fell below kFitQuality; the exponent
// and half width are then zeroed and only r_squared is meaningful.
struct SweepSeries {
  std::string name;
  std::vector<double> values;
  bool has_fit = false;
  double exponent = 0.0;
  double half_width = 0.0;
  double r_squared = 0.0;
  bool resolved = true;
};

// Deterministic record of one experiment: the swept parameter values, the
// measured series, scalar summaries, and the run provenance (geometry tag and
// seed). Any fitted series requires at least four sweep points.
struct ExperimentReport {
  std::string id;
  std::vector<double> sweep;
  std::vector<SweepSeries> series;
  std::vector<std::pair<std::string, double>> scalars;
  std::string grid_tag;
  std::uint64_t seed = 0;

  void validate() const;
};

// Long-form CSV with header experiment,kind,series,param,value,grid,seed.
// Scalars come first (kind "scalar"), then per-sweep measurements (kind
// "measure", param = sweep value), then per-fit rows: resolved fits emit
// kind "exponent", "half_width" and "r_squared"; unresolved fits emit a
// single "unresolved" row carrying the rejected R^2 so no exponent is ever
// published for them. Identical reports serialize byte-identically.
void write_experiment_csv(const std::string& path, const ExperimentReport& report);

// ---------------------------------------------------------------------------
// Shared ingredients
// ---------------------------------------------------------------------------

// Evolution multipliers for the constant-coefficient wave group.
Multiplier halfwave_multiplier(int dim, double t);    // exp(i t |zeta|)
Multiplier cosine_wave_multiplier(int dim, double t); // cos(t |zeta|)
Multiplier sine_wave_multiplier(int dim, double t);   // sin(t |zeta|)

// Deterministic 30-member test family on the frequency band
// [band_lo, band_hi]: ten wave packets across scales and directions, ten
// modulated Gaussians with carriers in the band, ten random band-limited
// fields. All members are unit L^2. Random coefficients are keyed by signed
// lattice index, so refining the grid (same extent, more points) reproduces
// the same fields; the band must stay inside the Nyquist ball.
std::vector<SampledField> standard_test_family(const GridSpec& grid,
                                               double band_lo, double band_hi,
                                               std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

// Fixed-time concentration sweep: for each lambda the probe is the inverse
// transform of the packet symbol at direction e1 and scale 1/lambda, and the
// evolution is the half-wave multiplier at time t. Series (all fitted):
//   l1_ratio         L^1 norm of the evolved probe over the L^1 norm of the probe
//   hardy_ratio      same ratio in the p = 1 Hardy norm of the plan
//   radial_l1_ratio  L^1 ratio for the annulus with full angular support, the
//                    classical focusing probe whose evolution does spread
// Scalar "t" records the evolution time. Requires at least four lambdas, each
// above one and with 2 * lambda inside the closed Nyquist ball.
ExperimentReport sobolev_sharpness_experiment(const TransformPlan& plan, double t,
                                              const std::vector<double>& lambdas);

// Hardy-norm stability of the wave group over the standard family built on
// [band_lo, band_hi]. For each time in `times` (at least eight values) and
// each requested p, the series "ratio_p<p>" holds the family maximum of
//   hardy_norm(evolved f, p) / hardy_norm(f, p),
// and scalar "max_ratio_p<p>" the maximum over all times. with_variants adds
// the same data for the cosine and sine evolutions ("cos_"/"sin_" prefixes).
ExperimentReport wave_uniformity_experiment(const TransformPlan& plan,
                                            const std::vector<double>& times,
                                            const std::vector<double>& ps,
                                            double band_lo, double band_hi,
                                            std::uint64_t seed,
                                            bool with_variants = false);

// Smoothing-order comparison at exponent p: with s_p = (dim-1)/2 |1/p - 1/2|
// and the same packet probes as the sharpness sweep, the fitted series are
//   into_ratio   hardy_norm(f, p) / sobolev_norm(f, +s_p, p)
//   outof_ratio  sobolev_norm(f, -s_p, p) / hardy_norm(f, p)
// plus, at p = 1 only, "loss_ratio" with the order pushed past s_p by 0.1.
// Scalars: "s_p" and the family maxima "family_max_into"/"family_max_outof"
// over the standard family on [band_lo, band_hi].
ExperimentReport embedding_experiment(const TransformPlan& plan, double p,
                                      const std::vector<double>& lambdas,
                                      double band_lo, double band_hi,
                                      std::uint64_t seed);

}  // namespace fiohardy
