#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fiohardy/cosphere.hpp"
#include "fiohardy/grid.hpp"
#include "fiohardy/tent.hpp"
#include "fiohardy/transform.hpp"

namespace fiohardy {

// Oscillatory phase, positively homogeneous of degree one in the frequency
// variable. Callers supply the value and both gradients; `mixed_det` is the
// determinant of the mixed second-derivative block d^2/dx deta.
struct PhaseFunction {
  std::function<double(const Vec3& x, const Vec3& eta)> value;
  std::function<Vec3(const Vec3& x, const Vec3& eta)> grad_x;
  std::function<Vec3(const Vec3& x, const Vec3& eta)> grad_eta;
  std::function<double(const Vec3& x, const Vec3& eta)> mixed_det;
  // Set when the phase splits as x.eta + phi0(eta). The operator with an
  // x-independent amplitude is then a plain frequency multiplier, and the
  // induced point map has the closed form (y - grad phi0(nu), nu).
  bool translation_invariant = false;

  // Sampled checks: all evaluators present, degree-one homogeneity in eta
  // (relative 1e-8 at random points and dilations), and a mixed determinant
  // that never vanishes at unit frequencies. Throws StructuralError.
  void validate(int dim, std::uint64_t seed = 1, int samples = 64) const;
};

// Phi = x.eta (the phase of any plain multiplier or pseudodifferential op).
PhaseFunction planar_phase(int dim);

// Phi = x.eta + shift(eta) for a caller-supplied degree-one homogeneous
// shift with its gradient. The mixed block is the identity regardless of
// the shift, so `mixed_det` is constant one.
PhaseFunction modulation_phase(int dim, std::function<double(const Vec3&)> shift,
                               std::function<Vec3(const Vec3&)> shift_grad);

// Propagator phase x.eta - t|eta|: carries a wave packet a distance t
// forward along its direction, so the induced point map is
// (y, nu) -> (y + t nu, nu).
PhaseFunction halfwave_phase(int dim, double t);

// Frequency-side amplitude. `order` is the declared growth exponent in
// (1+|eta|)^order; `rho` the declared derivative type (each frequency
// derivative gains |eta|^-rho, each spatial one loses |eta|^{1-rho}); both
// are metadata for reports and sanity checks, not enforced pointwise.
struct SymbolFunction {
  std::function<cplx(const Vec3& x, const Vec3& eta)> value;
  double order = 0.0;
  double rho = 0.5;
  // When positive, the amplitude is required to vanish for |eta| < cutoff;
  // validate() spot-checks this on a frequency sample.
  double cutoff = 0.0;
  bool x_independent = false;

  void validate(int dim, std::uint64_t seed = 2, int samples = 64) const;
};

SymbolFunction unit_symbol();
// Smooth radial step: exactly 0 for |eta| <= cutoff, exactly 1 for
// |eta| >= 2*cutoff, monotone in between.
SymbolFunction highpass_symbol(double cutoff);
// Wraps a plain frequency multiplier as an x-independent amplitude.
SymbolFunction multiplier_symbol(std::function<cplx(const Vec3&)> m, double order,
                                 double cutoff = 0.0);

// Oscillatory integral operator in normal form,
//   (T f)(x) = L^{-n} sum_k e^{i Phi(x, zeta_k)} a(x, zeta_k) fhat(zeta_k),
// the lattice version of the frequency integral against the calibrated
// spectrum. Phase and amplitude are validated together before use.
struct NormalOIO {
  PhaseFunction phase;
  SymbolFunction symbol;

  bool multiplier_form() const {
    return phase.translation_invariant && symbol.x_independent;
  }
  void validate(int dim) const;
};

NormalOIO identity_oio(int dim);
// Half-wave propagator at time t with a smooth high-pass amplitude (the
// low-frequency ball |eta| < cutoff is cut away, reaching 1 at 2*cutoff).
NormalOIO halfwave_oio(int dim, double t, double cutoff = 0.25);
// Gaussian mollifier exp(-width^2 |eta|^2 / 2): a smoothing operator whose
// spatial kernel is Schwartz-class.
NormalOIO smoothing_oio(int dim, double width);

// Applies the operator to a grid field. Multiplier-form operators go through
// one spectral multiply; everything else uses direct quadrature over the
// frequency lattice per output point (skipping exactly-zero coefficients).
// Non-finite phase or amplitude values at a contributing lattice frequency
// throw NumericError naming the point.
SampledField apply_oio(const NormalOIO& op, const SampledField& f);

// Point map on the cosphere bundle induced by the phase: the unique (x, w)
// with grad_eta Phi(x, nu) = y and w the normalized grad_x Phi(x, nu).
// Translation-invariant phases use the closed form x = y - grad phi0(nu);
// general phases run a damped Newton solve started at x = y with a
// finite-difference Jacobian. Newton failure after 50 steps throws
// SingularityError naming the failing point. The returned direction is
// normalized, and the domain predicate is empty (defined everywhere).
ContactMapSample induced_contact(const NormalOIO& op, int dim);

// One scale/direction pair of the lifted kernel: analysis packet at
// (omega, sigma) on the output side, synthesis packet at (nu, tau) on the
// input side. Directions are normalized on entry.
struct KernelSliceSpec {
  double sigma = 0.25;
  double tau = 0.25;
  Vec3 omega{1.0, 0.0, 0.0};
  Vec3 nu{1.0, 0.0, 0.0};
};

// Kernel of (output packet window) o T o (input packet window) against the
// source point y = 0: returns K((x, omega), (0, nu)) for every grid x.
// Multiplier-form operators use the closed translation-invariant path (one
// inverse transform of psi_out * m_T * psi_in, so the field is also the
// displacement kernel K(x - y)); x-dependent amplitudes fall back to the
// dense quadrature column at the origin. Scales must lie in (0, 1) and both
// packet bands must fit under the grid Nyquist, else ResolutionError.
SampledField lifted_kernel(const NormalOIO& op, const TransformPlan& out_plan,
                           const TransformPlan& in_plan, const KernelSliceSpec& slice);

// Dense-quadrature column of the same kernel against an arbitrary source
// cell: K((x, omega), (y_source, nu)) for every grid x, with y_source the
// grid point at `source_flat`. Works for every operator; used to
// cross-validate the translation-invariant path.
SampledField lifted_kernel_column(const NormalOIO& op, const TransformPlan& out_plan,
                                  const TransformPlan& in_plan,
                                  const KernelSliceSpec& slice, std::size_t source_flat);

// Worst sample of the decay-envelope fit for one scale pair.
struct OffSingSample {
  double sigma = 0.0;
  double tau = 0.0;
  // Largest envelope-normalized kernel value over this pair's slices.
  double c_local = 0.0;
  // Largest raw |K| over this pair's slices.
  double kernel_peak = 0.0;
  // Where the worst ratio occurred and its bundle distance from the mapped
  // source point.
  Vec3 x{0.0, 0.0, 0.0};
  Vec3 omega{1.0, 0.0, 0.0};
  Vec3 nu{1.0, 0.0, 0.0};
  double dist = 0.0;
};

// Fit of the off-singularity envelope at fixed decay order N:
//   |K| <= C * rho^{-n} * U(sigma/tau)^N * (1 + d((x,omega), mapped source)^2 / rho)^{-N}
// with rho = min(sigma, tau) and U(t) = min(t, 1/t). `c_fit` is the supremum
// of |K| divided by the envelope over all samples.
struct OffSingReport {
  int decay_order = 0;
  double c_fit = 0.0;
  std::vector<OffSingSample> pairs;
  std::string grid_tag;

  void validate() const;
};

// Sampling plan for the fit: both scales range over `scales` (which must
// span at least three octaves), directions are strided subsets of the
// plans' direction grids (out side / in side).
struct OffSingSampleSpec {
  std::vector<double> scales;
  int dir_stride = 1;
  int codir_stride = 1;

  void validate() const;
};

// Evaluates the envelope fit over every (sigma, tau, omega, nu) sample,
// with the kernel source at the origin and the mapped source from the
// operator's induced point map (or `map_override` when given, e.g. to
// measure how badly a wrong map fits). Points rejected by the map's domain
// predicate are skipped.
OffSingReport offsing_fit(const NormalOIO& op, const TransformPlan& out_plan,
                          const TransformPlan& in_plan, int decay_order,
                          const OffSingSampleSpec& spec,
                          const ContactMapSample* map_override = nullptr);

// True when the two fits (same operator and spec, the second at doubled
// grid resolution) land within a factor of two of each other.
bool offsing_refinement_stable(const OffSingReport& coarse, const OffSingReport& fine);

// Columns: sigma, tau, c_local, kernel_peak, dist, decay_order, c_fit, grid.
void write_offsing_csv(const std::string& path, const OffSingReport& report);

// Residual-family envelope per scale pair:
//   bound = sup |K| * (1 + |x| + |y| + 1/U(sigma) + 1/U(tau))^N
// over the pair's slices (source at y = 0, |x| the minimal-image norm).
struct ResidualBoundRow {
  double sigma = 0.0;
  double tau = 0.0;
  double bound = 0.0;
};

// Tabulates the residual envelope for every pair from `scales` at decay
// order N (1 <= N <= 8), directions strided from the plans' grids. Smoothing
// operators stay bounded; propagating operators blow up toward fine scales,
// which is what separates the two classes.
std::vector<ResidualBoundRow> residual_check(const NormalOIO& op,
                                             const TransformPlan& out_plan,
                                             const TransformPlan& in_plan,
                                             int decay_order,
                                             const std::vector<double>& scales,
                                             int dir_stride = 1);

// Summary of observed operator-norm ratios over a test family.
struct RatioStats {
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;

  void validate() const;
};

// Ratios tent_norm(analyze(out_plan, T(synthesize(in_plan, F))), p) over
// tent_norm(F, p) for every field in the test set: the lifted operator's
// empirical bound on the tent space. Fields must live on the in-plan
// geometry and have nonzero tent norm.
RatioStats empirical_tent_bound(const NormalOIO& op, const TransformPlan& out_plan,
                                const TransformPlan& in_plan, double p,
                                const std::vector<PhaseSpaceField>& test_set);

}  // namespace fiohardy
