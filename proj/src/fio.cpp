#include "fiohardy/fio.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>

#include "fiohardy/csv.hpp"
#include "fiohardy/fft.hpp"
#include "fiohardy/field_ops.hpp"
#include "fiohardy/packets.hpp"
#include "fiohardy/rng.hpp"

namespace fiohardy {

namespace {

constexpr Vec3 kOrigin{0.0, 0.0, 0.0};

std::string format_vec(const Vec3& v, int dim) {
  std::string s = "(";
  for (int d = 0; d < dim; ++d) {
    if (d) s += ", ";
    s += format_double(v[d]);
  }
  return s + ")";
}

bool finite(const cplx& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// C-infinity step: 0 at u <= 0, 1 at u >= 1.
double bump_exp(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = bump_exp(u);
  return a / (a + bump_exp(1.0 - u));
}

Vec3 random_unit(const CounterRng& rng, int dim, std::uint64_t counter) {
  const auto g1 = rng.gaussian_pair(2 * counter);
  Vec3 v{g1[0], g1[1], 0.0};
  if (dim == 3) v[2] = rng.gaussian_pair(2 * counter + 1)[0];
  double n = norm(v, dim);
  if (n < 1e-12) {
    v = {1.0, 0.0, 0.0};
    n = 1.0;
  }
  for (int d = 0; d < dim; ++d) v[d] /= n;
  return v;
}

Vec3 unit_or_throw(const Vec3& v, int dim, const char* what) {
  const double n = norm(v, dim);
  if (!(n > 1e-12))
    throw ConfigError(std::string(what) + ": direction has vanishing length");
  Vec3 out{0.0, 0.0, 0.0};
  for (int d = 0; d < dim; ++d) out[d] = v[d] / n;
  return out;
}

std::size_t origin_flat(const GridSpec& grid) {
  int idx[3] = {0, 0, 0};
  for (int d = 0; d < grid.dim; ++d) idx[d] = grid.points_per_axis / 2;
  return flatten(grid, idx);
}

// Small dense linear solve (dim <= 3) for the Newton step.
bool solve_linear(int dim, const double a[3][3], const double b[3], double s[3]) {
  if (dim == 2) {
    const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if (!(std::abs(det) > 1e-300)) return false;
    s[0] = (b[0] * a[1][1] - b[1] * a[0][1]) / det;
    s[1] = (a[0][0] * b[1] - a[1][0] * b[0]) / det;
    return true;
  }
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (!(std::abs(det) > 1e-300)) return false;
  const double inv = 1.0 / det;
  s[0] = inv * (b[0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                a[0][1] * (b[1] * a[2][2] - a[1][2] * b[2]) +
                a[0][2] * (b[1] * a[2][1] - a[1][1] * b[2]));
  s[1] = inv * (a[0][0] * (b[1] * a[2][2] - a[1][2] * b[2]) -
                b[0] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                a[0][2] * (a[1][0] * b[2] - b[1] * a[2][0]));
  s[2] = inv * (a[0][0] * (a[1][1] * b[2] - b[1] * a[2][1]) -
                a[0][1] * (a[1][0] * b[2] - b[1] * a[2][0]) +
                b[0] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]));
  return true;
}

cplx multiplier_value(const NormalOIO& op, const Vec3& zeta) {
  const double ph = op.phase.value(kOrigin, zeta);
  const cplx amp = op.symbol.value(kOrigin, zeta);
  if (!std::isfinite(ph) || !finite(amp))
    throw NumericError("oio: non-finite phase or amplitude at zeta = " +
                       format_vec(zeta, 3));
  return amp * std::polar(1.0, ph);
}

void check_slice_spec(const GridSpec& grid, KernelSliceSpec& slice) {
  for (double s : {slice.sigma, slice.tau})
    if (!(s > 0.0 && s < 1.0))
      throw ConfigError("kernel slice: scales must lie in (0, 1), got " +
                        format_double(s));
  const double nyq = grid.nyquist();
  for (double s : {slice.sigma, slice.tau})
    if (!(2.0 / s < nyq))
      throw ResolutionError("kernel slice: packet band 2/sigma = " +
                            format_double(2.0 / s) +
                            " exceeds the grid nyquist " + format_double(nyq));
  slice.omega = unit_or_throw(slice.omega, grid.dim, "kernel slice");
  slice.nu = unit_or_throw(slice.nu, grid.dim, "kernel slice");
}

void check_shared_grid(const TransformPlan& out_plan, const TransformPlan& in_plan,
                       const char* what) {
  if (!(out_plan.grid() == in_plan.grid()))
    throw StructuralError(std::string(what) + ": plans must share the grid");
}

std::vector<int> strided_dirs(const SphereGrid& sphere, int stride, const char* what) {
  if (stride < 1) throw ConfigError(std::string(what) + ": stride must be >= 1");
  std::vector<int> out;
  for (int i = 0; i < sphere.count(); i += stride) out.push_back(i);
  return out;
}

}  // namespace

void PhaseFunction::validate(int dim, std::uint64_t seed, int samples) const {
  if (dim != 2 && dim != 3)
    throw StructuralError("phase: dim must be 2 or 3");
  if (!value || !grad_x || !grad_eta || !mixed_det)
    throw StructuralError("phase: all four evaluators must be set");
  if (samples < 1) throw ConfigError("phase: sample count must be >= 1");
  const CounterRng rng(seed, 101);
  for (int s = 0; s < samples; ++s) {
    const std::uint64_t c = static_cast<std::uint64_t>(s);
    Vec3 x{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) x[d] = rng.uniform(16 * c + d, -1.0, 1.0);
    const Vec3 dir = random_unit(rng, dim, 16 * c + 4);
    const double r = rng.log_uniform(16 * c + 8, 1.0, 64.0);
    const double lam = rng.log_uniform(16 * c + 9, 0.25, 4.0);
    Vec3 eta{0.0, 0.0, 0.0};
    Vec3 eta_scaled{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) {
      eta[d] = r * dir[d];
      eta_scaled[d] = lam * eta[d];
    }
    const double base = value(x, eta);
    const double scaled = value(x, eta_scaled);
    if (!std::isfinite(base) || !std::isfinite(scaled))
      throw StructuralError("phase: non-finite value at x = " + format_vec(x, dim) +
                            ", eta = " + format_vec(eta, dim));
    if (std::abs(scaled - lam * base) > 1e-8 * (1.0 + std::abs(lam * base)))
      throw StructuralError("phase: not degree-one homogeneous at x = " +
                            format_vec(x, dim) + ", eta = " + format_vec(eta, dim) +
                            ", lambda = " + format_double(lam));
    const double det = mixed_det(x, dir);
    if (!std::isfinite(det) || !(std::abs(det) > 0.0))
      throw StructuralError("phase: mixed determinant vanishes at x = " +
                            format_vec(x, dim) + ", eta = " + format_vec(dir, dim));
  }
}

PhaseFunction planar_phase(int dim) {
  PhaseFunction p;
  p.value = [dim](const Vec3& x, const Vec3& eta) { return dot(x, eta, dim); };
  p.grad_x = [](const Vec3&, const Vec3& eta) { return eta; };
  p.grad_eta = [](const Vec3& x, const Vec3&) { return x; };
  p.mixed_det = [](const Vec3&, const Vec3&) { return 1.0; };
  p.translation_invariant = true;
  return p;
}

PhaseFunction modulation_phase(int dim, std::function<double(const Vec3&)> shift,
                               std::function<Vec3(const Vec3&)> shift_grad) {
  if (!shift || !shift_grad)
    throw ConfigError("modulation phase: shift and gradient must be set");
  PhaseFunction p;
  p.value = [dim, shift](const Vec3& x, const Vec3& eta) {
    return dot(x, eta, dim) + shift(eta);
  };
  p.grad_x = [](const Vec3&, const Vec3& eta) { return eta; };
  p.grad_eta = [dim, shift_grad](const Vec3& x, const Vec3& eta) {
    Vec3 g = shift_grad(eta);
    for (int d = 0; d < dim; ++d) g[d] += x[d];
    return g;
  };
  p.mixed_det = [](const Vec3&, const Vec3&) { return 1.0; };
  p.translation_invariant = true;
  return p;
}

PhaseFunction halfwave_phase(int dim, double t) {
  if (!std::isfinite(t)) throw ConfigError("halfwave phase: t must be finite");
  auto shift = [dim, t](const Vec3& eta) { return -t * norm(eta, dim); };
  auto shift_grad = [dim, t](const Vec3& eta) {
    Vec3 g{0.0, 0.0, 0.0};
    const double n = norm(eta, dim);
    if (n > 0.0)
      for (int d = 0; d < dim; ++d) g[d] = -t * eta[d] / n;
    return g;
  };
  return modulation_phase(dim, shift, shift_grad);
}

void SymbolFunction::validate(int dim, std::uint64_t seed, int samples) const {
  if (dim != 2 && dim != 3)
    throw StructuralError("symbol: dim must be 2 or 3");
  if (!value) throw StructuralError("symbol: evaluator must be set");
  if (!std::isfinite(order) || !std::isfinite(rho) || !std::isfinite(cutoff) ||
      cutoff < 0.0)
    throw StructuralError("symbol: declared parameters must be finite, cutoff >= 0");
  if (samples < 1) throw ConfigError("symbol: sample count must be >= 1");
  const CounterRng rng(seed, 202);
  for (int s = 0; s < samples; ++s) {
    const std::uint64_t c = static_cast<std::uint64_t>(s);
    Vec3 x{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) x[d] = rng.uniform(16 * c + d, -1.0, 1.0);
    const Vec3 dir = random_unit(rng, dim, 16 * c + 4);
    const double r = rng.log_uniform(16 * c + 8, 1e-2, 64.0);
    Vec3 eta{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) eta[d] = r * dir[d];
    const cplx a = value(x, eta);
    if (!finite(a))
      throw StructuralError("symbol: non-finite value at x = " + format_vec(x, dim) +
                            ", eta = " + format_vec(eta, dim));
    if (cutoff > 0.0) {
      Vec3 low{0.0, 0.0, 0.0};
      const double rl = rng.uniform(16 * c + 9) * cutoff * (1.0 - 1e-9);
      for (int d = 0; d < dim; ++d) low[d] = rl * dir[d];
      if (std::abs(value(x, low)) != 0.0)
        throw StructuralError("symbol: declared cutoff " + format_double(cutoff) +
                              " but value is nonzero at |eta| = " + format_double(rl));
    }
  }
}

SymbolFunction unit_symbol() {
  SymbolFunction a;
  a.value = [](const Vec3&, const Vec3&) { return cplx(1.0, 0.0); };
  a.order = 0.0;
  a.rho = 1.0;
  a.x_independent = true;
  return a;
}

SymbolFunction highpass_symbol(double cutoff) {
  if (!(cutoff > 0.0))
    throw ConfigError("highpass symbol: cutoff must be positive");
  SymbolFunction a;
  a.value = [cutoff](const Vec3&, const Vec3& eta) {
    const double r = norm(eta, 3);
    return cplx(smooth_step(r / cutoff - 1.0), 0.0);
  };
  a.order = 0.0;
  a.rho = 1.0;
  a.cutoff = cutoff;
  a.x_independent = true;
  return a;
}

SymbolFunction multiplier_symbol(std::function<cplx(const Vec3&)> m, double order,
                                 double cutoff) {
  if (!m) throw ConfigError("multiplier symbol: evaluator must be set");
  SymbolFunction a;
  a.value = [m](const Vec3&, const Vec3& eta) { return m(eta); };
  a.order = order;
  a.rho = 1.0;
  a.cutoff = cutoff;
  a.x_independent = true;
  return a;
}

void NormalOIO::validate(int dim) const {
  phase.validate(dim);
  symbol.validate(dim);
}

NormalOIO identity_oio(int dim) {
  return NormalOIO{planar_phase(dim), unit_symbol()};
}

NormalOIO halfwave_oio(int dim, double t, double cutoff) {
  return NormalOIO{halfwave_phase(dim, t), highpass_symbol(cutoff)};
}

NormalOIO smoothing_oio(int dim, double width) {
  if (!(width > 0.0)) throw ConfigError("smoothing oio: width must be positive");
  SymbolFunction a;
  a.value = [dim, width](const Vec3&, const Vec3& eta) {
    return cplx(std::exp(-0.5 * width * width * norm2(eta, dim)), 0.0);
  };
  a.order = 0.0;
  a.rho = 1.0;
  a.x_independent = true;
  return NormalOIO{planar_phase(dim), a};
}

SampledField apply_oio(const NormalOIO& op, const SampledField& f) {
  f.validate();
  const GridSpec& grid = f.grid;
  op.validate(grid.dim);
  SpectralField fhat = to_spectrum(f);

  if (op.multiplier_form()) {
    for (std::size_t k = 0; k < fhat.coefficients.size(); ++k)
      fhat.coefficients[k] *= multiplier_value(op, fhat.frequency(k));
    return to_field(fhat);
  }

  // Direct quadrature: gather the contributing lattice frequencies once.
  struct Term {
    Vec3 zeta;
    cplx coeff;
  };
  std::vector<Term> terms;
  for (std::size_t k = 0; k < fhat.coefficients.size(); ++k)
    if (fhat.coefficients[k] != cplx(0.0, 0.0))
      terms.push_back({fhat.frequency(k), fhat.coefficients[k]});

  SampledField out;
  out.grid = grid;
  out.values.assign(grid.size(), cplx(0.0, 0.0));
  const double scale = std::pow(grid.extent, -grid.dim);
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    const Vec3 x = f.position(j);
    cplx acc(0.0, 0.0);
    for (const Term& t : terms) {
      const double ph = op.phase.value(x, t.zeta);
      const cplx amp = op.symbol.value(x, t.zeta);
      if (!std::isfinite(ph) || !finite(amp))
        throw NumericError("oio: non-finite phase or amplitude at x = " +
                           format_vec(x, grid.dim) + ", zeta = " +
                           format_vec(t.zeta, grid.dim));
      acc += amp * t.coeff * std::polar(1.0, ph);
    }
    out.values[j] = scale * acc;
  }
  return out;
}

ContactMapSample induced_contact(const NormalOIO& op, int dim) {
  op.validate(dim);
  const PhaseFunction phase = op.phase;
  ContactMapSample sample;

  if (phase.translation_invariant) {
    sample.map = [phase, dim](const CospherePoint& p) {
      const Vec3 nu = unit_or_throw(p.omega, dim, "contact map");
      const Vec3 shift = phase.grad_eta(kOrigin, nu);
      CospherePoint out;
      for (int d = 0; d < dim; ++d) out.x[d] = p.x[d] - shift[d];
      out.omega = unit_or_throw(phase.grad_x(out.x, nu), dim, "contact map");
      return out;
    };
    return sample;
  }

  sample.map = [phase, dim](const CospherePoint& p) {
    const Vec3 nu = unit_or_throw(p.omega, dim, "contact map");
    const Vec3& y = p.x;
    Vec3 x = y;  // Newton start: the identity guess.
    auto residual = [&](const Vec3& at) {
      Vec3 r = phase.grad_eta(at, nu);
      for (int d = 0; d < dim; ++d) r[d] -= y[d];
      return r;
    };
    Vec3 r = residual(x);
    double rn = norm(r, dim);
    const double tol = 1e-11 * (1.0 + norm(y, dim));
    for (int iter = 0; iter < 50 && rn > tol; ++iter) {
      // Finite-difference Jacobian of the frequency gradient in x.
      double jac[3][3] = {{0.0}};
      const double h = 1e-6 * (1.0 + norm(x, dim));
      for (int col = 0; col < dim; ++col) {
        Vec3 xp = x, xm = x;
        xp[col] += h;
        xm[col] -= h;
        const Vec3 gp = phase.grad_eta(xp, nu);
        const Vec3 gm = phase.grad_eta(xm, nu);
        for (int row = 0; row < dim; ++row)
          jac[row][col] = (gp[row] - gm[row]) / (2.0 * h);
      }
      double rhs[3] = {r[0], r[1], r[2]};
      double step[3] = {0.0, 0.0, 0.0};
      if (!solve_linear(dim, jac, rhs, step)) break;
      bool accepted = false;
      for (double lam = 1.0; lam >= 1.0 / 64.0; lam *= 0.5) {
        Vec3 trial = x;
        for (int d = 0; d < dim; ++d) trial[d] -= lam * step[d];
        const Vec3 rt = residual(trial);
        const double rtn = norm(rt, dim);
        if (rtn < (1.0 - 0.25 * lam) * rn) {
          x = trial;
          r = rt;
          rn = rtn;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;  // stalled; the final residual check reports it
    }
    if (rn > tol)
      throw SingularityError("contact map: newton failed at y = " +
                             format_vec(y, dim) + ", nu = " + format_vec(nu, dim) +
                             ", residual = " + format_double(rn));
    CospherePoint out;
    out.x = x;
    out.omega = unit_or_throw(phase.grad_x(x, nu), dim, "contact map");
    return out;
  };
  return sample;
}

SampledField lifted_kernel(const NormalOIO& op, const TransformPlan& out_plan,
                           const TransformPlan& in_plan, const KernelSliceSpec& slice) {
  check_shared_grid(out_plan, in_plan, "kernel slice");
  const GridSpec& grid = out_plan.grid();
  KernelSliceSpec s = slice;
  check_slice_spec(grid, s);
  op.validate(grid.dim);

  if (!op.multiplier_form())
    return lifted_kernel_column(op, out_plan, in_plan, s, origin_flat(grid));

  const PacketSymbol psi_out(out_plan.profiles(), grid.dim,
                             PacketIndex{s.omega, s.sigma});
  const PacketSymbol psi_in(in_plan.profiles(), grid.dim, PacketIndex{s.nu, s.tau});
  SpectralField spec;
  spec.grid = grid;
  spec.coefficients.assign(grid.size(), cplx(0.0, 0.0));
  for (std::size_t k = 0; k < spec.coefficients.size(); ++k) {
    const Vec3 zeta = spec.frequency(k);
    const double window = psi_out(zeta) * psi_in(zeta);
    if (window == 0.0) continue;
    spec.coefficients[k] = window * multiplier_value(op, zeta);
  }
  return to_field(spec);
}

SampledField lifted_kernel_column(const NormalOIO& op, const TransformPlan& out_plan,
                                  const TransformPlan& in_plan,
                                  const KernelSliceSpec& slice,
                                  std::size_t source_flat) {
  check_shared_grid(out_plan, in_plan, "kernel slice");
  const GridSpec& grid = out_plan.grid();
  KernelSliceSpec s = slice;
  check_slice_spec(grid, s);
  if (source_flat >= grid.size())
    throw StructuralError("kernel slice: source index " +
                          std::to_string(source_flat) + " outside the grid");
  op.validate(grid.dim);

  const PacketSymbol psi_out(out_plan.profiles(), grid.dim,
                             PacketIndex{s.omega, s.sigma});
  const PacketSymbol psi_in(in_plan.profiles(), grid.dim, PacketIndex{s.nu, s.tau});

  // Discrete point source of unit integral at the requested cell.
  SampledField impulse;
  impulse.grid = grid;
  impulse.values.assign(grid.size(), cplx(0.0, 0.0));
  impulse.values[source_flat] = cplx(1.0 / grid.cell_measure(), 0.0);

  const SampledField masked = apply_multiplier(psi_in.as_multiplier(), impulse);
  const SampledField mid = apply_oio(op, masked);
  return apply_multiplier(psi_out.as_multiplier(), mid);
}

void OffSingReport::validate() const {
  if (decay_order < 1)
    throw StructuralError("offsing report: decay order must be >= 1");
  if (!std::isfinite(c_fit) || c_fit < 0.0)
    throw NumericError("offsing report: c_fit must be finite and >= 0, got " +
                       format_double(c_fit));
  for (const OffSingSample& s : pairs)
    if (!std::isfinite(s.c_local) || s.c_local < 0.0 ||
        !std::isfinite(s.kernel_peak) || !std::isfinite(s.dist))
      throw NumericError("offsing report: non-finite sample at sigma = " +
                         format_double(s.sigma) + ", tau = " + format_double(s.tau));
}

void OffSingSampleSpec::validate() const {
  if (scales.empty()) throw ConfigError("offsing spec: scales must be nonempty");
  double lo = scales.front(), hi = scales.front();
  for (double s : scales) {
    if (!(s > 0.0 && s < 1.0))
      throw ConfigError("offsing spec: scales must lie in (0, 1), got " +
                        format_double(s));
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (!(hi / lo >= 8.0 * (1.0 - 1e-12)))
    throw ConfigError("offsing spec: scales must span at least three octaves, got " +
                      format_double(hi / lo));
  if (dir_stride < 1 || codir_stride < 1)
    throw ConfigError("offsing spec: strides must be >= 1");
}

OffSingReport offsing_fit(const NormalOIO& op, const TransformPlan& out_plan,
                          const TransformPlan& in_plan, int decay_order,
                          const OffSingSampleSpec& spec,
                          const ContactMapSample* map_override) {
  check_shared_grid(out_plan, in_plan, "offsing fit");
  spec.validate();
  if (decay_order < 1 || decay_order > 8)
    throw ConfigError("offsing fit: decay order must lie in [1, 8], got " +
                      std::to_string(decay_order));
  const GridSpec& grid = out_plan.grid();
  const int dim = grid.dim;
  op.validate(dim);
  const TorusGeometry torus{dim, grid.extent};

  const ContactMapSample contact =
      map_override ? *map_override : induced_contact(op, dim);
  if (!contact.map) throw ConfigError("offsing fit: contact map is empty");

  const std::vector<int> out_dirs =
      strided_dirs(out_plan.sphere(), spec.dir_stride, "offsing fit");
  const std::vector<int> in_dirs =
      strided_dirs(in_plan.sphere(), spec.codir_stride, "offsing fit");

  OffSingReport report;
  report.decay_order = decay_order;
  report.grid_tag = grid.tag();
  const int n_exp = dim;

  for (double sigma : spec.scales) {
    for (double tau : spec.scales) {
      const double rho = std::min(sigma, tau);
      const double ups = std::min(sigma / tau, tau / sigma);
      const double rho_n = std::pow(rho, n_exp);
      const double ups_factor = std::pow(ups, -decay_order);
      OffSingSample best;
      best.sigma = sigma;
      best.tau = tau;
      for (int oi : out_dirs) {
        const Vec3 omega = out_plan.sphere().dirs[oi];
        for (int ii : in_dirs) {
          const Vec3 nu = in_plan.sphere().dirs[ii];
          CospherePoint source;
          source.x = kOrigin;
          source.omega = nu;
          if (contact.domain && !contact.domain(source)) continue;
          const CospherePoint mapped = contact.map(source);
          const SampledField K =
              lifted_kernel(op, out_plan, in_plan, KernelSliceSpec{sigma, tau, omega, nu});
          for (std::size_t j = 0; j < K.values.size(); ++j) {
            const double mag = std::abs(K.values[j]);
            if (mag == 0.0) continue;
            best.kernel_peak = std::max(best.kernel_peak, mag);
            CospherePoint probe;
            probe.x = K.position(j);
            probe.omega = omega;
            const double dist = quasi_dist(torus, probe, mapped);
            const double envelope_inv =
                rho_n * ups_factor * std::pow(1.0 + dist * dist / rho, decay_order);
            const double c = mag * envelope_inv;
            if (c > best.c_local) {
              best.c_local = c;
              best.x = probe.x;
              best.omega = omega;
              best.nu = nu;
              best.dist = dist;
            }
          }
        }
      }
      report.c_fit = std::max(report.c_fit, best.c_local);
      report.pairs.push_back(best);
    }
  }
  report.validate();
  return report;
}

bool offsing_refinement_stable(const OffSingReport& coarse, const OffSingReport& fine) {
  coarse.validate();
  fine.validate();
  if (coarse.decay_order != fine.decay_order)
    throw ConfigError("offsing refinement: reports use different decay orders");
  if (coarse.c_fit == 0.0 && fine.c_fit == 0.0) return true;
  if (coarse.c_fit == 0.0 || fine.c_fit == 0.0) return false;
  const double ratio = fine.c_fit / coarse.c_fit;
  return ratio <= 2.0 && ratio >= 0.5;
}

void write_offsing_csv(const std::string& path, const OffSingReport& report) {
  report.validate();
  CsvWriter csv(path);
  csv.header({"sigma", "tau", "c_local", "kernel_peak", "dist", "decay_order",
              "c_fit", "grid"});
  for (const OffSingSample& s : report.pairs) {
    csv.field(s.sigma)
        .field(s.tau)
        .field(s.c_local)
        .field(s.kernel_peak)
        .field(s.dist)
        .field(report.decay_order)
        .field(report.c_fit)
        .field(report.grid_tag);
    csv.end_row();
  }
}

std::vector<ResidualBoundRow> residual_check(const NormalOIO& op,
                                             const TransformPlan& out_plan,
                                             const TransformPlan& in_plan,
                                             int decay_order,
                                             const std::vector<double>& scales,
                                             int dir_stride) {
  check_shared_grid(out_plan, in_plan, "residual check");
  if (decay_order < 1 || decay_order > 8)
    throw ConfigError("residual check: decay order must lie in [1, 8], got " +
                      std::to_string(decay_order));
  if (scales.empty())
    throw ConfigError("residual check: scales must be nonempty");
  for (double s : scales)
    if (!(s > 0.0 && s < 1.0))
      throw ConfigError("residual check: scales must lie in (0, 1), got " +
                        format_double(s));
  const GridSpec& grid = out_plan.grid();
  op.validate(grid.dim);

  const std::vector<int> out_dirs =
      strided_dirs(out_plan.sphere(), dir_stride, "residual check");
  const std::vector<int> in_dirs =
      strided_dirs(in_plan.sphere(), dir_stride, "residual check");

  std::vector<ResidualBoundRow> rows;
  for (double sigma : scales) {
    for (double tau : scales) {
      // Source at y = 0, so the weight is 1 + |x| + 1/U(sigma) + 1/U(tau).
      const double scale_weight = 1.0 / std::min(sigma, 1.0 / sigma) +
                                  1.0 / std::min(tau, 1.0 / tau);
      ResidualBoundRow row{sigma, tau, 0.0};
      for (int oi : out_dirs) {
        for (int ii : in_dirs) {
          const SampledField K = lifted_kernel(
              op, out_plan, in_plan,
              KernelSliceSpec{sigma, tau, out_plan.sphere().dirs[oi],
                              in_plan.sphere().dirs[ii]});
          for (std::size_t j = 0; j < K.values.size(); ++j) {
            const double mag = std::abs(K.values[j]);
            if (mag == 0.0) continue;
            const double w = 1.0 + norm(K.position(j), grid.dim) + scale_weight;
            row.bound = std::max(row.bound, mag * std::pow(w, decay_order));
          }
        }
      }
      if (!std::isfinite(row.bound))
        throw NumericError("residual check: non-finite bound at sigma = " +
                           format_double(sigma) + ", tau = " + format_double(tau));
      rows.push_back(row);
    }
  }
  return rows;
}

void RatioStats::validate() const {
  if (count == 0) throw StructuralError("ratio stats: no samples");
  for (double v : {min, max, mean})
    if (!std::isfinite(v) || v < 0.0)
      throw NumericError("ratio stats: entries must be finite and >= 0");
  if (min > max) throw StructuralError("ratio stats: min exceeds max");
}

RatioStats empirical_tent_bound(const NormalOIO& op, const TransformPlan& out_plan,
                                const TransformPlan& in_plan, double p,
                                const std::vector<PhaseSpaceField>& test_set) {
  if (std::isnan(p) || p < 1.0)
    throw DomainError("empirical tent bound: p must lie in [1, inf], got " +
                      format_double(p));
  check_shared_grid(out_plan, in_plan, "empirical tent bound");
  if (test_set.empty())
    throw ConfigError("empirical tent bound: test set is empty");
  op.validate(out_plan.grid().dim);

  RatioStats stats;
  double sum = 0.0;
  for (const PhaseSpaceField& F : test_set) {
    if (!(F.geometry() == in_plan.phase_geometry()))
      throw StructuralError(
          "empirical tent bound: test field does not live on the in-plan geometry");
    const double den = tent_norm(F, p);
    if (!(den > 0.0))
      throw DomainError("empirical tent bound: test field has zero tent norm");
    const SampledField back = synthesize(in_plan, F);
    const SampledField moved = apply_oio(op, back);
    const PhaseSpaceField lifted = analyze(out_plan, moved);
    const double num = tent_norm(lifted, p);
    const double ratio = num / den;
    if (stats.count == 0) {
      stats.min = ratio;
      stats.max = ratio;
    } else {
      stats.min = std::min(stats.min, ratio);
      stats.max = std::max(stats.max, ratio);
    }
    sum += ratio;
    ++stats.count;
  }
  stats.mean = sum / static_cast<double>(stats.count);
  stats.validate();
  return stats;
}

}  // namespace fiohardy
