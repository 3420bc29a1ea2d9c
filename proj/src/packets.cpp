#include "fiohardy/packets.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "fiohardy/errors.hpp"
#include "fiohardy/fft.hpp"

namespace fiohardy {

namespace {

double vec_norm(const Vec3& v, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += v[d] * v[d];
  return std::sqrt(s);
}

}  // namespace

PacketSymbol::PacketSymbol(const ProfilePair& profiles, int dim,
                           const PacketIndex& idx)
    : profiles_(&profiles), dim_(dim), omega_(idx.omega), sigma_(idx.sigma) {
  if (dim_ != 2 && dim_ != 3)
    throw ConfigError("packet symbol requires dim 2 or 3");
  if (!(sigma_ > 0.0) || sigma_ >= 1.0)
    throw DomainError("packet scale must lie in (0, 1); the band at scales "
                      ">= 1 is handled by the cap symbol");
  const double len = vec_norm(omega_, dim_);
  if (std::fabs(len - 1.0) > 1e-9)
    throw DomainError("packet direction must be a unit vector");
  inv_root_sigma_ = 1.0 / std::sqrt(sigma_);
  c_sigma_ = profiles.direction_normalization(dim_, sigma_);
}

double PacketSymbol::operator()(const Vec3& zeta) const {
  const double r = vec_norm(zeta, dim_);
  if (r == 0.0) return 0.0;
  const double t = sigma_ * r;
  if (t <= 0.5 || t >= 2.0) return 0.0;
  double chord2 = 0.0;
  for (int d = 0; d < dim_; ++d) {
    const double diff = zeta[d] / r - omega_[d];
    chord2 += diff * diff;
  }
  const double angular = profiles_->step(std::sqrt(chord2) * inv_root_sigma_);
  if (angular == 0.0) return 0.0;
  return c_sigma_ * angular * profiles_->radial(t);
}

Multiplier PacketSymbol::as_multiplier() const {
  PacketSymbol copy = *this;
  return [copy](const Vec3& zeta) { return std::complex<double>(copy(zeta), 0.0); };
}

double cap_symbol(const ProfilePair& profiles, int dim, const Vec3& zeta) {
  return profiles.cap(vec_norm(zeta, dim)) / std::sqrt(sphere_measure(dim));
}

double plancherel_defect(const Vec3& zeta, const ProfilePair& profiles,
                         const SphereGrid& sphere, const SigmaGrid& sigmas) {
  sphere.validate();
  sigmas.validate();
  const int dim = sphere.dim;
  const double r = vec_norm(zeta, dim);
  if (r == 0.0)
    throw DomainError("frame defect is undefined at frequency zero");
  Vec3 zhat{0.0, 0.0, 0.0};
  for (int d = 0; d < dim; ++d) zhat[d] = zeta[d] / r;
  double sum = 0.0;
  for (int j = 0; j < sigmas.count(); ++j) {
    if (sigmas.is_cap(j)) {
      const double c = profiles.cap(r);
      sum += c * c;
      continue;
    }
    const double sigma = sigmas.levels[j];
    const double rad = profiles.radial(sigma * r);
    if (rad == 0.0) continue;
    const double c_sigma = profiles.direction_normalization(dim, sigma);
    const double inv_root = 1.0 / std::sqrt(sigma);
    double angular = 0.0;
    for (int i = 0; i < sphere.count(); ++i) {
      double chord2 = 0.0;
      for (int d = 0; d < dim; ++d) {
        const double diff = zhat[d] - sphere.dirs[i][d];
        chord2 += diff * diff;
      }
      const double v = profiles.step(std::sqrt(chord2) * inv_root);
      if (v != 0.0) angular += sphere.weights[i] * v * v;
    }
    sum += sigmas.weights[j] * c_sigma * c_sigma * rad * rad * angular;
  }
  return std::fabs(sum - 1.0);
}

DecayReport packet_space_decay(const PacketIndex& idx,
                               const ProfilePair& profiles,
                               const GridSpec& grid) {
  grid.validate();
  const PacketSymbol symbol(profiles, grid.dim, idx);
  SpectralField spec;
  spec.grid = grid;
  spec.coefficients.assign(grid.size(), {0.0, 0.0});
  std::size_t nonzero = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = symbol(spec.frequency(k));
    if (v != 0.0) {
      spec.coefficients[k] = {v, 0.0};
      ++nonzero;
    }
  }
  if (nonzero < 4)
    throw ResolutionError(
        "packet support covers fewer than 4 frequency lattice cells; refine "
        "the grid or enlarge the scale");
  const SampledField f = to_field(spec);

  DecayReport report;
  report.support_points = nonzero;
  const double sigma = idx.sigma;
  const int n = grid.dim;
  const double cell = grid.cell_measure();
  double l1 = 0.0, msum = 0.0, m_par = 0.0, m_tot = 0.0;
  double sup[3] = {0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < f.values.size(); ++j) {
    const double a = std::abs(f.values[j]);
    if (a == 0.0) continue;
    const Vec3 x = f.position(j);
    double r2 = 0.0, par = 0.0;
    for (int d = 0; d < n; ++d) {
      r2 += x[d] * x[d];
      par += idx.omega[d] * x[d];
    }
    const double w = 1.0 + r2 / sigma + par * par / (sigma * sigma);
    double wn = 1.0;
    for (int N = 0; N < 3; ++N) {
      wn *= w;
      sup[N] = std::max(sup[N], a * wn);
    }
    l1 += a;
    const double a2 = a * a;
    msum += a2;
    m_par += a2 * par * par;
    m_tot += a2 * r2;
  }
  const double scale_sup = std::pow(sigma, (3.0 * n + 1.0) / 4.0);
  for (int N = 0; N < 3; ++N) report.scaled_sup[N] = scale_sup * sup[N];
  report.l1_mass = std::pow(sigma, (n - 1.0) / 4.0) * l1 * cell;
  if (msum > 0.0) {
    report.along_radius = std::sqrt(m_par / msum);
    report.across_radius = std::sqrt((m_tot - m_par) / msum / (n - 1.0));
  }
  return report;
}

namespace {

// Fixed circle quadrature for the direction average on S^1, refined by
// doubling until the averaged multiplier at a reference direction
// stabilizes.  On S^2 the average is computed exactly by the azimuthal
// reduction instead (see reproducing_constant), so no node set is built.
void build_average_quadrature(double sigma, const ProfilePair& pf,
                              std::vector<Vec3>* nodes,
                              std::vector<double>* weights) {
  const double inv_root = 1.0 / std::sqrt(sigma);
  const double c_sigma = pf.direction_normalization(2, sigma);
  auto value_at_pole = [&](const std::vector<Vec3>& ns,
                           const std::vector<double>& ws) {
    double sum = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i)
      sum += ws[i] * pf.step(std::hypot(ns[i][0] - 1.0, ns[i][1]) * inv_root);
    return c_sigma * sum;
  };
  double prev = 0.0;
  bool have_prev = false;
  for (int level = 0; level < 9; ++level) {
    const int count = 64 << level;
    std::vector<Vec3> ns;
    std::vector<double> ws;
    ns.reserve(count);
    for (int i = 0; i < count; ++i) {
      const double th = 2.0 * M_PI * i / count;
      ns.push_back({std::cos(th), std::sin(th), 0.0});
    }
    ws.assign(count, 2.0 * M_PI / count);
    const double val = value_at_pole(ns, ws);
    const bool converged =
        have_prev && std::fabs(val - prev) <= 1e-9 * std::max(1.0, std::fabs(val));
    prev = val;
    have_prev = true;
    *nodes = std::move(ns);
    *weights = std::move(ws);
    if (converged) return;
  }
}

}  // namespace

ReproducingFit reproducing_constant(double sigma, const ProfilePair& profiles,
                                    const SampledField& f) {
  f.validate();
  if (!(sigma > 0.0) || sigma >= 1.0)
    throw DomainError("reproducing constant requires a scale in (0, 1)");
  const int dim = f.grid.dim;
  const SpectralField spec = to_spectrum(f);
  const double total = spectral_l2_norm(spec);
  if (!(total > 0.0)) throw DomainError("reproducing constant of a zero field");
  const std::size_t zero_flat = 0;  // storage index of frequency zero
  if (std::abs(spec.coefficients[zero_flat]) > 1e-9 * total)
    throw DomainError(
        "input carries mass at frequency zero where the angular window is "
        "undefined; band-limit the input away from zero");

  ReproducingFit fit;
  const double c_sigma = profiles.direction_normalization(dim, sigma);
  const double inv_root = 1.0 / std::sqrt(sigma);
  const double prefactor = std::pow(sigma, -(dim - 1.0) / 4.0);
  double constant3 = 0.0;
  if (dim == 2) {
    build_average_quadrature(sigma, profiles, &fit.nodes, &fit.weights);
  } else {
    // On S^2 the sphere average of the angular window is exactly invariant
    // under rotations of the frequency direction, so it reduces to a single
    // polar integral; no discrete node set is involved.
    const double theta_max = 2.0 * std::asin(std::min(1.0, std::sqrt(sigma)));
    const double polar = refine_integral(
        [&](double th) {
          return profiles.step(2.0 * std::sin(0.5 * th) * inv_root) *
                 std::sin(th);
        },
        0.0, theta_max, 1e-12);
    constant3 = prefactor * c_sigma * 2.0 * M_PI * polar;
  }

  SpectralField lhs = spec;
  long double dot = 0.0L, nrm2 = 0.0L, res2 = 0.0L;
  for (std::size_t k = 0; k < spec.coefficients.size(); ++k) {
    const std::complex<double> c = spec.coefficients[k];
    if (c == std::complex<double>(0.0, 0.0)) {
      lhs.coefficients[k] = c;
      continue;
    }
    const Vec3 zeta = spec.frequency(k);
    const double r = vec_norm(zeta, dim);
    double m = 0.0;
    if (r > 0.0 && dim == 2) {
      double sum = 0.0;
      for (std::size_t i = 0; i < fit.nodes.size(); ++i) {
        const double v = profiles.step(
            std::hypot(zeta[0] / r - fit.nodes[i][0],
                       zeta[1] / r - fit.nodes[i][1]) *
            inv_root);
        if (v != 0.0) sum += fit.weights[i] * v;
      }
      m = prefactor * c_sigma * sum;
    } else if (r > 0.0) {
      m = constant3;
    }
    lhs.coefficients[k] = m * c;
    dot += static_cast<long double>(m) * std::norm(c);
    nrm2 += std::norm(c);
  }
  fit.c_estimate = static_cast<double>(dot / nrm2);
  for (std::size_t k = 0; k < spec.coefficients.size(); ++k)
    res2 += std::norm(lhs.coefficients[k] -
                      fit.c_estimate * spec.coefficients[k]);
  fit.residual = std::sqrt(static_cast<double>(res2 / nrm2));
  return fit;
}

}  // namespace fiohardy
