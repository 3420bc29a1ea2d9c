#include "fiohardy/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fiohardy/rng.hpp"

namespace fiohardy {

namespace {

std::string describe_frequency(const Vec3& z, int dim) {
  std::ostringstream ss;
  ss << "(";
  for (int d = 0; d < dim; ++d) {
    if (d) ss << ", ";
    ss << z[d];
  }
  ss << ")";
  return ss.str();
}

}  // namespace

SpectralField apply_multiplier_spectral(const Multiplier& m, const SpectralField& F) {
  F.validate();
  SpectralField out;
  out.grid = F.grid;
  out.coefficients.resize(F.coefficients.size());
  const std::size_t n = F.coefficients.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 z = F.frequency(k);
    const cplx mv = m(z);
    if (!std::isfinite(mv.real()) || !std::isfinite(mv.imag()))
      throw NumericError("apply_multiplier: non-finite symbol value at frequency " +
                         describe_frequency(z, F.grid.dim));
    out.coefficients[k] = mv * F.coefficients[k];
  }
  return out;
}

SampledField apply_multiplier(const Multiplier& m, const SampledField& f) {
  return to_field(apply_multiplier_spectral(m, to_spectrum(f)));
}

double lp_norm(const SampledField& f, double p) {
  f.validate();
  if (p == std::numeric_limits<double>::infinity()) return max_abs(f);
  if (!(p >= 1.0)) throw ConfigError("lp_norm: p must be >= 1 or infinity");
  long double acc = 0.0;
  if (p == 2.0) {
    for (const cplx& v : f.values) acc += std::norm(v);
  } else if (p == 1.0) {
    for (const cplx& v : f.values) acc += std::abs(v);
  } else {
    for (const cplx& v : f.values) acc += std::pow(std::abs(v), static_cast<long double>(p));
  }
  acc *= static_cast<long double>(f.grid.cell_measure());
  return static_cast<double>(std::pow(acc, 1.0L / static_cast<long double>(p)));
}

double sobolev_norm(const SampledField& f, double s, double p) {
  return lp_norm(apply_multiplier(bessel_power(f.grid.dim, s), f), p);
}

Multiplier bessel_power(int dim, double s) {
  return [dim, s](const Vec3& z) -> cplx {
    return std::pow(1.0 + norm2(z, dim), 0.5 * s);
  };
}

Multiplier abs_power(int dim, double s, cplx at_zero) {
  return [dim, s, at_zero](const Vec3& z) -> cplx {
    const double r = norm(z, dim);
    if (r == 0.0) return at_zero;
    return std::pow(r, s);
  };
}

SampledField gaussian_field(const GridSpec& g, double width, const Vec3& center) {
  g.validate();
  SampledField f;
  f.grid = g;
  f.values.resize(g.size());
  const double inv2w2 = 1.0 / (2.0 * width * width);
  int idx[3] = {0, 0, 0};
  for (std::size_t j = 0; j < f.values.size(); ++j) {
    unflatten(g, j, idx);
    double r2 = 0.0;
    for (int d = 0; d < g.dim; ++d) {
      const double dx = g.coord(idx[d]) - center[d];
      r2 += dx * dx;
    }
    f.values[j] = std::exp(-r2 * inv2w2);
  }
  return f;
}

SampledField plane_wave(const GridSpec& g, const int* signed_k) {
  g.validate();
  SampledField f;
  f.grid = g;
  f.values.resize(g.size());
  const double dz = g.freq_step();
  int idx[3] = {0, 0, 0};
  for (std::size_t j = 0; j < f.values.size(); ++j) {
    unflatten(g, j, idx);
    double phase = 0.0;
    for (int d = 0; d < g.dim; ++d) phase += dz * signed_k[d] * g.coord(idx[d]);
    f.values[j] = cplx(std::cos(phase), std::sin(phase));
  }
  return f;
}

SampledField modulated_gaussian(const GridSpec& g, double width, const Vec3& k,
                                const Vec3& center) {
  SampledField f = gaussian_field(g, width, center);
  int idx[3] = {0, 0, 0};
  for (std::size_t j = 0; j < f.values.size(); ++j) {
    unflatten(g, j, idx);
    double phase = 0.0;
    for (int d = 0; d < g.dim; ++d) phase += k[d] * (g.coord(idx[d]) - center[d]);
    f.values[j] *= cplx(std::cos(phase), std::sin(phase));
  }
  return f;
}

SampledField random_band_limited(const GridSpec& g, double band_lo, double band_hi,
                                 std::uint64_t seed) {
  g.validate();
  if (!(band_lo >= 0.0) || !(band_hi > band_lo))
    throw ConfigError("random_band_limited: need 0 <= band_lo < band_hi");
  SpectralField F;
  F.grid = g;
  F.coefficients.assign(g.size(), cplx(0.0, 0.0));
  CounterRng rng(seed, 0x62616e64);
  bool any = false;
  for (std::size_t k = 0; k < F.coefficients.size(); ++k) {
    const Vec3 z = F.frequency(k);
    const double r = norm(z, g.dim);
    if (r < band_lo || r > band_hi) continue;
    const auto gp = rng.gaussian_pair(k);
    F.coefficients[k] = cplx(gp[0], gp[1]);
    any = true;
  }
  if (!any)
    throw ResolutionError("random_band_limited: no lattice frequencies in band [" +
                          std::to_string(band_lo) + ", " + std::to_string(band_hi) + "]");
  SampledField f = to_field(F);
  const double n2 = lp_norm(f, 2.0);
  return scale(f, 1.0 / n2);
}

double boundary_max(const SampledField& f, double margin) {
  f.validate();
  const GridSpec& g = f.grid;
  double m = 0.0;
  int idx[3] = {0, 0, 0};
  for (std::size_t j = 0; j < f.values.size(); ++j) {
    unflatten(g, j, idx);
    double edge = std::numeric_limits<double>::infinity();
    for (int d = 0; d < g.dim; ++d) {
      const double x = g.coord(idx[d]);
      edge = std::min(edge, 0.5 * g.extent - std::abs(x));
    }
    if (edge <= margin) m = std::max(m, std::abs(f.values[j]));
  }
  return m;
}

SampledField scale(const SampledField& f, cplx a) {
  SampledField out = f;
  for (cplx& v : out.values) v *= a;
  return out;
}

SampledField add(const SampledField& f, const SampledField& g) {
  if (!(f.grid == g.grid)) throw StructuralError("add: grids differ");
  SampledField out = f;
  for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] += g.values[j];
  return out;
}

SampledField sub(const SampledField& f, const SampledField& g) {
  if (!(f.grid == g.grid)) throw StructuralError("sub: grids differ");
  SampledField out = f;
  for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] -= g.values[j];
  return out;
}

double max_abs(const SampledField& f) {
  double m = 0.0;
  for (const cplx& v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const SampledField& f, const SampledField& g) {
  if (!(f.grid == g.grid)) throw StructuralError("max_abs_diff: grids differ");
  double m = 0.0;
  for (std::size_t j = 0; j < f.values.size(); ++j)
    m = std::max(m, std::abs(f.values[j] - g.values[j]));
  return m;
}

cplx inner_product(const SampledField& f, const SampledField& g) {
  if (!(f.grid == g.grid)) throw StructuralError("inner_product: grids differ");
  cplx s = 0.0;
  for (std::size_t j = 0; j < f.values.size(); ++j)
    s += f.values[j] * std::conj(g.values[j]);
  return s * f.grid.cell_measure();
}

}  // namespace fiohardy
