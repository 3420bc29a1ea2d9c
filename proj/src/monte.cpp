#include "fiohardy/monte.hpp"

#include <cmath>
#include <numbers>

#include "fiohardy/csv.hpp"
#include "fiohardy/rng.hpp"

namespace fiohardy {

namespace {

// Orthonormal tangent vectors at a unit direction.
void tangent_frame(const Vec3& w, int dim, Vec3& t1, Vec3& t2) {
  if (dim == 2) {
    t1 = {-w[1], w[0], 0.0};
    t2 = {0.0, 0.0, 0.0};
    return;
  }
  // Pick the world axis least aligned with w, project out w, normalize.
  int least = 0;
  for (int d = 1; d < 3; ++d)
    if (std::abs(w[d]) < std::abs(w[least])) least = d;
  Vec3 e{0.0, 0.0, 0.0};
  e[least] = 1.0;
  const double proj = dot(e, w, 3);
  t1 = {e[0] - proj * w[0], e[1] - proj * w[1], e[2] - proj * w[2]};
  const double n1 = norm(t1, 3);
  for (int d = 0; d < 3; ++d) t1[d] /= n1;
  // t2 = w x t1.
  t2 = {w[1] * t1[2] - w[2] * t1[1], w[2] * t1[0] - w[0] * t1[2],
        w[0] * t1[1] - w[1] * t1[0]};
}

Vec3 rotate_towards(const Vec3& w, const Vec3& t, double angle, int dim) {
  Vec3 out;
  const double c = std::cos(angle), s = std::sin(angle);
  for (int d = 0; d < 3; ++d) out[d] = c * w[d] + s * t[d];
  // Guard against rounding drift away from the sphere.
  const double n = norm(out, dim);
  for (int d = 0; d < dim; ++d) out[d] /= n;
  return out;
}

Vec3 random_direction(const CounterRng& rng, std::uint64_t c, int dim) {
  if (dim == 2) {
    const double th = rng.uniform(c, -std::numbers::pi, std::numbers::pi);
    return {std::cos(th), std::sin(th), 0.0};
  }
  const double z = rng.uniform(c, -1.0, 1.0);
  const double phi = rng.uniform(c + 1, -std::numbers::pi, std::numbers::pi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace

CospherePoint random_cosphere_point(const TorusGeometry& g, std::uint64_t seed,
                                    std::uint64_t counter) {
  CounterRng rng(seed, 0x706f696e74);
  CospherePoint p;
  const std::uint64_t base = counter * 8;
  for (int d = 0; d < g.dim; ++d)
    p.x[d] = rng.uniform(base + d, -0.5 * g.extent, 0.5 * g.extent);
  p.omega = random_direction(rng, base + 4, g.dim);
  return p;
}

CospherePoint perturb_cosphere_point(const TorusGeometry& g, const CospherePoint& p,
                                     double scale, std::uint64_t seed,
                                     std::uint64_t counter) {
  CounterRng rng(seed, 0x70657274);
  const std::uint64_t base = counter * 8;
  Vec3 t1, t2;
  tangent_frame(p.omega, g.dim, t1, t2);

  const double a = rng.uniform(base + 0, -1.0, 1.0);  // along omega, parabolic cost
  const double b = rng.uniform(base + 1, -1.0, 1.0);  // transverse
  const double c = rng.uniform(base + 2, -1.0, 1.0);  // angular

  Vec3 perp = t1;
  if (g.dim == 3) {
    const double phi = rng.uniform(base + 3, -std::numbers::pi, std::numbers::pi);
    for (int d = 0; d < 3; ++d)
      perp[d] = std::cos(phi) * t1[d] + std::sin(phi) * t2[d];
  } else if (b < 0.0) {
    // The sign of b already covers both transverse senses.
  }

  CospherePoint q;
  for (int d = 0; d < 3; ++d)
    q.x[d] = p.x[d] + a * scale * scale * p.omega[d] + b * scale * perp[d];

  Vec3 rot_plane = t1;
  if (g.dim == 3) {
    const double phi = rng.uniform(base + 4, -std::numbers::pi, std::numbers::pi);
    for (int d = 0; d < 3; ++d)
      rot_plane[d] = std::cos(phi) * t1[d] + std::sin(phi) * t2[d];
  }
  q.omega = rotate_towards(p.omega, rot_plane, c * scale, g.dim);
  return q;
}

VolumeEstimate ball_volume(const TorusGeometry& g, const CospherePoint& center,
                           double tau, std::uint64_t trials, std::uint64_t seed) {
  g.validate();
  if (!(tau > 0.0)) throw ConfigError("ball_volume: tau must be positive");
  if (trials < 1000)
    throw ConfigError("ball_volume: trials must be at least 1000, got " +
                      std::to_string(trials));

  const int n = g.dim;
  const double L = g.extent;
  CounterRng rng(seed, 0x766f6c);

  // Angular proposal: spherical cap of chordal radius min(tau, 2) around the
  // center direction (the whole sphere once tau >= 2).
  const double chord = std::min(tau, 2.0);
  const double cap_angle = 2.0 * std::asin(0.5 * chord);
  double angular_measure;
  if (n == 2) {
    angular_measure = 2.0 * cap_angle;
  } else {
    angular_measure = 2.0 * std::numbers::pi * (1.0 - std::cos(cap_angle));
  }

  // Position proposal: either the anisotropic box spanned by the center
  // direction (ball members satisfy |<omega, dx>| <= tau^2 and |dx| <= tau),
  // or the whole fundamental cell once the box could wrap around the torus.
  const bool whole_cell = tau >= 0.25 * L;
  const double a = std::min(tau * tau, tau);
  const double b = tau;
  double pos_measure = 1.0;
  if (whole_cell) {
    for (int d = 0; d < n; ++d) pos_measure *= L;
  } else {
    pos_measure = 2.0 * a;
    for (int d = 1; d < n; ++d) pos_measure *= 2.0 * b;
  }
  const double measure = pos_measure * angular_measure;

  Vec3 t1, t2;
  tangent_frame(center.omega, n, t1, t2);

  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const std::uint64_t base = i * 8;
    CospherePoint q;
    if (whole_cell) {
      for (int d = 0; d < n; ++d)
        q.x[d] = center.x[d] + rng.uniform(base + d, -0.5 * L, 0.5 * L);
    } else {
      const double u = rng.uniform(base + 0, -a, a);
      const double v1 = rng.uniform(base + 1, -b, b);
      const double v2 = n == 3 ? rng.uniform(base + 2, -b, b) : 0.0;
      for (int d = 0; d < 3; ++d)
        q.x[d] = center.x[d] + u * center.omega[d] + v1 * t1[d] + v2 * t2[d];
    }
    if (n == 2) {
      const double psi = rng.uniform(base + 4, -cap_angle, cap_angle);
      q.omega = rotate_towards(center.omega, t1, psi, 2);
    } else {
      const double cz = rng.uniform(base + 4, std::cos(cap_angle), 1.0);
      const double phi = rng.uniform(base + 5, -std::numbers::pi, std::numbers::pi);
      const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
      for (int d = 0; d < 3; ++d)
        q.omega[d] = cz * center.omega[d] + sz * (std::cos(phi) * t1[d] + std::sin(phi) * t2[d]);
    }
    if (quasi_dist(g, center, q) <= tau) ++hits;
  }

  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  VolumeEstimate e;
  e.tau = tau;
  e.value = measure * p;
  e.stderr_ = measure * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  e.trials = trials;
  e.seed = seed;
  return e;
}

std::vector<VolumeEstimate> volume_curve(const TorusGeometry& g,
                                         const CospherePoint& center,
                                         const std::vector<double>& taus,
                                         std::uint64_t trials, std::uint64_t seed) {
  std::vector<VolumeEstimate> out;
  out.reserve(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i)
    out.push_back(ball_volume(g, center, taus[i], trials, seed + i));
  return out;
}

void write_volume_csv(const std::string& path, const std::vector<VolumeEstimate>& rows) {
  CsvWriter csv(path);
  csv.header({"tau", "volume", "stderr", "trials", "seed"});
  for (const VolumeEstimate& e : rows) {
    csv.field(e.tau).field(e.value).field(e.stderr_).field(e.trials).field(e.seed);
    csv.end_row();
  }
}

RatioRange bilipschitz_ratio(const TorusGeometry& g, const ContactMapSample& map,
                             std::uint64_t pairs, std::uint64_t seed) {
  g.validate();
  if (!map.map) throw ConfigError("bilipschitz_ratio: map is empty");
  CounterRng rng(seed, 0x7363616c65);
  RatioRange r;
  r.max_ratio = 0.0;
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < pairs; ++i) {
    const CospherePoint p = random_cosphere_point(g, seed, 2 * i);
    const double s = rng.log_uniform(i, 1e-3, 1.0);
    const CospherePoint q = perturb_cosphere_point(g, p, s, seed, 2 * i + 1);
    if (map.domain && (!map.domain(p) || !map.domain(q))) continue;
    const double d0 = quasi_dist(g, p, q);
    if (d0 < 1e-12) continue;
    const double d1 = quasi_dist(g, map.map(p), map.map(q));
    const double ratio = d1 / d0;
    r.max_ratio = std::max(r.max_ratio, ratio);
    r.min_ratio = std::min(r.min_ratio, ratio);
    ++r.used;
  }
  if (r.used == 0)
    throw EmptySampleError("bilipschitz_ratio: domain predicate rejected all pairs");
  return r;
}

double quasi_triangle_constant(const TorusGeometry& g, std::uint64_t triples,
                               std::uint64_t seed) {
  g.validate();
  CounterRng rng(seed, 0x74726960);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < triples; ++i) {
    const CospherePoint p = random_cosphere_point(g, seed, 3 * i);
    const double s1 = rng.log_uniform(2 * i, 1e-3, 1.0);
    const double s2 = rng.log_uniform(2 * i + 1, 1e-3, 1.0);
    const CospherePoint q = perturb_cosphere_point(g, p, s1, seed, 3 * i + 1);
    const CospherePoint rr = perturb_cosphere_point(g, q, s2, seed, 3 * i + 2);
    const double den = quasi_dist(g, p, q) + quasi_dist(g, q, rr);
    if (den < 1e-14) continue;
    worst = std::max(worst, quasi_dist(g, p, rr) / den);
  }
  return worst;
}

}  // namespace fiohardy
