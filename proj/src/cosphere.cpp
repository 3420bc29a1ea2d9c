#include "fiohardy/cosphere.hpp"

#include <cmath>
#include <numbers>

namespace fiohardy {

double quasi_dist(const TorusGeometry& g, const CospherePoint& p, const CospherePoint& q) {
  const Vec3 dx = minimal_image(g, {p.x[0] - q.x[0], p.x[1] - q.x[1], p.x[2] - q.x[2]});
  Vec3 dw{p.omega[0] - q.omega[0], p.omega[1] - q.omega[1], p.omega[2] - q.omega[2]};
  const double s = std::abs(dot(p.omega, dx, g.dim)) + std::abs(dot(q.omega, dx, g.dim)) +
                   norm2(dx, g.dim) + norm2(dw, g.dim);
  return std::sqrt(s);
}

double reduced_quasi_dist(const TorusGeometry& g, const CospherePoint& p,
                          const CospherePoint& q) {
  const Vec3 dx = minimal_image(g, {p.x[0] - q.x[0], p.x[1] - q.x[1], p.x[2] - q.x[2]});
  Vec3 dw{p.omega[0] - q.omega[0], p.omega[1] - q.omega[1], p.omega[2] - q.omega[2]};
  const double s = std::abs(dot(p.omega, dx, g.dim)) + norm2(dx, g.dim) + norm2(dw, g.dim);
  return std::sqrt(s);
}

bool in_tent(const TorusGeometry& g, const CospherePoint& point, double sigma,
             const BallSpec& ball) {
  if (!(sigma > 0.0)) throw DomainError("in_tent: sigma must be positive");
  return ball.radius - quasi_dist(g, point, ball.center) >= std::sqrt(sigma);
}

double SphereGrid::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void SphereGrid::validate() const {
  if (dim != 2 && dim != 3) throw StructuralError("sphere grid: dim must be 2 or 3");
  if (dirs.size() != weights.size() || dirs.empty())
    throw StructuralError("sphere grid: empty or mismatched arrays");
  for (const Vec3& w : dirs)
    if (std::abs(norm(w, dim) - 1.0) > 1e-12)
      throw StructuralError("sphere grid: non-unit direction");
  const double sphere_measure = dim == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  if (std::abs(total_weight() - sphere_measure) > 1e-3 * sphere_measure)
    throw StructuralError("sphere grid: weights do not sum to the sphere measure");
}

SphereGrid SphereGrid::uniform_circle(int count) {
  if (count < 4) throw ConfigError("sphere grid: need at least 4 directions");
  SphereGrid s;
  s.dim = 2;
  s.dirs.resize(count);
  s.weights.assign(count, 2.0 * std::numbers::pi / count);
  if (count % 8 == 0) {
    // Evaluate cos/sin only on the first octant and fill the rest by exact
    // component swaps and sign flips. This makes the direction set bitwise
    // symmetric under quarter-turn rotations and axis reflections, which the
    // ball-average convolution engine relies on to share kernels between
    // symmetry-equivalent direction pairs.
    const int eighth = count / 8;
    const int quarter = count / 4;
    const int half = count / 2;
    for (int r = 0; r <= eighth; ++r) {
      const double th = 2.0 * std::numbers::pi * r / count;
      const double c = std::cos(th);
      const double v = std::sin(th);
      s.dirs[r] = {c, v, 0.0};
      s.dirs[quarter - r] = {v, c, 0.0};
      s.dirs[quarter + r] = {-v, c, 0.0};
      s.dirs[half - r] = {-c, v, 0.0};
      s.dirs[half + r] = {-c, -v, 0.0};
      s.dirs[3 * quarter - r] = {-v, -c, 0.0};
      s.dirs[3 * quarter + r] = {v, -c, 0.0};
      s.dirs[(count - r) % count] = {c, -v, 0.0};
    }
  } else {
    for (int i = 0; i < count; ++i) {
      const double th = 2.0 * std::numbers::pi * i / count;
      s.dirs[i] = {std::cos(th), std::sin(th), 0.0};
    }
  }
  return s;
}

SphereGrid SphereGrid::fibonacci_sphere(int count) {
  if (count < 8) throw ConfigError("sphere grid: need at least 8 directions");
  SphereGrid s;
  s.dim = 3;
  s.dirs.resize(count);
  s.weights.assign(count, 4.0 * std::numbers::pi / count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    s.dirs[i] = {r * std::cos(phi), r * std::sin(phi), z};
  }
  return s;
}

SphereGrid SphereGrid::make(int dim, int count) {
  if (dim == 2) return uniform_circle(count);
  if (dim == 3) return fibonacci_sphere(count);
  throw StructuralError("sphere grid: dim must be 2 or 3");
}

void SigmaGrid::validate() const {
  if (!(sigma_min > 0.0) || !(sigma_min < 1.0))
    throw StructuralError("sigma grid: sigma_min must lie in (0, 1)");
  if (packet_count < 1) throw StructuralError("sigma grid: need at least one packet level");
  if (levels.size() != weights.size() ||
      levels.size() != static_cast<std::size_t>(packet_count) + 1)
    throw StructuralError("sigma grid: inconsistent arrays");
  for (std::size_t j = 1; j < levels.size(); ++j)
    if (!(levels[j] > levels[j - 1]))
      throw StructuralError("sigma grid: levels must be strictly increasing");
  if (std::abs(levels.back() - std::numbers::e) > 1e-12)
    throw StructuralError("sigma grid: cap level must equal e");
}

SigmaGrid SigmaGrid::geometric(double sigma_min, int packet_count) {
  SigmaGrid s;
  s.sigma_min = sigma_min;
  s.packet_count = packet_count;
  if (!(sigma_min > 0.0) || !(sigma_min < 1.0))
    throw ConfigError("sigma grid: sigma_min must lie in (0, 1)");
  if (packet_count < 1) throw ConfigError("sigma grid: packet_count must be >= 1");
  s.log_step = std::log(1.0 / sigma_min) / packet_count;
  s.levels.resize(packet_count + 1);
  s.weights.assign(packet_count + 1, s.log_step);
  for (int j = 0; j < packet_count; ++j)
    s.levels[j] = sigma_min * std::exp((j + 0.5) * s.log_step);
  s.levels[packet_count] = std::numbers::e;
  s.weights[packet_count] = 1.0;
  s.validate();
  return s;
}

}  // namespace fiohardy
