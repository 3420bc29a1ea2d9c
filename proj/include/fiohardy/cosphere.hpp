#pragma once

#include <functional>
#include <vector>

#include "fiohardy/grid.hpp"

namespace fiohardy {

// Position space is the torus [-extent/2, extent/2)^dim; the direction factor
// is the unit sphere S^{dim-1} with the chordal (Euclidean) distance.
struct TorusGeometry {
  int dim = 2;
  double extent = 1.5;

  void validate() const {
    if (dim != 2 && dim != 3)
      throw StructuralError("geometry: dim must be 2 or 3");
    if (!(extent > 0.0)) throw StructuralError("geometry: extent must be positive");
  }
};

// A point of the unit cosphere bundle: position x, unit direction omega.
struct CospherePoint {
  Vec3 x{0.0, 0.0, 0.0};
  Vec3 omega{1.0, 0.0, 0.0};
};

inline CospherePoint make_point2(double x0, double x1, double w0, double w1) {
  CospherePoint p;
  p.x = {x0, x1, 0.0};
  p.omega = {w0, w1, 0.0};
  return p;
}

// Per-axis minimal image of a displacement on the torus.
inline Vec3 minimal_image(const TorusGeometry& g, const Vec3& delta) {
  Vec3 out = delta;
  for (int d = 0; d < g.dim; ++d)
    out[d] -= g.extent * std::nearbyint(out[d] / g.extent);
  return out;
}

// Anisotropic quasi-distance on the cosphere bundle:
//   d(p, q)^2 = |<omega, dx>| + |<nu, dx>| + |dx|^2 + |omega - nu|^2
// with dx the minimal-image displacement. Position offsets along either
// direction cost |dx| ~ tau^2 while transverse offsets cost |dx| ~ tau, which
// is the parabolic scaling of wave-packet supports.
double quasi_dist(const TorusGeometry& g, const CospherePoint& p, const CospherePoint& q);

// One-sided variant that keeps only the first point's direction in the
// position term; equivalent to quasi_dist within a factor of sqrt(2).
double reduced_quasi_dist(const TorusGeometry& g, const CospherePoint& p,
                          const CospherePoint& q);

// Ball in the quasi-distance.
struct BallSpec {
  CospherePoint center;
  double radius = 1.0;
};

// Tent membership: (point, sigma) lies in the tent over `ball` when the ball
// boundary is at least sqrt(sigma) away, i.e. radius - d(point, center) >= sqrt(sigma).
bool in_tent(const TorusGeometry& g, const CospherePoint& point, double sigma,
             const BallSpec& ball);

// Surface measure of the unit sphere of directions (2 pi or 4 pi).
inline double sphere_measure(int dim) {
  if (dim == 2) return 2.0 * 3.14159265358979323846;
  if (dim == 3) return 4.0 * 3.14159265358979323846;
  throw StructuralError("sphere_measure: dim must be 2 or 3");
}

// Quadrature grid on the unit sphere of directions.
struct SphereGrid {
  int dim = 2;
  std::vector<Vec3> dirs;
  std::vector<double> weights;

  int count() const { return static_cast<int>(dirs.size()); }
  double total_weight() const;
  void validate() const;

  // dirs[i] = (cos(2 pi i / count), sin(2 pi i / count)), equal weights.
  static SphereGrid uniform_circle(int count);
  // Fibonacci point set on S^2, equal weights.
  static SphereGrid fibonacci_sphere(int count);
  static SphereGrid make(int dim, int count);
};

// Geometric scale grid: packet levels at the log-midpoints of
// [sigma_min, 1) plus one final coarse "cap" level at sigma = e with unit
// log-weight, so that sum_j weights[j] * g(levels[j]) approximates
// int_{sigma_min}^1 g dsigma/sigma + g(cap).
struct SigmaGrid {
  double sigma_min = 0.0;
  int packet_count = 0;
  double log_step = 0.0;
  std::vector<double> levels;
  std::vector<double> weights;

  int count() const { return static_cast<int>(levels.size()); }
  int cap_index() const { return packet_count; }
  bool is_cap(int j) const { return j == packet_count; }
  void validate() const;

  static SigmaGrid geometric(double sigma_min, int packet_count);
};

// A sampled phase-space map (e.g. the contact transformation induced by an
// operator phase). `domain` may be empty, meaning "defined everywhere".
struct ContactMapSample {
  std::function<CospherePoint(const CospherePoint&)> map;
  std::function<bool(const CospherePoint&)> domain;
};

}  // namespace fiohardy
