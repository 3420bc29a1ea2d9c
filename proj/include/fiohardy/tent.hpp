#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fiohardy/cosphere.hpp"
#include "fiohardy/grid.hpp"

namespace fiohardy {

// Discretization of the scale-augmented cosphere bundle: a spatial torus grid,
// a direction grid on the unit sphere, and a geometric scale grid. One cell
// (x, omega, sigma) carries measure h^dim * w_omega * Delta_sigma.
struct PhaseSpaceGeometry {
  GridSpec grid;
  SphereGrid sphere;
  SigmaGrid sigmas;

  void validate() const;
  TorusGeometry torus() const { return TorusGeometry{grid.dim, grid.extent}; }

  int level_count() const { return sigmas.count(); }
  int dir_count() const { return sphere.count(); }
  int slice_count() const { return dir_count() * level_count(); }
  int slice_index(int dir, int level) const { return dir * level_count() + level; }

  // Measure of one (x, omega, sigma) cell for the given direction and level.
  double cell_weight(int dir, int level) const {
    return grid.cell_measure() * sphere.weights[dir] * sigmas.weights[level];
  }

  bool operator==(const PhaseSpaceGeometry& other) const;

  // Compact run identifier for reports, e.g. "n2_M128_A64_J49".
  std::string tag() const;
};

// Complex field on grid x sphere x sigma. Storage is per (direction, level)
// slice; a slice that was never written stays unallocated and reads as zero,
// which keeps sparse fields (atoms, single-packet data) cheap.
class PhaseSpaceField {
 public:
  explicit PhaseSpaceField(PhaseSpaceGeometry geom);

  const PhaseSpaceGeometry& geometry() const { return geom_; }

  bool slice_allocated(int dir, int level) const;
  // Read-only slice access; nullptr means the slice is identically zero.
  const std::vector<cplx>* slice(int dir, int level) const;
  // Mutable access, allocating a zero slice on first touch.
  std::vector<cplx>& slice_mut(int dir, int level);
  void drop_slice(int dir, int level);

  cplx at(std::size_t x_flat, int dir, int level) const;

  // Weighted l2 norm: sqrt(sum over cells of |F|^2 h^dim w_omega Delta).
  double weighted_l2() const;
  double max_abs() const;
  std::size_t allocated_values() const;

  void validate() const;

 private:
  void check_indices(int dir, int level) const;

  PhaseSpaceGeometry geom_;
  std::vector<std::vector<cplx>> slices_;
};

// Real-valued function on (x, omega), e.g. the output of the square
// functionals. values[dir * grid.size() + x_flat].
struct DirectionField {
  GridSpec grid;
  SphereGrid sphere;
  std::vector<double> values;

  double at(std::size_t x_flat, int dir) const {
    return values[static_cast<std::size_t>(dir) * grid.size() + x_flat];
  }
  double& at(std::size_t x_flat, int dir) {
    return values[static_cast<std::size_t>(dir) * grid.size() + x_flat];
  }

  // L^p norm against the measure h^dim * w_omega; p = infinity gives the sup.
  double lp_norm(double p) const;
  double sup() const;
  void validate() const;
};

// Quasi-distance squared between two grid cells with directions omega_a,
// omega_b whose position displacement is didx[d] * spacing, didx in
// [-M/2, M/2]:
//   |<omega_a, d>| + |<omega_b, d>| + |d|^2 + |omega_a - omega_b|^2.
// A component at exactly +-M/2 has two minimal images that are the same torus
// point but different gauge values; the smaller one wins, so the result is a
// genuine (and even) function of the lattice displacement. Shared by the
// Lusin convolution kernels and their direct-summation cross-checks so both
// agree on boundary cells.
double lattice_quasi_gauge(const GridSpec& grid, const Vec3& omega_a,
                           const Vec3& omega_b, const int* didx);

// Conical square function: for each (x, omega),
//   A F(x, omega)^2 = sum_j Delta_j * sum_{(y, nu) in B_sqrt(sigma_j)(x, omega)}
//                     |F(y, nu, sigma_j)|^2 h^dim w_nu / Vhat_j(nu),
// where Vhat_j(nu) is the discrete volume of the radius-sqrt(sigma_j) ball
// around the source cell (y, nu) under the same membership test and weights.
// Normalizing each source by its own ball volume (which by translation
// invariance depends only on nu and j) makes the ball-average kernel sum to
// exactly 1 over the bundle, so the T^2 norm equals the weighted l2 norm up
// to floating-point rounding. Squared values below 1e-12 of the peak are
// snapped to exact zero: they are convolution round-off at cells with no
// genuine mass, and flooring them keeps A absolutely homogeneous in F.
DirectionField lusin_functional(const PhaseSpaceField& F);

// Discrete volumes Vhat_j(nu) used by lusin_functional: ball radius
// sqrt(sigmas.levels[level]) around a cell with direction index dir.
double lusin_ball_volume(const PhaseSpaceGeometry& geom, int dir, int level);

// Carleson functional over a sampled ball family: for each (x, omega) the
// supremum over family balls containing (x, omega) of
//   (tent energy of B / Vhat(B))^{1/2},
// where the tent energy sums |F|^2 h^dim w Delta over cells with
// in_tent(cell, sigma, B) and Vhat(B) is discrete_ball_volume(B). Cells not
// covered by any family ball get value 0.
DirectionField carleson_functional(const PhaseSpaceField& F,
                                   const std::vector<CospherePoint>& centers,
                                   const std::vector<double>& radii);

// Energy of F over the tent T(B) (membership via in_tent) and the normalized
// per-ball Carleson value sqrt(energy / discrete_ball_volume).
double tent_energy(const PhaseSpaceField& F, const BallSpec& ball);
double carleson_ball_value(const PhaseSpaceField& F, const BallSpec& ball);

// Discrete ball volume: sum of h^dim * w_omega over grid cells (x, omega)
// with quasi-gauge(center, cell) <= radius^2.
double discrete_ball_volume(const PhaseSpaceGeometry& geom, const BallSpec& ball);

// Upper bound for the quasi-distance diameter of the discretized bundle.
double bundle_diameter(const PhaseSpaceGeometry& geom);

// Default sampled ball family for the p = infinity norm: centers on a coarse
// sublattice of grid cells crossed with a direction subset, radii geometric
// from the finest sqrt(sigma) to the bundle diameter.
struct CarlesonFamily {
  std::vector<CospherePoint> centers;
  std::vector<double> radii;
};
CarlesonFamily standard_carleson_family(const PhaseSpaceGeometry& geom,
                                        int centers_per_axis = 6,
                                        int dir_samples = 8, int radii_count = 12);

// Tent-space norm: for p < infinity the L^p norm of lusin_functional(F); for
// p = infinity the supremum of the Carleson values over the standard family.
double tent_norm(const PhaseSpaceField& F, double p);

enum class AtomShape { kFlat, kSingleCell };

// Normalized field supported in the tent T(ball): either constant on the tent
// or concentrated in a single tent cell, scaled so the weighted l2 norm is
// exactly discrete_ball_volume(ball)^{-1/2}.
PhaseSpaceField make_atom(const PhaseSpaceGeometry& geom, const BallSpec& ball,
                          AtomShape shape);

// Binary container ("FIOP"): magic, dim, per-axis sizes, direction and level
// counts, extent and sigma_min, then dense little-endian f64 re/im pairs in
// (dir, level, x) order. Zero slices are written as zeros and come back
// unallocated.
void write_phase_space(const std::string& path, const PhaseSpaceField& F);
PhaseSpaceField read_phase_space(const std::string& path);

// CSV report of tent norms: columns field_id, p, norm, grid.
struct NormReportRow {
  std::string field_id;
  double p = 2.0;
  double norm = 0.0;
  std::string grid_tag;
};
void write_norm_report(const std::string& path, const std::vector<NormReportRow>& rows);

}  // namespace fiohardy
