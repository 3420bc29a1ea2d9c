#pragma once

#include <cstddef>
#include <vector>

#include "fiohardy/cosphere.hpp"
#include "fiohardy/field_ops.hpp"
#include "fiohardy/grid.hpp"
#include "fiohardy/profiles.hpp"

namespace fiohardy {

// Index of a single packet: a unit direction and a scale below one.
struct PacketIndex {
  Vec3 omega{0.0, 0.0, 0.0};
  double sigma = 0.0;
};

// Real frequency-side packet symbol: the annular radial factor at scale
// sigma times the normalized angular window around omega.
class PacketSymbol {
 public:
  PacketSymbol(const ProfilePair& profiles, int dim, const PacketIndex& idx);

  double operator()(const Vec3& zeta) const;
  double normalization() const { return c_sigma_; }
  double scale() const { return sigma_; }
  const Vec3& direction() const { return omega_; }
  Multiplier as_multiplier() const;

 private:
  const ProfilePair* profiles_;
  int dim_;
  Vec3 omega_;
  double sigma_;
  double inv_root_sigma_;
  double c_sigma_;
};

// Low-frequency band symbol: the cap envelope normalized by the sphere
// measure, constant in the direction variable.
double cap_symbol(const ProfilePair& profiles, int dim, const Vec3& zeta);

// Absolute deviation of the discrete packet-frame square sum from one at a
// fixed nonzero frequency, using the given direction and scale grids; the
// band at scales >= 1 contributes the squared cap exactly.
double plancherel_defect(const Vec3& zeta, const ProfilePair& profiles,
                         const SphereGrid& sphere, const SigmaGrid& sigmas);

// Spatial concentration report for one packet on one grid.
struct DecayReport {
  // sup over the grid of |packet(x)| * sigma^{(3n+1)/4} * w(x)^N for
  // N = 1, 2, 3, with w(x) = 1 + |x|^2/sigma + <omega,x>^2/sigma^2.
  double scaled_sup[3] = {0.0, 0.0, 0.0};
  // sigma^{(n-1)/4} times the L1 norm of the spatial packet.
  double l1_mass = 0.0;
  // Root second moments of |packet|^2 along omega and per transverse axis.
  double along_radius = 0.0;
  double across_radius = 0.0;
  std::size_t support_points = 0;
};

DecayReport packet_space_decay(const PacketIndex& idx,
                               const ProfilePair& profiles,
                               const GridSpec& grid);

// Scalar fit of the direction-averaged angular localization against the
// input: with converged sphere quadrature the averaged operator acts as a
// constant multiple of any field supported away from frequency zero.
// In dimension 2 `nodes`/`weights` hold the converged circle quadrature
// actually applied; in dimension 3 the average is evaluated by the exact
// azimuthal reduction and the node vectors stay empty.
struct ReproducingFit {
  double c_estimate = 0.0;
  double residual = 0.0;
  std::vector<Vec3> nodes;
  std::vector<double> weights;
};

ReproducingFit reproducing_constant(double sigma, const ProfilePair& profiles,
                                    const SampledField& f);

}  // namespace fiohardy
