#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fiohardy/cosphere.hpp"

namespace fiohardy {

struct VolumeEstimate {
  double tau = 0.0;
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

// Monte-Carlo estimate of the measure of the quasi-distance ball of radius tau
// around `center`, with respect to (Lebesgue on the torus) x (surface measure
// on the sphere). Importance sampling draws from the smallest product region
// that provably contains the ball, so the estimate is unbiased at any tau.
// Throws ConfigError when trials < 1000.
VolumeEstimate ball_volume(const TorusGeometry& g, const CospherePoint& center,
                           double tau, std::uint64_t trials, std::uint64_t seed);

std::vector<VolumeEstimate> volume_curve(const TorusGeometry& g,
                                         const CospherePoint& center,
                                         const std::vector<double>& taus,
                                         std::uint64_t trials, std::uint64_t seed);

// Columns: tau, volume, stderr, trials, seed.
void write_volume_csv(const std::string& path, const std::vector<VolumeEstimate>& rows);

struct RatioRange {
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::uint64_t used = 0;  // pairs that passed the domain predicate
};

// Extremes of d(map p, map q) / d(p, q) over random pairs whose separations
// are drawn log-uniformly in [1e-3, 1] across the anisotropic displacement
// directions. Throws EmptySampleError when the domain predicate rejects
// every candidate pair.
RatioRange bilipschitz_ratio(const TorusGeometry& g, const ContactMapSample& map,
                             std::uint64_t pairs, std::uint64_t seed);

// Largest observed d(p, r) / (d(p, q) + d(q, r)) over random triples at mixed
// separation scales; the quasi-triangle constant of the sampled geometry.
double quasi_triangle_constant(const TorusGeometry& g, std::uint64_t triples,
                               std::uint64_t seed);

// Uniform random cosphere point (used by the samplers above and by tests).
CospherePoint random_cosphere_point(const TorusGeometry& g, std::uint64_t seed,
                                    std::uint64_t counter);

// Random point at quasi-distance roughly `scale` from p, spreading the
// displacement over the along-direction, transverse and angular components.
CospherePoint perturb_cosphere_point(const TorusGeometry& g, const CospherePoint& p,
                                     double scale, std::uint64_t seed,
                                     std::uint64_t counter);

}  // namespace fiohardy
