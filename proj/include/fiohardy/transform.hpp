#pragma once

#include <cstdint>
#include <vector>

#include "fiohardy/field_ops.hpp"
#include "fiohardy/packets.hpp"
#include "fiohardy/profiles.hpp"
#include "fiohardy/tent.hpp"

namespace fiohardy {

// Precomputed wave-packet analysis plan: profiles plus the three grids, with
// the sparse frequency-lattice support of every packet symbol cached up
// front. Packet level j covers the annulus sigma_j |zeta| in (1/2, 2); the
// final level is the low-frequency band, represented by the cap symbol
// cap(|zeta|) / sqrt(sphere measure), constant in the direction variable.
class TransformPlan {
 public:
  // Lattice support of one real frequency symbol: flat spectral indices and
  // the symbol values there.
  struct SliceSpectrum {
    std::vector<std::uint32_t> idx;
    std::vector<double> val;
  };

  TransformPlan(ProfilePair profiles, GridSpec grid, SphereGrid sphere,
                SigmaGrid sigmas);

  const ProfilePair& profiles() const { return profiles_; }
  const GridSpec& grid() const { return grid_; }
  const SphereGrid& sphere() const { return sphere_; }
  const SigmaGrid& sigmas() const { return sigmas_; }
  PhaseSpaceGeometry phase_geometry() const { return {grid_, sphere_, sigmas_}; }

  // Packet symbol support for level < sigmas().packet_count().
  const SliceSpectrum& packet_spectrum(int dir, int level) const;
  // Normalized cap symbol support (the scale-band level, any direction).
  const SliceSpectrum& cap_spectrum() const { return cap_; }

  // Grid/sphere/sigma consistency plus the band condition: every packet
  // annulus must lie strictly inside the frequency lattice's Nyquist ball.
  void validate() const;

 private:
  ProfilePair profiles_;
  GridSpec grid_;
  SphereGrid sphere_;
  SigmaGrid sigmas_;
  std::vector<SliceSpectrum> spectra_;  // packet levels, dir-major
  SliceSpectrum cap_;
};

// Analysis transform: slice (omega, j) of the output is the packet
// multiplier at (omega, sigma_j) applied to f for packet levels, and the
// normalized cap multiplier applied to f (the same field for every
// direction) at the band level. Slices whose spectral products sit at the
// forward-FFT round-off floor (1e-13 of the peak product scale) are dropped
// wholesale, so spectrally localized inputs produce genuinely sparse output.
PhaseSpaceField analyze(const TransformPlan& plan, const SampledField& f);

// Adjoint of analyze with respect to the weighted inner products: the h^dim
// pairing on fields, the h^dim * w_omega * Delta pairing on phase space.
SampledField synthesize(const TransformPlan& plan, const PhaseSpaceField& F);

// Fixed low-frequency test multiplier for the alternative norm: smooth
// radial step, identically 1 for |zeta| <= 2 and 0 for |zeta| >= 4.
Multiplier lowfreq_cap(int dim);

// Hardy norm report. value is the tent norm of the full analysis output;
// alt_value is the square-function proxy: the tent norm of the packet-only
// part (band level removed) plus the L^p norm of lowfreq_cap(D) f, the
// latter also reported separately as lowfreq.
struct HardyNormReport {
  double p = 2.0;
  double value = 0.0;
  double alt_value = 0.0;
  double lowfreq = 0.0;

  void validate() const;  // entries finite and nonnegative
};

HardyNormReport hardy_norm(const TransformPlan& plan, const SampledField& f,
                           double p);

// Ratio of the Hardy norms of f under two plans sharing grids (profiles may
// differ). Both norms zero (f annihilated by both dictionaries) gives 1.
double norm_independence(const SampledField& f, const TransformPlan& plan_a,
                         const TransformPlan& plan_b, double p);

// Comparison of the band-level lift with the plain L^p norm: the lift puts
// q(D) f on every direction slice of the band level and nothing elsewhere.
// Both sides vanish together (the lift is zero exactly when q(D) f is), in
// which case the ratio is reported as 0.
struct LowFreqReport {
  double tent_side = 0.0;
  double l1_side = 0.0;
  double ratio = 0.0;
};

LowFreqReport lowfreq_equivalence(const TransformPlan& plan, const SampledField& f,
                                  const Multiplier& q, double p = 1.0);

}  // namespace fiohardy
