#pragma once

#include <functional>

#include "fiohardy/fft.hpp"
#include "fiohardy/grid.hpp"

namespace fiohardy {

// Frequency multiplier evaluated at lattice frequencies. The callable must be
// total on the lattice, including zeta = 0; factories for symbols that are
// singular at the origin take an explicit value there.
using Multiplier = std::function<cplx(const Vec3& zeta)>;

// Applies m(D): transforms f, multiplies every coefficient by m(zeta_k),
// transforms back. Throws NumericError naming the frequency if m produces a
// non-finite value at any lattice point.
SampledField apply_multiplier(const Multiplier& m, const SampledField& f);

// Same, but acting on an already-computed spectrum (no transforms).
SpectralField apply_multiplier_spectral(const Multiplier& m, const SpectralField& F);

// (sum_j |f(x_j)|^p h^dim)^{1/p}; p = infinity gives max_j |f(x_j)|.
double lp_norm(const SampledField& f, double p);

// lp norm of <D>^s f, with <zeta> = (1+|zeta|^2)^{1/2}.
double sobolev_norm(const SampledField& f, double s, double p = 2.0);

// --- Multiplier factories -------------------------------------------------

// <zeta>^s (smooth, nonsingular).
Multiplier bessel_power(int dim, double s);

// |zeta|^s with a caller-supplied value at zeta = 0 (default 0).
Multiplier abs_power(int dim, double s, cplx at_zero = 0.0);

// --- Field constructors ---------------------------------------------------

// exp(-|x - center|^2 / (2 w^2)).
SampledField gaussian_field(const GridSpec& g, double width = 1.0,
                            const Vec3& center = {0.0, 0.0, 0.0});

// e^{i k . x} for a lattice frequency given by signed indices.
SampledField plane_wave(const GridSpec& g, const int* signed_k);

// Gaussian envelope times e^{i k . x}.
SampledField modulated_gaussian(const GridSpec& g, double width, const Vec3& k,
                                const Vec3& center = {0.0, 0.0, 0.0});

// Random complex field with spectrum supported in band_lo <= |zeta| <= band_hi,
// normalized to unit L2 norm. Deterministic in (seed); coefficients are i.i.d.
// complex Gaussian keyed by lattice index.
SampledField random_band_limited(const GridSpec& g, double band_lo, double band_hi,
                                 std::uint64_t seed);

// Max of |f| over all samples whose sup-distance to the domain boundary is at
// most `margin` (used to confirm that decaying fields fit inside the torus).
double boundary_max(const SampledField& f, double margin);

// Pointwise arithmetic helpers.
SampledField scale(const SampledField& f, cplx a);
SampledField add(const SampledField& f, const SampledField& g);
SampledField sub(const SampledField& f, const SampledField& g);
double max_abs(const SampledField& f);
double max_abs_diff(const SampledField& f, const SampledField& g);
cplx inner_product(const SampledField& f, const SampledField& g);  // <f, g> with h^dim weight

}  // namespace fiohardy
