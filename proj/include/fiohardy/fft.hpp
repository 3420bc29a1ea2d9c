#pragma once

#include "fiohardy/grid.hpp"

namespace fiohardy {

// Forward transform, calibrated to the continuum integral
//   F(zeta) = sum_j f(x_j) e^{-i x_j . zeta} h^dim.
SpectralField to_spectrum(const SampledField& f);

// Inverse of to_spectrum:
//   f(x_j) = extent^{-dim} sum_k F(zeta_k) e^{i x_j . zeta_k}.
SampledField to_field(const SpectralField& F);

// Raw centered-grid DFT pair used by the transforms above, operating on
// caller-provided buffers of grid.size() complex values (out-of-place,
// in != out). Exposed for hot loops that manage their own storage.
void dft_forward(const GridSpec& grid, const cplx* in, cplx* out);
void dft_backward(const GridSpec& grid, const cplx* in, cplx* out);

// Plain index-space DFT pair with no centering twist and no normalization:
// forward computes sum_j in[j] e^{-2 pi i j.k / M}, backward the conjugate sum.
// backward(forward(f)) = grid.size() * f. Used for cyclic convolutions where
// the centered calibration would only add phase bookkeeping.
void dft_raw_forward(const GridSpec& grid, const cplx* in, cplx* out);
void dft_raw_backward(const GridSpec& grid, const cplx* in, cplx* out);

// Weighted l2 norm of the coefficient array under which to_spectrum is
// unitary: sqrt(sum |F_k|^2 * extent^{-dim}).
double spectral_l2_norm(const SpectralField& F);

}  // namespace fiohardy
