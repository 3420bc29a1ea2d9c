#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "fiohardy/errors.hpp"

namespace fiohardy {

using cplx = std::complex<double>;

// Small fixed-capacity vector for positions, directions and frequencies.
// Only the first `dim` entries are meaningful (dim is 2 or 3).
using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += a[d] * b[d];
  return s;
}

inline double norm2(const Vec3& a, int dim) { return dot(a, a, dim); }

inline double norm(const Vec3& a, int dim) { return std::sqrt(norm2(a, dim)); }

// Uniform periodic grid on the torus [-extent/2, extent/2)^dim.
//
// Sample points are x_j = -extent/2 + j*h with h = extent/M. The dual lattice
// consists of frequencies (2*pi/extent) * k with integer k in [-M/2, M/2).
struct GridSpec {
  int dim = 2;
  int points_per_axis = 64;
  double extent = 1.5;

  double spacing() const { return extent / points_per_axis; }
  double freq_step() const { return 2.0 * std::numbers::pi / extent; }
  double nyquist() const { return std::numbers::pi * points_per_axis / extent; }

  std::size_t size() const {
    std::size_t s = 1;
    for (int d = 0; d < dim; ++d) s *= static_cast<std::size_t>(points_per_axis);
    return s;
  }

  double cell_measure() const {
    double m = 1.0;
    for (int d = 0; d < dim; ++d) m *= spacing();
    return m;
  }

  void validate() const {
    if (dim != 2 && dim != 3)
      throw StructuralError("grid: dim must be 2 or 3, got " + std::to_string(dim));
    if (points_per_axis < 16 || points_per_axis % 2 != 0)
      throw StructuralError("grid: points_per_axis must be even and >= 16, got " +
                            std::to_string(points_per_axis));
    if (!(extent > 0.0)) throw StructuralError("grid: extent must be positive");
  }

  // Coordinate of sample index i along one axis.
  double coord(int i) const { return -0.5 * extent + i * spacing(); }

  // Signed frequency index for storage index k (storage follows the
  // DFT layout: k in [0, M/2) means k, k in [M/2, M) means k - M).
  int signed_index(int k) const {
    return k < points_per_axis / 2 ? k : k - points_per_axis;
  }

  // Storage index for a signed frequency index in [-M/2, M/2).
  int storage_index(int signed_k) const {
    return signed_k >= 0 ? signed_k : signed_k + points_per_axis;
  }

  bool operator==(const GridSpec&) const = default;

  std::string tag() const {
    return "n" + std::to_string(dim) + "_M" + std::to_string(points_per_axis) +
           "_L" + std::to_string(extent);
  }
};

// Decompose a flat row-major index (last axis fastest) into per-axis indices.
inline void unflatten(const GridSpec& g, std::size_t flat, int* idx) {
  for (int d = g.dim - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % g.points_per_axis);
    flat /= g.points_per_axis;
  }
}

inline std::size_t flatten(const GridSpec& g, const int* idx) {
  std::size_t f = 0;
  for (int d = 0; d < g.dim; ++d)
    f = f * g.points_per_axis + static_cast<std::size_t>(idx[d]);
  return f;
}

// Complex field sampled on a position grid.
struct SampledField {
  GridSpec grid;
  std::vector<cplx> values;

  void validate() const {
    grid.validate();
    if (values.size() != grid.size())
      throw StructuralError("field: value count " + std::to_string(values.size()) +
                            " does not match grid size " + std::to_string(grid.size()));
  }

  Vec3 position(std::size_t flat) const {
    int idx[3] = {0, 0, 0};
    unflatten(grid, flat, idx);
    Vec3 x{0.0, 0.0, 0.0};
    for (int d = 0; d < grid.dim; ++d) x[d] = grid.coord(idx[d]);
    return x;
  }
};

// Fourier coefficients of a SampledField, calibrated to the continuum
// transform: coefficients[k] approximates the integral of f(x) e^{-i x.zeta_k}
// over the torus. Storage order is the DFT layout described in GridSpec.
struct SpectralField {
  GridSpec grid;
  std::vector<cplx> coefficients;

  void validate() const {
    grid.validate();
    if (coefficients.size() != grid.size())
      throw StructuralError("spectrum: coefficient count does not match grid size");
  }

  Vec3 frequency(std::size_t flat) const {
    int idx[3] = {0, 0, 0};
    unflatten(grid, flat, idx);
    Vec3 z{0.0, 0.0, 0.0};
    for (int d = 0; d < grid.dim; ++d)
      z[d] = grid.freq_step() * grid.signed_index(idx[d]);
    return z;
  }
};

}  // namespace fiohardy
