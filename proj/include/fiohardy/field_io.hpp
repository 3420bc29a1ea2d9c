#pragma once

#include <string>

#include "fiohardy/grid.hpp"

namespace fiohardy {

// Binary field container, little-endian:
//   bytes 0..3   magic "FIOF"
//   u32          version (1)
//   u32          dim
//   u32 * dim    points per axis
//   f64          extent
//   f64 * 2N     interleaved (re, im) samples, row-major, last axis fastest
void write_field(const std::string& path, const SampledField& f);
SampledField read_field(const std::string& path);

}  // namespace fiohardy
