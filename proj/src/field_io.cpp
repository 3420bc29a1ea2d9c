#include "fiohardy/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "fiohardy/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "field container I/O assumes a little-endian host");

namespace fiohardy {

namespace {

constexpr char kMagic[4] = {'F', 'I', 'O', 'F'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_f64(std::ofstream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::ifstream& in, const char* what) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw StructuralError(std::string("field file: truncated while reading ") + what);
  return v;
}

double read_f64(std::ifstream& in, const char* what) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw StructuralError(std::string("field file: truncated while reading ") + what);
  return v;
}

}  // namespace

void write_field(const std::string& path, const SampledField& f) {
  f.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("field file: cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(f.grid.dim));
  for (int d = 0; d < f.grid.dim; ++d)
    write_u32(out, static_cast<std::uint32_t>(f.grid.points_per_axis));
  write_f64(out, f.grid.extent);
  for (const cplx& v : f.values) {
    write_f64(out, v.real());
    write_f64(out, v.imag());
  }
  if (!out) throw ConfigError("field file: write failed for '" + path + "'");
}

SampledField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("field file: cannot open '" + path + "'");
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw StructuralError("field file: bad magic in '" + path + "'");
  const std::uint32_t version = read_u32(in, "version");
  if (version != kVersion)
    throw StructuralError("field file: unsupported version " + std::to_string(version));
  const std::uint32_t dim = read_u32(in, "dim");
  if (dim != 2 && dim != 3)
    throw StructuralError("field file: dim must be 2 or 3, got " + std::to_string(dim));
  std::uint32_t per_axis = 0;
  for (std::uint32_t d = 0; d < dim; ++d) {
    const std::uint32_t m = read_u32(in, "axis size");
    if (d == 0) {
      per_axis = m;
    } else if (m != per_axis) {
      throw StructuralError("field file: anisotropic grids are not supported");
    }
  }
  SampledField f;
  f.grid.dim = static_cast<int>(dim);
  f.grid.points_per_axis = static_cast<int>(per_axis);
  f.grid.extent = read_f64(in, "extent");
  f.grid.validate();
  f.values.resize(f.grid.size());
  for (cplx& v : f.values) {
    const double re = read_f64(in, "sample");
    const double im = read_f64(in, "sample");
    v = cplx(re, im);
  }
  // Trailing bytes indicate a malformed container.
  char probe;
  in.read(&probe, 1);
  if (in.gcount() != 0)
    throw StructuralError("field file: trailing bytes in '" + path + "'");
  return f;
}

}  // namespace fiohardy
