#include "fiohardy/tent.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>

#include "fiohardy/csv.hpp"
#include "fiohardy/fft.hpp"

static_assert(std::endian::native == std::endian::little,
              "phase-space container I/O assumes a little-endian host");

namespace fiohardy {

// ---------------------------------------------------------------------------
// Geometry and container
// ---------------------------------------------------------------------------

void PhaseSpaceGeometry::validate() const {
  grid.validate();
  sphere.validate();
  sigmas.validate();
  if (sphere.dim != grid.dim)
    throw StructuralError("phase space: sphere dim " + std::to_string(sphere.dim) +
                          " does not match grid dim " + std::to_string(grid.dim));
}

bool PhaseSpaceGeometry::operator==(const PhaseSpaceGeometry& other) const {
  return grid == other.grid && sphere.dim == other.sphere.dim &&
         sphere.dirs == other.sphere.dirs && sphere.weights == other.sphere.weights &&
         sigmas.sigma_min == other.sigmas.sigma_min &&
         sigmas.packet_count == other.sigmas.packet_count &&
         sigmas.levels == other.sigmas.levels && sigmas.weights == other.sigmas.weights;
}

std::string PhaseSpaceGeometry::tag() const {
  return "n" + std::to_string(grid.dim) + "_M" + std::to_string(grid.points_per_axis) +
         "_A" + std::to_string(dir_count()) + "_J" + std::to_string(level_count());
}

PhaseSpaceField::PhaseSpaceField(PhaseSpaceGeometry geom) : geom_(std::move(geom)) {
  geom_.validate();
  slices_.resize(static_cast<std::size_t>(geom_.slice_count()));
}

void PhaseSpaceField::check_indices(int dir, int level) const {
  if (dir < 0 || dir >= geom_.dir_count() || level < 0 || level >= geom_.level_count())
    throw StructuralError("phase space: slice index (" + std::to_string(dir) + ", " +
                          std::to_string(level) + ") out of range");
}

bool PhaseSpaceField::slice_allocated(int dir, int level) const {
  check_indices(dir, level);
  return !slices_[static_cast<std::size_t>(geom_.slice_index(dir, level))].empty();
}

const std::vector<cplx>* PhaseSpaceField::slice(int dir, int level) const {
  check_indices(dir, level);
  const std::vector<cplx>& s = slices_[static_cast<std::size_t>(geom_.slice_index(dir, level))];
  return s.empty() ? nullptr : &s;
}

std::vector<cplx>& PhaseSpaceField::slice_mut(int dir, int level) {
  check_indices(dir, level);
  std::vector<cplx>& s = slices_[static_cast<std::size_t>(geom_.slice_index(dir, level))];
  if (s.empty()) s.assign(geom_.grid.size(), cplx(0.0, 0.0));
  return s;
}

void PhaseSpaceField::drop_slice(int dir, int level) {
  check_indices(dir, level);
  std::vector<cplx>().swap(slices_[static_cast<std::size_t>(geom_.slice_index(dir, level))]);
}

cplx PhaseSpaceField::at(std::size_t x_flat, int dir, int level) const {
  const std::vector<cplx>* s = slice(dir, level);
  return s ? (*s)[x_flat] : cplx(0.0, 0.0);
}

double PhaseSpaceField::weighted_l2() const {
  double total = 0.0;
  for (int dir = 0; dir < geom_.dir_count(); ++dir) {
    for (int level = 0; level < geom_.level_count(); ++level) {
      const std::vector<cplx>& s =
          slices_[static_cast<std::size_t>(geom_.slice_index(dir, level))];
      if (s.empty()) continue;
      double e = 0.0;
      for (const cplx& v : s) e += std::norm(v);
      total += e * geom_.cell_weight(dir, level);
    }
  }
  return std::sqrt(total);
}

double PhaseSpaceField::max_abs() const {
  double best = 0.0;
  for (const std::vector<cplx>& s : slices_)
    for (const cplx& v : s) best = std::max(best, std::norm(v));
  return std::sqrt(best);
}

std::size_t PhaseSpaceField::allocated_values() const {
  std::size_t total = 0;
  for (const std::vector<cplx>& s : slices_) total += s.size();
  return total;
}

void PhaseSpaceField::validate() const {
  geom_.validate();
  const std::size_t n = geom_.grid.size();
  for (int dir = 0; dir < geom_.dir_count(); ++dir) {
    for (int level = 0; level < geom_.level_count(); ++level) {
      const std::vector<cplx>& s =
          slices_[static_cast<std::size_t>(geom_.slice_index(dir, level))];
      if (s.empty()) continue;
      if (s.size() != n)
        throw StructuralError("phase space: slice (" + std::to_string(dir) + ", " +
                              std::to_string(level) + ") has wrong size");
      for (std::size_t x = 0; x < n; ++x)
        if (!std::isfinite(s[x].real()) || !std::isfinite(s[x].imag()))
          throw NumericError("phase space: non-finite value at (x=" + std::to_string(x) +
                             ", dir=" + std::to_string(dir) +
                             ", level=" + std::to_string(level) + ")");
    }
  }
}

double DirectionField::lp_norm(double p) const {
  validate();
  if (std::isinf(p)) return sup();
  if (std::isnan(p) || p < 1.0)
    throw DomainError("direction field: L^p norm needs p in [1, inf]");
  const std::size_t n = grid.size();
  const double hn = grid.cell_measure();
  double total = 0.0;
  for (int dir = 0; dir < sphere.count(); ++dir) {
    const double* row = &values[static_cast<std::size_t>(dir) * n];
    double s = 0.0;
    if (p == 2.0) {
      for (std::size_t x = 0; x < n; ++x) s += row[x] * row[x];
    } else if (p == 1.0) {
      for (std::size_t x = 0; x < n; ++x) s += row[x];
    } else {
      for (std::size_t x = 0; x < n; ++x) s += std::pow(row[x], p);
    }
    total += s * sphere.weights[dir] * hn;
  }
  return std::pow(total, 1.0 / p);
}

double DirectionField::sup() const {
  double best = 0.0;
  for (double v : values) best = std::max(best, v);
  return best;
}

void DirectionField::validate() const {
  grid.validate();
  sphere.validate();
  if (values.size() != static_cast<std::size_t>(sphere.count()) * grid.size())
    throw StructuralError("direction field: value count does not match grid x sphere");
}

// ---------------------------------------------------------------------------
// Lattice gauge
// ---------------------------------------------------------------------------

namespace {

inline double pair_gauge(int dim, const Vec3& wa, const Vec3& wb, const Vec3& d,
                         double chord2) {
  return std::abs(dot(wa, d, dim)) + std::abs(dot(wb, d, dim)) + norm2(d, dim) + chord2;
}

inline double chord_sq(int dim, const Vec3& a, const Vec3& b) {
  Vec3 d{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
  return norm2(d, dim);
}

double lattice_gauge_impl(const GridSpec& grid, const Vec3& wa, const Vec3& wb,
                          const int* didx, double chord2) {
  const int half = grid.points_per_axis / 2;
  const double h = grid.spacing();
  Vec3 d{0.0, 0.0, 0.0};
  int boundary[3];
  int nb = 0;
  for (int k = 0; k < grid.dim; ++k) {
    d[k] = h * didx[k];
    if (didx[k] == half || didx[k] == -half) boundary[nb++] = k;
  }
  double best = pair_gauge(grid.dim, wa, wb, d, chord2);
  // A +-M/2 component is the same torus point with either sign; take the
  // smaller gauge over all sign choices so the kernel is even and symmetric
  // under the exact lattice rotations.
  for (int mask = 1; mask < (1 << nb); ++mask) {
    Vec3 e = d;
    for (int b = 0; b < nb; ++b)
      if (mask & (1 << b)) e[boundary[b]] = -e[boundary[b]];
    best = std::min(best, pair_gauge(grid.dim, wa, wb, e, chord2));
  }
  return best;
}

}  // namespace

double lattice_quasi_gauge(const GridSpec& grid, const Vec3& omega_a,
                           const Vec3& omega_b, const int* didx) {
  return lattice_gauge_impl(grid, omega_a, omega_b, didx,
                            chord_sq(grid.dim, omega_a, omega_b));
}

// ---------------------------------------------------------------------------
// Lusin functional: per-level cyclic convolutions of |F|^2 against ball
// indicator kernels, with kernels shared between direction pairs that are
// equivalent under the exact lattice symmetries of the direction grid.
// ---------------------------------------------------------------------------

namespace {

// The dihedral symmetry used to share kernels: 8 elements g = q + 4*refl
// acting on direction indices as i -> q*A/4 + (refl ? A - i : i) (mod A) and
// on index vectors (spatial or frequency, both cyclic mod M) by the matching
// quarter-turn rotations and a reflection of the second axis.
struct SymmetryMaps {
  bool usable = false;
  int dir_count = 0;
  std::array<std::vector<std::uint32_t>, 8> perm;  // perm[g][k] = flat(g . k)

  int apply_dir(int g, int i) const {
    const int a = dir_count;
    const int q = g & 3;
    int j = (g & 4) ? (a - i) % a : i;
    return (j + q * (a / 4)) % a;
  }
};

inline bool same_vec(const Vec3& a, const Vec3& b) {
  return a[0] == b[0] && a[1] == b[1] && a[2] == b[2];
}

SymmetryMaps build_symmetry_maps(const GridSpec& grid, const SphereGrid& sphere) {
  SymmetryMaps sym;
  sym.dir_count = sphere.count();
  const int a = sym.dir_count;
  if (grid.dim != 2 || a % 8 != 0) return sym;
  // The kernel sharing below is exact only when the direction set itself maps
  // onto itself bitwise under the lattice rotations/reflection; audit that
  // rather than assuming it.
  for (int i = 0; i < a; ++i) {
    const Vec3& w = sphere.dirs[i];
    const Vec3 rot{-w[1], w[0], 0.0};
    const Vec3 refl{w[0], -w[1], 0.0};
    if (!same_vec(sphere.dirs[(i + a / 4) % a], rot) ||
        !same_vec(sphere.dirs[(a - i) % a], refl))
      return sym;
  }
  const int m = grid.points_per_axis;
  const std::size_t n = grid.size();
  auto neg = [m](int v) { return (m - v) % m; };
  for (int g = 0; g < 8; ++g) {
    sym.perm[g].resize(n);
    for (std::size_t flat = 0; flat < n; ++flat) {
      int idx[3] = {0, 0, 0};
      unflatten(grid, flat, idx);
      int v0 = idx[0];
      int v1 = idx[1];
      if (g & 4) v1 = neg(v1);                       // reflection: (a0, a1) -> (a0, -a1)
      for (int q = 0; q < (g & 3); ++q) {            // quarter turn: (a0, a1) -> (-a1, a0)
        const int t = v0;
        v0 = neg(v1);
        v1 = t;
      }
      int out[3] = {v0, v1, 0};
      sym.perm[g][flat] = static_cast<std::uint32_t>(flatten(grid, out));
    }
  }
  sym.usable = true;
  return sym;
}

// Ball indicator kernels at one scale level, built on demand and shared
// between symmetry-equivalent direction pairs. khat holds the (real) DFT of
// the indicator; count its number of lattice points.
class KernelCache {
 public:
  KernelCache(const GridSpec& grid, const SphereGrid& sphere, double sigma,
              const SymmetryMaps& sym, const std::vector<std::array<int, 3>>& didx)
      : grid_(grid), sphere_(sphere), sigma_(sigma), sym_(sym), didx_(didx) {}

  struct View {
    const std::vector<double>* khat;
    const std::vector<std::uint32_t>* perm;  // nullptr = identity
    double count;
  };

  View get(int a, int b) {
    int ca = a;
    int cb = b;
    int g_used = 0;
    if (sym_.usable) {
      ca = sym_.dir_count;
      cb = sym_.dir_count;
      for (int g = 0; g < 8; ++g) {
        const int ta = sym_.apply_dir(g, a);
        const int tb = sym_.apply_dir(g, b);
        if (ta < ca || (ta == ca && tb < cb)) {
          ca = ta;
          cb = tb;
          g_used = g;
        }
        // The kernel is symmetric in the pair, so the swapped image is the
        // same kernel and only improves the canonical key.
        if (tb < ca || (tb == ca && ta < cb)) {
          ca = tb;
          cb = ta;
          g_used = g;
        }
      }
    } else if (cb < ca) {
      std::swap(ca, cb);
    }
    Canon& c = canon_[ca * sym_.dir_count + cb];
    if (c.khat.empty()) build(ca, cb, c);
    View v;
    v.khat = &c.khat;
    v.perm = (sym_.usable && g_used != 0) ? &sym_.perm[g_used] : nullptr;
    v.count = c.count;
    return v;
  }

  double count(int a, int b) { return get(a, b).count; }

 private:
  struct Canon {
    std::vector<double> khat;
    double count = 0.0;
  };

  void build(int ca, int cb, Canon& c) {
    const std::size_t n = grid_.size();
    const Vec3& wa = sphere_.dirs[ca];
    const Vec3& wb = sphere_.dirs[cb];
    const double chord2 = chord_sq(grid_.dim, wa, wb);
    std::vector<cplx> ind(n, cplx(0.0, 0.0));
    double cnt = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (lattice_gauge_impl(grid_, wa, wb, didx_[m].data(), chord2) <= sigma_) {
        ind[m] = cplx(1.0, 0.0);
        cnt += 1.0;
      }
    }
    std::vector<cplx> freq(n);
    dft_raw_forward(grid_, ind.data(), freq.data());
    c.khat.resize(n);
    for (std::size_t k = 0; k < n; ++k) c.khat[k] = freq[k].real();
    c.count = cnt;
  }

  const GridSpec& grid_;
  const SphereGrid& sphere_;
  double sigma_;
  const SymmetryMaps& sym_;
  const std::vector<std::array<int, 3>>& didx_;
  std::map<int, Canon> canon_;
};

std::vector<std::array<int, 3>> displacement_indices(const GridSpec& grid) {
  const std::size_t n = grid.size();
  const int m = grid.points_per_axis;
  std::vector<std::array<int, 3>> out(n);
  for (std::size_t flat = 0; flat < n; ++flat) {
    int idx[3] = {0, 0, 0};
    unflatten(grid, flat, idx);
    for (int d = 0; d < grid.dim; ++d)
      out[flat][d] = idx[d] <= m / 2 ? idx[d] : idx[d] - m;
    for (int d = grid.dim; d < 3; ++d) out[flat][d] = 0;
  }
  return out;
}

}  // namespace

double lusin_ball_volume(const PhaseSpaceGeometry& geom, int dir, int level) {
  geom.validate();
  if (dir < 0 || dir >= geom.dir_count() || level < 0 || level >= geom.level_count())
    throw StructuralError("lusin ball volume: index out of range");
  const double sigma = geom.sigmas.levels[level];
  const std::vector<std::array<int, 3>> didx = displacement_indices(geom.grid);
  const Vec3& ws = geom.sphere.dirs[dir];
  double vol = 0.0;
  for (int other = 0; other < geom.dir_count(); ++other) {
    const Vec3& wo = geom.sphere.dirs[other];
    const double chord2 = chord_sq(geom.grid.dim, ws, wo);
    if (chord2 > sigma) continue;
    double cnt = 0.0;
    for (std::size_t m = 0; m < didx.size(); ++m)
      if (lattice_gauge_impl(geom.grid, ws, wo, didx[m].data(), chord2) <= sigma)
        cnt += 1.0;
    vol += cnt * geom.sphere.weights[other];
  }
  return vol * geom.grid.cell_measure();
}

DirectionField lusin_functional(const PhaseSpaceField& F) {
  const PhaseSpaceGeometry& geom = F.geometry();
  F.validate();
  const GridSpec& grid = geom.grid;
  const int dirs = geom.dir_count();
  const int levels = geom.level_count();
  const std::size_t n = grid.size();
  const double hn = grid.cell_measure();
  const double inv_n = 1.0 / static_cast<double>(n);

  DirectionField out;
  out.grid = grid;
  out.sphere = geom.sphere;
  out.values.assign(static_cast<std::size_t>(dirs) * n, 0.0);

  const SymmetryMaps sym = build_symmetry_maps(grid, geom.sphere);
  const std::vector<std::array<int, 3>> didx = displacement_indices(grid);

  std::vector<double> chord2(static_cast<std::size_t>(dirs) * dirs);
  for (int a = 0; a < dirs; ++a)
    for (int b = 0; b < dirs; ++b)
      chord2[static_cast<std::size_t>(a) * dirs + b] =
          chord_sq(grid.dim, geom.sphere.dirs[a], geom.sphere.dirs[b]);

  std::vector<std::vector<cplx>> ghat(static_cast<std::size_t>(dirs));
  std::vector<cplx> buf(n), acc(n), conv(n);

  for (int level = 0; level < levels; ++level) {
    const double sigma = geom.sigmas.levels[level];
    const double dlog = geom.sigmas.weights[level];

    std::vector<int> active;
    for (int src = 0; src < dirs; ++src)
      if (F.slice(src, level)) active.push_back(src);
    if (active.empty()) continue;

    KernelCache cache(grid, geom.sphere, sigma, sym, didx);

    // Source-side ball volumes: Vhat(level, src) = sum over partner dirs of
    // w_dir * h^dim * (lattice points of the pair indicator). Normalizing by
    // the source's own ball volume makes the averaging kernel sum to exactly
    // one over the bundle, which is what turns the T^2 norm into the
    // weighted l2 norm.
    std::vector<double> vhat(static_cast<std::size_t>(dirs), 0.0);
    for (int src : active) {
      double v = 0.0;
      for (int dir = 0; dir < dirs; ++dir) {
        if (chord2[static_cast<std::size_t>(dir) * dirs + src] > sigma) continue;
        v += geom.sphere.weights[dir] * cache.count(dir, src);
      }
      vhat[static_cast<std::size_t>(src)] = v * hn;
      if (!(vhat[static_cast<std::size_t>(src)] > 0.0))
        throw ResolutionError("lusin: empty discrete ball at sigma = " +
                              format_double(sigma));
    }

    for (int src : active) {
      const std::vector<cplx>& s = *F.slice(src, level);
      for (std::size_t x = 0; x < n; ++x) buf[x] = cplx(std::norm(s[x]), 0.0);
      ghat[static_cast<std::size_t>(src)].resize(n);
      dft_raw_forward(grid, buf.data(), ghat[static_cast<std::size_t>(src)].data());
    }

    for (int dir = 0; dir < dirs; ++dir) {
      bool any = false;
      for (int src : active) {
        if (chord2[static_cast<std::size_t>(dir) * dirs + src] > sigma) continue;
        if (!any) std::fill(acc.begin(), acc.end(), cplx(0.0, 0.0));
        any = true;
        const KernelCache::View ker = cache.get(dir, src);
        const double scale =
            hn * geom.sphere.weights[src] / vhat[static_cast<std::size_t>(src)];
        const cplx* g = ghat[static_cast<std::size_t>(src)].data();
        const double* khat = ker.khat->data();
        if (ker.perm) {
          const std::uint32_t* p = ker.perm->data();
          for (std::size_t k = 0; k < n; ++k) acc[k] += scale * khat[p[k]] * g[k];
        } else {
          for (std::size_t k = 0; k < n; ++k) acc[k] += scale * khat[k] * g[k];
        }
      }
      if (!any) continue;
      dft_raw_backward(grid, acc.data(), conv.data());
      double* row = &out.values[static_cast<std::size_t>(dir) * n];
      for (std::size_t x = 0; x < n; ++x) row[x] += dlog * conv[x].real() * inv_n;
    }
  }

  // The spectral convolution leaves O(eps * global scale) round-off at cells
  // whose true squared value is zero. Snap everything below a relative floor
  // to exact zero so the functional vanishes off the genuine support and
  // scales exactly homogeneously; the floor sits ~100x above the round-off
  // level and removes a negligible fraction of the total mass.
  double peak = 0.0;
  for (double v : out.values) peak = std::max(peak, v);
  const double floor = 1e-12 * peak;
  for (double& v : out.values) v = v > floor ? std::sqrt(v) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Tents, Carleson functional, atoms
// ---------------------------------------------------------------------------

namespace {

// Visit all grid positions within max-norm distance `reach` of `center`
// (periodically), calling fn(flat index, position). The box is conservative;
// callers apply their own membership predicate.
template <typename Fn>
void for_each_box(const GridSpec& grid, const Vec3& center, double reach, Fn&& fn) {
  const int m = grid.points_per_axis;
  const double h = grid.spacing();
  int lo[3] = {0, 0, 0};
  int cnt[3] = {1, 1, 1};
  for (int d = 0; d < grid.dim; ++d) {
    const int w = static_cast<int>(std::floor(reach / h)) + 2;
    if (2 * w + 1 >= m) {
      lo[d] = 0;
      cnt[d] = m;
    } else {
      const int ic = static_cast<int>(std::floor((center[d] + 0.5 * grid.extent) / h + 0.5));
      lo[d] = ic - w;
      cnt[d] = 2 * w + 1;
    }
  }
  int idx[3] = {0, 0, 0};
  Vec3 pos{0.0, 0.0, 0.0};
  for (int i0 = 0; i0 < cnt[0]; ++i0) {
    idx[0] = ((lo[0] + i0) % m + m) % m;
    pos[0] = grid.coord(idx[0]);
    for (int i1 = 0; i1 < (grid.dim >= 2 ? cnt[1] : 1); ++i1) {
      idx[1] = ((lo[1] + i1) % m + m) % m;
      if (grid.dim >= 2) pos[1] = grid.coord(idx[1]);
      for (int i2 = 0; i2 < (grid.dim >= 3 ? cnt[2] : 1); ++i2) {
        idx[2] = ((lo[2] + i2) % m + m) % m;
        if (grid.dim >= 3) pos[2] = grid.coord(idx[2]);
        fn(flatten(grid, idx), pos);
      }
    }
  }
}

void check_ball(const BallSpec& ball) {
  if (!(ball.radius > 0.0))
    throw DomainError("ball: radius must be positive, got " + format_double(ball.radius));
}

}  // namespace

double discrete_ball_volume(const PhaseSpaceGeometry& geom, const BallSpec& ball) {
  geom.validate();
  check_ball(ball);
  const TorusGeometry torus = geom.torus();
  const double r2 = ball.radius * ball.radius;
  double vol = 0.0;
  for (int dir = 0; dir < geom.dir_count(); ++dir) {
    if (chord_sq(geom.grid.dim, ball.center.omega, geom.sphere.dirs[dir]) > r2) continue;
    double cnt = 0.0;
    for_each_box(geom.grid, ball.center.x, ball.radius,
                 [&](std::size_t, const Vec3& pos) {
                   CospherePoint q;
                   q.x = pos;
                   q.omega = geom.sphere.dirs[dir];
                   if (quasi_dist(torus, q, ball.center) <= ball.radius) cnt += 1.0;
                 });
    vol += cnt * geom.sphere.weights[dir];
  }
  return vol * geom.grid.cell_measure();
}

double bundle_diameter(const PhaseSpaceGeometry& geom) {
  const double half = 0.5 * geom.grid.extent;
  const double dim = static_cast<double>(geom.grid.dim);
  const double max_pos = half * std::sqrt(dim);
  return std::sqrt(2.0 * max_pos + dim * half * half + 4.0);
}

double tent_energy(const PhaseSpaceField& F, const BallSpec& ball) {
  const PhaseSpaceGeometry& geom = F.geometry();
  check_ball(ball);
  const TorusGeometry torus = geom.torus();
  double total = 0.0;
  for (int level = 0; level < geom.level_count(); ++level) {
    const double sigma = geom.sigmas.levels[level];
    const double reach = ball.radius - std::sqrt(sigma);
    if (reach < 0.0) continue;
    for (int src = 0; src < geom.dir_count(); ++src) {
      const std::vector<cplx>* s = F.slice(src, level);
      if (!s) continue;
      if (chord_sq(geom.grid.dim, ball.center.omega, geom.sphere.dirs[src]) >
          reach * reach)
        continue;
      double e = 0.0;
      for_each_box(geom.grid, ball.center.x, reach, [&](std::size_t flat, const Vec3& pos) {
        CospherePoint q;
        q.x = pos;
        q.omega = geom.sphere.dirs[src];
        if (in_tent(torus, q, sigma, ball)) e += std::norm((*s)[flat]);
      });
      total += e * geom.cell_weight(src, level);
    }
  }
  return total;
}

double carleson_ball_value(const PhaseSpaceField& F, const BallSpec& ball) {
  const double vol = discrete_ball_volume(F.geometry(), ball);
  if (!(vol > 0.0))
    throw ResolutionError("carleson: ball of radius " + format_double(ball.radius) +
                          " contains no grid cells");
  return std::sqrt(tent_energy(F, ball) / vol);
}

DirectionField carleson_functional(const PhaseSpaceField& F,
                                   const std::vector<CospherePoint>& centers,
                                   const std::vector<double>& radii) {
  const PhaseSpaceGeometry& geom = F.geometry();
  F.validate();
  if (centers.empty() || radii.empty())
    throw ConfigError("carleson: ball family is empty");
  for (double r : radii)
    if (!(r > 0.0)) throw DomainError("carleson: radii must be positive");

  const TorusGeometry torus = geom.torus();
  const std::size_t n = geom.grid.size();
  DirectionField out;
  out.grid = geom.grid;
  out.sphere = geom.sphere;
  out.values.assign(static_cast<std::size_t>(geom.dir_count()) * n, 0.0);

  for (double r : radii) {
    for (const CospherePoint& c : centers) {
      const BallSpec ball{c, r};
      const double vol = discrete_ball_volume(geom, ball);
      if (!(vol > 0.0)) continue;  // covers no cell, contributes nowhere
      const double val = std::sqrt(tent_energy(F, ball) / vol);
      if (!(val > 0.0)) continue;
      const double r2 = r * r;
      for (int dir = 0; dir < geom.dir_count(); ++dir) {
        if (chord_sq(geom.grid.dim, c.omega, geom.sphere.dirs[dir]) > r2) continue;
        double* row = &out.values[static_cast<std::size_t>(dir) * n];
        for_each_box(geom.grid, c.x, r, [&](std::size_t flat, const Vec3& pos) {
          CospherePoint q;
          q.x = pos;
          q.omega = geom.sphere.dirs[dir];
          if (quasi_dist(torus, q, c) <= r && val > row[flat]) row[flat] = val;
        });
      }
    }
  }
  return out;
}

CarlesonFamily standard_carleson_family(const PhaseSpaceGeometry& geom,
                                        int centers_per_axis, int dir_samples,
                                        int radii_count) {
  geom.validate();
  if (centers_per_axis < 1 || dir_samples < 1 || radii_count < 2)
    throw ConfigError("carleson family: need >= 1 center/axis, >= 1 direction, >= 2 radii");
  CarlesonFamily fam;
  const int m = geom.grid.points_per_axis;
  const int sx = std::max(1, m / centers_per_axis);
  const int sd = std::max(1, geom.dir_count() / dir_samples);
  for (int dir = 0; dir < geom.dir_count(); dir += sd) {
    int idx[3] = {0, 0, 0};
    for (int i0 = 0; i0 < m; i0 += sx) {
      idx[0] = i0;
      for (int i1 = 0; i1 < (geom.grid.dim >= 2 ? m : 1); i1 += sx) {
        idx[1] = i1;
        for (int i2 = 0; i2 < (geom.grid.dim >= 3 ? m : 1); i2 += sx) {
          idx[2] = i2;
          CospherePoint p;
          for (int d = 0; d < geom.grid.dim; ++d) p.x[d] = geom.grid.coord(idx[d]);
          p.omega = geom.sphere.dirs[dir];
          fam.centers.push_back(p);
        }
      }
    }
  }
  const double r0 = std::sqrt(geom.sigmas.levels[0]);
  const double r1 = bundle_diameter(geom);
  for (int k = 0; k < radii_count; ++k)
    fam.radii.push_back(r0 * std::pow(r1 / r0, static_cast<double>(k) /
                                                   static_cast<double>(radii_count - 1)));
  return fam;
}

double tent_norm(const PhaseSpaceField& F, double p) {
  if (std::isnan(p) || p < 1.0)
    throw DomainError("tent norm: p must lie in [1, inf], got " + format_double(p));
  F.validate();
  if (std::isinf(p)) {
    const CarlesonFamily fam = standard_carleson_family(F.geometry());
    double best = 0.0;
    for (double r : fam.radii) {
      for (const CospherePoint& c : fam.centers) {
        const BallSpec ball{c, r};
        const double vol = discrete_ball_volume(F.geometry(), ball);
        if (!(vol > 0.0)) continue;
        best = std::max(best, std::sqrt(tent_energy(F, ball) / vol));
      }
    }
    return best;
  }
  return lusin_functional(F).lp_norm(p);
}

PhaseSpaceField make_atom(const PhaseSpaceGeometry& geom, const BallSpec& ball,
                          AtomShape shape) {
  geom.validate();
  check_ball(ball);
  const TorusGeometry torus = geom.torus();
  PhaseSpaceField atom(geom);

  // Pass 1: total tent measure and the deepest tent cell (largest sigma,
  // ties broken by distance to the center, then by index order) for the
  // single-cell shape.
  double tent_measure = 0.0;
  std::size_t cells = 0;
  int best_level = -1;
  int best_dir = -1;
  std::size_t best_x = 0;
  double best_dist = 0.0;
  for (int level = 0; level < geom.level_count(); ++level) {
    const double sigma = geom.sigmas.levels[level];
    const double reach = ball.radius - std::sqrt(sigma);
    if (reach < 0.0) continue;
    for (int src = 0; src < geom.dir_count(); ++src) {
      if (chord_sq(geom.grid.dim, ball.center.omega, geom.sphere.dirs[src]) >
          reach * reach)
        continue;
      const double w = geom.cell_weight(src, level);
      for_each_box(geom.grid, ball.center.x, reach, [&](std::size_t flat, const Vec3& pos) {
        CospherePoint q;
        q.x = pos;
        q.omega = geom.sphere.dirs[src];
        if (!in_tent(torus, q, sigma, ball)) return;
        tent_measure += w;
        ++cells;
        const double dist = quasi_dist(torus, q, ball.center);
        if (best_level < 0 || level > best_level ||
            (level == best_level && dist < best_dist)) {
          best_level = level;
          best_dir = src;
          best_x = flat;
          best_dist = dist;
        }
      });
    }
  }
  if (cells == 0)
    throw ResolutionError("atom: tent of radius " + format_double(ball.radius) +
                          " contains no cells (finest sqrt(sigma) = " +
                          format_double(std::sqrt(geom.sigmas.levels[0])) + ")");
  const double vol = discrete_ball_volume(geom, ball);
  if (!(vol > 0.0))
    throw ResolutionError("atom: ball of radius " + format_double(ball.radius) +
                          " contains no grid cells");

  if (shape == AtomShape::kFlat) {
    const double value = 1.0 / std::sqrt(vol * tent_measure);
    for (int level = 0; level < geom.level_count(); ++level) {
      const double sigma = geom.sigmas.levels[level];
      const double reach = ball.radius - std::sqrt(sigma);
      if (reach < 0.0) continue;
      for (int src = 0; src < geom.dir_count(); ++src) {
        if (chord_sq(geom.grid.dim, ball.center.omega, geom.sphere.dirs[src]) >
            reach * reach)
          continue;
        for_each_box(geom.grid, ball.center.x, reach,
                     [&](std::size_t flat, const Vec3& pos) {
                       CospherePoint q;
                       q.x = pos;
                       q.omega = geom.sphere.dirs[src];
                       if (!in_tent(torus, q, sigma, ball)) return;
                       atom.slice_mut(src, level)[flat] = cplx(value, 0.0);
                     });
      }
    }
  } else {
    const double w = geom.cell_weight(best_dir, best_level);
    atom.slice_mut(best_dir, best_level)[best_x] = cplx(1.0 / std::sqrt(vol * w), 0.0);
  }
  return atom;
}

// ---------------------------------------------------------------------------
// Binary container and CSV reports
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'F', 'I', 'O', 'P'};
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
  if (!in)
    throw StructuralError(std::string("phase-space file: truncated while reading ") + what);
  return v;
}

double read_f64(std::ifstream& in, const char* what) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in)
    throw StructuralError(std::string("phase-space file: truncated while reading ") + what);
  return v;
}

}  // namespace

void write_phase_space(const std::string& path, const PhaseSpaceField& F) {
  F.validate();
  const PhaseSpaceGeometry& geom = F.geometry();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("phase-space file: cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(geom.grid.dim));
  for (int d = 0; d < geom.grid.dim; ++d)
    write_u32(out, static_cast<std::uint32_t>(geom.grid.points_per_axis));
  write_u32(out, static_cast<std::uint32_t>(geom.dir_count()));
  write_u32(out, static_cast<std::uint32_t>(geom.level_count()));
  write_f64(out, geom.grid.extent);
  write_f64(out, geom.sigmas.sigma_min);
  const std::size_t n = geom.grid.size();
  for (int dir = 0; dir < geom.dir_count(); ++dir) {
    for (int level = 0; level < geom.level_count(); ++level) {
      const std::vector<cplx>* s = F.slice(dir, level);
      for (std::size_t x = 0; x < n; ++x) {
        const cplx v = s ? (*s)[x] : cplx(0.0, 0.0);
        write_f64(out, v.real());
        write_f64(out, v.imag());
      }
    }
  }
  if (!out) throw ConfigError("phase-space file: write failed for '" + path + "'");
}

PhaseSpaceField read_phase_space(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("phase-space file: cannot open '" + path + "'");
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw StructuralError("phase-space file: bad magic in '" + path + "'");
  const std::uint32_t version = read_u32(in, "version");
  if (version != kVersion)
    throw StructuralError("phase-space file: unsupported version " +
                          std::to_string(version));
  const std::uint32_t dim = read_u32(in, "dim");
  if (dim != 2 && dim != 3)
    throw StructuralError("phase-space file: dim must be 2 or 3, got " +
                          std::to_string(dim));
  std::uint32_t per_axis = 0;
  for (std::uint32_t d = 0; d < dim; ++d) {
    const std::uint32_t m = read_u32(in, "axis size");
    if (d == 0)
      per_axis = m;
    else if (m != per_axis)
      throw StructuralError("phase-space file: anisotropic grids are not supported");
  }
  const std::uint32_t dirs = read_u32(in, "direction count");
  const std::uint32_t levels = read_u32(in, "level count");
  if (levels < 2)
    throw StructuralError("phase-space file: need at least one packet level plus cap");
  const double extent = read_f64(in, "extent");
  const double sigma_min = read_f64(in, "sigma_min");

  PhaseSpaceGeometry geom;
  geom.grid.dim = static_cast<int>(dim);
  geom.grid.points_per_axis = static_cast<int>(per_axis);
  geom.grid.extent = extent;
  geom.grid.validate();
  geom.sphere = SphereGrid::make(static_cast<int>(dim), static_cast<int>(dirs));
  geom.sigmas = SigmaGrid::geometric(sigma_min, static_cast<int>(levels) - 1);
  geom.validate();

  PhaseSpaceField F(geom);
  const std::size_t n = geom.grid.size();
  std::vector<cplx> tmp(n);
  for (int dir = 0; dir < geom.dir_count(); ++dir) {
    for (int level = 0; level < geom.level_count(); ++level) {
      bool any = false;
      for (std::size_t x = 0; x < n; ++x) {
        const double re = read_f64(in, "sample");
        const double im = read_f64(in, "sample");
        tmp[x] = cplx(re, im);
        if (re != 0.0 || im != 0.0) any = true;
      }
      if (any) F.slice_mut(dir, level) = tmp;
    }
  }
  char probe;
  in.read(&probe, 1);
  if (in.gcount() != 0)
    throw StructuralError("phase-space file: trailing bytes in '" + path + "'");
  F.validate();
  return F;
}

void write_norm_report(const std::string& path, const std::vector<NormReportRow>& rows) {
  CsvWriter csv(path);
  csv.header({"field_id", "p", "norm", "grid"});
  for (const NormReportRow& r : rows) {
    csv.field(r.field_id).field(r.p).field(r.norm).field(r.grid_tag);
    csv.end_row();
  }
}

}  // namespace fiohardy
