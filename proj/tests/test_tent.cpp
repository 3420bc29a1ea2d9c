#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "fiohardy/rng.hpp"
#include "fiohardy/tent.hpp"

using namespace fiohardy;

namespace {

PhaseSpaceGeometry small_geometry() {
  PhaseSpaceGeometry g;
  g.grid = GridSpec{2, 16, 1.5};
  g.sphere = SphereGrid::uniform_circle(8);
  g.sigmas = SigmaGrid::geometric(1.0 / 16.0, 5);
  return g;
}

// Same direction/scale content on a finer spatial grid.
PhaseSpaceGeometry refined_geometry() {
  PhaseSpaceGeometry g = small_geometry();
  g.grid.points_per_axis = 32;
  return g;
}

PhaseSpaceGeometry small_geometry_3d() {
  PhaseSpaceGeometry g;
  g.grid = GridSpec{3, 16, 1.5};
  g.sphere = SphereGrid::fibonacci_sphere(12);
  g.sigmas = SigmaGrid::geometric(1.0 / 8.0, 3);
  return g;
}

// Dense field with gaussian entries in every slice.
PhaseSpaceField dense_random_field(const PhaseSpaceGeometry& geom, std::uint64_t seed) {
  PhaseSpaceField f(geom);
  CounterRng rng(seed, 71);
  std::uint64_t ctr = 0;
  for (int dir = 0; dir < geom.dir_count(); ++dir) {
    for (int level = 0; level < geom.level_count(); ++level) {
      std::vector<cplx>& s = f.slice_mut(dir, level);
      for (cplx& v : s) {
        const auto gp = rng.gaussian_pair(ctr++);
        v = cplx(gp[0], gp[1]);
      }
    }
  }
  return f;
}

// Sparse field: `cells` random nonzero entries.
PhaseSpaceField sparse_random_field(const PhaseSpaceGeometry& geom, std::uint64_t seed,
                                    int cells) {
  PhaseSpaceField f(geom);
  CounterRng rng(seed, 72);
  const std::size_t n = geom.grid.size();
  for (int c = 0; c < cells; ++c) {
    const int dir = static_cast<int>(rng.below(4 * c, geom.dir_count()));
    const int level = static_cast<int>(rng.below(4 * c + 1, geom.level_count()));
    const std::size_t x = rng.below(4 * c + 2, n);
    const auto gp = rng.gaussian_pair(4 * c + 3);
    f.slice_mut(dir, level)[x] += cplx(gp[0], gp[1]);
  }
  return f;
}

int signed_offset(int a, int b, int m) {
  int d = (a - b) % m;
  if (d < 0) d += m;
  return d <= m / 2 ? d : d - m;
}

// Direct-summation ball volume: same membership predicate, independent loops.
double ref_vhat(const PhaseSpaceGeometry& geom, int level, int src) {
  const GridSpec& grid = geom.grid;
  const double sigma = geom.sigmas.levels[level];
  double vol = 0.0;
  for (int dir = 0; dir < geom.dir_count(); ++dir) {
    double cnt = 0.0;
    for (std::size_t m = 0; m < grid.size(); ++m) {
      int idx[3] = {0, 0, 0};
      unflatten(grid, m, idx);
      int didx[3] = {0, 0, 0};
      for (int d = 0; d < grid.dim; ++d) didx[d] = signed_offset(idx[d], 0, grid.points_per_axis);
      if (lattice_quasi_gauge(grid, geom.sphere.dirs[src], geom.sphere.dirs[dir], didx) <=
          sigma)
        cnt += 1.0;
    }
    vol += cnt * geom.sphere.weights[dir];
  }
  return vol * grid.cell_measure();
}

// Direct-summation conical square function at one output cell.
double ref_lusin_at(const PhaseSpaceField& F, std::size_t x_flat, int dir) {
  const PhaseSpaceGeometry& geom = F.geometry();
  const GridSpec& grid = geom.grid;
  int xi[3] = {0, 0, 0};
  unflatten(grid, x_flat, xi);
  double total = 0.0;
  for (int level = 0; level < geom.level_count(); ++level) {
    const double sigma = geom.sigmas.levels[level];
    for (int src = 0; src < geom.dir_count(); ++src) {
      if (!F.slice(src, level)) continue;
      const double vhat = ref_vhat(geom, level, src);
      double e = 0.0;
      for (std::size_t y = 0; y < grid.size(); ++y) {
        int yi[3] = {0, 0, 0};
        unflatten(grid, y, yi);
        int didx[3] = {0, 0, 0};
        for (int d = 0; d < grid.dim; ++d)
          didx[d] = signed_offset(xi[d], yi[d], grid.points_per_axis);
        if (lattice_quasi_gauge(grid, geom.sphere.dirs[dir], geom.sphere.dirs[src], didx) <=
            sigma)
          e += std::norm(F.at(y, src, level));
      }
      total += geom.sigmas.weights[level] * e * grid.cell_measure() *
               geom.sphere.weights[src] / vhat;
    }
  }
  return std::sqrt(total);
}

// Indicator of the tent over `ball`, unit magnitude on every tent cell.
PhaseSpaceField tent_indicator(const PhaseSpaceGeometry& geom, const BallSpec& ball) {
  PhaseSpaceField f(geom);
  const TorusGeometry torus = geom.torus();
  for (int level = 0; level < geom.level_count(); ++level) {
    for (int dir = 0; dir < geom.dir_count(); ++dir) {
      for (std::size_t x = 0; x < geom.grid.size(); ++x) {
        int idx[3] = {0, 0, 0};
        unflatten(geom.grid, x, idx);
        CospherePoint q;
        for (int d = 0; d < geom.grid.dim; ++d) q.x[d] = geom.grid.coord(idx[d]);
        q.omega = geom.sphere.dirs[dir];
        if (in_tent(torus, q, geom.sigmas.levels[level], ball))
          f.slice_mut(dir, level)[x] = cplx(1.0, 0.0);
      }
    }
  }
  return f;
}

double tent_measure_direct(const PhaseSpaceField& indicator) {
  const PhaseSpaceGeometry& geom = indicator.geometry();
  double total = 0.0;
  for (int dir = 0; dir < geom.dir_count(); ++dir)
    for (int level = 0; level < geom.level_count(); ++level) {
      const std::vector<cplx>* s = indicator.slice(dir, level);
      if (!s) continue;
      for (const cplx& v : *s) total += std::norm(v) * geom.cell_weight(dir, level);
    }
  return total;
}

// Random ball whose center sits on a bundle grid cell. Off-grid centers can
// produce legitimately empty tents at coarse direction resolution (the
// nearest grid direction may already be further than the radius budget), so
// ball sampling for atom tests stays on the lattice.
BallSpec random_cell_ball(const PhaseSpaceGeometry& geom, CounterRng& rng, int trial,
                          double r_lo, double r_hi) {
  BallSpec ball;
  const int i0 = static_cast<int>(rng.below(5 * trial, geom.grid.points_per_axis));
  const int i1 = static_cast<int>(rng.below(5 * trial + 1, geom.grid.points_per_axis));
  const int dir = static_cast<int>(rng.below(5 * trial + 2, geom.dir_count()));
  ball.center.x = {geom.grid.coord(i0), geom.grid.coord(i1), 0.0};
  ball.center.omega = geom.sphere.dirs[dir];
  ball.radius = rng.uniform(5 * trial + 3, r_lo, r_hi);
  return ball;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST(PhaseSpace, GeometryValidatesAndTags) {
  PhaseSpaceGeometry g = small_geometry();
  EXPECT_NO_THROW(g.validate());
  EXPECT_EQ(g.tag(), "n2_M16_A8_J6");
  EXPECT_EQ(g.level_count(), 6);
  EXPECT_EQ(g.dir_count(), 8);

  PhaseSpaceGeometry bad = g;
  bad.sphere = SphereGrid::fibonacci_sphere(12);
  EXPECT_THROW(bad.validate(), StructuralError);
}

TEST(PhaseSpace, SliceStorageIsSparse) {
  PhaseSpaceField f(small_geometry());
  EXPECT_EQ(f.allocated_values(), 0u);
  EXPECT_EQ(f.slice(3, 2), nullptr);
  EXPECT_EQ(f.at(17, 3, 2), cplx(0.0, 0.0));

  f.slice_mut(3, 2)[17] = cplx(2.0, -1.0);
  EXPECT_TRUE(f.slice_allocated(3, 2));
  EXPECT_EQ(f.allocated_values(), f.geometry().grid.size());
  EXPECT_EQ(f.at(17, 3, 2), cplx(2.0, -1.0));

  const double w = f.geometry().cell_weight(3, 2);
  EXPECT_NEAR(f.weighted_l2(), std::sqrt(5.0 * w), 1e-14);
  EXPECT_NEAR(f.max_abs(), std::sqrt(5.0), 1e-14);

  f.drop_slice(3, 2);
  EXPECT_EQ(f.allocated_values(), 0u);
  EXPECT_THROW(f.slice(8, 0), StructuralError);
  EXPECT_THROW(f.slice(0, 6), StructuralError);
}

TEST(PhaseSpace, ValidateRejectsNonFiniteEntries) {
  PhaseSpaceField f(small_geometry());
  f.slice_mut(1, 1)[5] = cplx(std::nan(""), 0.0);
  EXPECT_THROW(f.validate(), NumericError);
}

TEST(Lusin, ZeroFieldGivesZero) {
  PhaseSpaceField f(small_geometry());
  const DirectionField a = lusin_functional(f);
  for (double v : a.values) EXPECT_EQ(v, 0.0);
}

TEST(Lusin, BallVolumesMatchDirectCountAndGrowWithScale) {
  const PhaseSpaceGeometry geom = small_geometry();
  for (int dir : {0, 1, 3}) {
    double prev = 0.0;
    for (int level = 0; level < geom.level_count(); ++level) {
      const double lib = lusin_ball_volume(geom, dir, level);
      const double ref = ref_vhat(geom, level, dir);
      EXPECT_NEAR(lib, ref, 1e-12 * ref) << "dir " << dir << " level " << level;
      EXPECT_GT(lib, 0.0);
      EXPECT_GE(lib, prev);  // indicator regions are nested in sigma
      prev = lib;
    }
  }
}

TEST(Lusin, SingleCellMatchesClosedForm) {
  const PhaseSpaceGeometry geom = small_geometry();
  const GridSpec& grid = geom.grid;
  const int dir0 = 3;
  const int level0 = 2;
  int x0i[3] = {5, 9, 0};
  const std::size_t x0 = flatten(grid, x0i);

  PhaseSpaceField f(geom);
  f.slice_mut(dir0, level0)[x0] = cplx(1.0, 0.0);
  const DirectionField a = lusin_functional(f);

  const double sigma = geom.sigmas.levels[level0];
  const double expected_sq = geom.sigmas.weights[level0] * grid.cell_measure() *
                             geom.sphere.weights[dir0] / ref_vhat(geom, level0, dir0);
  for (int dir = 0; dir < geom.dir_count(); ++dir) {
    for (std::size_t x = 0; x < grid.size(); ++x) {
      int xi[3] = {0, 0, 0};
      unflatten(grid, x, xi);
      int didx[3] = {0, 0, 0};
      for (int d = 0; d < grid.dim; ++d)
        didx[d] = signed_offset(xi[d], x0i[d], grid.points_per_axis);
      const bool member =
          lattice_quasi_gauge(grid, geom.sphere.dirs[dir], geom.sphere.dirs[dir0], didx) <=
          sigma;
      const double want = member ? std::sqrt(expected_sq) : 0.0;
      EXPECT_NEAR(a.at(x, dir), want, 1e-12 * std::sqrt(expected_sq))
          << "dir " << dir << " x " << x;
    }
  }
}

TEST(Lusin, MatchesDirectSummationOnRandomFields) {
  const PhaseSpaceGeometry geom = small_geometry();
  const PhaseSpaceField sparse = sparse_random_field(geom, 2101, 40);
  const PhaseSpaceField dense = dense_random_field(geom, 2102);
  for (const PhaseSpaceField* f : {&sparse, &dense}) {
    const DirectionField a = lusin_functional(*f);
    CounterRng rng(555, 1);
    double max_ref = 0.0;
    for (int t = 0; t < 24; ++t) {
      const int dir = static_cast<int>(rng.below(2 * t, geom.dir_count()));
      const std::size_t x = rng.below(2 * t + 1, geom.grid.size());
      const double ref = ref_lusin_at(*f, x, dir);
      max_ref = std::max(max_ref, ref);
      EXPECT_NEAR(a.at(x, dir), ref, 1e-11 * (1.0 + ref)) << "dir " << dir << " x " << x;
    }
    EXPECT_GT(max_ref, 0.0);
  }
}

TEST(Lusin, ThreeDimensionalEngineMatchesReference) {
  const PhaseSpaceGeometry geom = small_geometry_3d();
  const PhaseSpaceField f = sparse_random_field(geom, 733, 30);
  const DirectionField a = lusin_functional(f);
  CounterRng rng(556, 2);
  for (int t = 0; t < 12; ++t) {
    const int dir = static_cast<int>(rng.below(2 * t, geom.dir_count()));
    const std::size_t x = rng.below(2 * t + 1, geom.grid.size());
    const double ref = ref_lusin_at(f, x, dir);
    EXPECT_NEAR(a.at(x, dir), ref, 1e-11 * (1.0 + ref));
  }
  const double l2 = f.weighted_l2();
  EXPECT_NEAR(tent_norm(f, 2.0), l2, 1e-10 * l2);
}

TEST(Lusin, TSquareIdentityOnFiftyRandomFields) {
  const PhaseSpaceGeometry geom = small_geometry();
  for (int trial = 0; trial < 50; ++trial) {
    const PhaseSpaceField f = trial % 2 == 0
                                  ? dense_random_field(geom, 9000 + trial)
                                  : sparse_random_field(geom, 9000 + trial, 25);
    const double l2 = f.weighted_l2();
    ASSERT_GT(l2, 0.0);
    const double t2 = tent_norm(f, 2.0);
    EXPECT_NEAR(t2, l2, 1e-10 * l2) << "trial " << trial;
  }
}

TEST(Lusin, CommutesWithPhaseRotation) {
  const PhaseSpaceGeometry geom = small_geometry();
  PhaseSpaceField f = dense_random_field(geom, 404);
  PhaseSpaceField g(geom);
  const cplx phase = std::polar(1.0, 1.234);
  for (int dir = 0; dir < geom.dir_count(); ++dir)
    for (int level = 0; level < geom.level_count(); ++level) {
      const std::vector<cplx>* s = f.slice(dir, level);
      if (!s) continue;
      std::vector<cplx>& t = g.slice_mut(dir, level);
      for (std::size_t x = 0; x < s->size(); ++x) t[x] = phase * (*s)[x];
    }
  const DirectionField af = lusin_functional(f);
  const DirectionField ag = lusin_functional(g);
  const double scale = af.sup();
  ASSERT_GT(scale, 0.0);
  for (std::size_t i = 0; i < af.values.size(); ++i)
    EXPECT_NEAR(af.values[i], ag.values[i], 1e-13 * scale);
}

TEST(Carleson, ZeroFieldGivesZero) {
  const PhaseSpaceGeometry geom = small_geometry();
  const PhaseSpaceField f(geom);
  const CarlesonFamily fam = standard_carleson_family(geom, 4, 4, 5);
  const DirectionField c = carleson_functional(f, fam.centers, fam.radii);
  for (double v : c.values) EXPECT_EQ(v, 0.0);
}

TEST(Carleson, TentIndicatorAttainsItsOwnBall) {
  const PhaseSpaceGeometry geom = small_geometry();
  BallSpec ball;
  ball.center = make_point2(geom.grid.coord(4), geom.grid.coord(10), 1.0, 0.0);
  ball.radius = 0.8;
  const PhaseSpaceField f = tent_indicator(geom, ball);
  const double measure = tent_measure_direct(f);
  ASSERT_GT(measure, 0.0);
  const double vol = discrete_ball_volume(geom, ball);
  const double bound = std::sqrt(measure / vol);

  const DirectionField c = carleson_functional(f, {ball.center}, {ball.radius});
  int ci[3] = {4, 10, 0};
  const double at_center = c.at(flatten(geom.grid, ci), 0);
  EXPECT_GE(at_center, bound * (1.0 - 1e-12));
  EXPECT_NEAR(at_center, bound, 1e-12 * bound);
  EXPECT_NEAR(carleson_ball_value(f, ball), bound, 1e-12 * bound);
}

TEST(Carleson, MonotoneInThePointwiseModulus) {
  const PhaseSpaceGeometry geom = small_geometry();
  const PhaseSpaceField f1 = sparse_random_field(geom, 31, 25);
  PhaseSpaceField f2(geom);
  CounterRng rng(32, 5);
  std::uint64_t ctr = 0;
  for (int dir = 0; dir < geom.dir_count(); ++dir)
    for (int level = 0; level < geom.level_count(); ++level) {
      const std::vector<cplx>* s = f1.slice(dir, level);
      if (!s) continue;
      std::vector<cplx>& t = f2.slice_mut(dir, level);
      for (std::size_t x = 0; x < s->size(); ++x)
        t[x] = (*s)[x] * (1.0 + rng.uniform(ctr++));
    }
  f2.slice_mut(0, 0)[3] += cplx(0.7, 0.2);  // extra mass keeps |f2| >= |f1|

  const CarlesonFamily fam = standard_carleson_family(geom, 4, 4, 6);
  const DirectionField c1 = carleson_functional(f1, fam.centers, fam.radii);
  const DirectionField c2 = carleson_functional(f2, fam.centers, fam.radii);
  for (std::size_t i = 0; i < c1.values.size(); ++i)
    EXPECT_LE(c1.values[i], c2.values[i] + 1e-14);
}

TEST(Carleson, RejectsEmptyFamilyAndBadRadii) {
  const PhaseSpaceGeometry geom = small_geometry();
  const PhaseSpaceField f = sparse_random_field(geom, 77, 10);
  EXPECT_THROW(carleson_functional(f, {}, {0.5}), ConfigError);
  EXPECT_THROW(carleson_functional(f, {make_point2(0, 0, 1, 0)}, {}), ConfigError);
  EXPECT_THROW(carleson_functional(f, {make_point2(0, 0, 1, 0)}, {-0.5}), DomainError);
}

TEST(Carleson, BallWithNoCellsRaisesResolutionError) {
  const PhaseSpaceGeometry geom = small_geometry();
  const PhaseSpaceField f = sparse_random_field(geom, 78, 10);
  BallSpec tiny;
  // off-lattice position, direction between grid directions, radius far below
  // the cell scale
  tiny.center = make_point2(0.0123, -0.0456, std::cos(0.2), std::sin(0.2));
  tiny.radius = 1e-3;
  EXPECT_EQ(discrete_ball_volume(geom, tiny), 0.0);
  EXPECT_THROW(carleson_ball_value(f, tiny), ResolutionError);
}

TEST(Carleson, FieldSupremumMatchesInfinityNorm) {
  const PhaseSpaceGeometry geom = small_geometry();
  const PhaseSpaceField f = sparse_random_field(geom, 501, 20);
  const CarlesonFamily fam = standard_carleson_family(geom);
  const DirectionField c = carleson_functional(f, fam.centers, fam.radii);
  const double ninf = tent_norm(f, std::numeric_limits<double>::infinity());
  EXPECT_NEAR(c.sup(), ninf, 1e-12 * ninf);
}

TEST(TentNorm, ScalesHomogeneously) {
  const PhaseSpaceGeometry geom = small_geometry();
  const PhaseSpaceField f = sparse_random_field(geom, 606, 25);
  const cplx lambda(-2.25, 1.75);
  PhaseSpaceField g(geom);
  for (int dir = 0; dir < geom.dir_count(); ++dir)
    for (int level = 0; level < geom.level_count(); ++level) {
      const std::vector<cplx>* s = f.slice(dir, level);
      if (!s) continue;
      std::vector<cplx>& t = g.slice_mut(dir, level);
      for (std::size_t x = 0; x < s->size(); ++x) t[x] = lambda * (*s)[x];
    }
  const double mag = std::abs(lambda);
  for (double p : {1.0, 1.5, 2.0, std::numeric_limits<double>::infinity()}) {
    const double np = tent_norm(f, p);
    const double nq = tent_norm(g, p);
    EXPECT_NEAR(nq, mag * np, 1e-12 * mag * np) << "p " << p;
  }
}

TEST(TentNorm, VerticalFunctionIsDominatedByConical) {
  double constants[2] = {0.0, 0.0};
  const PhaseSpaceGeometry geoms[2] = {small_geometry(), refined_geometry()};
  for (int g = 0; g < 2; ++g) {
    double worst = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      const PhaseSpaceField f = dense_random_field(geoms[g], 4200 + trial);
      // L1 norm of the vertical square function sqrt(sum_sigma |F|^2 Delta)
      const std::size_t n = geoms[g].grid.size();
      double vertical = 0.0;
      for (int dir = 0; dir < geoms[g].dir_count(); ++dir) {
        for (std::size_t x = 0; x < n; ++x) {
          double s = 0.0;
          for (int level = 0; level < geoms[g].level_count(); ++level)
            s += geoms[g].sigmas.weights[level] * std::norm(f.at(x, dir, level));
          vertical += std::sqrt(s) * geoms[g].grid.cell_measure() *
                      geoms[g].sphere.weights[dir];
        }
      }
      const double conical = tent_norm(f, 1.0);
      ASSERT_GT(conical, 0.0);
      worst = std::max(worst, vertical / conical);
    }
    constants[g] = worst;
  }
  EXPECT_GT(constants[0], 0.0);
  EXPECT_LT(constants[1] / constants[0], 2.0);
  EXPECT_GT(constants[1] / constants[0], 0.5);
}

TEST(TentNorm, RejectsExponentsBelowOne) {
  const PhaseSpaceField f(small_geometry());
  EXPECT_THROW(tent_norm(f, 0.5), DomainError);
  EXPECT_THROW(tent_norm(f, std::nan("")), DomainError);
}

TEST(Atom, SupportAndNormalizationAreExact) {
  const PhaseSpaceGeometry geom = small_geometry();
  const TorusGeometry torus = geom.torus();
  CounterRng rng(808, 3);
  for (int trial = 0; trial < 6; ++trial) {
    const BallSpec ball = random_cell_ball(geom, rng, trial, 0.3, 1.0);
    const double vol = discrete_ball_volume(geom, ball);
    ASSERT_GT(vol, 0.0);

    for (AtomShape shape : {AtomShape::kFlat, AtomShape::kSingleCell}) {
      const PhaseSpaceField atom = make_atom(geom, ball, shape);
      std::size_t nonzero = 0;
      for (int dir = 0; dir < geom.dir_count(); ++dir)
        for (int level = 0; level < geom.level_count(); ++level) {
          const std::vector<cplx>* s = atom.slice(dir, level);
          if (!s) continue;
          for (std::size_t x = 0; x < s->size(); ++x) {
            if ((*s)[x] == cplx(0.0, 0.0)) continue;
            ++nonzero;
            int idx[3] = {0, 0, 0};
            unflatten(geom.grid, x, idx);
            CospherePoint q;
            for (int d = 0; d < geom.grid.dim; ++d) q.x[d] = geom.grid.coord(idx[d]);
            q.omega = geom.sphere.dirs[dir];
            EXPECT_TRUE(in_tent(torus, q, geom.sigmas.levels[level], ball))
                << "atom mass outside the tent";
          }
        }
      ASSERT_GT(nonzero, 0u);
      if (shape == AtomShape::kSingleCell) {
        EXPECT_EQ(nonzero, 1u);
      }
      const double want = 1.0 / std::sqrt(vol);
      EXPECT_NEAR(atom.weighted_l2(), want, 1e-12 * want);
    }
  }
}

TEST(Atom, TentNormTwoMatchesTheNormalization) {
  const PhaseSpaceGeometry geom = small_geometry();
  BallSpec ball;
  ball.center = make_point2(geom.grid.coord(7), geom.grid.coord(2), 0.0, 1.0);
  ball.radius = 0.7;
  const double want = 1.0 / std::sqrt(discrete_ball_volume(geom, ball));
  for (AtomShape shape : {AtomShape::kFlat, AtomShape::kSingleCell}) {
    const PhaseSpaceField atom = make_atom(geom, ball, shape);
    EXPECT_NEAR(tent_norm(atom, 2.0), want, 1e-9 * want);
  }
}

TEST(Atom, TentNormOneBoundedStablyUnderRefinement) {
  double constants[2] = {0.0, 0.0};
  const PhaseSpaceGeometry geoms[2] = {small_geometry(), refined_geometry()};
  for (int g = 0; g < 2; ++g) {
    CounterRng rng(909, 4);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const BallSpec ball = random_cell_ball(geoms[g], rng, trial, 0.3, 1.0);
      const PhaseSpaceField atom = make_atom(geoms[g], ball, AtomShape::kFlat);
      const double t1 = tent_norm(atom, 1.0);
      ASSERT_TRUE(std::isfinite(t1));
      worst = std::max(worst, t1);
    }
    constants[g] = worst;
  }
  EXPECT_GT(constants[0], 0.0);
  EXPECT_LT(constants[1] / constants[0], 2.0);
  EXPECT_GT(constants[1] / constants[0], 0.5);
}

TEST(Atom, EmptyTentRaisesResolutionError) {
  const PhaseSpaceGeometry geom = small_geometry();
  BallSpec ball;
  ball.center = make_point2(0.0, 0.0, 1.0, 0.0);
  ball.radius = 0.2;  // below the finest sqrt(sigma) ~ 0.27
  EXPECT_THROW(make_atom(geom, ball, AtomShape::kFlat), ResolutionError);
  ball.radius = -1.0;
  EXPECT_THROW(make_atom(geom, ball, AtomShape::kFlat), DomainError);
}

TEST(StandardFamily, SpansScalesAndSitsOnTheGrid) {
  const PhaseSpaceGeometry geom = small_geometry();
  const CarlesonFamily fam = standard_carleson_family(geom);
  ASSERT_FALSE(fam.centers.empty());
  ASSERT_GE(fam.radii.size(), 2u);
  EXPECT_NEAR(fam.radii.front(), std::sqrt(geom.sigmas.levels[0]), 1e-15);
  EXPECT_NEAR(fam.radii.back(), bundle_diameter(geom), 1e-12);
  for (std::size_t i = 1; i < fam.radii.size(); ++i)
    EXPECT_GT(fam.radii[i], fam.radii[i - 1]);
}

TEST(PhaseSpaceIo, RoundTripsSparseFieldsBitwise) {
  const PhaseSpaceGeometry geom = small_geometry();
  const PhaseSpaceField f = sparse_random_field(geom, 321, 30);
  const std::string path = (std::filesystem::temp_directory_path() / "tent_rt.fiop").string();
  write_phase_space(path, f);
  const PhaseSpaceField g = read_phase_space(path);
  ASSERT_TRUE(g.geometry() == geom);
  for (int dir = 0; dir < geom.dir_count(); ++dir)
    for (int level = 0; level < geom.level_count(); ++level) {
      EXPECT_EQ(f.slice_allocated(dir, level), g.slice_allocated(dir, level));
      const std::vector<cplx>* a = f.slice(dir, level);
      const std::vector<cplx>* b = g.slice(dir, level);
      if (!a || !b) continue;
      for (std::size_t x = 0; x < a->size(); ++x) EXPECT_EQ((*a)[x], (*b)[x]);
    }
  std::filesystem::remove(path);
}

TEST(PhaseSpaceIo, RejectsCorruptContainers) {
  const PhaseSpaceGeometry geom = small_geometry();
  const PhaseSpaceField f = sparse_random_field(geom, 322, 5);
  const auto dir = std::filesystem::temp_directory_path();
  const std::string good = (dir / "tent_good.fiop").string();
  write_phase_space(good, f);
  const std::string data = slurp(good);

  const std::string bad_magic = (dir / "tent_badmagic.fiop").string();
  {
    std::string d = data;
    d[0] = 'X';
    std::ofstream out(bad_magic, std::ios::binary);
    out << d;
  }
  EXPECT_THROW(read_phase_space(bad_magic), StructuralError);

  const std::string truncated = (dir / "tent_trunc.fiop").string();
  {
    std::ofstream out(truncated, std::ios::binary);
    out << data.substr(0, data.size() / 2);
  }
  EXPECT_THROW(read_phase_space(truncated), StructuralError);

  const std::string trailing = (dir / "tent_trail.fiop").string();
  {
    std::ofstream out(trailing, std::ios::binary);
    out << data << "junk";
  }
  EXPECT_THROW(read_phase_space(trailing), StructuralError);

  for (const std::string& p : {good, bad_magic, truncated, trailing})
    std::filesystem::remove(p);
}

TEST(PhaseSpaceIo, NormReportUsesTheFixedColumns) {
  const std::string path = (std::filesystem::temp_directory_path() / "tent_norms.csv").string();
  std::vector<NormReportRow> rows;
  rows.push_back({"fld-a", 2.0, 1.25, "n2_M16_A8_J6"});
  rows.push_back({"fld-b", std::numeric_limits<double>::infinity(), 0.5, "n2_M16_A8_J6"});
  write_norm_report(path, rows);
  const std::string text = slurp(path);
  EXPECT_EQ(text,
            "field_id,p,norm,grid\n"
            "fld-a,2,1.25,n2_M16_A8_J6\n"
            "fld-b,inf,0.5,n2_M16_A8_J6\n");
  std::filesystem::remove(path);
}
