#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fiohardy/cosphere.hpp"
#include "fiohardy/errors.hpp"
#include "fiohardy/field_ops.hpp"
#include "fiohardy/fit.hpp"
#include "fiohardy/packets.hpp"
#include "fiohardy/profiles.hpp"

using namespace fiohardy;

namespace {

const ProfilePair& profiles() {
  static ProfilePair p = build_profiles();
  return p;
}

GridSpec desk_grid(int m = 128, double extent = 1.5) {
  GridSpec g;
  g.dim = 2;
  g.points_per_axis = m;
  g.extent = extent;
  return g;
}

}  // namespace

// Frozen values below come from the standalone quadrature oracle
// (tools/oracles/profile_quadrature), which shares no code with the library.

TEST(Profiles, NormalizationConstantsMatchQuadratureOracle) {
  const ProfilePair& p = profiles();
  EXPECT_NEAR(p.bump_integral(), 0.014201239362268896, 1e-12);
  EXPECT_NEAR(p.step_integral(), 0.12947581113844245, 1e-12);
}

TEST(Profiles, StepCapRadialSpotValues) {
  const ProfilePair& p = profiles();
  EXPECT_DOUBLE_EQ(p.step(0.3), 1.0);
  EXPECT_DOUBLE_EQ(p.step(2.4), 0.0);
  EXPECT_NEAR(p.step(0.7), 0.99336330075010659, 1e-10);
  EXPECT_NEAR(p.step(1.0), 0.80472673699142661, 1e-10);
  EXPECT_NEAR(p.step(1.6), 0.1025639518501178, 1e-10);
  EXPECT_DOUBLE_EQ(p.cap(0.25), 1.0);
  EXPECT_DOUBLE_EQ(p.cap(0.5), 1.0);
  EXPECT_NEAR(p.cap(0.6), 0.99999975563300469, 1e-10);
  EXPECT_NEAR(p.cap(0.75), 0.99706881397810387, 1e-10);
  EXPECT_NEAR(p.cap(1.0), 0.90392108627510215, 1e-10);
  EXPECT_NEAR(p.cap(1.5), 0.32272752313132841, 1e-10);
  EXPECT_NEAR(p.cap(1.9), 0.00039030267344093396, 1e-10);
  EXPECT_DOUBLE_EQ(p.cap(2.0), 0.0);
  EXPECT_NEAR(p.radial(1.25), 1.4182663448197412, 1e-10);
  EXPECT_DOUBLE_EQ(p.radial(0.5), 0.0);
  EXPECT_DOUBLE_EQ(p.radial(2.0), 0.0);
  // Monotone step.
  double prev = 1.0;
  for (int i = 1; i <= 100; ++i) {
    const double t = 0.5 + 1.5 * i / 100.0;
    const double v = p.step(t);
    EXPECT_LE(v, prev + 1e-14);
    prev = v;
  }
}

TEST(Profiles, ScaleIntegralIsExactByConstruction) {
  const ProfilePair& p = profiles();
  const double desk_step = std::log(128.0) / 48.0;
  const auto integrand = [&](double u) {
    const double v = p.radial(std::exp(u));
    return v * v;
  };
  // Cell-accurate quadrature on the 4x-refined log grid: the identity is
  // exact by construction, so the defect sits at quadrature floor.
  const double fine = desk_step / 4.0;
  double cellwise = 0.0;
  for (double u = std::log(0.25); u < std::log(2.5); u += fine)
    cellwise += refine_integral(integrand, u, u + fine, 1e-13);
  EXPECT_LT(std::fabs(cellwise - 1.0), 1e-10);
  // Plain midpoint sums give the frame-level accuracy of the scale grids.
  auto midpoint = [&](double du) {
    double sum = 0.0;
    for (double u = std::log(0.25) + 0.5 * du; u < std::log(2.5); u += du)
      sum += integrand(u) * du;
    return std::fabs(sum - 1.0);
  };
  EXPECT_LT(midpoint(desk_step), 5e-4);
  EXPECT_LT(midpoint(fine), 1e-8);
}

TEST(Profiles, DirectionNormalizationMatchesOracle) {
  const ProfilePair& p = profiles();
  const double sig[] = {0.25, 0.0625, 0.0078125, 1e-3, 1e-2, 1e-1};
  const double c2[] = {0.9466963090553232,  1.3462511793943577,
                       2.2676357384290036,  3.7918757205609457,
                       2.1317880318645321,  1.1957133341206159};
  const double c3[] = {1.0071672534461136, 2.0143345068922249,
                       5.6973983576062386, 15.924712528128968,
                       5.0358362672305912, 1.5924712528128928};
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(p.direction_normalization(2, sig[i]) / c2[i], 1.0, 1e-8);
    EXPECT_NEAR(p.direction_normalization(3, sig[i]) / c3[i], 1.0, 1e-8);
  }
  // Power-law growth of the normalization toward small scales.
  std::vector<double> scales{1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  std::vector<double> v2, v3;
  for (double s : scales) {
    v2.push_back(p.direction_normalization(2, s));
    v3.push_back(p.direction_normalization(3, s));
  }
  EXPECT_NEAR(fit_loglog(scales, v2).slope, -0.25, 0.05);
  EXPECT_NEAR(fit_loglog(scales, v3).slope, -0.5, 0.05);
}

TEST(Profiles, RejectsMalformedBumps) {
  EXPECT_THROW(build_profiles(ProfilePair::Bump{}), ConfigError);
  // Support leaking past 2.
  EXPECT_THROW(build_profiles([](double t) { return annulus_bump(0.5 * t); }),
               ConfigError);
  // Dead zone inside the annulus.
  EXPECT_THROW(build_profiles([](double t) {
                 return (t > 1.0 && t < 1.2) ? 0.0 : annulus_bump(t);
               }),
               ConfigError);
  // Values above one.
  EXPECT_THROW(build_profiles([](double t) { return 8.0 * annulus_bump(t); }),
               ConfigError);
}

TEST(Profiles, DumpCsvHasFullLogGrid) {
  const std::string path = ::testing::TempDir() + "profile_dump.csv";
  profiles().dump_csv(path);
  std::ifstream in(path);
  ASSERT_TRUE(in.is_open());
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line, "t,bump,step,radial,cap");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4096u);
}

TEST(PacketSymbol, SupportBoundsHoldOnTheLattice) {
  const GridSpec g = desk_grid();
  SpectralField probe;
  probe.grid = g;
  probe.coefficients.assign(g.size(), {0.0, 0.0});
  const Vec3 dirs[] = {{1.0, 0.0, 0.0}, {std::cos(0.7), std::sin(0.7), 0.0}};
  for (const Vec3& omega : dirs) {
    for (double sigma : {0.125, 0.03125}) {
      const PacketSymbol sym(profiles(), 2, {omega, sigma});
      std::size_t nonzero = 0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const Vec3 z = probe.frequency(k);
        const double v = sym(z);
        ASSERT_GE(v, -1e-14);
        if (v == 0.0) continue;
        ++nonzero;
        const double r = std::hypot(z[0], z[1]);
        ASSERT_GE(sigma * r, 0.5 - 1e-12);
        ASSERT_LE(sigma * r, 2.0 + 1e-12);
        const double chord =
            std::hypot(z[0] / r - omega[0], z[1] / r - omega[1]);
        ASSERT_LE(chord, 2.0 * std::sqrt(sigma) + 1e-12);
      }
      EXPECT_GT(nonzero, 8u);
    }
  }
  const PacketSymbol sym(profiles(), 2, {{1.0, 0.0, 0.0}, 0.125});
  EXPECT_EQ(sym({0.0, 0.0, 0.0}), 0.0);
}

TEST(PacketSymbol, ScaledSupMatchesContinuumEnvelope) {
  // Continuum sups from the oracle; the lattice sup can only undershoot.
  const double continuum[] = {0.95294802455700811, 0.95467136970445066,
                              0.95552217203418055, 0.95594492874609527,
                              0.95615565478238929};
  const GridSpec g = desk_grid();
  SpectralField probe;
  probe.grid = g;
  probe.coefficients.assign(g.size(), {0.0, 0.0});
  std::vector<double> scaled;
  for (int k = 3; k <= 7; ++k) {
    const double sigma = std::pow(2.0, -k);
    const PacketSymbol sym(profiles(), 2, {{1.0, 0.0, 0.0}, sigma});
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      sup = std::max(sup, sym(probe.frequency(i)));
    const double v = sup * std::pow(sigma, 0.25);
    EXPECT_LE(v, continuum[k - 3] * (1.0 + 1e-9));
    EXPECT_GE(v, 0.5 * continuum[k - 3]);
    scaled.push_back(v);
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  EXPECT_LE(*hi / *lo, 2.0);
}

TEST(PacketSymbol, RejectsBadIndices) {
  EXPECT_THROW(PacketSymbol(profiles(), 2, {{1.0, 0.0, 0.0}, 1.0}),
               DomainError);
  EXPECT_THROW(PacketSymbol(profiles(), 2, {{1.0, 0.0, 0.0}, 0.0}),
               DomainError);
  EXPECT_THROW(PacketSymbol(profiles(), 2, {{0.5, 0.5, 0.0}, 0.25}),
               DomainError);
  EXPECT_THROW(PacketSymbol(profiles(), 4, {{1.0, 0.0, 0.0}, 0.25}),
               ConfigError);
}

TEST(Plancherel, DefectAtDeskResolutionMatchesOracle) {
  const SphereGrid sphere = SphereGrid::uniform_circle(64);
  const SigmaGrid sigmas = SigmaGrid::geometric(1.0 / 128.0, 48);
  const Vec3 zeta{4.0 * std::cos(0.37), 4.0 * std::sin(0.37), 0.0};
  const double defect = plancherel_defect(zeta, profiles(), sphere, sigmas);
  EXPECT_NEAR(defect, 1.0003127471810531 - 1.0, 1e-8);
  EXPECT_LT(defect, 5e-3);
}

TEST(Plancherel, ExactInsideTheCapBand) {
  const SphereGrid sphere = SphereGrid::uniform_circle(64);
  const SigmaGrid sigmas = SigmaGrid::geometric(1.0 / 128.0, 48);
  const Vec3 zeta{0.3 * std::cos(1.1), 0.3 * std::sin(1.1), 0.0};
  EXPECT_LT(plancherel_defect(zeta, profiles(), sphere, sigmas), 1e-12);
}

TEST(Plancherel, StableUnderRotationOfTheFrequency) {
  const SphereGrid sphere = SphereGrid::uniform_circle(64);
  const SigmaGrid sigmas = SigmaGrid::geometric(1.0 / 128.0, 48);
  const double a = 0.37, b = 0.37 + M_PI / 7.0;
  const Vec3 z1{4.0 * std::cos(a), 4.0 * std::sin(a), 0.0};
  const Vec3 z2{4.0 * std::cos(b), 4.0 * std::sin(b), 0.0};
  const double d1 = plancherel_defect(z1, profiles(), sphere, sigmas);
  const double d2 = plancherel_defect(z2, profiles(), sphere, sigmas);
  EXPECT_NEAR(d2, 1.0003169087029629 - 1.0, 1e-8);
  EXPECT_LT(std::fabs(d1 - d2), 1e-2);
}

TEST(Plancherel, ZeroFrequencyThrows) {
  const SphereGrid sphere = SphereGrid::uniform_circle(64);
  const SigmaGrid sigmas = SigmaGrid::geometric(1.0 / 128.0, 48);
  EXPECT_THROW(plancherel_defect({0.0, 0.0, 0.0}, profiles(), sphere, sigmas),
               DomainError);
}

TEST(Decay, ScaledSupStableUnderGridRefinement) {
  const PacketIndex idx{{1.0, 0.0, 0.0}, 1.0 / 16.0};
  const DecayReport coarse = packet_space_decay(idx, profiles(), desk_grid(128));
  const DecayReport fine = packet_space_decay(idx, profiles(), desk_grid(256));
  ASSERT_GE(coarse.support_points, 4u);
  for (int N = 0; N < 3; ++N) {
    ASSERT_GT(fine.scaled_sup[N], 0.0);
    const double ratio = coarse.scaled_sup[N] / fine.scaled_sup[N];
    EXPECT_GT(ratio, 0.5);
    EXPECT_LT(ratio, 2.0);
  }
}

TEST(Decay, SpatialMassUniformAcrossScales) {
  std::vector<double> mass;
  for (int k = 3; k <= 6; ++k) {
    const PacketIndex idx{{1.0, 0.0, 0.0}, std::pow(2.0, -k)};
    mass.push_back(packet_space_decay(idx, profiles(), desk_grid(256)).l1_mass);
  }
  const auto [lo, hi] = std::minmax_element(mass.begin(), mass.end());
  EXPECT_GT(*lo, 0.0);
  EXPECT_LE(*hi / *lo, 2.0);
}

TEST(Decay, SecondMomentRadiiFollowParabolicScaling) {
  // A wider cell keeps the transverse tails (width ~ sqrt(sigma)) from
  // wrapping around and polluting the second moments.
  const GridSpec wide = desk_grid(384, 3.0);
  std::vector<double> scales, along, across;
  for (int k = 4; k <= 6; ++k) {
    const double sigma = std::pow(2.0, -k);
    const PacketIndex idx{{1.0, 0.0, 0.0}, sigma};
    const DecayReport rep = packet_space_decay(idx, profiles(), wide);
    scales.push_back(sigma);
    along.push_back(rep.along_radius);
    across.push_back(rep.across_radius);
  }
  EXPECT_NEAR(fit_loglog(scales, along).slope, 1.0, 0.1);
  EXPECT_NEAR(fit_loglog(scales, across).slope, 0.5, 0.1);
}

TEST(Decay, UnderresolvedPacketThrows) {
  const PacketIndex idx{{1.0, 0.0, 0.0}, 1.0 / 128.0};
  EXPECT_THROW(packet_space_decay(idx, profiles(), desk_grid(16)),
               ResolutionError);
}

TEST(Reproducing, ActsAsAConstantOnBandLimitedFields) {
  const GridSpec g = desk_grid(64);
  const SampledField f = random_band_limited(g, 5.0, 25.0, 20240817);
  const ReproducingFit fit = reproducing_constant(0.25, profiles(), f);
  EXPECT_LT(fit.residual, 1e-6);
  EXPECT_NEAR(fit.c_estimate / 1.7062782035168587, 1.0, 1e-6);
}

TEST(Reproducing, ConstantIsStableAcrossScales) {
  const GridSpec g = desk_grid(64);
  const SampledField f = random_band_limited(g, 5.0, 25.0, 7);
  const double sig[] = {0.25, 0.0625, 0.015625, 0.00390625};
  const double frozen[] = {1.7062782035168587, 1.6906763515030312,
                           1.6870059295000477, 1.6861014065287641};
  std::vector<double> cs;
  for (int i = 0; i < 4; ++i) {
    const ReproducingFit fit = reproducing_constant(sig[i], profiles(), f);
    EXPECT_LT(fit.residual, 1e-6);
    EXPECT_NEAR(fit.c_estimate / frozen[i], 1.0, 1e-6);
    cs.push_back(fit.c_estimate);
  }
  const auto [lo, hi] = std::minmax_element(cs.begin(), cs.end());
  EXPECT_LE(*hi / *lo, 2.0);
}

TEST(Reproducing, PlaneWaveReducesToTheNodalSum) {
  const GridSpec g = desk_grid(64);
  const int k[2] = {3, 2};
  const SampledField f = plane_wave(g, k);
  const double sigma = 0.125;
  const ReproducingFit fit = reproducing_constant(sigma, profiles(), f);
  EXPECT_LT(fit.residual, 1e-12);
  const double kx = g.freq_step() * k[0], ky = g.freq_step() * k[1];
  const double r = std::hypot(kx, ky);
  const double c_sigma = profiles().direction_normalization(2, sigma);
  double sum = 0.0;
  for (std::size_t j = 0; j < fit.nodes.size(); ++j) {
    const double chord =
        std::hypot(kx / r - fit.nodes[j][0], ky / r - fit.nodes[j][1]);
    sum += fit.weights[j] * profiles().step(chord / std::sqrt(sigma));
  }
  const double explicit_value = std::pow(sigma, -0.25) * c_sigma * sum;
  EXPECT_NEAR(fit.c_estimate, explicit_value, 1e-12);
}

TEST(Reproducing, ThreeDimensionalConstantMatchesOracle) {
  GridSpec g;
  g.dim = 3;
  g.points_per_axis = 32;
  g.extent = 1.5;
  const SampledField f = random_band_limited(g, 5.0, 25.0, 99);
  const ReproducingFit fit = reproducing_constant(0.25, profiles(), f);
  EXPECT_LT(fit.residual, 1e-6);
  EXPECT_NEAR(fit.c_estimate / 2.5805934228866434, 1.0, 1e-5);
}

TEST(Reproducing, MassAtFrequencyZeroThrows) {
  const GridSpec g = desk_grid(64);
  const SampledField f = gaussian_field(g, 0.2);
  EXPECT_THROW(reproducing_constant(0.25, profiles(), f), DomainError);
}
