#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace fiohardy {

// The standard compactly supported smooth bump on (1/2, 2), used as the
// default generator for all packet profiles.
double annulus_bump(double t);

// Composite Gauss-Legendre quadrature over [a, b], refined by doubling the
// cell count until the relative change drops below tol.
double refine_integral(const std::function<double(double)>& f, double a,
                       double b, double tol);

// Cumulative integral of a smooth integrand over [lo, hi], tabulated once
// with per-cell Gauss-Legendre quadrature and evaluated with cubic Hermite
// interpolation whose slopes are exact integrand values.
class CumulativeTable {
 public:
  CumulativeTable(const std::function<double(double)>& f, double lo, double hi,
                  int cells);

  double lower() const { return lo_; }
  double upper() const { return hi_; }
  double total() const { return cum_.back(); }
  // Integral from lo to t, clamped outside [lo, hi].
  double value(double t) const;

 private:
  double lo_, hi_, h_;
  std::vector<double> cum_;
  std::vector<double> slope_;
};

// Generating profiles for the packet dictionary:
//   step(t)    smoothed indicator, 1 on [0,1/2], 0 on [2,inf), monotone;
//   radial(t)  annular profile normalized so that its squared dilation
//              integral over all scales is exactly 1;
//   cap(t)     low-frequency envelope, 1 on [0,1/2], 0 on [2,inf), whose
//              square completes the scale integral below scale one.
// The direction normalization c_sigma makes the squared angular profile
// integrate to one over the unit sphere.
class ProfilePair {
 public:
  using Bump = std::function<double(double)>;

  static ProfilePair build(const Bump& bump);

  double step(double t) const;
  double radial(double t) const;
  double cap(double t) const;

  // Normalization integral of the squared radial profile over scales.
  double bump_integral() const { return radial_norm_; }
  // Integral of the bump itself (the step denominator).
  double step_integral() const { return step_total_; }

  // c_sigma for the given ambient dimension; quadrature-refined and cached.
  double direction_normalization(int dim, double sigma) const;

  // CSV dump (t, bump, step, radial, cap) on a 4096-point log grid.
  void dump_csv(const std::string& path) const;

 private:
  ProfilePair(Bump bump, CumulativeTable step_table, CumulativeTable sq_table);

  struct Cache {
    std::mutex mutex;
    std::map<std::pair<int, double>, double> values;
  };

  Bump bump_;
  CumulativeTable step_table_;  // integral of bump
  CumulativeTable sq_table_;    // integral of bump(u)^2 / u
  double step_total_;
  double radial_norm_;
  double radial_scale_;  // 1 / sqrt(radial_norm_)
  std::unique_ptr<Cache> cache_;
};

ProfilePair build_profiles();
ProfilePair build_profiles(const ProfilePair::Bump& bump);

}  // namespace fiohardy
