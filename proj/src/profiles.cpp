#include "fiohardy/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fiohardy/csv.hpp"
#include "fiohardy/errors.hpp"

namespace fiohardy {

namespace {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGaussNode[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr double kGaussWeight[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

double gauss_cell(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 8; ++i)
    sum += kGaussWeight[i] * f(mid + half * kGaussNode[i]);
  return half * sum;
}

double gauss_composite(const std::function<double(double)>& f, double a,
                       double b, int cells) {
  double sum = 0.0;
  const double h = (b - a) / cells;
  for (int i = 0; i < cells; ++i)
    sum += gauss_cell(f, a + i * h, a + (i + 1) * h);
  return sum;
}

// Doubling refinement until the relative change drops below tol.
double gauss_adaptive(const std::function<double(double)>& f, double a,
                      double b, double tol) {
  double prev = gauss_composite(f, a, b, 4);
  for (int cells = 8; cells <= (1 << 18); cells *= 2) {
    const double next = gauss_composite(f, a, b, cells);
    const double scale = std::max(std::fabs(next), 1e-300);
    if (std::fabs(next - prev) <= tol * scale) return next;
    prev = next;
  }
  return prev;
}

constexpr int kTableCells = 4096;

}  // namespace

double annulus_bump(double t) {
  if (t <= 0.5 || t >= 2.0) return 0.0;
  return std::exp(-1.0 / ((t - 0.5) * (2.0 - t)));
}

double refine_integral(const std::function<double(double)>& f, double a,
                       double b, double tol) {
  return gauss_adaptive(f, a, b, tol);
}

CumulativeTable::CumulativeTable(const std::function<double(double)>& f,
                                 double lo, double hi, int cells)
    : lo_(lo), hi_(hi), h_((hi - lo) / cells) {
  if (cells < 2 || !(hi > lo))
    throw ConfigError("cumulative table needs an increasing range");
  cum_.resize(cells + 1);
  slope_.resize(cells + 1);
  cum_[0] = 0.0;
  for (int i = 0; i <= cells; ++i) slope_[i] = f(lo + i * h_);
  for (int i = 0; i < cells; ++i)
    cum_[i + 1] = cum_[i] + gauss_cell(f, lo + i * h_, lo + (i + 1) * h_);
}

double CumulativeTable::value(double t) const {
  if (t <= lo_) return 0.0;
  if (t >= hi_) return total();
  const double u = (t - lo_) / h_;
  std::size_t cell = static_cast<std::size_t>(u);
  if (cell >= cum_.size() - 1) cell = cum_.size() - 2;
  const double x = u - cell;
  const double x2 = x * x, x3 = x2 * x;
  const double h00 = 2.0 * x3 - 3.0 * x2 + 1.0;
  const double h10 = x3 - 2.0 * x2 + x;
  const double h01 = -2.0 * x3 + 3.0 * x2;
  const double h11 = x3 - x2;
  return h00 * cum_[cell] + h01 * cum_[cell + 1] +
         h_ * (h10 * slope_[cell] + h11 * slope_[cell + 1]);
}

ProfilePair::ProfilePair(Bump bump, CumulativeTable step_table,
                         CumulativeTable sq_table)
    : bump_(std::move(bump)),
      step_table_(std::move(step_table)),
      sq_table_(std::move(sq_table)),
      step_total_(step_table_.total()),
      radial_norm_(sq_table_.total()),
      radial_scale_(1.0 / std::sqrt(radial_norm_)),
      cache_(std::make_unique<Cache>()) {}

ProfilePair ProfilePair::build(const Bump& bump) {
  if (!bump) throw ConfigError("profile bump is empty");
  const double outside[] = {0.05, 0.3, 0.49999, 0.5, 2.0, 2.1, 5.0};
  for (double t : outside)
    if (bump(t) != 0.0)
      throw ConfigError("profile bump must vanish outside (1/2, 2)");
  for (int i = 1; i < 64; ++i) {
    const double t = 0.5 + 1.5 * i / 64.0;
    const double v = bump(t);
    if (!(v > 0.0) || v > 1.0)
      throw ConfigError("profile bump must take values in (0, 1] on (1/2, 2)");
  }
  CumulativeTable step_table(bump, 0.5, 2.0, kTableCells);
  CumulativeTable sq_table([&](double u) { return bump(u) * bump(u) / u; },
                           0.5, 2.0, kTableCells);
  if (!(step_table.total() > 0.0) || !(sq_table.total() > 0.0))
    throw ConfigError("profile bump integrates to zero");
  return ProfilePair(bump, std::move(step_table), std::move(sq_table));
}

double ProfilePair::step(double t) const {
  if (t <= 0.5) return 1.0;
  if (t >= 2.0) return 0.0;
  return 1.0 - step_table_.value(t) / step_total_;
}

double ProfilePair::radial(double t) const {
  return bump_(t) * radial_scale_;
}

double ProfilePair::cap(double t) const {
  if (t <= 0.5) return 1.0;
  if (t >= 2.0) return 0.0;
  const double tail = 1.0 - sq_table_.value(t) / radial_norm_;
  return std::sqrt(std::max(0.0, tail));
}

double ProfilePair::direction_normalization(int dim, double sigma) const {
  if (dim != 2 && dim != 3)
    throw ConfigError("direction normalization requires dim 2 or 3");
  if (!(sigma > 0.0))
    throw DomainError("direction normalization requires a positive scale");
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    const auto it = cache_->values.find({dim, sigma});
    if (it != cache_->values.end()) return it->second;
  }
  const double root = std::sqrt(sigma);
  // Chord |e1 - nu| = 2 sin(theta/2) <= 2 sqrt(sigma) bounds the support.
  const double theta_max =
      2.0 * std::asin(std::min(1.0, root));
  double integral = 0.0;
  if (dim == 2) {
    integral = 2.0 * gauss_adaptive(
                         [&](double th) {
                           const double v =
                               step(2.0 * std::sin(0.5 * th) / root);
                           return v * v;
                         },
                         0.0, theta_max, 1e-10);
  } else {
    integral =
        2.0 * M_PI *
        gauss_adaptive(
            [&](double th) {
              const double v = step(2.0 * std::sin(0.5 * th) / root);
              return v * v * std::sin(th);
            },
            0.0, theta_max, 1e-10);
  }
  if (!(integral > 0.0))
    throw NumericError("direction normalization integral vanished");
  const double c = 1.0 / std::sqrt(integral);
  std::lock_guard<std::mutex> lock(cache_->mutex);
  cache_->values[{dim, sigma}] = c;
  return c;
}

void ProfilePair::dump_csv(const std::string& path) const {
  CsvWriter out(path);
  out.header({"t", "bump", "step", "radial", "cap"});
  const double lo = 0.25, hi = 4.0;
  const int points = 4096;
  for (int i = 0; i < points; ++i) {
    const double t = lo * std::exp(std::log(hi / lo) * i / (points - 1));
    out.field(t);
    out.field(bump_(t));
    out.field(step(t));
    out.field(radial(t));
    out.field(cap(t));
    out.end_row();
  }
}

ProfilePair build_profiles() { return ProfilePair::build(annulus_bump); }

ProfilePair build_profiles(const ProfilePair::Bump& bump) {
  return ProfilePair::build(bump);
}

}  // namespace fiohardy
