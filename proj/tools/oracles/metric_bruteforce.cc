// Independent sampler for the phase-space quasi-distance bounds.
//
// Re-implements the distance from its formula with a separate RNG and separate
// sampling scheme, then reports:
//   * extremes of (two-term reduced form) / (full form) over random pairs,
//   * the empirical quasi-triangle constant,
//   * bilicontinuity extremes of the translation flow (y, nu) -> (y + t nu, nu),
//   * a closed-form spot value.
// The bounds observed here back the constants frozen in the unit tests.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace {

constexpr double kExtent = 20.0;

struct Pt {
  double x[2];
  double w[2];
};

double wrap(double d) { return d - kExtent * std::nearbyint(d / kExtent); }

double qdist(const Pt& p, const Pt& q) {
  const double dx0 = wrap(p.x[0] - q.x[0]);
  const double dx1 = wrap(p.x[1] - q.x[1]);
  const double ip = std::fabs(p.w[0] * dx0 + p.w[1] * dx1);
  const double iq = std::fabs(q.w[0] * dx0 + q.w[1] * dx1);
  const double xx = dx0 * dx0 + dx1 * dx1;
  const double ww = (p.w[0] - q.w[0]) * (p.w[0] - q.w[0]) +
                    (p.w[1] - q.w[1]) * (p.w[1] - q.w[1]);
  return std::sqrt(ip + iq + xx + ww);
}

double qdist_reduced(const Pt& p, const Pt& q) {
  const double dx0 = wrap(p.x[0] - q.x[0]);
  const double dx1 = wrap(p.x[1] - q.x[1]);
  const double ip = std::fabs(p.w[0] * dx0 + p.w[1] * dx1);
  const double xx = dx0 * dx0 + dx1 * dx1;
  const double ww = (p.w[0] - q.w[0]) * (p.w[0] - q.w[0]) +
                    (p.w[1] - q.w[1]) * (p.w[1] - q.w[1]);
  return std::sqrt(ip + xx + ww);
}

std::mt19937_64 gen(0xfeedbeef);

Pt random_point() {
  std::uniform_real_distribution<double> ux(-0.5 * kExtent, 0.5 * kExtent);
  std::uniform_real_distribution<double> uth(-M_PI, M_PI);
  const double th = uth(gen);
  return {{ux(gen), ux(gen)}, {std::cos(th), std::sin(th)}};
}

// Mixed-scale neighbor: independent along/transverse/angular components.
Pt neighbor(const Pt& p, double s) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(gen), b = u(gen), c = u(gen);
  const double t0 = -p.w[1], t1 = p.w[0];
  Pt q;
  q.x[0] = p.x[0] + a * s * s * p.w[0] + b * s * t0;
  q.x[1] = p.x[1] + a * s * s * p.w[1] + b * s * t1;
  const double ang = c * s;
  q.w[0] = std::cos(ang) * p.w[0] - std::sin(ang) * p.w[1];
  q.w[1] = std::sin(ang) * p.w[0] + std::cos(ang) * p.w[1];
  return q;
}

double log_uniform_scale() {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return 1e-3 * std::exp(u(gen) * std::log(1e3));
}

}  // namespace

int main() {
  const int N = 1000000;

  // Equivalence of the reduced and full forms.
  double rmin = 1e9, rmax = 0.0;
  for (int i = 0; i < N; ++i) {
    const Pt p = random_point();
    const Pt q = neighbor(p, log_uniform_scale());
    const double df = qdist(p, q);
    if (df < 1e-12) continue;
    const double dr = qdist_reduced(p, q);
    rmin = std::min(rmin, df / dr);
    rmax = std::max(rmax, df / dr);
  }
  std::printf("full_over_reduced_min %.12g\n", rmin);
  std::printf("full_over_reduced_max %.12g  (sqrt2 = %.12g)\n", rmax, std::sqrt(2.0));

  // Quasi-triangle constant.
  double k = 0.0;
  for (int i = 0; i < N; ++i) {
    const Pt p = random_point();
    const Pt q = neighbor(p, log_uniform_scale());
    const Pt r = neighbor(q, log_uniform_scale());
    const double den = qdist(p, q) + qdist(q, r);
    if (den < 1e-14) continue;
    k = std::max(k, qdist(p, r) / den);
  }
  std::printf("quasi_triangle_max %.12g\n", k);

  // Translation flow (y, nu) -> (y + nu, nu).
  double tmin = 1e9, tmax = 0.0;
  for (int i = 0; i < N; ++i) {
    const Pt p = random_point();
    const Pt q = neighbor(p, log_uniform_scale());
    const double d0 = qdist(p, q);
    if (d0 < 1e-12) continue;
    Pt fp = p, fq = q;
    fp.x[0] += p.w[0];
    fp.x[1] += p.w[1];
    fq.x[0] += q.w[0];
    fq.x[1] += q.w[1];
    const double ratio = qdist(fp, fq) / d0;
    tmin = std::min(tmin, ratio);
    tmax = std::max(tmax, ratio);
  }
  std::printf("translation_ratio_min %.12g\n", tmin);
  std::printf("translation_ratio_max %.12g\n", tmax);

  // Spot value: points (0, e1) and (e1, e1).
  {
    const Pt p{{0.0, 0.0}, {1.0, 0.0}};
    const Pt q{{1.0, 0.0}, {1.0, 0.0}};
    std::printf("spot_example %.17g  (sqrt3 = %.17g)\n", qdist(p, q), std::sqrt(3.0));
  }

  // Ball volumes by plain rejection sampling from (cell) x (circle): an
  // independent check on the importance-sampled estimator. Reported for an
  // effectively unbounded domain (box side 40 >> tau).
  {
    const double side = 40.0;
    const Pt c{{0.0, 0.0}, {1.0, 0.0}};
    std::uniform_real_distribution<double> ux(-0.5 * side, 0.5 * side);
    std::uniform_real_distribution<double> uth(-M_PI, M_PI);
    const double taus[] = {0.05, 0.1, 0.2, 0.4, 2.0, 4.0, 8.0};
    double logv[7], logt[7];
    for (int t = 0; t < 7; ++t) {
      const double tau = taus[t];
      const long trials = tau < 1 ? 200000000L : 20000000L;
      long hits = 0;
      for (long i = 0; i < trials; ++i) {
        Pt q;
        q.x[0] = ux(gen);
        q.x[1] = ux(gen);
        const double th = uth(gen);
        q.w[0] = std::cos(th);
        q.w[1] = std::sin(th);
        // Plain Euclidean distance here: no wrap matters at side >> tau.
        const double dx0 = q.x[0], dx1 = q.x[1];
        const double val = std::fabs(c.w[0] * dx0 + c.w[1] * dx1) +
                           std::fabs(q.w[0] * dx0 + q.w[1] * dx1) +
                           dx0 * dx0 + dx1 * dx1 +
                           (c.w[0] - q.w[0]) * (c.w[0] - q.w[0]) +
                           (c.w[1] - q.w[1]) * (c.w[1] - q.w[1]);
        if (val <= tau * tau) ++hits;
      }
      const double vol = side * side * 2.0 * M_PI * hits / trials;
      logv[t] = std::log(vol);
      logt[t] = std::log(tau);
      std::printf("volume tau=%g V=%.6g hits=%ld\n", tau, vol, hits);
    }
    auto slope = [&](int lo, int hi) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const int n = hi - lo + 1;
      for (int i = lo; i <= hi; ++i) {
        sx += logt[i];
        sy += logv[i];
        sxx += logt[i] * logt[i];
        sxy += logt[i] * logv[i];
      }
      return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    std::printf("volume_slope_small %.6g\n", slope(0, 3));
    std::printf("volume_slope_large %.6g\n", slope(4, 6));
  }
  return 0;
}
