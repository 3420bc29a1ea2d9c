// Independent quadrature oracle for the packet profile constants.
//
// Everything here is computed from scratch with adaptive Simpson quadrature:
// the bump normalization integral, the smoothed step, the low-frequency cap,
// the direction normalization c_sigma (n = 2 and 3), the reproducing constant
// C_sigma, the discrete Parseval defect of the (A = 64, J = 48) packet frame,
// and the scaled sup of the packet symbols.  Values printed here are frozen
// into the library tests; none of the library code is linked.

#include <cmath>
#include <cstdio>
#include <functional>

namespace {

double bump(double t) {
  if (t <= 0.5 || t >= 2.0) return 0.0;
  return std::exp(-1.0 / ((t - 0.5) * (2.0 - t)));
}

double simpson(const std::function<double(double)>& f, double a, double fa,
               double fm, double fb, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double fa, double fm, double fb, double whole, double eps,
             int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, flm, fm, m);
  const double right = simpson(f, m, fm, frm, fb, b);
  if (depth > 60) return left + right;
  if (std::fabs(left + right - whole) <= 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double eps = 1e-14) {
  if (b <= a) return 0.0;
  const double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
  const double whole = simpson(f, a, fa, fm, fb, b);
  return adapt(f, a, b, fa, fm, fb, whole, eps, 0);
}

}  // namespace

int main() {
  const double Ib = integrate([](double t) { return bump(t) * bump(t) / t; },
                              0.5, 2.0);
  const double Bt = integrate([](double t) { return bump(t); }, 0.5, 2.0);
  std::printf("I_b %.17g\n", Ib);
  std::printf("B_total %.17g\n", Bt);

  auto step = [&](double t) {
    if (t <= 0.5) return 1.0;
    if (t >= 2.0) return 0.0;
    return 1.0 - integrate([](double u) { return bump(u); }, 0.5, t) / Bt;
  };
  auto radial = [&](double t) { return bump(t) / std::sqrt(Ib); };
  auto cap = [&](double t) {
    if (t <= 0.5) return 1.0;
    if (t >= 2.0) return 0.0;
    const double head =
        integrate([](double u) { return bump(u) * bump(u) / u; }, 0.5, t);
    return std::sqrt(1.0 - head / Ib);
  };

  // Littlewood-Paley defect of psi at a generic radius, by direct quadrature
  // of the dilation integral (substitute u = sigma * t).
  {
    const double lp = integrate(
        [&](double u) { return radial(u) * radial(u) / u; }, 0.5, 2.0);
    std::printf("lp_defect %.3g\n", std::fabs(lp - 1.0));
  }

  const double caps[] = {0.25, 0.5, 0.6, 0.75, 1.0, 1.5, 1.9};
  for (double t : caps) std::printf("cap t=%g %.17g\n", t, cap(t));
  std::printf("step t=0.7 %.17g\n", step(0.7));
  std::printf("step t=1.0 %.17g\n", step(1.0));
  std::printf("step t=1.6 %.17g\n", step(1.6));
  std::printf("radial t=1.25 %.17g\n", radial(1.25));

  // Direction normalization c_sigma = (int_{S^{n-1}} phi((e1-nu)/sqrt(sigma))^2 dnu)^{-1/2}
  // with |e1 - nu| = 2 sin(theta/2).  The integrand support is theta <= theta_max.
  auto csig2 = [&](double s) {
    const double thm = 2.0 * std::asin(std::fmin(1.0, std::sqrt(s)));
    const double i2 = 2.0 * integrate(
                                [&](double th) {
                                  const double v = step(
                                      2.0 * std::sin(0.5 * th) / std::sqrt(s));
                                  return v * v;
                                },
                                0.0, thm);
    return 1.0 / std::sqrt(i2);
  };
  auto csig3 = [&](double s) {
    const double thm = 2.0 * std::asin(std::fmin(1.0, std::sqrt(s)));
    const double i3 =
        2.0 * M_PI *
        integrate(
            [&](double th) {
              const double v = step(2.0 * std::sin(0.5 * th) / std::sqrt(s));
              return v * v * std::sin(th);
            },
            0.0, thm);
    return 1.0 / std::sqrt(i3);
  };
  const double sig_list[] = {0.25, 0.0625, 1.0 / 128.0, 1e-3, 1e-2, 1e-1};
  for (double s : sig_list) std::printf("c2 sigma=%g %.17g\n", s, csig2(s));
  for (double s : sig_list) std::printf("c3 sigma=%g %.17g\n", s, csig3(s));
  {
    const double lo = std::log(csig2(1e-3)), hi = std::log(csig2(1e-1));
    std::printf("c2_slope %.12g\n", (hi - lo) / (std::log(1e-1) - std::log(1e-3)));
    const double lo3 = std::log(csig3(1e-3)), hi3 = std::log(csig3(1e-1));
    std::printf("c3_slope %.12g\n",
                (hi3 - lo3) / (std::log(1e-1) - std::log(1e-3)));
  }

  // Reproducing constant C_sigma = sigma^{-(n-1)/4} c_sigma int phi(...) dnu.
  auto rep2 = [&](double s) {
    const double thm = 2.0 * std::asin(std::fmin(1.0, std::sqrt(s)));
    const double j2 = 2.0 * integrate(
                                [&](double th) {
                                  return step(2.0 * std::sin(0.5 * th) /
                                              std::sqrt(s));
                                },
                                0.0, thm);
    return std::pow(s, -0.25) * csig2(s) * j2;
  };
  auto rep3 = [&](double s) {
    const double thm = 2.0 * std::asin(std::fmin(1.0, std::sqrt(s)));
    const double j3 =
        2.0 * M_PI *
        integrate(
            [&](double th) {
              return step(2.0 * std::sin(0.5 * th) / std::sqrt(s)) *
                     std::sin(th);
            },
            0.0, thm);
    return std::pow(s, -0.5) * csig3(s) * j3;
  };
  const double rep_list[] = {0.25, 0.0625, 0.015625, 1.0 / 256.0};
  for (double s : rep_list) std::printf("C2 sigma=%g %.17g\n", s, rep2(s));
  for (double s : rep_list) std::printf("C3 sigma=%g %.17g\n", s, rep3(s));

  // Discrete Parseval defect at |zeta| = 4, generic direction, with the
  // uniform A = 64 circle and the J = 48 log-midpoint scale grid on
  // [2^-7, 1] plus the cap band.
  {
    const int A = 64, J = 48;
    const double smin = 1.0 / 128.0;
    const double dlt = std::log(1.0 / smin) / J;
    const double zr = 4.0, zth = 0.37;
    double sum = 0.0;
    for (int j = 0; j < J; ++j) {
      const double s = smin * std::exp((j + 0.5) * dlt);
      const double cs = csig2(s);
      const double rad = radial(s * zr);
      if (rad == 0.0) continue;
      double ang = 0.0;
      for (int i = 0; i < A; ++i) {
        const double th = 2.0 * M_PI * i / A;
        const double chord = 2.0 * std::fabs(std::sin(0.5 * (th - zth)));
        const double v = cs * step(chord / std::sqrt(s)) * rad;
        ang += v * v;
      }
      sum += dlt * ang * (2.0 * M_PI / A);
    }
    sum += cap(zr) * cap(zr);
    std::printf("parseval_discrete %.17g defect %.6g\n", sum,
                std::fabs(sum - 1.0));
    // Same at a rotated direction, for the anisotropy check.
    double sum2 = 0.0;
    const double zth2 = 0.37 + M_PI / 7.0;
    for (int j = 0; j < J; ++j) {
      const double s = smin * std::exp((j + 0.5) * dlt);
      const double cs = csig2(s);
      const double rad = radial(s * zr);
      if (rad == 0.0) continue;
      double ang = 0.0;
      for (int i = 0; i < A; ++i) {
        const double th = 2.0 * M_PI * i / A;
        const double chord = 2.0 * std::fabs(std::sin(0.5 * (th - zth2)));
        const double v = cs * step(chord / std::sqrt(s)) * rad;
        ang += v * v;
      }
      sum2 += dlt * ang * (2.0 * M_PI / A);
    }
    sum2 += cap(zr) * cap(zr);
    std::printf("parseval_discrete_rot %.17g\n", sum2);
  }

  // sup |psi| * sigma^{(n-1)/4} for n = 2: the sup is c_sigma * max(radial),
  // attained where the angular factor is 1.
  {
    const double peak = radial(1.25);
    for (int k = 3; k <= 7; ++k) {
      const double s = std::pow(2.0, -k);
      std::printf("supc2 sigma=2^-%d %.17g\n", k,
                  csig2(s) * peak * std::pow(s, 0.25));
    }
  }
  return 0;
}
