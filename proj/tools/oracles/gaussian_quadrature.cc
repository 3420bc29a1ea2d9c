// Reference-value generator for the core transform tests.
//
// Computes, by direct summation only (no FFT library), the calibrated discrete
// Fourier coefficients of a fixed analytic test field on small grids. The
// printed values are frozen into the unit tests; this program exists so those
// numbers can be regenerated and audited independently of the code under test.
//
// Conventions checked here:
//   F(zeta_k) = h^n * sum_j f(x_j) e^{-i x_j . zeta_k},   x_j = -L/2 + j h,
//   zeta_k = (2 pi / L) ktilde,  ktilde in [-M/2, M/2).

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

namespace {

using cplx = std::complex<double>;

// Fixed analytic field; both the oracle and the unit test build it from this
// exact expression.
cplx test_formula(double x, double y, double z) {
  const double re = std::cos(3.0 * x) * std::sin(2.0 * y) + 0.25 * std::cos(z);
  const double im = (x * y + 0.5 * z) / (1.0 + x * x + y * y + z * z);
  return {re, im};
}

struct Grid {
  int dim;
  int m;
  double extent;
  double h() const { return extent / m; }
  double coord(int i) const { return -0.5 * extent + i * h(); }
  double freq(int k) const {
    const int s = k < m / 2 ? k : k - m;
    return 2.0 * M_PI * s / extent;
  }
};

cplx direct_coefficient(const Grid& g, int k0, int k1, int k2) {
  const double z0 = g.freq(k0), z1 = g.freq(k1), z2 = g.dim == 3 ? g.freq(k2) : 0.0;
  cplx acc = 0.0;
  for (int i0 = 0; i0 < g.m; ++i0)
    for (int i1 = 0; i1 < g.m; ++i1) {
      if (g.dim == 2) {
        const double x = g.coord(i0), y = g.coord(i1);
        const double ph = -(x * z0 + y * z1);
        acc += test_formula(x, y, 0.0) * cplx(std::cos(ph), std::sin(ph));
      } else {
        for (int i2 = 0; i2 < g.m; ++i2) {
          const double x = g.coord(i0), y = g.coord(i1), w = g.coord(i2);
          const double ph = -(x * z0 + y * z1 + w * z2);
          acc += test_formula(x, y, w) * cplx(std::cos(ph), std::sin(ph));
        }
      }
    }
  double scale = 1.0;
  for (int d = 0; d < g.dim; ++d) scale *= g.h();
  return acc * scale;
}

void print_value(const char* label, cplx v) {
  std::printf("%s re=%.17g im=%.17g\n", label, v.real(), v.imag());
}

}  // namespace

int main() {
  const Grid g2{2, 16, 2.0, };
  print_value("dft2d_k_0_0   ", direct_coefficient(g2, 0, 0, 0));
  print_value("dft2d_k_1_0   ", direct_coefficient(g2, 1, 0, 0));
  print_value("dft2d_k_7_9   ", direct_coefficient(g2, 7, 9, 0));
  print_value("dft2d_k_15_15 ", direct_coefficient(g2, 15, 15, 0));
  print_value("dft2d_k_8_0   ", direct_coefficient(g2, 8, 0, 0));

  const Grid g3{3, 16, 2.0};
  print_value("dft3d_k_0_0_0 ", direct_coefficient(g3, 0, 0, 0));
  print_value("dft3d_k_3_14_5", direct_coefficient(g3, 3, 14, 5));

  // Discrete l2 norm of the 2-d field, (sum |f|^2 h^n)^{1/2}, by direct sum.
  {
    long double acc = 0.0;
    for (int i0 = 0; i0 < g2.m; ++i0)
      for (int i1 = 0; i1 < g2.m; ++i1)
        acc += std::norm(test_formula(g2.coord(i0), g2.coord(i1), 0.0));
    acc *= g2.h() * g2.h();
    std::printf("l2_2d          %.17Lg\n", sqrtl(acc));
  }
  return 0;
}
