#include "diraclayer/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace diraclayer {

namespace {

// Power series for I_nu, nu in {0, 1}. All terms positive, no cancellation;
// adequate for the argument range used here (x below ~30).
double bessel_i_series(int nu, double x) {
  const double q = 0.25 * x * x;
  double term = nu == 0 ? 1.0 : 0.5 * x;
  double sum = term;
  for (int k = 1; k < 64; ++k) {
    term *= q / (k * static_cast<double>(k + nu));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// e^x K_nu(x) = int_0^inf e^{-x(cosh t - 1)} cosh(nu t) dt, trapezoid in t.
// The integrand decays doubly exponentially; step 0.05 leaves the quadrature
// error below 1e-15 relative for x > 2.
double bessel_k_large(int nu, double x) {
  const double h = 0.05;
  double sum = 0.5;  // t = 0 term: e^0 cosh(0) = 1, half weight
  for (int j = 1;; ++j) {
    const double t = h * j;
    const double sh = std::sinh(0.5 * t);
    const double u = 2.0 * x * sh * sh;  // x (cosh t - 1), stable for small t
    if (u > 45.0) break;
    sum += std::exp(-u) * std::cosh(nu * t);
  }
  return h * sum * std::exp(-x);
}

}  // namespace

double bessel_i0(double x) { return bessel_i_series(0, std::abs(x)); }

double bessel_i1(double x) {
  const double v = bessel_i_series(1, std::abs(x));
  return x < 0 ? -v : v;
}

double bessel_k1_regular_sum(double x) {
  // sum_{k>=0} (psi(k+1) + psi(k+2)) (x^2/4)^k / (k! (k+1)!), so that
  // K_1(x) = 1/x + ln(x/2) I_1(x) - (x/4) * bessel_k1_regular_sum(x).
  const double q = 0.25 * x * x;
  double term = 1.0;  // (x^2/4)^k / (k! (k+1)!)
  double hk = 0.0;    // harmonic number H_k
  double sum = 0.0;
  for (int k = 0; k < 40; ++k) {
    sum += (-2.0 * kEulerGamma + 2.0 * hk + 1.0 / (k + 1)) * term;
    term *= q / ((k + 1) * static_cast<double>(k + 2));
    hk += 1.0 / (k + 1);
  }
  return sum;
}

double bessel_k0(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k0: requires x > 0");
  if (x > 2.0) return bessel_k_large(0, x);
  // K_0 = -(ln(x/2) + gamma) I_0 + sum_{k>=1} H_k (x^2/4)^k / (k!)^2
  const double q = 0.25 * x * x;
  double term = 1.0, hk = 0.0, sum = 0.0;
  for (int k = 1; k < 40; ++k) {
    term *= q / (static_cast<double>(k) * k);
    hk += 1.0 / k;
    sum += hk * term;
  }
  return -(std::log(0.5 * x) + kEulerGamma) * bessel_i0(x) + sum;
}

double bessel_k1(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k1: requires x > 0");
  if (x > 2.0) return bessel_k_large(1, x);
  return 1.0 / x + std::log(0.5 * x) * bessel_i1(x) -
         0.25 * x * bessel_k1_regular_sum(x);
}

double bessel_k(int order, double x) {
  if (order < 0) order = -order;  // K_{-n} = K_n
  if (!(x > 0.0)) throw std::domain_error("bessel_k: requires x > 0");
  double km = bessel_k0(x), k = bessel_k1(x);
  if (order == 0) return km;
  for (int n = 1; n < order; ++n) {  // upward recurrence, stable for K
    const double kp = km + (2.0 * n / x) * k;
    km = k;
    k = kp;
  }
  return k;
}

}  // namespace diraclayer
