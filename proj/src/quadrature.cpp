#include "diraclayer/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace diraclayer {

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Eigen::VectorXd x(n), w(n);
  const double pi = 3.141592653589793238462643383279502884;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(pi * (i + 0.75) / (n + 0.5));  // Tricomi initial guess
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x(i) = -t;
    x(n - 1 - i) = t;
    const double wi = 2.0 / ((1.0 - t * t) * dp * dp);
    w(i) = wi;
    w(n - 1 - i) = wi;
  }
  if (n % 2 == 1) x(n / 2) = 0.0;
  return {x, w};
}

}  // namespace diraclayer
