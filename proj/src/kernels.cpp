#include "diraclayer/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace diraclayer {

namespace {
const Complex kI(0.0, 1.0);
}

Matrix2cd pauli(int j) {
  Matrix2cd s = Matrix2cd::Zero();
  switch (j) {
    case 1: s(0, 1) = 1.0; s(1, 0) = 1.0; break;
    case 2: s(0, 1) = -kI; s(1, 0) = kI; break;
    case 3: s(0, 0) = 1.0; s(1, 1) = -1.0; break;
    default: throw std::invalid_argument("pauli: j must be 1, 2 or 3");
  }
  return s;
}

Matrix4cd dirac_alpha(int j) {
  Matrix4cd a = Matrix4cd::Zero();
  const Matrix2cd s = pauli(j);
  a.block<2, 2>(0, 2) = s;
  a.block<2, 2>(2, 0) = s;
  return a;
}

Matrix4cd dirac_beta() {
  Matrix4cd b = Matrix4cd::Identity();
  b(2, 2) = -1.0;
  b(3, 3) = -1.0;
  return b;
}

Matrix2cd sigma_dot(const Vector3d& x) {
  Matrix2cd s;
  s << x.z(), Complex(x.x(), -x.y()), Complex(x.x(), x.y()), -x.z();
  return s;
}

Matrix2cd sigma_dot(const Vector2d& x) {
  Matrix2cd s;
  s << 0.0, Complex(x.x(), -x.y()), Complex(x.x(), x.y()), 0.0;
  return s;
}

Matrix4cd alpha_dot(const Vector3d& x) {
  Matrix4cd a = Matrix4cd::Zero();
  const Matrix2cd s = sigma_dot(x);
  a.block<2, 2>(0, 2) = s;
  a.block<2, 2>(2, 0) = s;
  return a;
}

double SpectralPoint::kappa() const {
  if (!in_gap()) throw std::domain_error("SpectralPoint: z must lie in (-m, m), m > 0");
  return std::sqrt((m - z) * (m + z));
}

Matrix2cd eval_G2(const SpectralPoint& p, const Vector2d& x) {
  const double r = x.norm();
  if (r == 0.0) throw std::domain_error("eval_G2: x must be nonzero");
  const double k = p.kappa();
  // sqrt(z^2 - m^2) = i kappa on the branch with positive imaginary part
  Matrix2cd g = (kI * k / (2.0 * kPi)) * bessel_k1(k * r) * sigma_dot(Vector2d(x / r));
  const double k0 = bessel_k0(k * r) / (2.0 * kPi);
  g(0, 0) += k0 * (p.z + p.m);
  g(1, 1) += k0 * (p.z - p.m);
  return g;
}

Matrix4cd eval_G3(const SpectralPoint& p, const Vector3d& x) {
  const double r = x.norm();
  if (r == 0.0) throw std::domain_error("eval_G3: x must be nonzero");
  const double k = p.kappa();
  const double pre = std::exp(-k * r) / (4.0 * kPi * r);
  Matrix4cd g = pre * (p.z * Matrix4cd::Identity() + p.m * dirac_beta());
  g += (pre * (1.0 + k * r) / (r * r)) * (kI * alpha_dot(x));
  return g;
}

Matrix2cd eval_t3(const SpectralPoint& p, const Vector3d& x) {
  const double r = x.norm();
  if (r == 0.0) throw std::domain_error("eval_t3: x must be nonzero");
  // |z| = m admitted: the kernel degenerates to its principal part
  const double mu = (p.m - p.z) * (p.m + p.z);
  if (!(p.m > 0.0) || mu < 0.0)
    throw std::domain_error("eval_t3: z must lie in [-m, m], m > 0");
  const double k = std::sqrt(mu);
  const double pre = (1.0 + k * r) * std::exp(-k * r) / (4.0 * kPi * r * r * r);
  return kI * pre * sigma_dot(x);
}

Matrix2cd eval_r3(const Vector3d& x, const Vector3d& y, const Vector3d& nu_y) {
  const Vector3d d = x - y;
  const double r = d.norm();
  if (r == 0.0) throw std::domain_error("eval_r3: x and y must differ");
  return -(sigma_dot(d) * sigma_dot(nu_y)) / (kPi * r * r * r);
}

// (1 + s) e^{-s} = 1 + sum_{j>=2} (-1)^j (1-j)/j! s^j; the j = 1 term vanishes,
// which is exactly the cancellation of the |x|^{-2} order behind the split.
KernelSplit split_kernel_t(const SpectralPoint& p, int order) {
  if (order < 1) throw std::invalid_argument("split_kernel_t: order must be >= 1");
  // the closed gap edge |z| = m is admitted here: kappa = 0 collapses the
  // expansion onto the principal part (the C_m limit)
  const double mu = (p.m - p.z) * (p.m + p.z);
  if (!(p.m > 0.0) || mu < 0.0)
    throw std::domain_error("split_kernel_t: z must lie in [-m, m], m > 0");
  KernelSplit ks;
  ks.kappa = std::sqrt(mu);
  ks.order = order;
  ks.analytic = Eigen::VectorXd::Zero(order);
  ks.pseudo = Eigen::VectorXd::Zero(order);
  double fact = 1.0;  // j!
  double kp = 1.0;    // kappa^j
  for (int j = 1; j <= 2 * order + 1; ++j) {
    fact *= j;
    kp *= ks.kappa;
    const double cj = ((j % 2 == 0) ? 1.0 : -1.0) * (1.0 - j) / fact * kp;
    if (j < 2) continue;
    if (j % 2 == 0)
      ks.pseudo(j / 2 - 1) = cj;  // multiplies |x|^{2i-3}, i = j/2
    else
      ks.analytic((j - 1) / 2 - 1) = cj;  // multiplies |x|^{2i-2}, i = (j-1)/2
  }
  return ks;
}

Matrix2cd KernelSplit::principal(const Vector3d& x) const {
  const double r = x.norm();
  return kI / (4.0 * kPi * r * r * r) * sigma_dot(x);
}

Matrix2cd KernelSplit::smooth_part(const Vector3d& x) const {
  const double r2 = x.squaredNorm();
  double acc = 0.0, pw = 1.0;  // |x|^{2i-2}, i = 1..
  for (int i = 0; i < analytic.size(); ++i) {
    acc += analytic(i) * pw;
    pw *= r2;
  }
  return kI / (4.0 * kPi) * acc * sigma_dot(x);
}

Matrix2cd KernelSplit::pseudo_part(const Vector3d& x) const {
  const double r = x.norm();
  double acc = 0.0, pw = 1.0 / r;  // |x|^{2i-3}, i = 1..
  for (int i = 0; i < pseudo.size(); ++i) {
    acc += pseudo(i) * pw;
    pw *= r * r;
  }
  return kI / (4.0 * kPi) * acc * sigma_dot(x);
}

Matrix2cd KernelSplit::reconstruct(const Vector3d& x) const {
  return principal(x) + smooth_part(x) + pseudo_part(x);
}

}  // namespace diraclayer
