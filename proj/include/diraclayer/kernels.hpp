#pragma once

#include <Eigen/Dense>
#include <complex>

namespace diraclayer {

using Complex = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::Vector2d;
using Eigen::Vector3d;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kEulerGamma = 0.5772156649015328606065120900824024310;

// Pauli matrices sigma_1..sigma_3 and the Dirac matrices alpha_j = offdiag(sigma_j),
// beta = diag(I, -I) in the standard representation.
Matrix2cd pauli(int j);
Matrix4cd dirac_alpha(int j);
Matrix4cd dirac_beta();
Matrix2cd sigma_dot(const Vector3d& x);
Matrix2cd sigma_dot(const Vector2d& x);  // sigma_1 x_1 + sigma_2 x_2
Matrix4cd alpha_dot(const Vector3d& x);

// Spectral point z in the gap (-m, m) of the free operator with mass m > 0.
// kappa = sqrt(m^2 - z^2) > 0, so that sqrt(z^2 - m^2) = i*kappa on the physical branch.
struct SpectralPoint {
  double z = 0.0;
  double m = 1.0;
  double kappa() const;
  bool in_gap() const { return m > 0.0 && -m < z && z < m; }
};

// Modified Bessel functions, real argument. bessel_k* require x > 0.
double bessel_i0(double x);
double bessel_i1(double x);
double bessel_k0(double x);
double bessel_k1(double x);
double bessel_k(int order, double x);
// Log-free part of the K_1 series: K_1(x) = 1/x + ln(x/2) I_1(x) - (x/4) * this.
double bessel_k1_regular_sum(double x);

// Free resolvent kernels. eval_G2 acts on C^2 spinors, eval_G3 on C^4.
Matrix2cd eval_G2(const SpectralPoint& p, const Vector2d& x);
Matrix4cd eval_G3(const SpectralPoint& p, const Vector3d& x);

// Off-diagonal block kernel of the 3D layer operator:
//   t(x) = i (sigma.x) (1 + kappa|x|) e^{-kappa|x|} / (4 pi |x|^3).
Matrix2cd eval_t3(const SpectralPoint& p, const Vector3d& x);

// Double layer kernel on a surface with outward normal nu(y):
//   r(x, y) = -(sigma.(x-y)) (sigma.nu(y)) / (pi |x-y|^3).
Matrix2cd eval_r3(const Vector3d& x, const Vector3d& y, const Vector3d& nu_y);

// Split of t(x) about its principal part i (sigma.x) / (4 pi |x|^3):
//   t(x) = principal(x)
//        + i (sigma.x)/(4 pi) * [ sum_i analytic[i] |x|^{2i-2} + sum_i pseudo[i] |x|^{2i-3} ]
// where the analytic coefficients multiply even powers (smooth kernel) and the
// pseudo-homogeneous ones odd powers (|x|^{2i-3}, i >= 1, each one order smoother
// than the principal part). The |x|^{-2} term of the expansion cancels exactly.
struct KernelSplit {
  double kappa = 0.0;
  int order = 0;
  Eigen::VectorXd analytic;  // coefficient of |x|^{2i-2}, i = 1..
  Eigen::VectorXd pseudo;    // coefficient of |x|^{2i-3}, i = 1..
  Matrix2cd principal(const Vector3d& x) const;
  Matrix2cd smooth_part(const Vector3d& x) const;
  Matrix2cd pseudo_part(const Vector3d& x) const;
  Matrix2cd reconstruct(const Vector3d& x) const;
};
KernelSplit split_kernel_t(const SpectralPoint& p, int order);

}  // namespace diraclayer
