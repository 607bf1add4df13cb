#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>
#include <random>
#include <sstream>

#include "diraclayer/kernels.hpp"
#include "doctest.h"

using namespace diraclayer;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

double mat_diff(const Matrix2cd& a, const Matrix2cd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("clifford relations hold in floating point") {
  const Matrix2cd I2 = Matrix2cd::Identity();
  for (int j = 1; j <= 3; ++j)
    for (int k = 1; k <= 3; ++k) {
      const Matrix2cd anti = pauli(j) * pauli(k) + pauli(k) * pauli(j);
      CHECK(mat_diff(anti, j == k ? Matrix2cd(2.0 * I2) : Matrix2cd::Zero()) <= 1e-15);
    }
  const Matrix4cd I4 = Matrix4cd::Identity();
  for (int j = 1; j <= 3; ++j) {
    for (int k = 1; k <= 3; ++k) {
      const Matrix4cd anti = dirac_alpha(j) * dirac_alpha(k) + dirac_alpha(k) * dirac_alpha(j);
      CHECK((anti - (j == k ? Matrix4cd(2.0 * I4) : Matrix4cd::Zero())).cwiseAbs().maxCoeff() <=
            1e-15);
    }
    const Matrix4cd mix = dirac_alpha(j) * dirac_beta() + dirac_beta() * dirac_alpha(j);
    CHECK(mix.cwiseAbs().maxCoeff() <= 1e-15);
  }
  CHECK((dirac_beta() * dirac_beta() - I4).cwiseAbs().maxCoeff() <= 1e-15);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 20; ++rep) {
    const Vector3d x(g(rng), g(rng), g(rng));
    CHECK(mat_diff(sigma_dot(x) * sigma_dot(x),
                   Matrix2cd(x.squaredNorm() * I2)) <= 1e-14 * x.squaredNorm());
  }
}

TEST_CASE("bessel reference table, 1e-13 relative") {
  std::ifstream f(std::string(TEST_DATA_DIR) + "/bessel_ref.csv");
  REQUIRE(f.good());
  std::string line;
  std::getline(f, line);  // header
  int rows = 0;
  double worst0 = 0.0, worst1 = 0.0;
  while (std::getline(f, line)) {
    std::istringstream is(line);
    double x, k0, k1;
    char c;
    is >> x >> c >> k0 >> c >> k1;
    worst0 = std::max(worst0, rel_err(bessel_k0(x), k0));
    worst1 = std::max(worst1, rel_err(bessel_k1(x), k1));
    ++rows;
  }
  CHECK(rows >= 100);
  CHECK(worst0 <= 1e-13);
  CHECK(worst1 <= 1e-13);
}

TEST_CASE("bessel pinned values and limits") {
  CHECK(rel_err(bessel_k0(1.0), 0.42102443824070834) <= 1e-14);
  CHECK(rel_err(bessel_k1(1.0), 0.6019072301972346) <= 1e-14);
  CHECK(std::abs(1e-4 * bessel_k1(1e-4) - 1.0) <= 1e-6);
  CHECK(bessel_k(0, 2.5) == bessel_k0(2.5));
  CHECK(bessel_k(1, 2.5) == bessel_k1(2.5));
  // upward recurrence: K_2(x) = K_0(x) + 2 K_1(x) / x
  CHECK(rel_err(bessel_k(2, 1.7),
                bessel_k0(1.7) + 2.0 * bessel_k1(1.7) / 1.7) <= 1e-15);
  CHECK_THROWS_AS(bessel_k0(0.0), std::domain_error);
  CHECK_THROWS_AS(bessel_k1(-1.0), std::domain_error);
  CHECK_THROWS_AS(bessel_k(1, 0.0), std::domain_error);
}

TEST_CASE("spectral point branch") {
  const SpectralPoint p{0.3, 1.0};
  CHECK(p.in_gap());
  CHECK(rel_err(p.kappa(), std::sqrt(1.0 - 0.09)) <= 1e-15);
  CHECK_FALSE(SpectralPoint{1.5, 1.0}.in_gap());
}

TEST_CASE("G2 pinned value at z = 0") {
  const SpectralPoint p{0.0, 1.0};
  const Matrix2cd got = eval_G2(p, Vector2d(1.0, 0.0));
  const Complex i(0.0, 1.0);
  const Matrix2cd want = (i / (2.0 * kPi)) * bessel_k1(1.0) * pauli(1) +
                         (1.0 / (2.0 * kPi)) * bessel_k0(1.0) * pauli(3);
  CHECK(mat_diff(got, want) <= 1e-15);
  CHECK_THROWS_AS(eval_G2(p, Vector2d(0.0, 0.0)), std::domain_error);
}

TEST_CASE("G2 conjugation structure at 100 random pairs") {
  const SpectralPoint p{0.2, 1.0};
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Vector2d x(g(rng), g(rng)), y(g(rng), g(rng));
    const Matrix2cd lhs = eval_G2(p, x - y).adjoint();
    const Matrix2cd rhs = eval_G2(p, y - x);
    worst = std::max(worst, mat_diff(lhs, rhs) / rhs.cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("G2 parity: sigma part odd, K0 part even") {
  const SpectralPoint p{0.3, 1.0};
  const Vector2d x(0.4, -0.2);
  const Matrix2cd gp = eval_G2(p, x), gm = eval_G2(p, Vector2d(-x));
  // even part must be the K0 term, odd part the K1 sigma term
  const double k = p.kappa();
  const Matrix2cd even = 0.5 * (gp + gm);
  const Matrix2cd wantEven =
      (1.0 / (2.0 * kPi)) * bessel_k0(k * x.norm()) *
      (p.z * Matrix2cd::Identity() + p.m * pauli(3));
  CHECK(mat_diff(even, wantEven) <= 1e-15);
}

TEST_CASE("G3 pinned value at z = 0") {
  const SpectralPoint p{0.0, 1.0};
  const Matrix4cd got = eval_G3(p, Vector3d(1.0, 0.0, 0.0));
  const Complex i(0.0, 1.0);
  const Matrix4cd want =
      (dirac_beta() + 2.0 * i * dirac_alpha(1)) * (std::exp(-1.0) / (4.0 * kPi));
  CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(eval_G3(p, Vector3d(0.0, 0.0, 0.0)), std::domain_error);
}

TEST_CASE("G3 leading singularity") {
  const SpectralPoint p{0.3, 1.0};
  const Vector3d xhat(0.0, 1.0, 0.0);
  const Complex i(0.0, 1.0);
  for (const double r : {1e-5, 1e-6}) {
    const Matrix4cd got = 4.0 * kPi * r * r * eval_G3(p, Vector3d(r * xhat));
    const Matrix4cd want = i * alpha_dot(xhat);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 40.0 * r);
  }
}

TEST_CASE("r3 pinned value at antipodes") {
  const Vector3d x(0.0, 0.0, 1.0), y(0.0, 0.0, -1.0);
  const Matrix2cd got = eval_r3(x, y, y);
  CHECK(mat_diff(got, Matrix2cd(Matrix2cd::Identity() / (4.0 * kPi))) <= 1e-16);
}

TEST_CASE("r3 anticommutation identity and scaling at random sphere pairs") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 50; ++rep) {
    Vector3d x(g(rng), g(rng), g(rng)), y(g(rng), g(rng), g(rng));
    x.normalize();
    y.normalize();
    // (sigma.nu(x)) r(x, y) = -r(y, x)^* (sigma.nu(y)) with nu = identity map
    const Matrix2cd lhs = sigma_dot(x) * eval_r3(x, y, y);
    const Matrix2cd rhs = -eval_r3(y, x, x).adjoint() * sigma_dot(y);
    CHECK(mat_diff(lhs, rhs) <= 1e-13 * lhs.cwiseAbs().maxCoeff());
    const double s = 2.5;
    CHECK(mat_diff(eval_r3(s * x, s * y, y),
                   Matrix2cd(eval_r3(x, y, y) / (s * s))) <=
          1e-13 * eval_r3(x, y, y).cwiseAbs().maxCoeff());
  }
}

TEST_CASE("t3 matches G3 off-diagonal structure") {
  // t(x) = i (sigma.x)(1 + kappa|x|) e^{-kappa|x|} / (4 pi |x|^3): check the
  // pinned form at a point against the direct formula
  const SpectralPoint p{0.3, 1.0};
  const Vector3d x(0.2, -0.1, 0.4);
  const double r = x.norm(), ka = p.kappa();
  const Complex i(0.0, 1.0);
  const Matrix2cd want = i * sigma_dot(x) * (1.0 + ka * r) * std::exp(-ka * r) /
                         (4.0 * kPi * r * r * r);
  CHECK(mat_diff(eval_t3(p, x), want) <= 1e-15);
}

TEST_CASE("kernel split reconstructs t on the annulus") {
  const SpectralPoint p{0.3, 1.0};
  const KernelSplit ks = split_kernel_t(p, 16);
  CHECK(ks.order >= 12);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 60; ++rep) {
    const double r = std::pow(10.0, -3.0 * u(rng));  // |x| in [1e-3, 1]
    Vector3d x(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5);
    x = r * x.normalized();
    const Matrix2cd want = eval_t3(p, x);
    worst = std::max(worst, mat_diff(ks.reconstruct(x), want) /
                                want.cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("kernel split structure") {
  const SpectralPoint p{0.3, 1.0};
  const KernelSplit ks = split_kernel_t(p, 12);
  // the |x|^{-2} slot is dropped from the expansion: the leading pseudo
  // coefficient multiplies |x|^{-1}, and its value is the exact cancellation
  // of the kappa^2/2 terms
  CHECK(ks.pseudo.size() >= 2);
  CHECK(ks.analytic.size() >= 2);
  // kappa = 0: every pseudo-homogeneous coefficient beyond the principal part
  // vanishes, t reduces to the principal kernel
  const KernelSplit flat = split_kernel_t(SpectralPoint{1.0, 1.0}, 12);
  CHECK(flat.kappa == 0.0);
  CHECK(flat.pseudo.cwiseAbs().maxCoeff() == 0.0);
  const Vector3d x(0.3, 0.1, -0.2);
  CHECK(mat_diff(flat.reconstruct(x), flat.principal(x)) <= 1e-18);
  CHECK(mat_diff(eval_t3(SpectralPoint{1.0, 1.0}, x), flat.principal(x)) <= 1e-17);
}
