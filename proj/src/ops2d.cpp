#include "diraclayer/ops2d.hpp"

#include <cmath>
#include <stdexcept>

namespace diraclayer {

namespace {

const Complex kI(0.0, 1.0);

Eigen::VectorXd pm_diag(int N, double plus, double minus) {
  Eigen::VectorXd d(2 * N + 1);
  for (int n = -N; n <= N; ++n) d(N + n) = n >= 0 ? plus : minus;
  return d;
}

// Kress-Martensen quadrature weights for the ln(4 sin^2 pi(t - tau)) factor:
// R^log_d = -(2/M) sum_{n=1}^N cos(2 pi n d / M) / n, circulant in i - j.
Eigen::VectorXd log_weights(int N) {
  const int M = 2 * N + 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(M);
  for (int d = 0; d < M; ++d)
    for (int n = 1; n <= N; ++n)
      out(d) -= (2.0 / M) * std::cos(2.0 * kPi * n * d / M) / n;
  return out;
}

// Cauchy correction kernels on the nodes. h pairs with the column variable tau,
// hs is the conjugate-reflected one; diagonals carry the curvature limits.
Eigen::VectorXcd unit_nodes(const Eigen::VectorXd& t) {
  Eigen::VectorXcd E(t.size());
  for (int j = 0; j < t.size(); ++j) E(j) = std::exp(2.0 * kPi * kI * t(j));
  return E;
}

Eigen::MatrixXcd corr_h(const Curve2D::Nodes& nd) {
  const int M = static_cast<int>(nd.W.size());
  const Eigen::VectorXcd E = unit_nodes(nd.t);
  Eigen::MatrixXcd h(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      if (i == j)
        h(i, i) = nd.Wpp(i) / (2.0 * nd.Wp(i)) - kI * kPi;
      else
        h(i, j) = nd.Wp(j) / (nd.W(j) - nd.W(i)) -
                  2.0 * kPi * kI * E(j) / (E(j) - E(i));
    }
  return h;
}

Eigen::MatrixXcd corr_hs(const Curve2D::Nodes& nd) {
  const int M = static_cast<int>(nd.W.size());
  const Eigen::VectorXcd E = unit_nodes(nd.t);
  Eigen::MatrixXcd hs(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      if (i == j)
        hs(i, i) = std::conj(nd.Wpp(i)) / (2.0 * std::conj(nd.Wp(i))) + kI * kPi;
      else
        hs(i, j) =
            std::conj(nd.Wp(i)) / (std::conj(nd.W(i)) - std::conj(nd.W(j))) +
            2.0 * kPi * kI * std::conj(E(i)) / (std::conj(E(i)) - std::conj(E(j)));
    }
  return hs;
}

Eigen::MatrixXcd mode_D(int N) {
  return pm_diag(N, 2.0, -2.0).cast<Complex>().asDiagonal();
}

struct CNodeParts {
  Eigen::MatrixXcd Sfac, T1ur, T1ll;  // node basis
};

// Single-layer and K_1-remainder node matrices, Kress-Martensen split against
// the circulant log weights. branch_sign < 0 selects the wrong branch of the
// log in the K_0 series, K_0 -> K_0 - i pi I_0: analytic but not self-adjoint,
// kept as a negative control.
CNodeParts c_node_parts(const Panel2D& p, const SpectralPoint& sp, int branch_sign) {
  const auto& nd = p.nodes;
  const int M = static_cast<int>(nd.W.size());
  const int N = (M - 1) / 2;
  const double ell = p.curve.length();
  const double k = sp.kappa();
  const Eigen::VectorXd Rlog = log_weights(N);

  CNodeParts out;
  out.Sfac.resize(M, M);
  out.T1ur.resize(M, M);
  out.T1ll.resize(M, M);
  const Complex wrong = branch_sign >= 0 ? Complex(0.0) : Complex(0.0, -0.5 * ell);
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      const double rl = Rlog((i - j + M) % M);
      if (i == j) {
        const double aK0 = -0.5;
        const double bK0 = std::log(4.0 * kPi / (k * ell)) - kEulerGamma;
        out.Sfac(i, i) = (ell / (2.0 * kPi)) * (aK0 * rl + bK0 / M) + wrong / double(M);
        out.T1ur(i, i) = 0.0;  // a1, b1 vanish on the diagonal
        out.T1ll(i, i) = 0.0;
        continue;
      }
      const Complex dc = nd.W(i) - nd.W(j);
      const double r = std::abs(dc);
      const double si = std::sin(kPi * (nd.t(i) - nd.t(j)));
      const double sin2 = 4.0 * si * si;
      const double q = r * r / sin2;
      const double i0 = bessel_i0(k * r);
      const double aK0 = -0.5 * i0;
      const double bK0 = bessel_k0(k * r) + 0.5 * i0 * std::log(sin2);
      out.Sfac(i, j) = (ell / (2.0 * kPi)) * (aK0 * rl + bK0 / M) + wrong * i0 / double(M);
      const double i1r = bessel_i1(k * r) / r;
      const double lnfac = 0.5 * std::log(0.25 * k * k * q);
      const Complex a1 = (kI * ell * k / (4.0 * kPi)) * i1r;
      const Complex b1 = (kI * ell * k / (2.0 * kPi)) *
                         (i1r * lnfac - 0.25 * k * bessel_k1_regular_sum(k * r));
      const Complex t1 = a1 * rl + b1 / static_cast<double>(M);
      out.T1ur(i, j) = t1 * std::conj(dc);
      out.T1ll(i, j) = t1 * dc;
    }
  }
  return out;
}

}  // namespace

double aliasing_tail_mass(const Curve2D& curve, int N) {
  // speed energy in curve modes beyond the panel Nyquist frequency: that part
  // folds back onto |n| <= N when the curve is sampled at 2N+1 nodes
  const int K = curve.max_mode();
  double acc = 0.0;
  for (int n = -K; n <= K; ++n)
    if (std::abs(n) > N)
      acc += std::norm(2.0 * kPi * n * curve.modes()(K + n));
  return std::sqrt(acc) / curve.length();
}

Panel2D make_panel(const Curve2D& curve, int N, double c_lambda) {
  if (N < 4) throw std::invalid_argument("make_panel: N must be >= 4");
  const double tail = aliasing_tail_mass(curve, N);
  if (tail > 1e-6)
    throw std::invalid_argument(
        "make_panel: curve bandwidth aliases at this resolution (speed tail mass " +
        std::to_string(tail) + " > 1e-6)");
  Panel2D p;
  p.curve = curve;
  p.space = TrigSpace{N, curve.length(), c_lambda};
  p.nodes = curve.nodes(2 * N + 1);
  p.U = dft_matrix(N);
  p.aval.resize(2 * N + 1);
  for (int j = 0; j < 2 * N + 1; ++j)
    p.aval(j) = kI * std::conj(p.nodes.Wp(j)) / curve.length();
  return p;
}

Eigen::MatrixXcd assemble_R(const Panel2D& p) {
  const int M = p.space.modes();
  const Eigen::MatrixXcd Th = (-2.0 * kI / (kPi * M)) * corr_h(p.nodes);
  return mode_D(p.space.N) + p.U * Th * p.U.adjoint();
}

Eigen::MatrixXcd assemble_Rstar(const Panel2D& p) {
  const int M = p.space.modes();
  const Eigen::MatrixXcd Ths = (2.0 * kI / (kPi * M)) * corr_hs(p.nodes);
  return mode_D(p.space.N) + p.U * Ths * p.U.adjoint();
}

COperator2D assemble_C(const Panel2D& p, const SpectralPoint& sp, int branch_sign) {
  const int M = p.space.modes();
  COperator2D op;
  op.R = assemble_R(p);
  op.Rstar = assemble_Rstar(p);
  const CNodeParts parts = c_node_parts(p, sp, branch_sign);
  op.S = p.U * parts.Sfac * p.U.adjoint();
  const Eigen::MatrixXcd T1ur = p.U * parts.T1ur * p.U.adjoint();
  const Eigen::MatrixXcd T1ll = p.U * parts.T1ll * p.U.adjoint();
  op.Ma = p.U * p.aval.asDiagonal() * p.U.adjoint();
  op.Mab = p.U * p.aval.conjugate().asDiagonal() * p.U.adjoint();

  const Eigen::MatrixXcd UR = -0.25 * kI * (op.R * op.Ma) + T1ur;
  const Eigen::MatrixXcd LL = 0.25 * kI * (op.Mab * op.Rstar) + T1ll;
  op.C.resize(2 * M, 2 * M);
  op.C.topLeftCorner(M, M) = (sp.z + sp.m) * op.S;
  op.C.topRightCorner(M, M) = UR;
  op.C.bottomLeftCorner(M, M) = LL;
  op.C.bottomRightCorner(M, M) = (sp.z - sp.m) * op.S;
  op.X = Eigen::MatrixXcd::Zero(2 * M, 2 * M);
  op.X.topRightCorner(M, M) = op.Ma;
  op.X.bottomLeftCorner(M, M) = op.Mab;
  return op;
}

Eigen::MatrixXcd remainder_K_prop32(const Panel2D& p, const COperator2D& cop,
                                    const SpectralPoint& sp) {
  const int M = p.space.modes();
  const Eigen::VectorXcd lam_m2 = lambda_multiplier(-2.0, p.space).cast<Complex>();
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(2 * M, 2 * M);
  P.topLeftCorner(M, M) = ((sp.z + sp.m) * lam_m2).asDiagonal();
  P.bottomRightCorner(M, M) = ((sp.z - sp.m) * lam_m2).asDiagonal();
  P.topRightCorner(M, M) = -0.25 * kI * (cop.R * cop.Ma);
  P.bottomLeftCorner(M, M) = 0.25 * kI * (cop.Mab * cop.Rstar);
  return cop.C - P;
}

Eigen::MatrixXcd remainder_K_theorem(const Panel2D& p, const COperator2D& cop) {
  Eigen::MatrixXcd K = cop.R + cop.Rstar;
  K -= Eigen::MatrixXcd(pm_diag(p.space.N, 4.0, -4.0).cast<Complex>().asDiagonal());
  return K;
}

namespace {

// V = blkdiag(I, mult(-i (nu1 - i nu2))): V (sigma.nu) has the constant lower
// corner -i, which is what lets P+- split it.
Eigen::MatrixXcd v_op(const Panel2D& p, const COperator2D& cop) {
  const int M = p.space.modes();
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(2 * M, 2 * M);
  V.topLeftCorner(M, M).setIdentity();
  V.bottomRightCorner(M, M) = -kI * cop.Ma;
  return V;
}

Eigen::MatrixXcd pm_mid(const Panel2D& p) {
  const int M = p.space.modes();
  const Eigen::MatrixXcd pm =
      pm_diag(p.space.N, -1.0, 1.0).cast<Complex>().asDiagonal();  // P- minus P+
  Eigen::MatrixXcd Pm = Eigen::MatrixXcd::Zero(2 * M, 2 * M);
  Pm.topRightCorner(M, M) = pm;
  Pm.bottomLeftCorner(M, M) = pm;
  return Pm;
}

}  // namespace

Eigen::MatrixXcd corollary_principal(const Panel2D& p, const COperator2D& cop) {
  const Eigen::MatrixXcd V = v_op(p, cop);
  return 0.5 * (cop.X * V.adjoint() * pm_mid(p) * V * cop.X);
}

Eigen::MatrixXcd remainder_K_corollary(const Panel2D& p, const COperator2D& cop) {
  return cop.C - corollary_principal(p, cop);
}

Eigen::MatrixXcd remainder_K_lemma33(const Panel2D& p, const COperator2D& cop,
                                     const SpectralPoint& sp) {
  const int M = p.space.modes();
  const Eigen::MatrixXcd Lam =
      lambda_multiplier(1.0, p.space, 2).cast<Complex>().asDiagonal();
  const Eigen::MatrixXcd V = v_op(p, cop);
  const Eigen::MatrixXcd lhs =
      4.0 * (Lam * V * cop.X * cop.C * cop.X * V.adjoint() * Lam);
  Eigen::MatrixXcd mid = Eigen::MatrixXcd::Zero(2 * M, 2 * M);
  mid.topRightCorner(M, M) = cop.Rstar;
  mid.bottomLeftCorner(M, M) = cop.R;
  Eigen::MatrixXcd K = lhs + Lam * mid * Lam;
  K.topLeftCorner(M, M).diagonal().array() -= 4.0 * (sp.z - sp.m);
  K.bottomRightCorner(M, M).diagonal().array() -= 4.0 * (sp.z + sp.m);
  return K;
}

double identity_residual_oversampled(const Curve2D& curve, int N,
                                     const SpectralPoint& sp, double c_lambda,
                                     int branch_sign) {
  const int Nb = 2 * N;
  const Panel2D p = make_panel(curve, Nb, c_lambda);
  const int M = p.space.modes();

  // node-basis assembly: multiplication operators are diagonal here, so the
  // only large products are U^* D U and the final square.
  const Eigen::MatrixXcd Th = (-2.0 * kI / (kPi * M)) * corr_h(p.nodes);
  const Eigen::MatrixXcd Ths = (2.0 * kI / (kPi * M)) * corr_hs(p.nodes);
  const Eigen::VectorXcd dvec = pm_diag(Nb, 2.0, -2.0).cast<Complex>();
  const Eigen::MatrixXcd Dn = p.U.adjoint() * (dvec.asDiagonal() * p.U);
  const Eigen::MatrixXcd Rn = Dn + Th;
  const Eigen::MatrixXcd Rsn = Dn + Ths;
  const CNodeParts parts = c_node_parts(p, sp, branch_sign);

  const Eigen::VectorXcd a = p.aval, ab = p.aval.conjugate();
  Eigen::MatrixXcd CX(2 * M, 2 * M);
  // C = [[zp S, UR], [LL, zm S]], X = [[0, diag(a)], [diag(ab), 0]]
  const Eigen::MatrixXcd UR = -0.25 * kI * (Rn * a.asDiagonal()) + parts.T1ur;
  const Eigen::MatrixXcd LL = 0.25 * kI * (ab.asDiagonal() * Rsn) + parts.T1ll;
  CX.topLeftCorner(M, M) = UR * ab.asDiagonal();
  CX.topRightCorner(M, M) = (sp.z + sp.m) * (parts.Sfac * a.asDiagonal());
  CX.bottomLeftCorner(M, M) = (sp.z - sp.m) * (parts.Sfac * ab.asDiagonal());
  CX.bottomRightCorner(M, M) = LL * a.asDiagonal();

  Eigen::MatrixXcd Y = 4.0 * (CX * CX);
  Y.diagonal().array() += 1.0;

  // observe on modes |n| <= N: conjugate each channel block, then restrict
  const int Ms = 2 * N + 1;
  Eigen::MatrixXcd Yr(2 * Ms, 2 * Ms);
  for (int bi = 0; bi < 2; ++bi)
    for (int bj = 0; bj < 2; ++bj) {
      const Eigen::MatrixXcd blk =
          p.U * Y.block(bi * M, bj * M, M, M) * p.U.adjoint();
      Yr.block(bi * Ms, bj * Ms, Ms, Ms) = blk.block(Nb - N, Nb - N, Ms, Ms);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Yr.adjoint() * Yr,
                                                     Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace diraclayer
