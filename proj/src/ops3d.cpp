#include "diraclayer/ops3d.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "diraclayer/linalg.hpp"

namespace diraclayer {

namespace {

const Complex kIu(0.0, 1.0);

// C^4 smoothstep: 0 at 0, 1 at 1, first four derivatives vanish at both ends.
inline double q9(double v) {
  return v * v * v * v * v *
         (126.0 + v * (-420.0 + v * (540.0 + v * (-315.0 + 70.0 * v))));
}

Eigen::VectorXd cheb_nodes(double a, double b, int J) {
  Eigen::VectorXd x(J);
  for (int k = 0; k < J; ++k)
    x(k) = 0.5 * (a + b) + 0.5 * (b - a) * std::cos((2 * k + 1) * kPi / (2 * J));
  std::sort(x.data(), x.data() + J);
  return x;
}

}  // namespace

PvScheme make_pv_scheme(const Eigen::VectorXd& radii, int fit_order,
                        double row_weight) {
  const int J = static_cast<int>(radii.size());
  if (J < fit_order + 2)
    throw std::invalid_argument("make_pv_scheme: need more radii than fit powers");
  for (int i = 1; i < J; ++i)
    if (radii(i) <= radii(i - 1))
      throw std::invalid_argument("make_pv_scheme: radii must be strictly increasing");
  if (radii(0) <= 0.0)
    throw std::invalid_argument("make_pv_scheme: radii must be positive");

  // weighted least squares for the constant term of f(rho) ~ c0 + sum c_k rho^{2k+1}
  const int P = fit_order + 2;
  Eigen::VectorXi powers(P);
  powers(0) = 0;
  for (int k = 0; k <= fit_order; ++k) powers(k + 1) = 2 * k + 1;
  Eigen::MatrixXd A(J, P);
  for (int r = 0; r < J; ++r)
    for (int c = 0; c < P; ++c) A(r, c) = std::pow(radii(r), powers(c));
  const Eigen::VectorXd s = radii.array().pow(row_weight);
  Eigen::MatrixXd As = s.asDiagonal() * A;
  Eigen::VectorXd cs = As.cwiseAbs().colwise().maxCoeff();
  As = As * cs.cwiseInverse().asDiagonal();
  // pinv row 0 of As gives the functional extracting the scaled constant term
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::MatrixXd pinv =
      svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
      svd.matrixU().transpose();
  PvScheme pv;
  pv.radii = radii;
  pv.fit_order = fit_order;
  pv.row_weight = row_weight;
  pv.weights = (pinv.row(0).transpose().array() / cs(0) * s.array()).matrix();
  // how exactly the weights reproduce 1 and kill each deficit power
  double defect = std::abs(pv.weights.sum() - 1.0);
  for (int c = 1; c < P; ++c) {
    double acc = 0.0;
    for (int r = 0; r < J; ++r) acc += pv.weights(r) * A(r, c);
    defect = std::max(defect, std::abs(acc));
  }
  pv.annihilation_defect = defect;
  return pv;
}

PvScheme default_pv_scheme(int level) {
  if (level <= 1) return make_pv_scheme(cheb_nodes(1.10, 1.98, 10), 3);
  return make_pv_scheme(cheb_nodes(0.90, 1.98, 12), 5);
}

GridGeom pair_geometry(const SphereGrid& grid) {
  const int n = grid.size();
  const auto& P = grid.nodes;
  GridGeom g;
  Eigen::MatrixXd G = P * P.transpose();
  G = G.cwiseMax(-1.0).cwiseMin(1.0);
  g.chord = (2.0 - 2.0 * G.array()).cwiseMax(0.0).sqrt().matrix();
  g.chord.diagonal().setOnes();
  const Eigen::VectorXd sw = grid.weights.cwiseSqrt();
  const Eigen::MatrixXd WW = sw * sw.transpose();
  g.base_s = WW.array() / (2.0 * kPi * g.chord.array());
  g.base_v = WW.array() / (kPi * g.chord.array().cube());
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    g.cross[a] = P.col(b) * P.col(c).transpose() - P.col(c) * P.col(b).transpose();
  }
  return g;
}

namespace {

// Combined mask sum_r w_r q9(clip(chord / rho_r)), diagonal zero. The 2n x 2n
// operator is linear in the mask, so one accumulation serves all radii.
Eigen::MatrixXd combined_mask(const GridGeom& geom, const PvScheme& pv) {
  const int n = static_cast<int>(geom.chord.rows());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < pv.radii.size(); ++r) {
    const double rho = pv.radii(r), wr = pv.weights(r);
    parallel_rows(n, [&](int b, int e) {
      for (int i = b; i < e; ++i)
        for (int j = 0; j < n; ++j) {
          const double v = std::min(1.0, geom.chord(i, j) / rho);
          m(i, j) += wr * q9(v);
        }
    });
  }
  m.diagonal().setZero();
  return m;
}

// Interleave the scalar and vector parts into the 2n x 2n spinor operator:
// block(i, j) = s I - i sigma.v with s = base_s mask, v_a = base_v cross_a mask.
// sign_cross = -1 builds the operator from the reflected kernel r(y, x)^*.
Eigen::MatrixXcd spinor_blocks(const GridGeom& geom, const Eigen::MatrixXd& mask,
                               double sign_cross) {
  const int n = static_cast<int>(mask.rows());
  Eigen::MatrixXcd R(2 * n, 2 * n);
  parallel_rows(n, [&](int b, int e) {
    for (int i = b; i < e; ++i)
      for (int j = 0; j < n; ++j) {
        const double mij = mask(i, j);
        const double s = geom.base_s(i, j) * mij;
        const double bv = geom.base_v(i, j) * mij;
        const double v1 = sign_cross * bv * geom.cross[0](i, j);
        const double v2 = sign_cross * bv * geom.cross[1](i, j);
        const double v3 = sign_cross * bv * geom.cross[2](i, j);
        R(2 * i, 2 * j) = Complex(s, -v3);
        R(2 * i, 2 * j + 1) = Complex(-v2, -v1);
        R(2 * i + 1, 2 * j) = Complex(v2, -v1);
        R(2 * i + 1, 2 * j + 1) = Complex(s, v3);
      }
  });
  return R;
}

}  // namespace

Eigen::MatrixXcd assemble_R3(const SphereGrid& grid, const GridGeom& geom,
                             const PvScheme& pv) {
  (void)grid;
  return spinor_blocks(geom, combined_mask(geom, pv), 1.0);
}

Eigen::MatrixXcd assemble_R3star(const SphereGrid& grid, const GridGeom& geom,
                                 const PvScheme& pv) {
  // adjoint kernel r(y, x)^*: evaluate with swapped arguments (the reflected
  // cross product) and take the conjugate transpose of each 2x2 block
  const Eigen::MatrixXd mask = combined_mask(geom, pv);
  const Eigen::MatrixXcd Rs = spinor_blocks(geom, mask, -1.0);
  const int n = grid.size();
  Eigen::MatrixXcd out(2 * n, 2 * n);
  parallel_rows(n, [&](int b, int e) {
    for (int i = b; i < e; ++i)
      for (int j = 0; j < n; ++j)
        out.block<2, 2>(2 * i, 2 * j) = Rs.block<2, 2>(2 * i, 2 * j).adjoint();
  });
  return out;
}

Eigen::MatrixXd assemble_S3(const SphereGrid& grid, const GridGeom& geom, double mu) {
  if (!(mu < 0.0))
    throw std::domain_error("assemble_S3: requires mu < 0 below the free spectrum");
  const double kappa = std::sqrt(-mu);
  const int n = grid.size();
  Eigen::MatrixXd K =
      (-kappa * geom.chord.array()).exp() / (4.0 * kPi * geom.chord.array());
  K.diagonal().setZero();
  const double J = kappa > 0.0 ? (1.0 - std::exp(-2.0 * kappa)) / (2.0 * kappa) : 1.0;
  const Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, J) - K * grid.weights;
  const Eigen::VectorXd sw = grid.weights.cwiseSqrt();
  Eigen::MatrixXd St = K.array() * (sw * sw.transpose()).array();
  St.diagonal() = diag;
  return St;
}

Eigen::MatrixXcd mult_sigma_nu(const SphereGrid& grid) {
  const int n = grid.size();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    const auto x = grid.nodes.row(i);
    M(2 * i, 2 * i) = x(2);
    M(2 * i, 2 * i + 1) = Complex(x(0), -x(1));
    M(2 * i + 1, 2 * i) = Complex(x(0), x(1));
    M(2 * i + 1, 2 * i + 1) = -x(2);
  }
  return M;
}

Eigen::MatrixXcd assemble_Treg3(const SphereGrid& grid, const GridGeom& geom,
                                double kappa) {
  const int n = grid.size();
  const Eigen::VectorXd sw = grid.weights.cwiseSqrt();
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  parallel_rows(n, [&](int b, int e) {
    for (int i = b; i < e; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double r = geom.chord(i, j);
        const double g = (1.0 + kappa * r) * std::exp(-kappa * r) - 1.0;
        const double fac = sw(i) * sw(j) * g / (4.0 * kPi * r * r * r);
        const double d1 = grid.nodes(i, 0) - grid.nodes(j, 0);
        const double d2 = grid.nodes(i, 1) - grid.nodes(j, 1);
        const double d3 = grid.nodes(i, 2) - grid.nodes(j, 2);
        // i sigma.(x - y) * fac
        T(2 * i, 2 * j) = Complex(0.0, fac * d3);
        T(2 * i, 2 * j + 1) = Complex(fac * d2, fac * d1);
        T(2 * i + 1, 2 * j) = Complex(-fac * d2, fac * d1);
        T(2 * i + 1, 2 * j + 1) = Complex(0.0, -fac * d3);
      }
  });
  return T;
}

Eigen::MatrixXcd Lambda3::apply(const Eigen::MatrixXcd& X, double t) const {
  const int n = static_cast<int>(U.rows());
  if (X.rows() != 2 * n)
    throw std::invalid_argument("Lambda3::apply: expects 2n spinor rows");
  const Eigen::VectorXd lam2 = ev.cwiseInverse().array() + c;
  const Eigen::VectorXd scale = lam2.array().pow(0.5 * t);
  // de-interleave the two spinor components, act on the node index, re-interleave
  Eigen::MatrixXcd out(X.rows(), X.cols());
  Eigen::MatrixXcd comp(n, X.cols());
  for (int c2 = 0; c2 < 2; ++c2) {
    for (int i = 0; i < n; ++i) comp.row(i) = X.row(2 * i + c2);
    comp = U * (scale.asDiagonal() * (U.transpose() * comp)).eval();
    for (int i = 0; i < n; ++i) out.row(2 * i + c2) = comp.row(i);
  }
  return out;
}

Lambda3 assemble_Lambda3(const SphereGrid& grid, const GridGeom& geom,
                         double c_lambda) {
  const Eigen::MatrixXd Sm1 = assemble_S3(grid, geom, -1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sm1);
  Lambda3 lam;
  lam.U = es.eigenvectors();
  lam.ev = es.eigenvalues();
  lam.c = c_lambda;
  lam.s_min = lam.ev.minCoeff();
  if (lam.s_min <= 0.0)
    throw std::runtime_error(
        "assemble_Lambda3: S(-1) is not positive definite on this grid (min eig " +
        std::to_string(lam.s_min) + ")");
  lam.lam_min = std::sqrt((lam.ev.cwiseInverse().array() + c_lambda).minCoeff());
  return lam;
}

Eigen::MatrixXcd Assembly3D::apply_S2(const Eigen::MatrixXcd& X) const {
  Eigen::MatrixXcd out(X.rows(), X.cols());
  Eigen::MatrixXcd comp(n, X.cols());
  for (int c2 = 0; c2 < 2; ++c2) {
    for (int i = 0; i < n; ++i) comp.row(i) = X.row(2 * i + c2);
    const Eigen::MatrixXd re = St * comp.real();
    const Eigen::MatrixXd im = St * comp.imag();
    for (int i = 0; i < n; ++i)
      out.row(2 * i + c2) = re.row(i) + kIu * im.row(i);
  }
  return out;
}

Eigen::MatrixXcd Assembly3D::apply_C(const Eigen::MatrixXcd& X) const {
  const int nn = 2 * n;
  if (X.rows() != 2 * nn)
    throw std::invalid_argument("Assembly3D::apply_C: expects 4n rows");
  Eigen::MatrixXcd out(X.rows(), X.cols());
  out.topRows(nn) = (p.z + p.m) * apply_S2(X.topRows(nn)) + T * X.bottomRows(nn);
  out.bottomRows(nn) =
      T.adjoint() * X.topRows(nn) + (p.z - p.m) * apply_S2(X.bottomRows(nn));
  return out;
}

Eigen::MatrixXcd Assembly3D::apply_alpha_nu(const Eigen::MatrixXcd& X) const {
  const int nn = 2 * n;
  Eigen::MatrixXcd out(X.rows(), X.cols());
  out.topRows(nn) = Msn * X.bottomRows(nn);
  out.bottomRows(nn) = Msn * X.topRows(nn);
  return out;
}

Assembly3D make_assembly_3d(const SphereGrid& grid, const GridGeom& geom,
                            const SpectralPoint& p, const PvScheme& pv) {
  Assembly3D a;
  a.p = p;
  a.n = grid.size();
  const double kappa = p.kappa();
  a.St = assemble_S3(grid, geom, p.z * p.z - p.m * p.m);
  a.R = assemble_R3(grid, geom, pv);
  a.Msn = mult_sigma_nu(grid);
  a.T = assemble_Treg3(grid, geom, kappa);
  // T -= (i/4) R Msn, columnwise against the block-diagonal Msn
  for (int j = 0; j < a.n; ++j)
    a.T.middleCols(2 * j, 2) -=
        0.25 * kIu * (a.R.middleCols(2 * j, 2) * a.Msn.block(2 * j, 2 * j, 2, 2));
  return a;
}

Eigen::MatrixXcd harmonic_band(const SphereGrid& grid, int Lmax) {
  const int n = grid.size();
  const auto& P = grid.nodes;
  const int ncols = (Lmax + 1) * (Lmax + 2) * (Lmax + 3) / 6;
  Eigen::MatrixXd B(n, ncols);
  int col = 0;
  for (int deg = 0; deg <= Lmax; ++deg)
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; b <= deg - a; ++b) {
        const int c = deg - a - b;
        for (int i = 0; i < n; ++i)
          B(i, col) = std::pow(P(i, 0), a) * std::pow(P(i, 1), b) *
                      std::pow(P(i, 2), c);
        ++col;
      }
  const Eigen::VectorXd sw = grid.weights.cwiseSqrt();
  B = sw.asDiagonal() * B;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU);
  const int rank = (Lmax + 1) * (Lmax + 1);
  const Eigen::MatrixXd U = svd.matrixU().leftCols(rank);
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(2 * n, 2 * rank);
  for (int i = 0; i < n; ++i) {
    Q.block(2 * i, 0, 1, rank) = U.row(i).cast<Complex>();
    Q.block(2 * i + 1, rank, 1, rank) = U.row(i).cast<Complex>();
  }
  return Q;
}

SpectralSplit spectral_split(const Eigen::MatrixXcd& R) {
  const Eigen::MatrixXcd H = R + R.adjoint();  // R + R*
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  SpectralSplit sp;
  sp.mu = es.eigenvalues();
  sp.V = es.eigenvectors();
  const int d = static_cast<int>(sp.mu.size());
  for (int i = 0; i < d; ++i) {
    if (sp.mu(i) > 0) ++sp.n_pos;
    if (sp.mu(i) < 0) ++sp.n_neg;
  }
  double pairing = 0.0;
  for (int i = 0; i < d; ++i)
    pairing = std::max(pairing, std::abs(sp.mu(i) + sp.mu(d - 1 - i)));
  sp.pairing = pairing;
  return sp;
}

double isomorphism_residual(const SpectralSplit& split, const Eigen::MatrixXcd& Msn) {
  const int d = static_cast<int>(split.mu.size());
  int first_pos = d;
  for (int i = 0; i < d; ++i)
    if (split.mu(i) > 0) {
      first_pos = i;
      break;
    }
  const auto neg = split.V.leftCols(first_pos);
  const auto pos = split.V.rightCols(d - first_pos);
  const double a = spectral_norm(Eigen::MatrixXcd(pos.adjoint() * (Msn * pos)));
  const double b = spectral_norm(Eigen::MatrixXcd(neg.adjoint() * (Msn * neg)));
  return std::max(a, b);
}

}  // namespace diraclayer
