#include "diraclayer/trigcalc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace diraclayer {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const Complex kI(0.0, 1.0);

// mode range covered by M samples: M odd -> -(M-1)/2..(M-1)/2, M even -> -(M/2-1)..M/2
std::pair<int, int> mode_range(int M) {
  return M % 2 == 1 ? std::make_pair(-(M - 1) / 2, (M - 1) / 2)
                    : std::make_pair(-(M / 2 - 1), M / 2);
}
}  // namespace

Eigen::VectorXcd analyze(const Eigen::VectorXcd& samples) {
  const int M = static_cast<int>(samples.size());
  if (M < 2) throw std::invalid_argument("analyze: need at least 2 samples");
  auto [lo, hi] = mode_range(M);
  Eigen::VectorXcd c(M);
  for (int n = lo; n <= hi; ++n) {
    Complex acc = 0.0;
    for (int j = 0; j < M; ++j)
      acc += samples(j) * std::exp(-2.0 * kPi * kI * (static_cast<double>(n) * j / M));
    c(n - lo) = acc / static_cast<double>(M);
  }
  return c;
}

Eigen::VectorXcd synthesize(const Eigen::VectorXcd& coeffs) {
  const int M = static_cast<int>(coeffs.size());
  if (M < 2) throw std::invalid_argument("synthesize: need at least 2 coefficients");
  auto [lo, hi] = mode_range(M);
  Eigen::VectorXcd f(M);
  for (int j = 0; j < M; ++j) {
    Complex acc = 0.0;
    for (int n = lo; n <= hi; ++n)
      acc += coeffs(n - lo) * std::exp(2.0 * kPi * kI * (static_cast<double>(n) * j / M));
    f(j) = acc;
  }
  return f;
}

Eigen::MatrixXcd dft_matrix(int N) {
  const int M = 2 * N + 1;
  Eigen::MatrixXcd U(M, M);
  const double root = std::sqrt(static_cast<double>(M));
  for (int n = -N; n <= N; ++n)
    for (int j = 0; j < M; ++j)
      U(N + n, j) = std::exp(-2.0 * kPi * kI * (static_cast<double>(n) * j / M)) / root;
  return U;
}

Eigen::MatrixXcd to_coefficient_basis(const Eigen::MatrixXcd& node_op) {
  const int M = static_cast<int>(node_op.rows());
  if (node_op.cols() != M || M % 2 == 0)
    throw std::invalid_argument("to_coefficient_basis: need square odd-size operator");
  const Eigen::MatrixXcd U = dft_matrix((M - 1) / 2);
  return U * node_op * U.adjoint();
}

Eigen::VectorXd lambda_multiplier(double t, const TrigSpace& space, int channels) {
  const int M = space.modes();
  Eigen::VectorXd d(M * channels);
  for (int n = -space.N; n <= space.N; ++n) {
    const double v =
        std::pow(4.0 * kPi / space.ell * (space.c_lambda + std::abs(n)), 0.5 * t);
    for (int ch = 0; ch < channels; ++ch) d(ch * M + space.N + n) = v;
  }
  return d;
}

Eigen::VectorXcd apply_lambda(double t, const Eigen::VectorXcd& coeffs,
                              const TrigSpace& space) {
  const int M = space.modes();
  if (coeffs.size() % M != 0)
    throw std::invalid_argument("apply_lambda: size must be a multiple of 2N+1");
  const int channels = static_cast<int>(coeffs.size()) / M;
  return lambda_multiplier(t, space, channels).cast<Complex>().cwiseProduct(coeffs);
}

Eigen::VectorXcd apply_projection(int sign, const Eigen::VectorXcd& coeffs) {
  const int M = static_cast<int>(coeffs.size());
  if (M % 2 == 0) throw std::invalid_argument("apply_projection: need odd-size vector");
  const int N = (M - 1) / 2;
  Eigen::VectorXcd out = coeffs;
  for (int n = -N; n <= N; ++n)
    if ((sign > 0 && n < 0) || (sign <= 0 && n >= 0)) out(N + n) = 0.0;
  return out;
}

Eigen::MatrixXcd projection_matrix(int sign, int N) {
  const int M = 2 * N + 1;
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(M, M);
  for (int n = -N; n <= N; ++n)
    if ((sign > 0 && n >= 0) || (sign <= 0 && n < 0)) P(N + n, N + n) = 1.0;
  return P;
}

Eigen::VectorXd sobolev_weights(double s, const TrigSpace& space, int channels) {
  const int M = space.modes();
  Eigen::VectorXd d(M * channels);
  for (int n = -space.N; n <= space.N; ++n) {
    const double v = std::pow(std::max(std::abs(static_cast<double>(n)), 1.0), s);
    for (int ch = 0; ch < channels; ++ch) d(ch * M + space.N + n) = v;
  }
  return d;
}

double weighted_norm(const BlockOperator& op, double r, double s) {
  const int dim = static_cast<int>(op.A.rows());
  if (op.A.cols() != dim || dim != op.space.modes() * op.channels)
    throw std::invalid_argument("weighted_norm: operator shape does not match space");
  const Eigen::VectorXd wl = sobolev_weights(r - s, op.space, op.channels);
  const Eigen::VectorXd wr = sobolev_weights(-r, op.space, op.channels);
  const Eigen::MatrixXcd B = wl.asDiagonal() * op.A * wr.asDiagonal();
  // spectral norm via the top eigenvalue of B^* B (exact, deterministic)
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B.adjoint() * B,
                                                     Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

OrderEstimate estimate_order(const std::vector<BlockOperator>& family, double r,
                             double candidate_order) {
  if (family.size() < 3)
    throw std::invalid_argument("estimate_order: need at least 3 resolutions");
  OrderEstimate est;
  int prev = -1;
  for (const auto& op : family) {
    if (op.space.N <= prev)
      throw std::invalid_argument("estimate_order: resolutions must be increasing");
    prev = op.space.N;
    est.table.emplace_back(op.space.N, weighted_norm(op, r, candidate_order));
  }
  const double first = est.table.front().second, last = est.table.back().second;
  // a family that vanishes identically (circle: R - R* = 0) is maximally smoothing
  est.ratio = first < 1e-13 ? (last < 1e-13 ? 0.0 : std::numeric_limits<double>::infinity())
                            : last / first;
  est.pass = std::isfinite(est.ratio) && est.ratio <= 1.5;
  return est;
}

Eigen::MatrixXcd restrict_modes(const Eigen::MatrixXcd& A, int N_big, int N_small,
                                int channels) {
  const int Mb = 2 * N_big + 1, Ms = 2 * N_small + 1;
  if (A.rows() != channels * Mb || A.cols() != channels * Mb)
    throw std::invalid_argument("restrict_modes: shape mismatch");
  if (N_small > N_big) throw std::invalid_argument("restrict_modes: N_small > N_big");
  Eigen::MatrixXcd out(channels * Ms, channels * Ms);
  for (int bi = 0; bi < channels; ++bi)
    for (int bj = 0; bj < channels; ++bj)
      out.block(bi * Ms, bj * Ms, Ms, Ms) =
          A.block(bi * Mb + (N_big - N_small), bj * Mb + (N_big - N_small), Ms, Ms);
  return out;
}

}  // namespace diraclayer
