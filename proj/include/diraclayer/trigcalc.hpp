#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace diraclayer {

using Complex = std::complex<double>;

// Trigonometric mode space on a curve of length ell: modes n = -N..N,
// Sobolev scale anchored at n_bar = max(|n|, 1) and Lambda at c + |n|.
struct TrigSpace {
  int N = 0;
  double ell = 2.0 * 3.141592653589793238462643383279502884;
  double c_lambda = 1.0;
  int modes() const { return 2 * N + 1; }
};

// Sampling <-> coefficients at t_j = j/M. M odd covers n = -(M-1)/2..(M-1)/2,
// M even covers n = -(M/2 - 1)..M/2. coeffs_n = (1/M) sum_j f_j e^{-2 pi i n j/M}.
Eigen::VectorXcd analyze(const Eigen::VectorXcd& samples);
Eigen::VectorXcd synthesize(const Eigen::VectorXcd& coeffs);

// Unitary node-to-mode map, U(N + n, j) = e^{-2 pi i n j / M} / sqrt(M), M = 2N+1,
// so analyze(f) = U f / sqrt(M).
Eigen::MatrixXcd dft_matrix(int N);
// Conjugation of a nodal operator into the coefficient basis: U A U^*.
Eigen::MatrixXcd to_coefficient_basis(const Eigen::MatrixXcd& node_op);

// Diagonal of Lambda^t: ((4 pi / ell) (c_lambda + |n|))^{t/2}, per channel.
Eigen::VectorXd lambda_multiplier(double t, const TrigSpace& space, int channels = 1);
Eigen::VectorXcd apply_lambda(double t, const Eigen::VectorXcd& coeffs, const TrigSpace& space);

// Hardy-type splitting: sign = +1 keeps modes n >= 0, sign = -1 keeps n < 0.
Eigen::VectorXcd apply_projection(int sign, const Eigen::VectorXcd& coeffs);
Eigen::MatrixXcd projection_matrix(int sign, int N);

// Operator in the coefficient basis together with the data needed to weigh it.
struct BlockOperator {
  Eigen::MatrixXcd A;
  TrigSpace space;
  int channels = 1;
  std::string basis_tag = "modes";
  std::optional<double> claimed_order;
};

// diag(max(|n|,1)^s) stacked over channels
Eigen::VectorXd sobolev_weights(double s, const TrigSpace& space, int channels);

// Norm of A as a map H^r -> H^{r-s} (s = claimed operator order):
// || W_{r-s} A W_{-r} ||_2 with W_s = diag(max(|n|,1)^s).
double weighted_norm(const BlockOperator& op, double r, double s);

struct OrderEstimate {
  bool pass = false;
  double ratio = 0.0;                            // last norm / first norm
  std::vector<std::pair<int, double>> table;     // (N, weighted norm)
};
// Requires >= 3 resolutions with strictly increasing N. PASS iff the weighted
// norms stay bounded: ratio of last to first <= 1.5.
OrderEstimate estimate_order(const std::vector<BlockOperator>& family, double r,
                             double candidate_order);

// Central band |n| <= N_small of each channel block of a mode-basis operator.
Eigen::MatrixXcd restrict_modes(const Eigen::MatrixXcd& A, int N_big, int N_small,
                                int channels);

}  // namespace diraclayer
