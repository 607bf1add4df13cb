#pragma once

#include <Eigen/Dense>
#include <utility>

namespace diraclayer {

// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on P_n.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n);

}  // namespace diraclayer
