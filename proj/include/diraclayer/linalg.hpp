#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace diraclayer {

using Complex = std::complex<double>;
using MatVec = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

// Worker count used by the row-partitioned helpers. 0 resets to the default
// (env DIRACLAYER_THREADS, else hardware concurrency). Results are identical
// for any thread count: partitions write disjoint output rows and no
// reductions cross partition boundaries.
void set_num_threads(int n);
int num_threads();
void parallel_rows(int n, const std::function<void(int, int)>& fn);

// Exact spectral norm via the top eigenvalue of A^* A. Deterministic.
double spectral_norm(const Eigen::MatrixXcd& A);
double spectral_norm(const Eigen::MatrixXd& A);

// Power iteration on A^* A through matvec closures, deterministically seeded.
// Converges to the spectral norm from a fixed random start; rel_tol stops the
// iteration once successive estimates agree.
double power_norm(const MatVec& av, const MatVec& ahv, int dim, unsigned seed = 7,
                  int iters = 60, double rel_tol = 1e-6);
// Same for Hermitian operators (single matvec per step).
double power_norm_herm(const MatVec& av, int dim, unsigned seed = 7, int iters = 80,
                       double rel_tol = 1e-8);

// Sampled Hermitian defect: max |<x, A y> - <A x, y>| / (|x||y|) over seeded
// Gaussian pairs. Zero for Hermitian A up to rounding.
double herm_probe(const MatVec& av, int dim, unsigned seed = 11, int pairs = 3);

}  // namespace diraclayer
