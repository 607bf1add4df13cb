#include "diraclayer/linalg.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>
#include <vector>

namespace diraclayer {

namespace {

int default_threads() {
  if (const char* env = std::getenv("DIRACLAYER_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return std::min(v, 64);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

std::atomic<int> g_threads{0};

Eigen::VectorXcd seeded_unit(int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd x(dim);
  for (int i = 0; i < dim; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    x(i) = Complex(re, im);
  }
  return x / x.norm();
}

}  // namespace

void set_num_threads(int n) { g_threads.store(n > 0 ? std::min(n, 64) : 0); }

int num_threads() {
  const int v = g_threads.load();
  return v > 0 ? v : default_threads();
}

void parallel_rows(int n, const std::function<void(int, int)>& fn) {
  const int nt = std::min(num_threads(), std::max(1, n));
  if (nt <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  const int chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const int b = t * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back(fn, b, e);
  }
  for (auto& th : pool) th.join();
}

double spectral_norm(const Eigen::MatrixXcd& A) {
  const Eigen::MatrixXcd G = A.adjoint() * A;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double spectral_norm(const Eigen::MatrixXd& A) {
  const Eigen::MatrixXd G = A.transpose() * A;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double power_norm(const MatVec& av, const MatVec& ahv, int dim, unsigned seed,
                  int iters, double rel_tol) {
  Eigen::VectorXcd x = seeded_unit(dim, seed);
  double s = 0.0;
  for (int it = 0; it < iters; ++it) {
    const Eigen::VectorXcd z = ahv(av(x));
    const double nz = z.norm();
    if (nz == 0.0) return 0.0;
    x = z / nz;
    const double snew = std::sqrt(nz);
    if (it >= 8 && std::abs(snew - s) <= rel_tol * snew) return snew;
    s = snew;
  }
  return s;
}

double power_norm_herm(const MatVec& av, int dim, unsigned seed, int iters,
                       double rel_tol) {
  Eigen::VectorXcd x = seeded_unit(dim, seed);
  double s = 0.0;
  for (int it = 0; it < iters; ++it) {
    const Eigen::VectorXcd y = av(x);
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    x = y / ny;
    if (it >= 8 && std::abs(ny - s) <= rel_tol * ny) return ny;
    s = ny;
  }
  return s;
}

double herm_probe(const MatVec& av, int dim, unsigned seed, int pairs) {
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const Eigen::VectorXcd x = seeded_unit(dim, seed + 2 * k);
    const Eigen::VectorXcd y = seeded_unit(dim, seed + 2 * k + 1);
    const Complex a = x.dot(av(y));  // <x, A y>, Eigen dot conjugates the left
    const Complex b = av(x).dot(y);
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

}  // namespace diraclayer
