#pragma once

#include <array>

#include "diraclayer/geometry.hpp"
#include "diraclayer/kernels.hpp"

namespace diraclayer {

// Principal-value realization of R on the sphere grid: smoothly masked kernels
// at a schedule of mask radii, combined by deficit-fit extrapolation weights
// that reproduce constants and annihilate the odd-power radius deficits.
struct PvScheme {
  Eigen::VectorXd radii;        // increasing mask radii (the epsilon schedule)
  int fit_order = 5;            // odd powers 1, 3, .., 2*fit_order + 1
  double row_weight = 4.0;      // least-squares row weighting rho^row_weight
  Eigen::VectorXd weights;      // extrapolation weights over the schedule
  double annihilation_defect = 0.0;  // residual of the deficit-power system
};
PvScheme make_pv_scheme(const Eigen::VectorXd& radii, int fit_order = 5,
                        double row_weight = 4.0);
PvScheme default_pv_scheme(int level);

// Pairwise geometry shared by the assemblers (O(n^2) memory).
struct GridGeom {
  Eigen::MatrixXd chord;             // |x_i - x_j|, diagonal set to 1
  Eigen::MatrixXd base_s;            // sqrt(w_i w_j) / (2 pi chord)
  Eigen::MatrixXd base_v;            // sqrt(w_i w_j) / (pi chord^3)
  std::array<Eigen::MatrixXd, 3> cross;  // (x_i x x_j)_a
};
GridGeom pair_geometry(const SphereGrid& grid);

// R and its adjoint (independent kernel r(y, x)^*), 2n x 2n spinor-interleaved.
Eigen::MatrixXcd assemble_R3(const SphereGrid& grid, const GridGeom& geom,
                             const PvScheme& pv);
Eigen::MatrixXcd assemble_R3star(const SphereGrid& grid, const GridGeom& geom,
                                 const PvScheme& pv);

// Scalar single layer S(mu), mu < 0: kernel e^{-sqrt(-mu) r}/(4 pi r),
// sqrt-weight symmetrized, diagonal from the exact row-sum identity
// int_{S^2} e^{-kappa|x-y|}/(4 pi |x-y|) dS(y) = (1 - e^{-2 kappa})/(2 kappa).
Eigen::MatrixXd assemble_S3(const SphereGrid& grid, const GridGeom& geom, double mu);

// Pointwise multiplication by sigma.nu = sigma.x on the grid (block diagonal).
Eigen::MatrixXcd mult_sigma_nu(const SphereGrid& grid);

// Smooth remainder of the t kernel after the principal part:
// i sigma.(x-y) g(kappa r) / (4 pi r^3), g(s) = (1+s) e^{-s} - 1. Vanishes
// identically at kappa = 0.
Eigen::MatrixXcd assemble_Treg3(const SphereGrid& grid, const GridGeom& geom,
                                double kappa);

// Lambda^2 = S(-1)^{-1} + c through the eigenbasis of S(-1); throws if S(-1)
// fails to be positive definite.
struct Lambda3 {
  Eigen::MatrixXd U;    // eigenvectors of S(-1), scalar grid basis
  Eigen::VectorXd ev;   // eigenvalues of S(-1), ascending
  double c = 1.0;
  double s_min = 0.0;   // min eigenvalue of S(-1)
  double lam_min = 0.0; // min eigenvalue of Lambda
  // apply Lambda^t componentwise to spinor-interleaved 2n-row stacks
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& X, double t) const;
};
Lambda3 assemble_Lambda3(const SphereGrid& grid, const GridGeom& geom,
                         double c_lambda);

// Assembled pieces of C_z; the 4n x 4n operator acts through the blocks
// [[(z+m) S2, T], [T^*, (z-m) S2]] and is never materialized.
struct Assembly3D {
  SpectralPoint p;
  Eigen::MatrixXd St;      // scalar S(z^2 - m^2)
  Eigen::MatrixXcd R;      // 2n x 2n
  Eigen::MatrixXcd Msn;    // sigma.nu
  Eigen::MatrixXcd T;      // -(i/4) R Msn + Treg
  int n = 0;
  Eigen::MatrixXcd apply_S2(const Eigen::MatrixXcd& X) const;        // 2n rows
  Eigen::MatrixXcd apply_C(const Eigen::MatrixXcd& X) const;         // 4n rows
  Eigen::MatrixXcd apply_alpha_nu(const Eigen::MatrixXcd& X) const;  // 4n rows
};
Assembly3D make_assembly_3d(const SphereGrid& grid, const GridGeom& geom,
                            const SpectralPoint& p, const PvScheme& pv);

// Orthonormal spinor observation band spanning spherical polynomials of degree
// <= Lmax in each component: 2n x 2(Lmax+1)^2.
Eigen::MatrixXcd harmonic_band(const SphereGrid& grid, int Lmax);

// Eigen split of R + R* = 2 Herm(R).
struct SpectralSplit {
  Eigen::VectorXd mu;     // eigenvalues of R + R*, ascending
  Eigen::MatrixXcd V;     // eigenvectors (columns)
  int n_pos = 0, n_neg = 0;
  double pairing = 0.0;   // max | mu_sorted + mu_reversed |
};
SpectralSplit spectral_split(const Eigen::MatrixXcd& R);

// max(||P+ Msn P+||, ||P- Msn P-||): sigma.nu must swap the split spaces.
double isomorphism_residual(const SpectralSplit& split, const Eigen::MatrixXcd& Msn);

}  // namespace diraclayer
