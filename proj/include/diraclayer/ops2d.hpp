#pragma once

#include "diraclayer/geometry.hpp"
#include "diraclayer/kernels.hpp"
#include "diraclayer/trigcalc.hpp"

namespace diraclayer {

// Shared nodal data for the 2D assemblers at M = 2N+1 points. Construction
// enforces the aliasing guard: the curve's speed-tail mass above N/2 must not
// exceed 1e-6 relative.
struct Panel2D {
  Curve2D curve;
  TrigSpace space;
  Curve2D::Nodes nodes;
  Eigen::MatrixXcd U;       // unitary node -> mode map
  Eigen::VectorXcd aval;    // nu_1 - i nu_2 = i conj(W') / ell at the nodes
};
Panel2D make_panel(const Curve2D& curve, int N, double c_lambda = 1.0);

// Relative l^2 mass of the speed Fourier tail |n| > N/2 (aliasing indicator).
double aliasing_tail_mass(const Curve2D& curve, int N);

// R and its adjoint in the mode basis, each from its own kernel:
//   R:  (-2i/pi) W'(tau) / (W(tau) - W(t)),
//   R*: the conjugate-reflected kernel, never formed by transposing R.
Eigen::MatrixXcd assemble_R(const Panel2D& p);
Eigen::MatrixXcd assemble_Rstar(const Panel2D& p);

// Full layer operator at z in the gap, 2-channel blocks stacked as
// [[(z+m) S, UR], [LL, (z-m) S]], together with the multiplication operators
// entering the algebra. branch_sign = -1 flips the K_1 branch (the i kappa
// prefactor); that variant violates self-adjointness and exists as a control.
struct COperator2D {
  Eigen::MatrixXcd C;            // 2M x 2M
  Eigen::MatrixXcd X;            // sigma.nu as [[0, Ma], [Mab, 0]]
  Eigen::MatrixXcd S;            // scalar single-layer factor (no z +- m)
  Eigen::MatrixXcd R, Rstar;     // M x M
  Eigen::MatrixXcd Ma, Mab;      // mult by nu1 - i nu2 and its conjugate
};
COperator2D assemble_C(const Panel2D& p, const SpectralPoint& sp, int branch_sign = +1);

// Remainders of the operator identities; each is the full left side minus the
// claimed principal part, so its order is what estimate_order checks.
Eigen::MatrixXcd remainder_K_prop32(const Panel2D& p, const COperator2D& cop,
                                    const SpectralPoint& sp);
Eigen::MatrixXcd remainder_K_theorem(const Panel2D& p, const COperator2D& cop);
Eigen::MatrixXcd remainder_K_lemma33(const Panel2D& p, const COperator2D& cop,
                                     const SpectralPoint& sp);
Eigen::MatrixXcd remainder_K_corollary(const Panel2D& p, const COperator2D& cop);
Eigen::MatrixXcd corollary_principal(const Panel2D& p, const COperator2D& cop);

// || 4 (C sigma.nu)^2 + I || assembled at 2N and observed on modes |n| <= N.
// The same-space residual at a single N saturates at 4 kappa^2 (I_N K_N)^2 from
// the unresolved mode-N tail; oversampling removes that floor.
double identity_residual_oversampled(const Curve2D& curve, int N,
                                     const SpectralPoint& sp, double c_lambda = 1.0,
                                     int branch_sign = +1);

}  // namespace diraclayer
