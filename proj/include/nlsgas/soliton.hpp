#pragma once

#include <vector>

#include "nlsgas/spectral.hpp"
#include "nlsgas/types.hpp"

namespace nlsgas {

// ---------------------------------------------------------------------------
// Residue route: partial-fraction ansatz
//   X(z) = I + sum_k [ A_k/(z - lambda_k) + B_k/(z - conj(lambda_k)) ]
// with the residue conditions imposed at every pole and the evolved
// coefficients c_k e^{2 i t lambda_k^2 + 2 i x lambda_k}. A_k has only its
// first column nonzero, B_k only its second; the two vector components
// decouple, giving one 2N x 2N system factored once and solved for two
// right-hand sides.
// ---------------------------------------------------------------------------

struct ResidueSolution {
  std::vector<Vec2> A_col;  // first column of A_k
  std::vector<Vec2> B_col;  // second column of B_k
  std::vector<cdouble> lambda;
  std::vector<cdouble> coeff;      // evolved residue coefficients
  cdouble psi{0.0, 0.0};
  double residual_rel = 0.0;       // linear-system residual, relative
  double cond_est = 1.0;           // order-of-magnitude condition estimate

  // X(z) away from the poles.
  Mat2 eval_X(cdouble z) const;
};

ResidueSolution nsoliton_residue_full(const SpectralSample& sample, double x, double t);

// psi_N(x,t) = 2i sum_k (A_k + B_k)_{12}.
cdouble nsoliton_residue(const SpectralSample& sample, double x, double t);

// Worst violation of the two residue conditions over all poles, by direct
// substitution on small circles; test/diagnostic use.
double residue_condition_violation(const ResidueSolution& sol, double x, double t);

// ---------------------------------------------------------------------------
// Dressing route: recursive Darboux construction starting from the trivial
// potential. Each step adds one soliton,
//   q_n = conj(Phi^{(n-1)}(conj(lambda_n))) (1, C_n)^T,
//   psi_n = psi_{n-1} + 2i (lambda_n - conj(lambda_n)) conj(q_{n1}) q_{n2} / |q_n|^2,
// and updates Phi with the rank-one factor
//   D_n(z) = I + (lambda_n - conj(lambda_n))/(z - lambda_n) P_n,
// where P_n projects onto conj(q_n) (a vector solution of the linear system
// at conj(lambda_n), which is what makes D_n a valid dressing factor).
//
// The dressing constants that reproduce the residue-route N-soliton with
// norming constants {c_k} are
//   C_n = (lambda_n - conj(lambda_n)) / c_n
//         * prod_{k != n} (lambda_n - conj(lambda_k)) / (lambda_n - lambda_k),
// a Blaschke-type correction accounting for the other poles of the chain.
// ---------------------------------------------------------------------------

struct DressingState {
  int step = 0;         // solitons added so far
  cdouble psi{0.0, 0.0};
  // Pending solitons and Phi^{(step)} evaluated at their conjugate eigenvalues.
  std::vector<cdouble> pending_lambda;
  std::vector<cdouble> pending_C;
  std::vector<Mat2> pending_phi;
};

// Free ZS solution diag(e^{-izx - iz^2 t}, e^{izx + iz^2 t}).
Mat2 free_solution(cdouble z, double x, double t);

// Dressing constants for the chain, from the residue-problem norming constants.
std::vector<cdouble> dressing_constants(const std::vector<cdouble>& lambda,
                                        const std::vector<cdouble>& c);

DressingState dressing_begin(const std::vector<cdouble>& lambda,
                             const std::vector<cdouble>& C, double x, double t);

// Adds the next pending soliton; (lambda_n, C_n) must match the state's front.
DressingState dressing_step(const DressingState& state, cdouble lambda_n, cdouble C_n,
                            double x, double t);

cdouble nsoliton_dressing(const SpectralSample& sample, double x, double t);

// 4 sum_k Im(lambda_k); uniform amplitude bound for |psi_N|.
double amplitude_bound(const SpectralSample& sample);

}  // namespace nlsgas
