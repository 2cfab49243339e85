#include "nlsgas/soliton.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace nlsgas {

namespace {

void require_simple_spectrum(const std::vector<cdouble>& lambda) {
  for (size_t i = 0; i < lambda.size(); ++i)
    for (size_t j = i + 1; j < lambda.size(); ++j)
      if (lambda[i] == lambda[j])
        throw std::runtime_error("n-soliton: coincident eigenvalues are not supported");
}

// Crude condition estimate from the LU diagonal.
double lu_cond_estimate(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu) {
  const auto& d = lu.matrixLU().diagonal();
  double lo = std::abs(d(0)), hi = lo;
  for (Eigen::Index i = 1; i < d.size(); ++i) {
    const double a = std::abs(d(i));
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  return lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

ResidueSolution nsoliton_residue_full(const SpectralSample& sample, double x, double t) {
  const int n = sample.n();
  ResidueSolution sol;
  sol.lambda = sample.lambda;
  if (n == 0) return sol;
  require_simple_spectrum(sample.lambda);

  const auto& lam = sample.lambda;
  std::vector<cdouble> lb(n);
  for (int k = 0; k < n; ++k) lb[k] = std::conj(lam[k]);

  // Evolved coefficients, kept in scaled form exp(e_k - rho_k) with
  // rho_k = max(0, Re e_k) so the matrix entries never overflow; scaling a
  // row leaves the solution unchanged.
  std::vector<cdouble> coeff(n), coeff_scaled(n);
  std::vector<double> rho(n);
  for (int k = 0; k < n; ++k) {
    const cdouble e = cdouble(0, 2) * t * lam[k] * lam[k] + cdouble(0, 2) * x * lam[k];
    rho[k] = std::max(0.0, e.real());
    coeff_scaled[k] = sample.c[k] * std::exp(e - rho[k]);
    coeff[k] = (e.real() > 700) ? cdouble(std::numeric_limits<double>::infinity(), 0)
                                : sample.c[k] * std::exp(e);
  }
  sol.coeff = coeff;

  // Rows 0..n-1:  e^{-rho_k} alpha_k - Cs_k sum_j beta_j/(lam_k - lb_j) = Cs_k d_{i2}
  // Rows n..2n-1: e^{-rho_k} beta_k + conj(Cs_k) sum_j alpha_j/(lb_k - lam_j)
  //                                                          = -conj(Cs_k) d_{i1}
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(2 * n, 2);
  for (int k = 0; k < n; ++k) {
    const double sk = std::exp(-rho[k]);
    A(k, k) = sk;
    A(n + k, n + k) = sk;
    for (int j = 0; j < n; ++j) {
      A(k, n + j) = -coeff_scaled[k] / (lam[k] - lb[j]);
      A(n + k, j) = std::conj(coeff_scaled[k]) / (lb[k] - lam[j]);
    }
    rhs(n + k, 0) = -std::conj(coeff_scaled[k]);  // component 1
    rhs(k, 1) = coeff_scaled[k];                  // component 2
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  Eigen::MatrixXcd solmat = lu.solve(rhs);
  sol.cond_est = lu_cond_estimate(lu);
  const double res = (A * solmat - rhs).norm();
  const double scale = rhs.norm() + solmat.norm();
  sol.residual_rel = scale > 0 ? res / scale : res;
  if (!std::isfinite(sol.residual_rel) || sol.residual_rel > 1e-8)
    throw std::runtime_error("nsoliton_residue: singular or ill-conditioned system, cond ~ " +
                             std::to_string(sol.cond_est));

  sol.A_col.resize(n);
  sol.B_col.resize(n);
  cdouble psi(0, 0);
  for (int k = 0; k < n; ++k) {
    sol.A_col[k] = Vec2(solmat(k, 0), solmat(k, 1));
    sol.B_col[k] = Vec2(solmat(n + k, 0), solmat(n + k, 1));
    psi += sol.B_col[k](0);  // (A_k + B_k)_{12} = B_k(1,2)
  }
  sol.psi = cdouble(0, 2) * psi;
  return sol;
}

cdouble nsoliton_residue(const SpectralSample& sample, double x, double t) {
  return nsoliton_residue_full(sample, x, t).psi;
}

Mat2 ResidueSolution::eval_X(cdouble z) const {
  Mat2 X = Mat2::Identity();
  for (size_t k = 0; k < lambda.size(); ++k) {
    X.col(0) += A_col[k] / (z - lambda[k]);
    X.col(1) += B_col[k] / (z - std::conj(lambda[k]));
  }
  return X;
}

double residue_condition_violation(const ResidueSolution& sol, double x, double t) {
  double worst = 0.0;
  const int n = static_cast<int>(sol.lambda.size());
  for (int k = 0; k < n; ++k) {
    const cdouble lam = sol.lambda[k];
    // res_{lam_k} X = A_k; the regular part of column 2 at lam_k times the
    // evolved coefficient must reproduce it.
    Vec2 col2 = Vec2(0, 1);
    for (int j = 0; j < n; ++j) {
      col2 += sol.B_col[j] / (lam - std::conj(sol.lambda[j]));
    }
    const cdouble C = sol.coeff[k];
    worst = std::max(worst, (sol.A_col[k] - C * col2).norm());
    // Mirror condition at conj(lam_k).
    const cdouble lbk = std::conj(lam);
    Vec2 col1 = Vec2(1, 0);
    for (int j = 0; j < n; ++j)
      if (j != k) col1 += sol.A_col[j] / (lbk - sol.lambda[j]);
    col1 += sol.A_col[k] / (lbk - lam);
    worst = std::max(worst, (sol.B_col[k] + std::conj(C) * col1).norm());
  }
  (void)x;
  (void)t;
  return worst;
}

Mat2 free_solution(cdouble z, double x, double t) {
  const cdouble e = std::exp(cdouble(0, -1) * z * x - cdouble(0, 1) * z * z * t);
  Mat2 m = Mat2::Zero();
  m(0, 0) = e;
  m(1, 1) = 1.0 / e;
  return m;
}

std::vector<cdouble> dressing_constants(const std::vector<cdouble>& lambda,
                                        const std::vector<cdouble>& c) {
  require_simple_spectrum(lambda);
  const int n = static_cast<int>(lambda.size());
  std::vector<cdouble> C(n);
  for (int k = 0; k < n; ++k) {
    if (c[k] == cdouble(0, 0))
      throw std::runtime_error("dressing_constants: vanishing norming constant");
    cdouble prod = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != k) prod *= (lambda[k] - std::conj(lambda[j])) / (lambda[k] - lambda[j]);
    C[k] = (lambda[k] - std::conj(lambda[k])) * prod / c[k];
    if (!std::isfinite(std::abs(C[k])))
      throw std::runtime_error("dressing_constants: chain constant overflow");
  }
  return C;
}

DressingState dressing_begin(const std::vector<cdouble>& lambda,
                             const std::vector<cdouble>& C, double x, double t) {
  DressingState st;
  st.pending_lambda = lambda;
  st.pending_C = C;
  st.pending_phi.reserve(lambda.size());
  for (const cdouble& l : lambda) st.pending_phi.push_back(free_solution(std::conj(l), x, t));
  return st;
}

DressingState dressing_step(const DressingState& state, cdouble lambda_n, cdouble C_n,
                            double x, double t) {
  if (state.pending_lambda.empty() || state.pending_lambda.front() != lambda_n ||
      state.pending_C.front() != C_n)
    throw std::invalid_argument("dressing_step: soliton does not match the pending front");
  if (lambda_n.imag() <= 0)
    throw std::invalid_argument("dressing_step: eigenvalue must be in the open upper half-plane");

  DressingState next;
  next.step = state.step + 1;

  const Vec2 q = state.pending_phi.front().conjugate() * Vec2(1.0, C_n);
  const double nq = q.squaredNorm();
  if (!(nq > 0) || !std::isfinite(nq))
    throw std::runtime_error("dressing_step: degenerate dressing vector");

  const cdouble gap = lambda_n - std::conj(lambda_n);
  next.psi = state.psi + cdouble(0, 2) * gap * std::conj(q(0)) * q(1) / nq;

  const Vec2 w = q.conjugate();
  const Mat2 P = w * w.adjoint() / nq;
  const size_t rest = state.pending_lambda.size() - 1;
  next.pending_lambda.assign(state.pending_lambda.begin() + 1, state.pending_lambda.end());
  next.pending_C.assign(state.pending_C.begin() + 1, state.pending_C.end());
  next.pending_phi.resize(rest);
  for (size_t m = 0; m < rest; ++m) {
    const cdouble z = std::conj(next.pending_lambda[m]);
    const Mat2 D = Mat2::Identity() + gap / (z - lambda_n) * P;
    next.pending_phi[m] = D * state.pending_phi[m + 1];
    if (det2(next.pending_phi[m]) == cdouble(0, 0))
      throw std::runtime_error("dressing_step: singular dressed solution");
  }
  (void)x;
  (void)t;
  return next;
}

cdouble nsoliton_dressing(const SpectralSample& sample, double x, double t) {
  if (sample.n() == 0) return {0.0, 0.0};
  const std::vector<cdouble> C = dressing_constants(sample.lambda, sample.c);
  DressingState st = dressing_begin(sample.lambda, C, x, t);
  while (!st.pending_lambda.empty())
    st = dressing_step(st, st.pending_lambda.front(), st.pending_C.front(), x, t);
  return st.psi;
}

double amplitude_bound(const SpectralSample& sample) {
  double s = 0.0;
  for (const cdouble& l : sample.lambda) s += l.imag();
  return 4.0 * s;
}

}  // namespace nlsgas
