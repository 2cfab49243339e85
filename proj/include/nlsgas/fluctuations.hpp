#pragma once

#include <cstdint>
#include <utility>

#include "nlsgas/rhsolver.hpp"

namespace nlsgas {

// ---------------------------------------------------------------------------
// Linear statistic of f(w,z) = r(w)/(z-w):
//   X_N^f(z) = sum_k r(lambda_k)/(z - lambda_k) - N iint r(w)/(z-w) dmu(w).
// ---------------------------------------------------------------------------

struct LinearStatisticParts {
  cdouble value;
  cdouble empirical_sum;
  cdouble integral_term;  // N * iint f dmu
};

LinearStatisticParts linear_statistic_full(const SpectralSample& sample,
                                           const AveragedKernel& kernel, cdouble z);
cdouble linear_statistic(const SpectralSample& sample, const AveragedKernel& kernel,
                         cdouble z);

// Batched over gamma+ nodes with the integral term precomputed.
std::vector<cdouble> linear_statistic_on_plus(const SpectralSample& sample,
                                              const AveragedKernel& kernel,
                                              const ContourGrid& grid,
                                              const std::vector<cdouble>& F_plus);

// ---------------------------------------------------------------------------
// High-probability sets B_delta^alpha: sup over a mesh of gamma+ of
// |X_N^f| / N^alpha compared against delta. Mesh size follows
// M = ceil(1 + L_{gamma+} c~ N^{1-alpha} / delta) with c~ = 2 d0.
// ---------------------------------------------------------------------------

struct MembershipVerdict {
  double delta = 0;
  double alpha = 1;
  int mesh_size = 0;
  double sup_scaled = 0;  // sup |X_N^f| / N^alpha over the mesh
  bool inside = false;
};

// Empirical estimate of d0 = sup |dX_N^f/dz| / N over gamma+, from a few
// seeded samples at size n.
double estimate_d0(const AveragedKernel& kernel, const ContourGrid& grid, int n,
                   std::uint64_t seed, int n_samples = 8, int mesh = 64);

MembershipVerdict bdelta_membership(const SpectralSample& sample,
                                    const AveragedKernel& kernel, const ContourGrid& grid,
                                    double delta, double alpha, double c_tilde);

// ---------------------------------------------------------------------------
// CLT limit kernels, evaluated with M from the averaged solution continued
// inside gamma+:
//   G1(z) = -2i [ e^theta r M12^2 + conj(e^theta r M22^2) ]
//   G2(z) = -4 Im[ e^theta r (2iz M12 M22 + M12' M22 + M12 M22') ]
// ---------------------------------------------------------------------------

cdouble eval_G1(const RHSolution& avg, const AveragedKernel& kernel, cdouble z);
double eval_G2(const RHSolution& avg, const AveragedKernel& kernel, cdouble z);

// Domain moments of a G kernel: covariance iint G^2 - (iint G)^2 and
// variance iint |G|^2 - |iint G|^2, with a node-doubling convergence check.
struct CltMoments {
  cdouble mean;        // iint G dmu
  cdouble covariance;  // E[(X^G)^2]
  double variance;     // E[|X^G|^2]
  double conv_err;     // self-convergence estimate
};

CltMoments clt_moments_g1(const RHSolution& avg, const AveragedKernel& kernel,
                          double conv_tol = 1e-8);
CltMoments clt_moments_g2(const RHSolution& avg, const AveragedKernel& kernel,
                          double conv_tol = 1e-8);

// Two-point correlation kernel quadrature,
//   iint G1(s;p1) conj(G1(s;p2)) dmu - iint G1(s;p1) dmu conj(iint G1(s;p2) dmu).
// With avg1 == avg2 this reproduces clt_moments_g1().variance identically.
cdouble correlation_limit(const RHSolution& avg1, const RHSolution& avg2,
                          const AveragedKernel& kernel);

// Neumann-tail remainder U = X_N^{G1} - N (psi_N - psi_inf).
cdouble clt_remainder(cdouble x_g1, int n, cdouble psi_n, cdouble psi_inf);

// ---------------------------------------------------------------------------
// Per-(x,t) evaluation context for Monte Carlo: G kernels precomputed at the
// domain quadrature nodes, so the linear statistics only need G at the
// sampled eigenvalues.
// ---------------------------------------------------------------------------

class GContext {
 public:
  GContext(const RHSolution& avg, std::shared_ptr<const AveragedKernel> kernel);

  cdouble xg1(const SpectralSample& sample) const;  // sum G1(lam_k) - N iint G1
  double xg2(const SpectralSample& sample) const;
  // Both statistics with the M evaluations shared per eigenvalue.
  void xg_pair(const SpectralSample& sample, cdouble& out_g1, double& out_g2) const;
  cdouble mean_g1() const { return mean_g1_; }
  double mean_g2() const { return mean_g2_; }
  const RHSolution& avg() const { return avg_; }

 private:
  RHSolution avg_;
  std::shared_ptr<const AveragedKernel> kernel_;
  cdouble mean_g1_;
  double mean_g2_;
};

// ---------------------------------------------------------------------------
// Error-jump bulk W_N = (1/N) mu [off-diagonal X_N^f phase matrix] mu^{-1}
// assembled at the nodes; contour norms (Frobenius pointwise).
// ---------------------------------------------------------------------------

struct WnNorms {
  double linf = 0;
  double l2 = 0;
};

WnNorms wn_norms(const SpectralSample& sample, const RHSolution& avg,
                 const AveragedKernel& kernel, const ContourGrid& grid);

// Route-equality pairs for the contour-integral vs linear-statistic
// identities: first = contour quadrature, second = statistic / N.
std::pair<cdouble, cdouble> g1_route_pair(const RHSolution& avg,
                                          const AveragedKernel& kernel,
                                          const SpectralSample& sample);
std::pair<double, double> g2_route_pair(const RHSolution& avg,
                                        const AveragedKernel& kernel,
                                        const SpectralSample& sample);

}  // namespace nlsgas
