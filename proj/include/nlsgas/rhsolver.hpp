#pragma once

#include <memory>
#include <vector>

#include "nlsgas/contour.hpp"
#include "nlsgas/spectral.hpp"
#include "nlsgas/types.hpp"

namespace nlsgas {

// Space-time evaluation point with the phase theta(z) = 2ixz + 2itz^2.
struct SpacetimePoint {
  double x = 0.0;
  double t = 0.0;
  SpacetimePoint() = default;
  SpacetimePoint(double x_, double t_);
  cdouble theta(cdouble z) const { return cdouble(0, 2) * x * z + cdouble(0, 2) * t * z * z; }
  static cdouble dtheta_dx(cdouble z) { return cdouble(0, 2) * z; }
};

// Cached domain quadrature of the Cauchy kernel against r dmu:
//   F(z) = iint_D r(w)/(z - w) dmu(w),  z outside the closed domain.
// Shared by the averaged jump, the linear statistics and the G moments.
// Construction runs a node-doubling self check at probe points.
class AveragedKernel {
 public:
  AveragedKernel(const EigenvalueDomain& domain, const InterpolantR& r,
                 double selfcheck_tol = 1e-10);

  cdouble F(cdouble z) const;
  cdouble dF(cdouble z) const;  // d/dz of F
  std::vector<cdouble> F_at(const std::vector<cdouble>& zs) const;

  const EigenvalueDomain& domain() const { return domain_; }
  const InterpolantR& r() const { return r_; }
  double selfcheck_error() const { return selfcheck_err_; }

 private:
  EigenvalueDomain domain_;
  InterpolantR r_;
  std::vector<DomainNode> quad_;
  std::vector<cdouble> rw_;  // r(w_q) * weight_q
  double selfcheck_err_ = 0.0;
};

// Jump matrix on gamma: lower-triangular on gamma+, upper-triangular on
// gamma-, unit diagonal, det J = 1. Carries the x-derivative through the
// +-2iz phase factor.
class JumpField {
 public:
  enum class Kind { Random, Averaged };

  static JumpField random(const SpectralSample& sample, const SpacetimePoint& p);
  static JumpField averaged(std::shared_ptr<const AveragedKernel> kernel,
                            const SpacetimePoint& p);
  static JumpField averaged(const EigenvalueDomain& domain, const InterpolantR& r,
                            const SpacetimePoint& p);

  Kind kind() const { return kind_; }
  const SpacetimePoint& point() const { return p_; }

  // (2,1) entry on gamma+ and (1,2) entry on gamma-.
  cdouble entry_plus(cdouble z) const;
  cdouble entry_minus(cdouble z) const;

  Mat2 J(cdouble z, bool on_plus) const;
  Mat2 dJ_dx(cdouble z, bool on_plus) const;

  // Entry vectors over a grid: w on gamma+ nodes (zero elsewhere), v on
  // gamma- nodes.
  void entries_at(const ContourGrid& g, std::vector<cdouble>& w, std::vector<cdouble>& v) const;

  const std::vector<cdouble>* sample_lambdas() const;
  std::shared_ptr<const AveragedKernel> kernel() const { return kernel_; }

 private:
  JumpField() = default;
  Kind kind_{Kind::Random};
  SpacetimePoint p_;
  std::vector<cdouble> lam_, c_;                    // random data
  std::shared_ptr<const AveragedKernel> kernel_;    // averaged data
};

// Collocation solution of mu - C_-(mu (J - I)) = I on the grid, the 1/z
// coefficient M1, and optionally the x-derivative companion solved with the
// same factorization.
class RHSolution {
 public:
  std::shared_ptr<const ContourGrid> grid;
  SpacetimePoint p;
  std::vector<Mat2> mu;          // M_- at nodes
  std::vector<cdouble> w, v;     // jump entries at nodes
  Mat2 M1 = Mat2::Zero();
  bool has_dx = false;
  std::vector<Mat2> dmu;
  Mat2 dM1 = Mat2::Zero();
  double sie_residual = 0.0;     // relative L2 residual of the collocation solve
  double cond_est = 1.0;
  double modsq_imag = 0.0;       // imaginary residue of -2i (dM1)_22

  std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu;  // for the dx solve
};

// Dense collocation solve of the singular integral equation.
RHSolution solve_sie(const JumpField& jump, std::shared_ptr<const ContourGrid> grid);

// Inhomogeneous x-derivative equation [1 - C_W] dmu = C_-(mu dW/dx), reusing
// the factorization of `base`; returns base extended with the companion.
RHSolution solve_sie_dx(const JumpField& jump, const RHSolution& base);

// psi = 2i (M1)_{12}.
cdouble recover_field(const RHSolution& sol);

// |psi|^2 = Re(-2i (dM1)_{22}); throws if the imaginary residue exceeds 1e-8.
double recover_modsq(const RHSolution& sol);

// M(z) = I + Cauchy(mu (J-I))(z) off the contour, and its x-derivative.
Mat2 eval_M_off(const RHSolution& sol, cdouble z, bool* near_warning = nullptr);
Mat2 eval_dM_off(const RHSolution& sol, cdouble z, bool* near_warning = nullptr);

// Convenience: solve the averaged problem at p (optionally with dx companion).
RHSolution averaged_solution(std::shared_ptr<const AveragedKernel> kernel,
                             std::shared_ptr<const ContourGrid> grid,
                             const SpacetimePoint& p, bool with_dx);

}  // namespace nlsgas
