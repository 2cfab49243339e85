#include "nlsgas/rhsolver.hpp"

#include <cmath>
#include <stdexcept>

namespace nlsgas {

SpacetimePoint::SpacetimePoint(double x_, double t_) : x(x_), t(t_) {
  if (t_ < 0) throw std::invalid_argument("SpacetimePoint: t must be nonnegative");
}

AveragedKernel::AveragedKernel(const EigenvalueDomain& domain, const InterpolantR& r,
                               double selfcheck_tol)
    : domain_(domain), r_(r), quad_(domain.quad()) {
  rw_.resize(quad_.size());
  for (size_t q = 0; q < quad_.size(); ++q) rw_[q] = r_(quad_[q].z) * quad_[q].w;

  // Node-doubling self check at probe circles around the domain.
  const std::vector<DomainNode> fine = domain.refined_quad();
  std::vector<cdouble> rwf(fine.size());
  for (size_t q = 0; q < fine.size(); ++q) rwf[q] = r_(fine[q].z) * fine[q].w;
  const cdouble a = domain.centroid();
  for (double fac : {1.4, 2.0}) {
    for (int j = 0; j < 8; ++j) {
      const double phi = 2.0 * PI * j / 8.0;
      const cdouble z = a + fac * domain.circumradius() * cdouble(std::cos(phi), std::sin(phi));
      cdouble coarse(0, 0), refined(0, 0);
      for (size_t q = 0; q < quad_.size(); ++q) coarse += rw_[q] / (z - quad_[q].z);
      for (size_t q = 0; q < fine.size(); ++q) refined += rwf[q] / (z - fine[q].z);
      selfcheck_err_ = std::max(selfcheck_err_, std::abs(coarse - refined));
    }
  }
  if (selfcheck_err_ > selfcheck_tol)
    throw std::runtime_error("averaged jump: domain quadrature self-check failed, err " +
                             std::to_string(selfcheck_err_));
}

cdouble AveragedKernel::F(cdouble z) const {
  cdouble s(0, 0);
  for (size_t q = 0; q < quad_.size(); ++q) s += rw_[q] / (z - quad_[q].z);
  return s;
}

cdouble AveragedKernel::dF(cdouble z) const {
  cdouble s(0, 0);
  for (size_t q = 0; q < quad_.size(); ++q) {
    const cdouble d = z - quad_[q].z;
    s -= rw_[q] / (d * d);
  }
  return s;
}

std::vector<cdouble> AveragedKernel::F_at(const std::vector<cdouble>& zs) const {
  std::vector<cdouble> out(zs.size());
  for (size_t i = 0; i < zs.size(); ++i) out[i] = F(zs[i]);
  return out;
}

JumpField JumpField::random(const SpectralSample& sample, const SpacetimePoint& p) {
  JumpField j;
  j.kind_ = Kind::Random;
  j.p_ = p;
  j.lam_ = sample.lambda;
  j.c_ = sample.c;
  return j;
}

JumpField JumpField::averaged(std::shared_ptr<const AveragedKernel> kernel,
                              const SpacetimePoint& p) {
  JumpField j;
  j.kind_ = Kind::Averaged;
  j.p_ = p;
  j.kernel_ = std::move(kernel);
  return j;
}

JumpField JumpField::averaged(const EigenvalueDomain& domain, const InterpolantR& r,
                              const SpacetimePoint& p) {
  return averaged(std::make_shared<AveragedKernel>(domain, r), p);
}

cdouble JumpField::entry_plus(cdouble z) const {
  cdouble s(0, 0);
  if (kind_ == Kind::Random) {
    for (size_t k = 0; k < lam_.size(); ++k) s += c_[k] / (z - lam_[k]);
  } else {
    s = kernel_->F(z);
  }
  return -std::exp(p_.theta(z)) * s;
}

cdouble JumpField::entry_minus(cdouble z) const {
  cdouble s(0, 0);
  if (kind_ == Kind::Random) {
    for (size_t k = 0; k < lam_.size(); ++k) s += std::conj(c_[k]) / (z - std::conj(lam_[k]));
  } else {
    s = std::conj(kernel_->F(std::conj(z)));
  }
  return std::exp(-p_.theta(z)) * s;
}

Mat2 JumpField::J(cdouble z, bool on_plus) const {
  Mat2 m = Mat2::Identity();
  if (on_plus)
    m(1, 0) = entry_plus(z);
  else
    m(0, 1) = entry_minus(z);
  return m;
}

Mat2 JumpField::dJ_dx(cdouble z, bool on_plus) const {
  Mat2 m = Mat2::Zero();
  if (on_plus)
    m(1, 0) = SpacetimePoint::dtheta_dx(z) * entry_plus(z);
  else
    m(0, 1) = -SpacetimePoint::dtheta_dx(z) * entry_minus(z);
  return m;
}

void JumpField::entries_at(const ContourGrid& g, std::vector<cdouble>& w,
                           std::vector<cdouble>& v) const {
  const int n = g.n();
  w.assign(g.total(), cdouble(0, 0));
  v.assign(g.total(), cdouble(0, 0));
  for (int j = 0; j < n; ++j) w[j] = entry_plus(g.nodes()[j]);
  for (int j = n; j < 2 * n; ++j) v[j] = entry_minus(g.nodes()[j]);
}

const std::vector<cdouble>* JumpField::sample_lambdas() const {
  return kind_ == Kind::Random ? &lam_ : nullptr;
}

namespace {

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

// -(1/2 pi i) oint mu (J-I) ds with (mu W) col1 = mu_col2 * w, col2 = mu_col1 * v.
Mat2 z1_coefficient(const ContourGrid& g, const std::vector<Mat2>& mu,
                    const std::vector<cdouble>& w, const std::vector<cdouble>& v) {
  Mat2 acc = Mat2::Zero();
  for (int j = 0; j < g.total(); ++j) {
    acc.col(0) += g.ds()[j] * w[j] * mu[j].col(1);
    acc.col(1) += g.ds()[j] * v[j] * mu[j].col(0);
  }
  return -acc / (cdouble(0, 2) * PI);
}

}  // namespace

RHSolution solve_sie(const JumpField& jump, std::shared_ptr<const ContourGrid> grid) {
  const ContourGrid& g = *grid;
  if (const auto* lams = jump.sample_lambdas()) {
    for (const cdouble& l : *lams)
      if (std::abs(l - g.center_plus()) >= g.radius())
        throw std::invalid_argument("solve_sie: eigenvalue outside gamma+");
  }

  RHSolution sol;
  sol.grid = grid;
  sol.p = jump.point();
  jump.entries_at(g, sol.w, sol.v);

  const int N = g.total();
  const Eigen::MatrixXcd& K = g.cminus_matrix();
  Eigen::VectorXcd wv(N), vv(N);
  for (int j = 0; j < N; ++j) {
    wv(j) = sol.w[j];
    vv(j) = sol.v[j];
  }

  // Unknowns per matrix row r: [mu_{r1}; mu_{r2}] at all nodes.
  //   mu_{r1} - K (w mu_{r2}) = delta_{r1}
  //   mu_{r2} - K (v mu_{r1}) = delta_{r2}
  Eigen::MatrixXcd A(2 * N, 2 * N);
  A.topLeftCorner(N, N) = Eigen::MatrixXcd::Identity(N, N);
  A.bottomRightCorner(N, N) = Eigen::MatrixXcd::Identity(N, N);
  A.topRightCorner(N, N) = -(K * wv.asDiagonal());
  A.bottomLeftCorner(N, N) = -(K * vv.asDiagonal());

  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(2 * N, 2);
  rhs.col(0).head(N).setOnes();
  rhs.col(1).tail(N).setOnes();

  sol.lu = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXcd>>(A);
  const Eigen::MatrixXcd sm = sol.lu->solve(rhs);
  sol.cond_est = lu_cond_estimate(*sol.lu);
  const double rel = (A * sm - rhs).norm() / (rhs.norm() + sm.norm());
  sol.sie_residual = rel;
  if (!std::isfinite(rel) || rel > 1e-8)
    throw std::runtime_error("solve_sie: collocation solve failed, residual " +
                             std::to_string(rel) + ", cond ~ " + std::to_string(sol.cond_est));

  sol.mu.resize(N);
  for (int j = 0; j < N; ++j) {
    sol.mu[j](0, 0) = sm(j, 0);
    sol.mu[j](0, 1) = sm(N + j, 0);
    sol.mu[j](1, 0) = sm(j, 1);
    sol.mu[j](1, 1) = sm(N + j, 1);
  }
  sol.M1 = z1_coefficient(g, sol.mu, sol.w, sol.v);
  return sol;
}

RHSolution solve_sie_dx(const JumpField& jump, const RHSolution& base) {
  if (!base.lu || base.mu.empty())
    throw std::invalid_argument("solve_sie_dx: base solution missing factorization");
  const ContourGrid& g = *base.grid;
  const int N = g.total();

  // dW entries: +2iz w on gamma+, -2iz v on gamma-.
  std::vector<cdouble> dw(N), dv(N);
  for (int j = 0; j < N; ++j) {
    const cdouble f = SpacetimePoint::dtheta_dx(g.nodes()[j]);
    dw[j] = f * base.w[j];
    dv[j] = -f * base.v[j];
  }

  const Eigen::MatrixXcd& K = g.cminus_matrix();
  Eigen::MatrixXcd rhs(2 * N, 2);
  for (int r = 0; r < 2; ++r) {
    Eigen::VectorXcd h1(N), h2(N);
    for (int j = 0; j < N; ++j) {
      h1(j) = base.mu[j](r, 1) * dw[j];
      h2(j) = base.mu[j](r, 0) * dv[j];
    }
    rhs.col(r).head(N) = K * h1;
    rhs.col(r).tail(N) = K * h2;
  }
  const Eigen::MatrixXcd sm = base.lu->solve(rhs);

  RHSolution sol = base;
  sol.has_dx = true;
  sol.dmu.resize(N);
  for (int j = 0; j < N; ++j) {
    sol.dmu[j](0, 0) = sm(j, 0);
    sol.dmu[j](0, 1) = sm(N + j, 0);
    sol.dmu[j](1, 0) = sm(j, 1);
    sol.dmu[j](1, 1) = sm(N + j, 1);
  }
  // dM1 = -(1/2 pi i) oint [dmu (J-I) + mu dW] ds.
  Mat2 acc = Mat2::Zero();
  for (int j = 0; j < N; ++j) {
    acc.col(0) += g.ds()[j] * (sol.dmu[j].col(1) * base.w[j] + base.mu[j].col(1) * dw[j]);
    acc.col(1) += g.ds()[j] * (sol.dmu[j].col(0) * base.v[j] + base.mu[j].col(0) * dv[j]);
  }
  sol.dM1 = -acc / (cdouble(0, 2) * PI);
  sol.modsq_imag = (cdouble(0, -2) * sol.dM1(1, 1)).imag();
  (void)jump;
  return sol;
}

cdouble recover_field(const RHSolution& sol) { return cdouble(0, 2) * sol.M1(0, 1); }

double recover_modsq(const RHSolution& sol) {
  if (!sol.has_dx) throw std::invalid_argument("recover_modsq: dx companion missing");
  const cdouble val = cdouble(0, -2) * sol.dM1(1, 1);
  if (std::abs(val.imag()) > 1e-8)
    throw std::runtime_error("recover_modsq: imaginary residue " + std::to_string(val.imag()));
  return val.real();
}

Mat2 eval_M_off(const RHSolution& sol, cdouble z, bool* near_warning) {
  const ContourGrid& g = *sol.grid;
  Mat2 acc = Mat2::Zero();
  double dist = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.total(); ++j) {
    const cdouble d = g.nodes()[j] - z;
    dist = std::min(dist, std::abs(d));
    acc.col(0) += (g.ds()[j] / d) * sol.w[j] * sol.mu[j].col(1);
    acc.col(1) += (g.ds()[j] / d) * sol.v[j] * sol.mu[j].col(0);
  }
  if (near_warning) *near_warning = dist < g.arc();
  return Mat2::Identity() + acc / (cdouble(0, 2) * PI);
}

Mat2 eval_dM_off(const RHSolution& sol, cdouble z, bool* near_warning) {
  if (!sol.has_dx) throw std::invalid_argument("eval_dM_off: dx companion missing");
  const ContourGrid& g = *sol.grid;
  Mat2 acc = Mat2::Zero();
  double dist = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.total(); ++j) {
    const cdouble s = g.nodes()[j];
    const cdouble d = s - z;
    dist = std::min(dist, std::abs(d));
    const cdouble f = SpacetimePoint::dtheta_dx(s);
    acc.col(0) += (g.ds()[j] / d) * (sol.dmu[j].col(1) * sol.w[j] + sol.mu[j].col(1) * (f * sol.w[j]));
    acc.col(1) += (g.ds()[j] / d) * (sol.dmu[j].col(0) * sol.v[j] + sol.mu[j].col(0) * (-f * sol.v[j]));
  }
  if (near_warning) *near_warning = dist < g.arc();
  return acc / (cdouble(0, 2) * PI);
}

RHSolution averaged_solution(std::shared_ptr<const AveragedKernel> kernel,
                             std::shared_ptr<const ContourGrid> grid,
                             const SpacetimePoint& p, bool with_dx) {
  const JumpField jump = JumpField::averaged(std::move(kernel), p);
  RHSolution sol = solve_sie(jump, std::move(grid));
  if (with_dx) sol = solve_sie_dx(jump, sol);
  return sol;
}

}  // namespace nlsgas
