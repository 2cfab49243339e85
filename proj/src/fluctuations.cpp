#include "nlsgas/fluctuations.hpp"

#include <cmath>
#include <stdexcept>

namespace nlsgas {

LinearStatisticParts linear_statistic_full(const SpectralSample& sample,
                                           const AveragedKernel& kernel, cdouble z) {
  if (kernel.domain().contains(z))
    throw std::invalid_argument("linear_statistic: z inside the closed eigenvalue domain");
  LinearStatisticParts out{};
  const InterpolantR& r = kernel.r();
  cdouble s(0, 0);
  for (const cdouble& l : sample.lambda) {
    if (z == l) throw std::invalid_argument("linear_statistic: z coincides with an eigenvalue");
    s += r(l) / (z - l);
  }
  out.empirical_sum = s;
  out.integral_term = static_cast<double>(sample.n()) * kernel.F(z);
  out.value = out.empirical_sum - out.integral_term;
  return out;
}

cdouble linear_statistic(const SpectralSample& sample, const AveragedKernel& kernel,
                         cdouble z) {
  return linear_statistic_full(sample, kernel, z).value;
}

std::vector<cdouble> linear_statistic_on_plus(const SpectralSample& sample,
                                              const AveragedKernel& kernel,
                                              const ContourGrid& grid,
                                              const std::vector<cdouble>& F_plus) {
  const int n = grid.n();
  if (static_cast<int>(F_plus.size()) != n)
    throw std::invalid_argument("linear_statistic_on_plus: F_plus size mismatch");
  const InterpolantR& r = kernel.r();
  std::vector<cdouble> rl(sample.lambda.size());
  for (size_t k = 0; k < sample.lambda.size(); ++k) rl[k] = r(sample.lambda[k]);
  std::vector<cdouble> out(n);
  const double N = sample.n();
  for (int j = 0; j < n; ++j) {
    const cdouble z = grid.nodes()[j];
    cdouble s(0, 0);
    for (size_t k = 0; k < sample.lambda.size(); ++k) s += rl[k] / (z - sample.lambda[k]);
    out[j] = s - N * F_plus[j];
  }
  return out;
}

double estimate_d0(const AveragedKernel& kernel, const ContourGrid& grid, int n,
                   std::uint64_t seed, int n_samples, int mesh) {
  const InterpolantR& r = kernel.r();
  double d0 = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const std::vector<cdouble> lam =
        sample_eigenvalues(kernel.domain(), n, seed + static_cast<std::uint64_t>(s));
    for (int j = 0; j < mesh; ++j) {
      const double phi = 2.0 * PI * j / mesh;
      const cdouble z =
          grid.center_plus() + grid.radius() * cdouble(std::cos(phi), std::sin(phi));
      cdouble dsum(0, 0);
      for (const cdouble& l : lam) {
        const cdouble d = z - l;
        dsum -= r(l) / (d * d);
      }
      const cdouble dx = dsum - static_cast<double>(n) * kernel.dF(z);
      d0 = std::max(d0, std::abs(dx) / n);
    }
  }
  return d0;
}

MembershipVerdict bdelta_membership(const SpectralSample& sample,
                                    const AveragedKernel& kernel, const ContourGrid& grid,
                                    double delta, double alpha, double c_tilde) {
  if (!(delta > 0)) throw std::invalid_argument("bdelta_membership: delta must be positive");
  if (!(alpha > 0.5) || alpha > 1.0)
    throw std::invalid_argument("bdelta_membership: alpha must lie in (1/2, 1]");
  MembershipVerdict verdict;
  verdict.delta = delta;
  verdict.alpha = alpha;
  const double n = sample.n();
  const double L_plus = 2.0 * PI * grid.radius();
  double m_real = 1.0 + L_plus * c_tilde * std::pow(n, 1.0 - alpha) / delta;
  if (!std::isfinite(m_real)) m_real = 1.0;  // delta = infinity sentinel
  const int M = std::max(1, static_cast<int>(std::ceil(m_real)));
  verdict.mesh_size = M;
  const double scale = std::pow(n, alpha);
  double sup = 0.0;
  for (int j = 0; j < M; ++j) {
    const double phi = 2.0 * PI * j / M;
    const cdouble z = grid.center_plus() + grid.radius() * cdouble(std::cos(phi), std::sin(phi));
    sup = std::max(sup, std::abs(linear_statistic(sample, kernel, z)) / scale);
  }
  verdict.sup_scaled = sup;
  verdict.inside = sup < delta;
  return verdict;
}

namespace {

cdouble g1_from(const Mat2& M, cdouble e) {
  return cdouble(0, -2) * (e * M(0, 1) * M(0, 1) + std::conj(e * M(1, 1) * M(1, 1)));
}

double g2_from(const Mat2& M, const Mat2& dM, cdouble e, cdouble z) {
  const cdouble inner = e * (SpacetimePoint::dtheta_dx(z) * M(0, 1) * M(1, 1) +
                             dM(0, 1) * M(1, 1) + M(0, 1) * dM(1, 1));
  return -4.0 * inner.imag();
}

}  // namespace

cdouble eval_G1(const RHSolution& avg, const AveragedKernel& kernel, cdouble z) {
  return g1_from(eval_M_off(avg, z), std::exp(avg.p.theta(z)) * kernel.r()(z));
}

double eval_G2(const RHSolution& avg, const AveragedKernel& kernel, cdouble z) {
  if (!avg.has_dx) throw std::invalid_argument("eval_G2: dx companion missing");
  const cdouble e = std::exp(avg.p.theta(z)) * kernel.r()(z);
  return g2_from(eval_M_off(avg, z), eval_dM_off(avg, z), e, z);
}

namespace {

struct G1Moments {
  cdouble mean{0, 0};
  cdouble cov{0, 0};
  double var = 0;
};

G1Moments g1_moments_on(const RHSolution& avg, const AveragedKernel& kernel,
                        const std::vector<DomainNode>& quad) {
  G1Moments m;
  cdouble mean(0, 0), sq(0, 0);
  double asq = 0;
  for (const DomainNode& q : quad) {
    const cdouble g = eval_G1(avg, kernel, q.z);
    mean += q.w * g;
    sq += q.w * g * g;
    asq += q.w * std::norm(g);
  }
  m.mean = mean;
  m.cov = sq - mean * mean;
  m.var = asq - std::norm(mean);
  return m;
}

struct G2Moments {
  double mean = 0;
  double var = 0;
};

G2Moments g2_moments_on(const RHSolution& avg, const AveragedKernel& kernel,
                        const std::vector<DomainNode>& quad) {
  G2Moments m;
  double mean = 0, sq = 0;
  for (const DomainNode& q : quad) {
    const double g = eval_G2(avg, kernel, q.z);
    mean += q.w * g;
    sq += q.w * g * g;
  }
  m.mean = mean;
  m.var = sq - mean * mean;
  return m;
}

}  // namespace

CltMoments clt_moments_g1(const RHSolution& avg, const AveragedKernel& kernel,
                          double conv_tol) {
  const G1Moments base = g1_moments_on(avg, kernel, kernel.domain().quad());
  const G1Moments fine = g1_moments_on(avg, kernel, kernel.domain().refined_quad());
  CltMoments out;
  out.mean = base.mean;
  out.covariance = base.cov;
  out.variance = base.var;
  out.conv_err = std::max({std::abs(base.mean - fine.mean), std::abs(base.cov - fine.cov),
                           std::abs(base.var - fine.var)});
  if (out.conv_err > conv_tol)
    throw std::runtime_error("clt_moments_g1: quadrature not converged, err " +
                             std::to_string(out.conv_err));
  return out;
}

CltMoments clt_moments_g2(const RHSolution& avg, const AveragedKernel& kernel,
                          double conv_tol) {
  const G2Moments base = g2_moments_on(avg, kernel, kernel.domain().quad());
  const G2Moments fine = g2_moments_on(avg, kernel, kernel.domain().refined_quad());
  CltMoments out;
  out.mean = base.mean;
  out.covariance = base.var;  // real kernel: covariance and variance coincide
  out.variance = base.var;
  out.conv_err = std::max(std::abs(base.mean - fine.mean), std::abs(base.var - fine.var));
  if (out.conv_err > conv_tol)
    throw std::runtime_error("clt_moments_g2: quadrature not converged, err " +
                             std::to_string(out.conv_err));
  return out;
}

cdouble correlation_limit(const RHSolution& avg1, const RHSolution& avg2,
                          const AveragedKernel& kernel) {
  cdouble cross(0, 0), m1(0, 0), m2(0, 0);
  for (const DomainNode& q : kernel.domain().quad()) {
    const cdouble ga = eval_G1(avg1, kernel, q.z);
    const cdouble gb = (&avg1 == &avg2) ? ga : eval_G1(avg2, kernel, q.z);
    cross += q.w * ga * std::conj(gb);
    m1 += q.w * ga;
    m2 += q.w * gb;
  }
  return cross - m1 * std::conj(m2);
}

cdouble clt_remainder(cdouble x_g1, int n, cdouble psi_n, cdouble psi_inf) {
  return x_g1 - static_cast<double>(n) * (psi_n - psi_inf);
}

GContext::GContext(const RHSolution& avg, std::shared_ptr<const AveragedKernel> kernel)
    : avg_(avg), kernel_(std::move(kernel)) {
  cdouble m1(0, 0);
  double m2 = 0;
  for (const DomainNode& q : kernel_->domain().quad()) {
    m1 += q.w * eval_G1(avg_, *kernel_, q.z);
    if (avg_.has_dx) m2 += q.w * eval_G2(avg_, *kernel_, q.z);
  }
  mean_g1_ = m1;
  mean_g2_ = m2;
}

cdouble GContext::xg1(const SpectralSample& sample) const {
  cdouble s(0, 0);
  for (const cdouble& l : sample.lambda) s += eval_G1(avg_, *kernel_, l);
  return s - static_cast<double>(sample.n()) * mean_g1_;
}

double GContext::xg2(const SpectralSample& sample) const {
  double s = 0;
  for (const cdouble& l : sample.lambda) s += eval_G2(avg_, *kernel_, l);
  return s - static_cast<double>(sample.n()) * mean_g2_;
}

void GContext::xg_pair(const SpectralSample& sample, cdouble& out_g1, double& out_g2) const {
  cdouble s1(0, 0);
  double s2 = 0;
  for (const cdouble& l : sample.lambda) {
    const Mat2 M = eval_M_off(avg_, l);
    const Mat2 dM = eval_dM_off(avg_, l);
    const cdouble e = std::exp(avg_.p.theta(l)) * (*kernel_).r()(l);
    s1 += g1_from(M, e);
    s2 += g2_from(M, dM, e, l);
  }
  const double n = sample.n();
  out_g1 = s1 - n * mean_g1_;
  out_g2 = s2 - n * mean_g2_;
}

namespace {

// X_N^f at every node: direct on gamma+, Schwarz mirror on gamma-.
// gamma- node j reflects onto gamma+ node (n - j) mod n.
std::vector<cdouble> statistic_at_nodes(const SpectralSample& sample,
                                        const AveragedKernel& kernel,
                                        const ContourGrid& grid) {
  const int n = grid.n();
  std::vector<cdouble> Fp(n);
  for (int j = 0; j < n; ++j) Fp[j] = kernel.F(grid.nodes()[j]);
  const std::vector<cdouble> Xp = linear_statistic_on_plus(sample, kernel, grid, Fp);
  std::vector<cdouble> X(2 * n);
  for (int j = 0; j < n; ++j) X[j] = Xp[j];
  for (int j = 0; j < n; ++j) X[n + j] = std::conj(Xp[(n - j) % n]);
  return X;
}

// Off-diagonal phase matrix of the error jump at node j.
Mat2 xi_matrix(const ContourGrid& grid, const SpacetimePoint& p,
               const std::vector<cdouble>& X, int j) {
  Mat2 xi = Mat2::Zero();
  const cdouble z = grid.nodes()[j];
  if (grid.on_plus(j))
    xi(1, 0) = -std::exp(p.theta(z)) * X[j];
  else
    xi(0, 1) = std::exp(-p.theta(z)) * X[j];
  return xi;
}

Mat2 dxi_matrix(const ContourGrid& grid, const Mat2& xi, int j) {
  const cdouble f = SpacetimePoint::dtheta_dx(grid.nodes()[j]);
  Mat2 d = Mat2::Zero();
  d(1, 0) = f * xi(1, 0);
  d(0, 1) = -f * xi(0, 1);
  return d;
}

}  // namespace

WnNorms wn_norms(const SpectralSample& sample, const RHSolution& avg,
                 const AveragedKernel& kernel, const ContourGrid& grid) {
  const std::vector<cdouble> X = statistic_at_nodes(sample, kernel, grid);
  const double invn = 1.0 / std::max(1, sample.n());
  WnNorms norms;
  double l2sq = 0;
  for (int j = 0; j < grid.total(); ++j) {
    const Mat2 W = invn * avg.mu[j] * xi_matrix(grid, avg.p, X, j) * inv2(avg.mu[j]);
    const double f = frob(W);
    norms.linf = std::max(norms.linf, f);
    l2sq += f * f;
  }
  norms.l2 = std::sqrt(l2sq * grid.arc());
  return norms;
}

std::pair<cdouble, cdouble> g1_route_pair(const RHSolution& avg,
                                          const AveragedKernel& kernel,
                                          const SpectralSample& sample) {
  const ContourGrid& grid = *avg.grid;
  const std::vector<cdouble> X = statistic_at_nodes(sample, kernel, grid);
  const double invn = 1.0 / sample.n();
  cdouble acc(0, 0);
  for (int j = 0; j < grid.total(); ++j) {
    const Mat2 W = invn * avg.mu[j] * xi_matrix(grid, avg.p, X, j) * inv2(avg.mu[j]);
    acc += grid.ds()[j] * W(0, 1);
  }
  const cdouble contour = -acc / PI;
  GContext ctx(avg, std::make_shared<AveragedKernel>(kernel));
  return {contour, ctx.xg1(sample) * invn};
}

std::pair<double, double> g2_route_pair(const RHSolution& avg, const AveragedKernel& kernel,
                                        const SpectralSample& sample) {
  if (!avg.has_dx) throw std::invalid_argument("g2_route_pair: dx companion missing");
  const ContourGrid& grid = *avg.grid;
  const std::vector<cdouble> X = statistic_at_nodes(sample, kernel, grid);
  const double invn = 1.0 / sample.n();
  cdouble acc(0, 0);
  for (int j = 0; j < grid.total(); ++j) {
    const Mat2 mu = avg.mu[j];
    const Mat2 mui = inv2(mu);
    const Mat2 dmu = avg.dmu[j];
    const Mat2 xi = xi_matrix(grid, avg.p, X, j);
    const Mat2 dxi = dxi_matrix(grid, xi, j);
    // d/dx of mu xi mu^{-1}: product rule with d(mu^{-1}) = -mu^{-1} dmu mu^{-1}.
    const Mat2 dW = invn * (dmu * xi * mui + mu * dxi * mui - mu * xi * mui * dmu * mui);
    acc += grid.ds()[j] * dW(1, 1);
  }
  const double contour = (acc / PI).real();
  GContext ctx(avg, std::make_shared<AveragedKernel>(kernel));
  return {contour, ctx.xg2(sample) * invn};
}

}  // namespace nlsgas
