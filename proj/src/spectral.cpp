#include "nlsgas/spectral.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nlsgas/quadrature.hpp"
#include "nlsgas/rng.hpp"

namespace nlsgas {

EigenvalueDomain EigenvalueDomain::disk(cdouble center, double radius, int n_radial,
                                        int n_angular, double d_min) {
  if (radius <= 0) throw std::invalid_argument("domain disk: radius must be positive");
  if (center.imag() - radius < d_min)
    throw std::invalid_argument("domain disk: must lie at least d_min above the real axis");
  if (n_radial < 2 || n_angular < 4)
    throw std::invalid_argument("domain disk: quadrature counts too small");
  EigenvalueDomain d;
  d.kind_ = Kind::Disk;
  d.center_ = center;
  d.radius_ = radius;
  d.nq1_ = n_radial;
  d.nq2_ = n_angular;
  d.area_ = PI * radius * radius;
  d.centroid_ = center;
  d.circumradius_ = radius;
  d.min_im_ = center.imag() - radius;
  d.re_lo_ = center.real() - radius;
  d.re_hi_ = center.real() + radius;
  d.im_lo_ = center.imag() - radius;
  d.im_hi_ = center.imag() + radius;
  d.build_disk_quad(n_radial, n_angular, d.quad_);
  return d;
}

EigenvalueDomain EigenvalueDomain::rectangle(double x1, double x2, double y1, double y2,
                                             int n_x, int n_y, double d_min) {
  if (x2 <= x1 || y2 <= y1) throw std::invalid_argument("domain rectangle: empty");
  if (y1 < d_min)
    throw std::invalid_argument("domain rectangle: must lie at least d_min above the real axis");
  if (n_x < 2 || n_y < 2) throw std::invalid_argument("domain rectangle: quadrature counts too small");
  EigenvalueDomain d;
  d.kind_ = Kind::Rectangle;
  d.x1_ = x1;
  d.x2_ = x2;
  d.y1_ = y1;
  d.y2_ = y2;
  d.nq1_ = n_x;
  d.nq2_ = n_y;
  d.area_ = (x2 - x1) * (y2 - y1);
  d.centroid_ = cdouble(0.5 * (x1 + x2), 0.5 * (y1 + y2));
  d.circumradius_ = 0.5 * std::hypot(x2 - x1, y2 - y1);
  d.min_im_ = y1;
  d.re_lo_ = x1;
  d.re_hi_ = x2;
  d.im_lo_ = y1;
  d.im_hi_ = y2;
  d.build_rect_quad(n_x, n_y, d.quad_);
  return d;
}

void EigenvalueDomain::build_disk_quad(int n_radial, int n_angular,
                                       std::vector<DomainNode>& out) const {
  // Gauss-Legendre in radius (with the rho area factor) times equispaced
  // trapezoid in angle; normalized by the disk area.
  GaussLegendre gr = gauss_legendre(n_radial, 0.0, radius_);
  const double dphi = 2.0 * PI / n_angular;
  out.clear();
  out.reserve(static_cast<size_t>(n_radial) * n_angular);
  for (int i = 0; i < n_radial; ++i) {
    const double rho = gr.x[i];
    const double wr = gr.w[i] * rho * dphi / area_;
    for (int j = 0; j < n_angular; ++j) {
      const double phi = dphi * j;
      out.push_back({center_ + rho * std::exp(cdouble(0.0, phi)), wr});
    }
  }
}

void EigenvalueDomain::build_rect_quad(int n_x, int n_y, std::vector<DomainNode>& out) const {
  GaussLegendre gx = gauss_legendre(n_x, x1_, x2_);
  GaussLegendre gy = gauss_legendre(n_y, y1_, y2_);
  out.clear();
  out.reserve(static_cast<size_t>(n_x) * n_y);
  for (int i = 0; i < n_x; ++i)
    for (int j = 0; j < n_y; ++j)
      out.push_back({cdouble(gx.x[i], gy.x[j]), gx.w[i] * gy.w[j] / area_});
}

std::vector<DomainNode> EigenvalueDomain::refined_quad() const {
  std::vector<DomainNode> out;
  if (kind_ == Kind::Disk)
    build_disk_quad(2 * nq1_, 2 * nq2_, out);
  else
    build_rect_quad(2 * nq1_, 2 * nq2_, out);
  return out;
}

bool EigenvalueDomain::contains(cdouble z) const {
  if (kind_ == Kind::Disk) return std::abs(z - center_) <= radius_;
  return z.real() >= x1_ && z.real() <= x2_ && z.imag() >= y1_ && z.imag() <= y2_;
}

cdouble EigenvalueDomain::disk_center() const {
  if (kind_ != Kind::Disk) throw std::logic_error("not a disk domain");
  return center_;
}

double EigenvalueDomain::disk_radius() const {
  if (kind_ != Kind::Disk) throw std::logic_error("not a disk domain");
  return radius_;
}

std::string EigenvalueDomain::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::Disk)
    os << "disk(center=" << center_.real() << "+" << center_.imag() << "i, R=" << radius_ << ")";
  else
    os << "rect([" << x1_ << "," << x2_ << "]x[" << y1_ << "," << y2_ << "])";
  return os.str();
}

cdouble InterpolantR::operator()(cdouble z) const {
  switch (preset_) {
    case Preset::Constant: return c0_;
    case Preset::Affine: return c0_ + c1_ * z;
    case Preset::Exponential: return c0_ * std::exp(c1_ * z);
  }
  return c0_;
}

std::vector<cdouble> sample_eigenvalues(const EigenvalueDomain& domain, int n,
                                        std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_eigenvalues: n must be >= 1");
  Rng rng(seed);
  std::vector<cdouble> out;
  out.reserve(n);
  const long cap = 1000L * n;
  long iters = 0;
  while (static_cast<int>(out.size()) < n) {
    if (++iters > cap)
      throw std::runtime_error("sample_eigenvalues: rejection cap exceeded for " +
                               domain.describe());
    const double re = rng.uniform(domain.re_lo(), domain.re_hi());
    const double im = rng.uniform(domain.im_lo(), domain.im_hi());
    const cdouble z(re, im);
    if (domain.contains(z)) out.push_back(z);
  }
  return out;
}

std::vector<cdouble> norming_constants(const std::vector<cdouble>& lambda,
                                       const InterpolantR& r) {
  if (lambda.empty()) throw std::invalid_argument("norming_constants: empty sample");
  const double n = static_cast<double>(lambda.size());
  std::vector<cdouble> c(lambda.size());
  for (size_t k = 0; k < lambda.size(); ++k) {
    const cdouble rk = r(lambda[k]);
    if (rk == cdouble(0.0, 0.0))
      throw std::runtime_error("norming_constants: r vanishes at an eigenvalue");
    c[k] = rk / n;
  }
  return c;
}

cdouble evolve_norming(cdouble c, cdouble lambda, double t) {
  if (t < 0) throw std::invalid_argument("evolve_norming: t must be nonnegative");
  return c * std::exp(cdouble(0.0, 2.0) * t * lambda * lambda);
}

SpectralSample make_sample(const EigenvalueDomain& domain, const InterpolantR& r, int n,
                           std::uint64_t seed) {
  SpectralSample s;
  s.lambda = sample_eigenvalues(domain, n, seed);
  s.c = norming_constants(s.lambda, r);
  s.seed = seed;
  return s;
}

}  // namespace nlsgas
