#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlsgas/types.hpp"

namespace nlsgas {

// Planar quadrature node for integrals against dmu = d^2z / m over the domain.
struct DomainNode {
  cdouble z;
  double w;  // weight; the full set sums to 1
};

// Eigenvalue support D+ in the upper half-plane: a disk or an axis-aligned
// rectangle, together with its normalized area measure and a quadrature rule
// for it. The domain must stay at least d_min above the real axis so a
// reflection-symmetric contour pair can be fitted around it.
class EigenvalueDomain {
 public:
  enum class Kind { Disk, Rectangle };

  static EigenvalueDomain disk(cdouble center, double radius, int n_radial = 24,
                               int n_angular = 64, double d_min = 0.05);
  static EigenvalueDomain rectangle(double x1, double x2, double y1, double y2,
                                    int n_x = 32, int n_y = 32, double d_min = 0.05);

  Kind kind() const { return kind_; }
  double area() const { return area_; }
  cdouble centroid() const { return centroid_; }
  double circumradius() const { return circumradius_; }
  double min_im() const { return min_im_; }
  bool contains(cdouble z) const;

  // Bounding box [re_lo,re_hi] x [im_lo,im_hi] for rejection sampling.
  double re_lo() const { return re_lo_; }
  double re_hi() const { return re_hi_; }
  double im_lo() const { return im_lo_; }
  double im_hi() const { return im_hi_; }

  const std::vector<DomainNode>& quad() const { return quad_; }
  // Same rule with both node counts doubled (self-convergence estimates).
  std::vector<DomainNode> refined_quad() const;

  // Disk accessors (throw for rectangles).
  cdouble disk_center() const;
  double disk_radius() const;

  std::string describe() const;

 private:
  EigenvalueDomain() = default;
  void build_disk_quad(int n_radial, int n_angular, std::vector<DomainNode>& out) const;
  void build_rect_quad(int n_x, int n_y, std::vector<DomainNode>& out) const;

  Kind kind_{Kind::Disk};
  cdouble center_{0.0, 1.0};
  double radius_ = 0.5;
  double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
  int nq1_ = 0, nq2_ = 0;
  double area_ = 0;
  cdouble centroid_{0, 0};
  double circumradius_ = 0;
  double min_im_ = 0;
  double re_lo_ = 0, re_hi_ = 0, im_lo_ = 0, im_hi_ = 0;
  std::vector<DomainNode> quad_;
};

// Interpolating function r for the norming constants, r(lambda_k) = N c_k.
// Presets are entire functions, so r is C^1 on any neighborhood of the domain
// and analytic wherever the residue calculus needs it.
class InterpolantR {
 public:
  enum class Preset { Constant, Affine, Exponential };

  static InterpolantR constant(cdouble c0) { return InterpolantR(Preset::Constant, c0, 0.0); }
  static InterpolantR affine(cdouble c0, cdouble c1) { return InterpolantR(Preset::Affine, c0, c1); }
  static InterpolantR exponential(cdouble c0, cdouble c1) {
    return InterpolantR(Preset::Exponential, c0, c1);
  }

  cdouble operator()(cdouble z) const;
  // Schwarz reflection r*(w) = conj(r(conj w)).
  cdouble star(cdouble w) const { return std::conj((*this)(std::conj(w))); }

  Preset preset() const { return preset_; }
  cdouble c0() const { return c0_; }
  cdouble c1() const { return c1_; }

 private:
  InterpolantR(Preset p, cdouble c0, cdouble c1) : preset_(p), c0_(c0), c1_(c1) {}
  Preset preset_;
  cdouble c0_, c1_;
};

// Random spectral data at t = 0: eigenvalues in the domain plus norming
// constants c_k = r(lambda_k)/N.
struct SpectralSample {
  std::vector<cdouble> lambda;
  std::vector<cdouble> c;
  std::uint64_t seed = 0;
  int n() const { return static_cast<int>(lambda.size()); }
};

// n i.i.d. uniform eigenvalues, rejection-sampled from the bounding box.
// Throws if the rejection loop exceeds 1000*n iterations.
std::vector<cdouble> sample_eigenvalues(const EigenvalueDomain& domain, int n,
                                        std::uint64_t seed);

// c_k = r(lambda_k)/N. Throws if r vanishes at some eigenvalue.
std::vector<cdouble> norming_constants(const std::vector<cdouble>& lambda,
                                       const InterpolantR& r);

// Explicit time evolution of a norming constant: c e^{2 i t lambda^2}.
cdouble evolve_norming(cdouble c, cdouble lambda, double t);

SpectralSample make_sample(const EigenvalueDomain& domain, const InterpolantR& r, int n,
                           std::uint64_t seed);

}  // namespace nlsgas
