#pragma once

#include <memory>
#include <vector>

#include "nlsgas/spectral.hpp"
#include "nlsgas/types.hpp"

namespace nlsgas {

// In-place radix-2 FFT, X_k = sum_j x_j e^{-2 pi i j k / n} (inverse divides
// by n). Length must be a power of two.
void fft_radix2(std::vector<cdouble>& a, bool inverse);

// Discretization of gamma = gamma+ U gamma-: two counterclockwise circles,
// gamma- the Schwarz reflection of gamma+, each with n equispaced nodes.
// Node order: gamma+ angles 0..2pi, then gamma-.
class ContourGrid {
 public:
  // gamma+ centered at the domain centroid with radius circumradius+clearance.
  // Throws if the circle does not fit in the upper half-plane or node counts
  // are invalid (power of two, >= 16).
  static ContourGrid build(const EigenvalueDomain& domain, int nodes_per_circle,
                           double clearance);
  // Direct construction of gamma+ = circle(center, radius).
  static ContourGrid circle(cdouble center, double radius, int nodes_per_circle);

  int n() const { return n_; }              // nodes per circle
  int total() const { return 2 * n_; }
  cdouble center_plus() const { return a_; }
  double radius() const { return R_; }
  double length() const { return 2.0 * 2.0 * PI * R_; }
  double arc() const { return R_ * 2.0 * PI / n_; }   // |ds| per node
  double min_im_plus() const { return a_.imag() - R_; }

  const std::vector<cdouble>& nodes() const { return nodes_; }   // size 2n
  const std::vector<cdouble>& ds() const { return ds_; }         // complex ds weights
  bool on_plus(int j) const { return j < n_; }

  // Dense matrix of the scalar minus-projector C_- on the union contour
  // (same-circle Fourier part + smooth cross-circle kernel), size 2n x 2n.
  const Eigen::MatrixXcd& cminus_matrix() const { return kminus_; }
  // Nonnegative-frequency counterpart, for Plemelj checks.
  Eigen::MatrixXcd cplus_matrix() const;

 private:
  ContourGrid() = default;
  void init(cdouble center, double radius, int n);

  cdouble a_;
  double R_ = 0;
  int n_ = 0;
  std::vector<cdouble> nodes_, ds_;
  Eigen::MatrixXcd kminus_;
};

// Matrix-valued density sampled at the grid nodes.
struct ContourDensity {
  std::vector<Mat2> val;  // size grid.total()
};

double norm_l2(const ContourGrid& g, const ContourDensity& h);
double norm_linf(const ContourDensity& h);

// (1/2 pi i) oint h(s)/(s - z) ds by the trapezoid rule on both circles.
// Sets *near_warning when dist(z, gamma) is below the node spacing.
Mat2 cauchy_offcontour(const ContourGrid& g, const ContourDensity& h, cdouble z,
                       bool* near_warning = nullptr);

// Minus boundary value C_-(h) at every node.
ContourDensity cauchy_minus(const ContourGrid& g, const ContourDensity& h);
// Plus boundary value, for Plemelj identities in tests.
ContourDensity cauchy_plus(const ContourGrid& g, const ContourDensity& h);

}  // namespace nlsgas
