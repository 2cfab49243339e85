#include "nlsgas/contour.hpp"

#include <cmath>
#include <stdexcept>

namespace nlsgas {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void fft_radix2(std::vector<cdouble>& a, bool inverse) {
  const size_t n = a.size();
  if (!is_pow2(static_cast<int>(n))) throw std::invalid_argument("fft: length must be a power of two");
  // bit reversal
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const cdouble wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      cdouble w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const cdouble u = a[i + k];
        const cdouble v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= static_cast<double>(n);
}

void ContourGrid::init(cdouble center, double radius, int n) {
  if (!is_pow2(n) || n < 16)
    throw std::invalid_argument("contour: nodes per circle must be a power of two >= 16");
  if (center.imag() - radius <= 0)
    throw std::runtime_error("contour geometry: circle crosses the real axis; enlarge d_min or shrink clearance");
  a_ = center;
  R_ = radius;
  n_ = n;
  nodes_.resize(2 * n);
  ds_.resize(2 * n);
  const cdouble am = std::conj(center);
  for (int j = 0; j < n; ++j) {
    const double phi = 2.0 * PI * j / n;
    const cdouble e(std::cos(phi), std::sin(phi));
    nodes_[j] = center + radius * e;
    nodes_[n + j] = am + radius * e;
    ds_[j] = I * radius * e * (2.0 * PI / n);
    ds_[n + j] = ds_[j];
  }

  // Dense scalar C_- matrix: same-circle Fourier filter (negative
  // frequencies, Nyquist counted negative, with a minus sign) plus the plain
  // Cauchy quadrature between circles.
  kminus_ = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  std::vector<cdouble> col(n);
  for (int c = 0; c < n; ++c) {
    std::fill(col.begin(), col.end(), cdouble(0, 0));
    col[c] = 1.0;
    fft_radix2(col, false);
    for (int k = 0; k < n; ++k) col[k] = (k >= n / 2) ? -col[k] : cdouble(0, 0);
    fft_radix2(col, true);
    for (int rw = 0; rw < n; ++rw) {
      kminus_(rw, c) = col[rw];
      kminus_(n + rw, n + c) = col[rw];
    }
  }
  const cdouble itwopi = 1.0 / (cdouble(0, 2) * PI);
  for (int rw = 0; rw < n; ++rw)
    for (int c = 0; c < n; ++c) {
      kminus_(rw, n + c) = itwopi * ds_[n + c] / (nodes_[n + c] - nodes_[rw]);
      kminus_(n + rw, c) = itwopi * ds_[c] / (nodes_[c] - nodes_[n + rw]);
    }
}

ContourGrid ContourGrid::build(const EigenvalueDomain& domain, int nodes_per_circle,
                               double clearance) {
  if (clearance <= 0) throw std::invalid_argument("contour: clearance must be positive");
  ContourGrid g;
  g.init(domain.centroid(), domain.circumradius() + clearance, nodes_per_circle);
  return g;
}

ContourGrid ContourGrid::circle(cdouble center, double radius, int nodes_per_circle) {
  ContourGrid g;
  g.init(center, radius, nodes_per_circle);
  return g;
}

Eigen::MatrixXcd ContourGrid::cplus_matrix() const {
  // C_+ = C_- + identity on the resolved modes: nonnegative frequencies kept.
  Eigen::MatrixXcd kp = Eigen::MatrixXcd::Zero(2 * n_, 2 * n_);
  std::vector<cdouble> col(n_);
  for (int c = 0; c < n_; ++c) {
    std::fill(col.begin(), col.end(), cdouble(0, 0));
    col[c] = 1.0;
    fft_radix2(col, false);
    for (int k = 0; k < n_; ++k) col[k] = (k < n_ / 2) ? col[k] : cdouble(0, 0);
    fft_radix2(col, true);
    for (int rw = 0; rw < n_; ++rw) {
      kp(rw, c) = col[rw];
      kp(n_ + rw, n_ + c) = col[rw];
    }
  }
  // Cross-circle part is identical for both boundary values (smooth kernel).
  kp.block(0, n_, n_, n_) = kminus_.block(0, n_, n_, n_);
  kp.block(n_, 0, n_, n_) = kminus_.block(n_, 0, n_, n_);
  return kp;
}

double norm_l2(const ContourGrid& g, const ContourDensity& h) {
  double s = 0.0;
  for (const Mat2& m : h.val) s += m.squaredNorm();
  return std::sqrt(s * g.arc());
}

double norm_linf(const ContourDensity& h) {
  double s = 0.0;
  for (const Mat2& m : h.val) s = std::max(s, frob(m));
  return s;
}

Mat2 cauchy_offcontour(const ContourGrid& g, const ContourDensity& h, cdouble z,
                       bool* near_warning) {
  Mat2 out = Mat2::Zero();
  double dist = std::numeric_limits<double>::infinity();
  const auto& s = g.nodes();
  const auto& ds = g.ds();
  for (int j = 0; j < g.total(); ++j) {
    const cdouble d = s[j] - z;
    dist = std::min(dist, std::abs(d));
    out += h.val[j] * (ds[j] / d);
  }
  if (near_warning) *near_warning = dist < g.arc();
  return out / (cdouble(0, 2) * PI);
}

namespace {

ContourDensity apply_scalar_matrix(const ContourGrid& g, const Eigen::MatrixXcd& K,
                                   const ContourDensity& h) {
  const int N = g.total();
  ContourDensity out;
  out.val.assign(N, Mat2::Zero());
  // K acts entrywise on the four matrix components.
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      Eigen::VectorXcd v(N);
      for (int j = 0; j < N; ++j) v(j) = h.val[j](r, c);
      Eigen::VectorXcd w = K * v;
      for (int j = 0; j < N; ++j) out.val[j](r, c) = w(j);
    }
  return out;
}

}  // namespace

ContourDensity cauchy_minus(const ContourGrid& g, const ContourDensity& h) {
  return apply_scalar_matrix(g, g.cminus_matrix(), h);
}

ContourDensity cauchy_plus(const ContourGrid& g, const ContourDensity& h) {
  return apply_scalar_matrix(g, g.cplus_matrix(), h);
}

}  // namespace nlsgas
