#pragma once

#include <complex>
#include <Eigen/Dense>

namespace nlsgas {

using cdouble = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

inline constexpr cdouble I{0.0, 1.0};
inline constexpr double PI = 3.14159265358979323846;

// Pauli-type constant matrices used by the symmetry checks.
inline Mat2 sigma2() {
  Mat2 s;
  s << cdouble(0, 0), cdouble(0, -1), cdouble(0, 1), cdouble(0, 0);
  return s;
}

inline Mat2 sigma3() {
  Mat2 s;
  s << 1, 0, 0, -1;
  return s;
}

// Frobenius matrix norm |A| = sqrt(Tr(A* A)).
inline double frob(const Mat2& a) { return a.norm(); }

// Inverse of a 2x2 matrix via the adjugate; caller guarantees det != 0.
inline Mat2 inv2(const Mat2& m) {
  const cdouble det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Mat2 r;
  r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return r / det;
}

inline cdouble det2(const Mat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

}  // namespace nlsgas
