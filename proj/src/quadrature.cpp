#include "nlsgas/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace nlsgas {

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  // Jacobi matrix of the Legendre recurrence; eigenvalues are the nodes,
  // weights are 2 * (first eigenvector component)^2.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k - 1, k) = b;
    J(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussLegendre gl;
  gl.x.resize(n);
  gl.w.resize(n);
  for (int i = 0; i < n; ++i) {
    gl.x[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    gl.w[i] = 2.0 * v * v;
  }
  return gl;
}

GaussLegendre gauss_legendre(int n, double a, double b) {
  GaussLegendre gl = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    gl.x[i] = mid + half * gl.x[i];
    gl.w[i] *= half;
  }
  return gl;
}

}  // namespace nlsgas
