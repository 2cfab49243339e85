#pragma once

#include <vector>

namespace nlsgas {

struct GaussLegendre {
  std::vector<double> x;  // nodes on [-1,1]
  std::vector<double> w;  // weights, sum to 2
};

// Gauss-Legendre rule of order n (Golub-Welsch on the Jacobi matrix).
GaussLegendre gauss_legendre(int n);

// Same rule mapped to [a,b].
GaussLegendre gauss_legendre(int n, double a, double b);

}  // namespace nlsgas
