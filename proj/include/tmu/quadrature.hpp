#pragma once

#include <cstddef>
#include <vector>

namespace tmu {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [a, b]. Rules on [-1, 1] are cached.
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Sum with pairwise splitting; the result depends only on the input order.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace tmu
