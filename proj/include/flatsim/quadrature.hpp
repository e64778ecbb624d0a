#pragma once

#include <vector>

namespace flatsim {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rule of order n (exact for polynomials up to degree 2n-1). Cached per n.
const GaussLegendre& gauss_legendre(int n);

}  // namespace flatsim
