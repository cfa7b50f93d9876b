#pragma once

#include <memory>
#include <vector>

namespace hk {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes by Newton iteration on P_n from the Chebyshev-like initial guesses;
/// accurate to a few ulps for any order used here (<= 512).
GaussRule gauss_legendre(int order);

/// Tensor Gauss-Legendre rule on the ordered simplex
///   0 < s_1 < ... < s_n < 1
/// through s_n = u_n, s_k = s_{k+1} u_k (Jacobian prod_{k>=2} s_k). Weights sum
/// to 1/n!. Nodes are stored row-major: nodes[i * n + k] = s_{k+1} of node i.
struct SimplexRule {
  int n = 0;
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  const double* node(std::size_t i) const { return nodes.data() + i * static_cast<std::size_t>(n); }
};

/// Cached per (n, order); the returned rule is immutable.
std::shared_ptr<const SimplexRule> simplex_rule(int n, int order);

} // namespace hk
