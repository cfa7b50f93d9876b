#include "hk/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "hk/common.hpp"

namespace hk {

GaussRule gauss_legendre(int order) {
  if (order < 1) throw ConfigError("gauss_legendre: order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1, 1] -> [0, 1], ascending order
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[order - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[order - 1 - i] = 0.5 * w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.5;
  return rule;
}

namespace {

std::shared_ptr<const SimplexRule> build_simplex_rule(int n, int order) {
  auto rule = std::make_shared<SimplexRule>();
  rule->n = n;
  rule->order = order;
  if (n == 0) {
    rule->weights = {1.0};
    return rule;
  }
  const GaussRule g = gauss_legendre(order);
  std::size_t count = 1;
  for (int k = 0; k < n; ++k) count *= static_cast<std::size_t>(order);
  rule->nodes.resize(count * n);
  rule->weights.resize(count);
  std::vector<int> digit(n, 0);
  for (std::size_t i = 0; i < count; ++i) {
    double* s = rule->nodes.data() + i * n;
    double upper = 1.0;
    double w = 1.0;
    for (int k = n - 1; k >= 0; --k) {
      const int d = digit[k];
      s[k] = upper * g.nodes[d];
      w *= g.weights[d] * upper;
      upper = s[k];
    }
    rule->weights[i] = w;
    for (int k = 0; k < n; ++k) {
      if (++digit[k] < order) break;
      digit[k] = 0;
    }
  }
  return rule;
}

} // namespace

std::shared_ptr<const SimplexRule> simplex_rule(int n, int order) {
  if (n < 0 || order < 1) throw ConfigError("simplex_rule: need n >= 0 and order >= 1");
  // Storage guard: (n + 1) doubles per node.
  if (std::pow(static_cast<double>(order), n) * (n + 1) > 2.5e8)
    throw CostError("simplex_rule: order^n = " + std::to_string(std::pow(static_cast<double>(order), n)) +
                    " nodes exceeds the storage limit");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const SimplexRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, order}];
  if (!slot) slot = build_simplex_rule(n, order);
  return slot;
}

} // namespace hk
