#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace discnls {

/// Nodes and weights of an n-point Gauss-Legendre rule on [a, b].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussLegendre gauss_legendre(int n, double a = -1.0, double b = 1.0) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1, got " + std::to_string(n));
  using real_ext = long double;
  constexpr real_ext pi = 3.141592653589793238462643383279502884L;
  GaussLegendre rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const real_ext mid = 0.5L * (static_cast<real_ext>(a) + b);
  const real_ext half = 0.5L * (static_cast<real_ext>(b) - a);
  const int m = (n + 1) / 2;
  for (int i = 1; i <= m; ++i) {
    // Tricomi's initial guess, refined by Newton on P_n.
    real_ext z = std::cos(pi * (i - 0.25L) / (n + 0.5L));
    real_ext dp = 1.0L;
    for (int it = 0; it < 100; ++it) {
      real_ext p0 = 1.0L, p1 = z;
      for (int j = 2; j <= n; ++j) {
        const real_ext p2 = ((2.0L * j - 1.0L) * z * p1 - (j - 1.0L) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0L);
      const real_ext dz = p1 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-18L) break;
    }
    const real_ext w = 2.0L * half / ((1.0L - z * z) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i - 1)] = static_cast<double>(mid - half * z);
    rule.nodes[static_cast<std::size_t>(n - i)] = static_cast<double>(mid + half * z);
    rule.weights[static_cast<std::size_t>(i - 1)] = static_cast<double>(w);
    rule.weights[static_cast<std::size_t>(n - i)] = static_cast<double>(w);
  }
  return rule;
}

/// Radial rule for the unit disc: sum_i w_i f(r_i) ~ int_D f dx = 2 pi int_0^1 f(r) r dr.
struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing radii in (0, 1)
  std::vector<double> weights;  // positive; sum = pi
  int node_count() const { return static_cast<int>(nodes.size()); }
};

inline QuadratureRule disc_quadrature(int node_count) {
  const GaussLegendre gl = gauss_legendre(node_count, 0.0, 1.0);
  QuadratureRule rule;
  rule.nodes = gl.nodes;
  rule.weights.resize(gl.weights.size());
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    rule.weights[i] = 2.0 * std::numbers::pi * gl.weights[i] * gl.nodes[i];
  return rule;
}

/// Node count used for a basis of `mode_count` modes that must integrate
/// products of up to `product_order` eigenfunctions.
inline int quadrature_size(int mode_count, int product_order) {
  const int sized = 3 * product_order * mode_count;
  return sized > 64 ? sized : 64;
}

}  // namespace discnls
