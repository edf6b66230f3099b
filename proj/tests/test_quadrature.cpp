#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "discnls/quadrature.hpp"

using namespace discnls;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto gl = gauss_legendre(10);
  for (int p = 0; p <= 19; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], p);
    const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
    EXPECT_NEAR(s, exact, 1e-14) << "degree " << p;
  }
}

TEST(GaussLegendre, MappedInterval) {
  const auto gl = gauss_legendre(20, 0.0, 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::exp(gl.nodes[i]);
  EXPECT_NEAR(s, std::exp(1.0) - 1.0, 1e-14);
}

TEST(GaussLegendre, RejectsZeroNodes) { EXPECT_THROW(gauss_legendre(0), std::invalid_argument); }

TEST(DiscQuadrature, AreaIsPi) {
  for (int q : {64, 200, 1001}) {
    const auto rule = disc_quadrature(q);
    double s = 0.0;
    for (double w : rule.weights) s += w;
    EXPECT_NEAR(s / std::numbers::pi, 1.0, 1e-12) << q;
  }
}

TEST(DiscQuadrature, NodesIncreasingInsideUnitInterval) {
  const auto rule = disc_quadrature(300);
  ASSERT_EQ(rule.node_count(), 300);
  for (int i = 0; i < rule.node_count(); ++i) {
    EXPECT_GT(rule.nodes[i], 0.0);
    EXPECT_LT(rule.nodes[i], 1.0);
    EXPECT_GT(rule.weights[i], 0.0);
    if (i > 0) EXPECT_GT(rule.nodes[i], rule.nodes[i - 1]);
  }
}

TEST(DiscQuadrature, RadialMoment) {
  // int_D |x|^2 dx = pi / 2
  const auto rule = disc_quadrature(64);
  double s = 0.0;
  for (int i = 0; i < rule.node_count(); ++i) s += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
  EXPECT_NEAR(s, std::numbers::pi / 2.0, 1e-13);
}

TEST(QuadratureSize, SizingRule) {
  EXPECT_EQ(quadrature_size(1, 2), 64);
  EXPECT_EQ(quadrature_size(32, 4), 384);
  EXPECT_EQ(quadrature_size(64, 6), 1152);
}
