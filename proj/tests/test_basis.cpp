#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "discnls/quadrature.hpp"
#include "discnls/spectral_basis.hpp"
#include "support.hpp"

using namespace discnls;
using testing_support::Gen;
using testing_support::shared_basis;

TEST(Basis, OrthonormalFor32Modes) {
  const auto& b = shared_basis(32, 4);
  const Eigen::MatrixXd G = gram_matrix(b);
  EXPECT_LE((G - Eigen::MatrixXd::Identity(32, 32)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Basis, OrthonormalFor64Modes) {
  const auto& b = shared_basis(64, 4);
  const Eigen::MatrixXd G = gram_matrix(b);
  EXPECT_LE((G - Eigen::MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Basis, NodeCountFollowsRule) {
  EXPECT_EQ(shared_basis(32, 4).node_count(), quadrature_size(32, 4));
}

TEST(Basis, J0NormScalesLikeInverseRootN) {
  const auto& b = shared_basis(64, 4);
  for (int n = 1; n <= 64; ++n) {
    const double v = b.mode(n).j0_l2_norm * std::sqrt(static_cast<double>(n));
    EXPECT_GE(v, 0.3) << n;
    EXPECT_LE(v, 3.0) << n;
    // closed form ||J0(lambda r)||^2_{L^2(D)} = pi J1(lambda)^2
    EXPECT_NEAR(b.mode(n).j0_l2_norm, std::sqrt(std::numbers::pi) * std::abs(bessel_j1(b.lambda(n))), 1e-12);
  }
}

TEST(Basis, DirichletBoundary) {
  const auto& b = shared_basis(8, 4);
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(b.eigenfunction(n, 1.0), 0.0);
}

TEST(Basis, RejectsZeroModes) { EXPECT_THROW(build_basis(0, 4), PreconditionError); }

TEST(Basis, SignChangesInterlace) {
  const auto& b = shared_basis(20, 4);
  for (int n = 1; n <= 20; ++n) {
    int changes = 0;
    double prev = b.eigenfunction(n, 0.0);
    for (int i = 1; i < 20000; ++i) {
      const double v = b.eigenfunction(n, i / 20000.0);
      if ((v > 0) != (prev > 0)) ++changes;
      prev = v;
    }
    EXPECT_EQ(changes, n - 1) << "mode " << n;
  }
}

TEST(Basis, L2NormOfModesIsOne) {
  const auto& b = shared_basis(32, 4);
  for (int n : {1, 7, 32}) EXPECT_NEAR(lp_norm(b, n, 2.0), 1.0, 1e-10);
}

TEST(Basis, SupNormOfFirstModeAtOrigin) {
  const auto& b = shared_basis(8, 4);
  // |e_1| peaks at r = 0 with value 1 / ||J0(lambda_1 .)||
  EXPECT_NEAR(lp_norm(b, 1, INFINITY), 1.0 / b.mode(1).j0_l2_norm, 1e-9);
}

TEST(Transform, ZeroRoundTrip) {
  const auto& b = shared_basis(16, 4);
  const auto grid = synthesize(b, zero_field(16, 1, 64));
  EXPECT_EQ(grid.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(analyze_coeffs(b, grid, 16).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Transform, RandomRoundTripAndParseval) {
  const auto& b = shared_basis(32, 4);
  Gen gen(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = gen.field(32, 1, 128);
    const auto grid = synthesize(b, f);
    const auto back = analyze_coeffs(b, grid, 32);
    ASSERT_LE((back - f.coeffs).cwiseAbs().maxCoeff(), 1e-10);
    double lhs = 0.0;
    for (int i = 0; i < b.node_count(); ++i) lhs += b.weights()(i) * std::norm(grid(i));
    ASSERT_NEAR(lhs, f.coeffs.squaredNorm(), 1e-10 * f.coeffs.squaredNorm());
  }
}

TEST(Transform, GridLengthMismatch) {
  const auto& b = shared_basis(8, 4);
  EXPECT_THROW(analyze_coeffs(b, Eigen::VectorXcd::Zero(b.node_count() - 1), 8), PreconditionError);
}

TEST(Transform, GradientMatchesFiniteDifferences) {
  const auto& b = shared_basis(10, 4);
  Gen gen(5);
  auto f = gen.field(10, 1, 32);
  f.coeffs = f.coeffs.real().cast<Complex>();
  // int_D |grad f|^2 = 2 pi int_0^1 |f'(r)|^2 r dr, f' by central differences.
  const auto gl = gauss_legendre(400, 0.0, 1.0);
  const double h = 1e-5;
  double lhs = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double r = gl.nodes[i];
    const double lo = std::max(0.0, r - h), hi = std::min(1.0, r + h);
    const double d = (field_value_at(b, f.coeffs, hi).real() - field_value_at(b, f.coeffs, lo).real()) / (hi - lo);
    lhs += 2.0 * std::numbers::pi * gl.weights[i] * d * d * r;
  }
  double rhs = 0.0;
  for (int n = 1; n <= 10; ++n) rhs += b.lambda(n) * b.lambda(n) * std::norm(f(n));
  EXPECT_NEAR(lhs / rhs, 1.0, 1e-4);
}

TEST(Field, HsNormAndProjection) {
  const auto& b = shared_basis(10, 4);
  Gen gen(3);
  const auto f = gen.field(10, 1, 32);
  const auto p = project_below(b, f, 16.0);
  for (int n = 6; n <= 10; ++n) EXPECT_EQ(p(n), Complex(0.0));
  for (int n = 1; n <= 5; ++n) EXPECT_EQ(p(n), f(n));
  EXPECT_NEAR(hs_norm(b, f, 0.0), f.coeffs.norm(), 1e-14);
  EXPECT_LT(hs_norm(b, p, 0.5), hs_norm(b, f, 0.5));
}
