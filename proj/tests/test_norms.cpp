#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "discnls/norms.hpp"
#include "support.hpp"

using namespace discnls;
using testing_support::Gen;
using testing_support::gff;
using testing_support::shared_basis;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SpectralField unit_mode(int modes, int n, double N, Complex c = 1.0) {
  SpectralField f = zero_field(modes, 1, N);
  f.coeffs(n - 1) = c;
  return f;
}

FlowConfig flow(int k, double N, Picture picture, bool nonlinear = true) {
  FlowConfig c;
  c.k = k;
  c.N = N;
  c.picture = picture;
  c.nonlinear = nonlinear;
  return c;
}

// Midpoint rule of g over [a, b].
template <class G>
double midpoint(G g, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += g(a + (i + 0.5) * h);
  return acc * h;
}

}  // namespace

TEST(Sobolev, L2MatchesCoefficientNorm) {
  const auto& b = shared_basis(16, 4);
  Gen gen(1);
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralField f = gen.field(16, 1, 32);
    EXPECT_NEAR(sobolev_norm(b, f, 0.0, 2.0), f.coeffs.norm(), 1e-11 * f.coeffs.norm());
    const double s = gen.real(0.0, 1.0);
    EXPECT_NEAR(sobolev_norm(b, f, s, 2.0), hs_norm(b, f, s), 1e-11 * hs_norm(b, f, s));
  }
}

TEST(Sobolev, SingleModeClosedForm) {
  const auto& b = shared_basis(8, 4);
  const double l1 = boost::math::cyl_bessel_j_zero(0.0, 1);
  const double sup = 1.0 / (std::sqrt(std::numbers::pi) * std::abs(boost::math::cyl_bessel_j(1, l1)));
  for (double s : {0.0, 0.3, 0.45, 1.0}) {
    EXPECT_NEAR(sobolev_norm(b, unit_mode(8, 1, 16), s, 2.0), std::pow(l1, s), 1e-12);
    EXPECT_NEAR(sobolev_norm(b, unit_mode(8, 1, 16), s, kInf), std::pow(l1, s) * sup, 1e-9);
  }
}

TEST(Sobolev, MonotoneInS) {
  const auto& b = shared_basis(16, 4);
  Gen gen(2);
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralField f = gen.field(16, 1, 32);
    double prev = 0.0;
    for (double s = 0.0; s <= 1.0; s += 0.1) {
      const double v = sobolev_norm(b, f, s, 2.0);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(Sobolev, RejectsBadExponent) {
  const auto& b = shared_basis(4, 4);
  EXPECT_THROW(sobolev_norm(b, unit_mode(4, 1, 8), 0.0, 0.5), PreconditionError);
  EXPECT_THROW(sobolev_norm(b, unit_mode(9, 1, 8), 0.0, 2.0), PreconditionError);
}

TEST(Sobolev, LinearFlowPreservesHs) {
  const auto& b = shared_basis(5, 4);
  const SpectralField f = gff(b, 16, 1, 3);
  const Trajectory tr = evolve(b, f, 1.0, flow(1, 16, Picture::physical, false), 0.1);
  for (double s : {0.0, 0.45, 1.0})
    for (const auto& st : tr.states) EXPECT_NEAR(hs_norm(b, st, s), hs_norm(b, f, s), 1e-12 * hs_norm(b, f, s));
}

TEST(WindowFn, Shape) {
  const Window w;
  EXPECT_EQ(w(0.0), 1.0);
  EXPECT_EQ(w(1.0), 1.0);
  EXPECT_EQ(w(-1.0), 1.0);
  EXPECT_EQ(w(2.0), 0.0);
  EXPECT_EQ(w(-2.5), 0.0);
  EXPECT_NEAR(w(1.5), 0.5, 1e-15);
  double prev = 1.0;
  for (double t = 1.0; t <= 2.0; t += 0.01) {
    EXPECT_LE(w(t), prev);
    EXPECT_EQ(w(t), w(-t));
    prev = w(t);
  }
  // Flat to all orders at the joins: the first difference is far below h.
  EXPECT_LT(1.0 - w(1.01), 1e-20);
  EXPECT_LT(w(1.99), 1e-20);
}

TEST(Xsb, ZeroTrajectory) {
  const auto& b = shared_basis(5, 4);
  const Trajectory tr = evolve_two_sided(b, zero_field(5, 1, 16), flow(1, 16, Picture::interaction), 2.0, 50);
  EXPECT_EQ(xsb_norm(b, tr, 0.5, 0.5).value, 0.0);
}

// For constant v = e_1, the norm is lambda_1^s ||<tau>^b F(chi)||_{L^2}; at
// b = 0 and b = 1 Parseval gives it from chi and chi' directly.
TEST(Xsb, ConstantModeMatchesParseval) {
  const auto& b = shared_basis(5, 4);
  const Trajectory tr = evolve_two_sided(b, unit_mode(5, 1, 16), flow(1, 16, Picture::interaction, false), 2.0, 400);
  const Window w;
  const double chi2 = midpoint([&](double t) { return w(t) * w(t); }, -2.0, 2.0, 200000);
  const double d = 1e-5;
  const double dchi2 = midpoint(
      [&](double t) {
        const double g = (w(t + d) - w(t - d)) / (2.0 * d);
        return g * g;
      },
      -2.0, 2.0, 200000);
  for (double s : {0.0, 0.45}) {
    const double ls = std::pow(b.lambda(1), s);
    EXPECT_NEAR(xsb_norm(b, tr, s, 0.0).value, ls * std::sqrt(chi2), 1e-6 * ls);
    EXPECT_NEAR(xsb_norm(b, tr, s, 1.0).value, ls * std::sqrt(chi2 + dchi2), 1e-4 * ls);
  }
}

TEST(Xsb, StableUnderGridRefinement) {
  const auto& b = shared_basis(5, 4);
  const SpectralField f = gff(b, 16, 1, 8);
  const FlowConfig c = flow(1, 16, Picture::interaction);
  const XsbResult coarse = xsb_norm(b, evolve_two_sided(b, f, c, 2.0, 200), 0.45, 0.55);
  const XsbResult fine = xsb_norm(b, evolve_two_sided(b, f, c, 2.0, 400), 0.45, 0.55);
  EXPECT_NEAR(coarse.value, fine.value, 0.01 * fine.value);
  EXPECT_NEAR(fine.dt, 0.005, 1e-15);
  EXPECT_EQ(fine.samples, 801);
}

TEST(Xsb, PicturesAgree) {
  const auto& b = shared_basis(5, 4);
  const SpectralField f = gff(b, 16, 1, 12);
  const XsbResult vi = xsb_norm(b, evolve_two_sided(b, f, flow(1, 16, Picture::interaction), 2.0, 2000), 0.45, 0.55);
  const XsbResult up =
      xsb_norm_physical(b, evolve_two_sided(b, f, flow(1, 16, Picture::physical), 2.0, 2000), 0.45, 0.55);
  EXPECT_NEAR(vi.value, up.value, 1e-3 * vi.value);
}

TEST(Xsb, RejectsShortOrWrongTrajectory) {
  const auto& b = shared_basis(5, 4);
  const SpectralField f = gff(b, 16, 1, 1);
  const Trajectory shortt = evolve_two_sided(b, f, flow(1, 16, Picture::interaction), 1.0, 50);
  EXPECT_THROW(xsb_norm(b, shortt, 0.5, 0.5), PreconditionError);
  const Trajectory phys = evolve_two_sided(b, f, flow(1, 16, Picture::physical), 2.0, 50);
  EXPECT_THROW(xsb_norm(b, phys, 0.5, 0.5), PreconditionError);
}

// |S(t) e_1| = |e_1|, so the space-time norm factors.
TEST(Strichartz, SingleModeFactorises) {
  const auto& b = shared_basis(5, 4);
  const Window eta{1.0, 2.0};
  const double time4 = midpoint([&](double t) { return std::pow(eta(t), 4); }, -2.0, 2.0, 200000);
  for (int n : {1, 3}) {
    const double expected = std::pow(time4, 0.25) * lp_norm(b, n, 4.0);
    EXPECT_NEAR(strichartz_l4(b, unit_mode(5, n, 16, Complex(0.6, 0.8))), expected, 1e-8 * expected);
  }
}

TEST(Strichartz, RatioPositiveAndHomogeneous) {
  const auto& b = shared_basis(5, 4);
  const SpectralField f = gff(b, 16, 1, 4);
  const double r = strichartz_ratio(b, f, 0.1);
  EXPECT_TRUE(std::isfinite(r));
  EXPECT_GT(r, 0.0);
  SpectralField g = f;
  g.coeffs *= Complex(0.0, 3.0);
  EXPECT_NEAR(strichartz_ratio(b, g, 0.1), r, 1e-12 * r);
}

TEST(Strichartz, Errors) {
  const auto& b = shared_basis(5, 4);
  EXPECT_THROW(strichartz_ratio(b, zero_field(5, 1, 16), 0.1), PreconditionError);
  EXPECT_THROW(strichartz_ratio(b, unit_mode(5, 1, 16), 0.0), PreconditionError);
  EXPECT_THROW(strichartz_ratio(b, unit_mode(5, 1, 16), -1.0), PreconditionError);
  EXPECT_THROW(strichartz_l4(shared_basis(5, 2), unit_mode(5, 1, 16)), PreconditionError);
}
