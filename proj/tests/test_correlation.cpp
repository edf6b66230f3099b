#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>
#include <thread>

#include "discnls/correlation.hpp"
#include "support.hpp"

using namespace discnls;
using testing_support::Gen;
using testing_support::shared_basis;

namespace {

// int_D prod e_n dx by adaptive Gauss-Kronrod on Boost's J0, with the closed
// form ||J0(lambda .)||^2 = pi J1(lambda)^2.
double oracle_correlation(const std::vector<int>& idx) {
  std::vector<double> lam, norm;
  for (int n : idx) {
    const double l = boost::math::cyl_bessel_j_zero(0.0, n);
    lam.push_back(l);
    norm.push_back(std::sqrt(std::numbers::pi) * std::abs(boost::math::cyl_bessel_j(1, l)));
  }
  auto f = [&](double r) {
    double p = 2.0 * std::numbers::pi * r;
    for (std::size_t j = 0; j < idx.size(); ++j) p *= boost::math::cyl_bessel_j(0, lam[j] * r) / norm[j];
    return p;
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
}

}  // namespace

TEST(Correlate, PairIsKronecker) {
  const auto& b = shared_basis(8, 4);
  EXPECT_NEAR(correlate(b, {1, 1}), 1.0, 1e-10);
  EXPECT_NEAR(correlate(b, {3, 5}), 0.0, 1e-10);
}

TEST(Correlate, FourFoldFirstModeRegression) {
  const auto& b = shared_basis(8, 4);
  const double v = correlate(b, {1, 1, 1, 1});
  EXPECT_NEAR(v, oracle_correlation({1, 1, 1, 1}), 1e-10);
  EXPECT_NEAR(v, 0.667927, 1e-6);
}

TEST(Correlate, MatchesAdaptiveOracle) {
  const auto& b = shared_basis(24, 6);
  Gen gen(21);
  for (int trial = 0; trial < 12; ++trial) {
    const auto t = gen.tuple(static_cast<std::size_t>(gen.coin() ? 4 : 6), 24);
    EXPECT_NEAR(correlate(b, t), oracle_correlation(t), 1e-9) << "trial " << trial;
  }
}

TEST(Correlate, PermutationInvariantExactly) {
  const auto& b = shared_basis(16, 6);
  CorrelationTensor tensor(b, 2);
  EXPECT_EQ(correlate(b, {3, 1, 2, 1}), correlate(b, {3, 1, 2, 1}));
  CorrelationTensor t1(b, 1);
  EXPECT_EQ(t1({3, 1, 2, 1}), t1({1, 1, 2, 3}));
  Gen gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = gen.tuple(6, 16);
    EXPECT_EQ(tensor(t), tensor(gen.permutation(t)));
  }
}

TEST(Correlate, ErrorNamesOffendingIndex) {
  const auto& b = shared_basis(8, 4);
  try {
    correlate(b, {1, 2, 9, 1});
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("index 9"), std::string::npos) << e.what();
  }
  EXPECT_THROW(correlate(b, {0, 1}), PreconditionError);
}

TEST(Correlate, ProductOrderGuard) {
  const auto& b = shared_basis(8, 4);
  EXPECT_THROW(correlate(b, {1, 1, 1, 1, 1, 1}), PreconditionError);
  EXPECT_THROW(CorrelationTensor(b, 2), PreconditionError);
}

TEST(Correlate, QuadratureConvergence) {
  // Doubling the node count leaves the values unchanged.
  const auto& coarse = shared_basis(32, 6);
  const auto& fine = shared_basis(32, 12);
  ASSERT_GE(fine.node_count(), 2 * coarse.node_count());
  Gen gen(4);
  for (int trial = 0; trial < 40; ++trial) {
    const auto t = gen.tuple(6, 32);
    EXPECT_NEAR(correlate(coarse, t), correlate(fine, t), 1e-9);
  }
}

TEST(Tensor, WrongArityRejected) {
  const auto& b = shared_basis(8, 4);
  CorrelationTensor t(b, 1);
  EXPECT_THROW(t({1, 2, 3}), PreconditionError);
}

TEST(Tensor, ConcurrentLookupsAgree) {
  const auto& b = shared_basis(12, 4);
  CorrelationTensor t(b, 1);
  std::vector<double> a(200), c(200);
  auto work = [&](std::vector<double>& out, int seed) {
    Gen gen(static_cast<std::uint64_t>(seed));
    for (int i = 0; i < 200; ++i) out[static_cast<std::size_t>(i)] = t(gen.tuple(4, 12));
  };
  std::thread t1(work, std::ref(a), 77), t2(work, std::ref(c), 77);
  t1.join();
  t2.join();
  EXPECT_EQ(a, c);
  Gen gen(77);
  // The tensor evaluates the canonical (sorted) ordering, so only rounding may differ.
  for (int i = 0; i < 200; ++i) EXPECT_NEAR(a[static_cast<std::size_t>(i)], correlate(b, gen.tuple(4, 12)), 1e-14);
}

TEST(SizeBound, FrozenConstantHoldsOnRandomTuples) {
  const auto& b = shared_basis(64, 6);
  Gen gen(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = gen.tuple(6, 64);
    worst = std::max(worst, std::abs(correlate(b, t)) / size_bound(t));
  }
  EXPECT_LE(worst, kSizeBoundConstant);
}

TEST(Decay, CalibratedExample) {
  const auto& b = shared_basis(80, 4);
  const std::vector<int> lows{2, 3};
  const auto r = verify_offdiagonal_decay(b, 64, 16, lows);
  EXPECT_LE(r.ratio, kDecayBoundConstant);
  EXPECT_NEAR(r.lhs / r.bound_rhs, r.ratio, 1e-15);
}

TEST(Decay, DiagonalViolatesHypothesis) {
  const auto& b = shared_basis(80, 4);
  const std::vector<int> lows{2, 3};
  EXPECT_THROW(verify_offdiagonal_decay(b, 16, 16, lows), PreconditionError);
  EXPECT_THROW(verify_offdiagonal_decay(b, 18, 16, lows), PreconditionError);  // gap 2 < n_(2) = 3
}

TEST(Decay, DoublingTheGapShrinksCorrelations) {
  const auto& b = shared_basis(80, 4);
  const std::vector<int> lows{2, 3};
  Gen gen(31);
  double log_sum = 0.0;
  int count = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n1 = gen.integer(8, 20);
    const int gap = gen.integer(6, 30);
    const double near = verify_offdiagonal_decay(b, n1 + gap, n1, lows).lhs;
    const double far = verify_offdiagonal_decay(b, n1 + 2 * gap, n1, lows).lhs;
    if (near == 0.0 || far == 0.0) continue;
    log_sum += std::log(near / far);
    ++count;
  }
  ASSERT_GT(count, 40);
  EXPECT_GE(std::exp(log_sum / count), 1.5);
}
