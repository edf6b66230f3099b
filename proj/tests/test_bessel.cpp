#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "discnls/bessel.hpp"

using namespace discnls;

namespace {

// Power series summed in long double until the terms stop mattering.
long double j0_series_oracle(long double x) {
  long double term = 1.0L, sum = 1.0L;
  const long double q = x * x / 4.0L;
  for (int k = 1; k < 400; ++k) {
    term *= -q / (static_cast<long double>(k) * k);
    sum += term;
    if (std::fabs(term) < 1e-30L) break;
  }
  return sum;
}

}  // namespace

TEST(Bessel, J0AtZeroIsOne) { EXPECT_EQ(bessel_j0(0.0), 1.0); }

TEST(Bessel, J0AtOneMatchesSeries) {
  EXPECT_NEAR(bessel_j0(1.0), static_cast<double>(j0_series_oracle(1.0L)), 1e-15);
  EXPECT_NEAR(bessel_j0(1.0), 0.7651976865579666, 1e-15);
}

TEST(Bessel, J0VanishesAtFirstZero) { EXPECT_NEAR(bessel_j0(2.404825557695773), 0.0, 1e-12); }

TEST(Bessel, J0AgreesWithBoostAcrossRegimes) {
  // Covers the series, recurrence and asymptotic branches.
  for (double x = 0.0; x <= 400.0; x += 0.173) {
    const double ref = boost::math::cyl_bessel_j(0, x);
    const double got = bessel_j0(x);
    const double tol = 1e-13 * std::max(1.0, std::abs(ref)) + 2e-15;
    ASSERT_NEAR(got, ref, std::max(tol, 1e-13 * std::abs(ref))) << "x = " << x;
  }
}

TEST(Bessel, J1AgreesWithBoost) {
  for (double x = 0.0; x <= 200.0; x += 0.311) {
    ASSERT_NEAR(bessel_j1(x), boost::math::cyl_bessel_j(1, x), 1e-13) << "x = " << x;
  }
}

TEST(Bessel, NegativeArgumentRejected) { EXPECT_THROW(bessel_j0(-1.0), std::exception); }

TEST(Eigenvalue, FirstZero) { EXPECT_NEAR(eigenvalue(1), 2.404825557695773, 1e-12); }

TEST(Eigenvalue, MatchesBoostZeros) {
  for (int n = 1; n <= 300; ++n)
    ASSERT_NEAR(eigenvalue(n), boost::math::cyl_bessel_j_zero(0.0, n), 1e-12 * n) << "n = " << n;
}

TEST(Eigenvalue, HundredthNearMcMahon) {
  EXPECT_LE(std::abs(eigenvalue(100) - std::numbers::pi * 99.75), 1e-3);
}

TEST(Eigenvalue, StrictlyIncreasing) {
  const auto z = eigenvalues(50);
  for (std::size_t i = 1; i < z.size(); ++i) EXPECT_GT(z[i], z[i - 1]);
}

TEST(Eigenvalue, AsymptoticBoundedByOneOverN) {
  double worst = 0.0;
  for (int n = 10; n <= 2000; ++n) worst = std::max(worst, n * std::abs(eigenvalue(n) - std::numbers::pi * (n - 0.25)));
  EXPECT_LE(worst, 0.05);
}

TEST(Eigenvalue, NonPositiveIndexRejected) {
  EXPECT_THROW(eigenvalue(0), std::invalid_argument);
  EXPECT_THROW(eigenvalue(-3), std::invalid_argument);
}

TEST(ModesBelow, DyadicTable) {
  EXPECT_EQ(modes_below(1), 0);
  EXPECT_EQ(modes_below(2), 0);
  EXPECT_EQ(modes_below(4), 1);
  EXPECT_EQ(modes_below(8), 2);
  EXPECT_EQ(modes_below(16), 5);
  EXPECT_EQ(modes_below(32), 10);
  EXPECT_EQ(modes_below(64), 20);
  EXPECT_EQ(modes_below(128), 40);
  EXPECT_EQ(modes_below(256), 81);
}
