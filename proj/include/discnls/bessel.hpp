#pragma once

// Bessel functions J0, J1 of real nonnegative argument and the zeros of J0.
//
// Evaluation is split into three regimes, all carried out in long double:
//   x < 8        power series
//   8 <= x < 25  Miller backward recurrence normalised by J0 + 2 sum J_2k = 1
//   x >= 25      Hankel asymptotic expansion
// which keeps the relative error below 1e-13 away from the zeros (absolute
// error near them) over the whole half line.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace discnls {

namespace detail {

using real_ext = long double;

inline constexpr real_ext kPiExt = 3.141592653589793238462643383279502884L;

inline std::pair<real_ext, real_ext> j0_j1_series(real_ext x) {
  const real_ext q = -0.25L * x * x;
  real_ext t0 = 1.0L, s0 = 1.0L;
  real_ext t1 = 1.0L, s1 = 1.0L;
  for (int k = 1; k < 200; ++k) {
    t0 *= q / (static_cast<real_ext>(k) * k);
    t1 *= q / (static_cast<real_ext>(k) * (k + 1));
    s0 += t0;
    s1 += t1;
    if (std::fabs(t0) < 1e-22L && std::fabs(t1) < 1e-22L) break;
  }
  return {s0, 0.5L * x * s1};
}

inline std::pair<real_ext, real_ext> j0_j1_miller(real_ext x) {
  const int ix = static_cast<int>(x);
  int m = 2 * ((ix + static_cast<int>(std::sqrt(160.0L * x))) / 2) + 20;
  real_ext next = 0.0L;   // J_{j+1}
  real_ext cur = 1e-30L;  // J_j
  real_ext norm = 0.0L;
  real_ext j1 = 0.0L;
  for (int j = m; j > 0; --j) {
    const real_ext prev = (2.0L * j / x) * cur - next;  // J_{j-1}
    next = cur;
    cur = prev;
    if (j - 1 == 1) j1 = cur;
    if ((j - 1) % 2 == 0 && j - 1 > 0) norm += 2.0L * cur;
  }
  norm += cur;  // J_0 term
  return {cur / norm, j1 / norm};
}

// Hankel expansion J_nu(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi),
// chi = x - (2 nu + 1) pi / 4.
inline real_ext j_hankel(int nu, real_ext x) {
  const real_ext mu = 4.0L * nu * nu;
  real_ext term = 1.0L;
  real_ext p = 1.0L, q = 0.0L;
  real_ext last = 1.0L;
  for (int k = 1; k < 400; ++k) {
    const real_ext odd = 2.0L * k - 1.0L;
    term *= (mu - odd * odd) / (8.0L * k * x);
    const real_ext mag = std::fabs(term);
    if (mag > last) break;  // asymptotic series started to diverge
    last = mag;
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      default: p += term; break;
    }
    if (mag < 1e-22L) break;
  }
  const real_ext chi = x - (2.0L * nu + 1.0L) * kPiExt / 4.0L;
  return std::sqrt(2.0L / (kPiExt * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

inline std::pair<real_ext, real_ext> j0_j1_ext(real_ext x) {
  if (x < 8.0L) return j0_j1_series(x);
  if (x < 25.0L) return j0_j1_miller(x);
  return {j_hankel(0, x), j_hankel(1, x)};
}

inline void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0))
    throw std::domain_error(std::string(what) + ": argument must be >= 0, got " +
                            std::to_string(x));
}

}  // namespace detail

/// J0(x) for x >= 0.
inline double bessel_j0(double x) {
  detail::require_nonnegative(x, "bessel_j0");
  return static_cast<double>(detail::j0_j1_ext(x).first);
}

/// J1(x) for x >= 0. Used for the Newton step J0' = -J1.
inline double bessel_j1(double x) {
  detail::require_nonnegative(x, "bessel_j1");
  return static_cast<double>(detail::j0_j1_ext(x).second);
}

/// The n-th positive zero of J0 (n >= 1).
///
/// McMahon's leading terms give the starting point; Newton with J0' = -J1
/// converges quadratically since every zero is simple.
inline double eigenvalue(int n) {
  if (n < 1) throw std::invalid_argument("eigenvalue: mode index must be >= 1, got " + std::to_string(n));
  using detail::real_ext;
  const real_ext beta = detail::kPiExt * (n - 0.25L);
  real_ext x = beta + 1.0L / (8.0L * beta);
  for (int it = 0; it < 50; ++it) {
    const auto [j0, j1] = detail::j0_j1_ext(x);
    const real_ext step = j0 / j1;
    x += step;
    if (std::fabs(step) < 1e-17L * x) break;
  }
  return static_cast<double>(x);
}

/// lambda_1 .. lambda_count.
inline std::vector<double> eigenvalues(int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count > 0 ? count : 0));
  for (int n = 1; n <= count; ++n) out.push_back(eigenvalue(n));
  return out;
}

/// |E_N| = #{n : lambda_n <= N}.
inline int modes_below(double frequency_bound) {
  // lambda_n > pi (n - 1/4) for every n, so the scan terminates quickly.
  int n = 0;
  while (eigenvalue(n + 1) <= frequency_bound) ++n;
  return n;
}

}  // namespace discnls
