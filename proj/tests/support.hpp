#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <utility>
#include <vector>

#include "discnls/bessel.hpp"
#include "discnls/gibbs.hpp"
#include "discnls/random.hpp"
#include "discnls/spectral_basis.hpp"

namespace testing_support {

using discnls::Complex;
using discnls::SpectralBasis;
using discnls::SpectralField;

// Bases are expensive to build; tests share them per (modes, order).
inline const SpectralBasis& shared_basis(int modes, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<SpectralBasis>> pool;
  std::lock_guard lock(mu);
  auto& slot = pool[{modes, order}];
  if (!slot) slot = std::make_unique<SpectralBasis>(discnls::build_basis(modes, order));
  return *slot;
}

inline SpectralField gff(const SpectralBasis& basis, double N, int k, std::uint64_t seed) {
  return discnls::sample_gff(basis, N, k, seed).field;
}

// Small generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  bool coin() { return integer(0, 1) == 1; }
  Complex complex(double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    return {nd(eng_), nd(eng_)};
  }

  std::vector<int> tuple(std::size_t len, int hi, int lo = 1) {
    std::vector<int> t(len);
    for (int& v : t) v = integer(lo, hi);
    return t;
  }

  // Tuple drawn from a small alphabet so that repeated indices are common.
  std::vector<int> clumpy_tuple(std::size_t len, int hi) {
    const int a = integer(1, hi), b = integer(1, hi), c = integer(1, hi);
    std::vector<int> t(len);
    for (int& v : t) {
      const int pick = integer(0, 3);
      v = pick == 0 ? a : pick == 1 ? b : pick == 2 ? c : integer(1, hi);
    }
    return t;
  }

  SpectralField field(int modes, int k, double N, double scale = 1.0) {
    SpectralField f = discnls::zero_field(modes, k, N);
    for (int n = 0; n < modes; ++n) f.coeffs(n) = complex(scale);
    return f;
  }

  std::vector<int> permutation(std::vector<int> v) {
    std::shuffle(v.begin(), v.end(), eng_);
    return v;
  }

 private:
  std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// Brute-force counting oracles. Indices run high to low and the eigenvalues
// come from a separate call so the oracle shares no loop with the library.

inline std::vector<double> oracle_lambda2(int R) {
  std::vector<double> l2(static_cast<std::size_t>(R) + 1, 0.0);
  for (int n = R; n >= 1; --n) {
    const double l = discnls::eigenvalue(n);
    l2[static_cast<std::size_t>(n)] = l * l;
  }
  return l2;
}

inline std::int64_t oracle_diff_pairs(double m, int R, int lo1, int lo2, bool exclude_diagonal) {
  const auto l2 = oracle_lambda2(std::max(lo1, lo2) + R - 1);
  std::int64_t c = 0;
  for (int b = lo2 + R - 1; b >= lo2; --b)
    for (int a = lo1 + R - 1; a >= lo1; --a) {
      if (exclude_diagonal && a == b) continue;
      if (std::abs(l2[static_cast<std::size_t>(a)] - l2[static_cast<std::size_t>(b)] - m) < 1.0) ++c;
    }
  return c;
}

inline std::int64_t oracle_sum_pairs(double m, int R, int lo1, int lo2) {
  const auto l2 = oracle_lambda2(std::max(lo1, lo2) + R - 1);
  std::int64_t c = 0;
  for (int b = lo2 + R - 1; b >= lo2; --b)
    for (int a = lo1 + R - 1; a >= lo1; --a)
      if (std::abs(l2[static_cast<std::size_t>(a)] + l2[static_cast<std::size_t>(b)] - m) < 1.0) ++c;
  return c;
}

inline std::int64_t oracle_divisors(std::int64_t m, std::int64_t a0, std::int64_t b0, std::int64_t M, std::int64_t N) {
  std::int64_t c = 0;
  for (std::int64_t a = a0 - M; a <= a0 + M; ++a) {
    if (a == 0 || m % a != 0) continue;
    const std::int64_t b = m / a;
    if (std::abs(b - b0) <= N) ++c;
  }
  return c;
}

}  // namespace testing_support
