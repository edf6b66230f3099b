#pragma once

// Resonance counting: the phase function, pairing patterns, lattice counts
// for eigenvalue differences and sums, divisor counting and base tensors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "discnls/bessel.hpp"
#include "discnls/correlation.hpp"
#include "discnls/errors.hpp"

namespace discnls {

// ---------------------------------------------------------------------------
// Phase function and sign pattern.
//
// For a tuple (n, n_1, ..., n_{2k+1}) the input signs are iota_j = +1 for odd j
// and -1 for even j (even slots are the conjugated factors), and
//   Phi = lambda_n^2 - sum_j iota_j lambda_{n_j}^2.
// For pairing purposes the output slot n carries sign -1: it cancels against
// an odd slot in Phi.

inline int input_sign(int j) { return j % 2 == 1 ? +1 : -1; }

/// Sign of slot `pos` of the full tuple (pos 0 is the output index n).
inline int slot_sign(std::size_t pos) { return pos == 0 ? -1 : input_sign(static_cast<int>(pos)); }

/// Phi from squared eigenvalues: lambda2[i] = lambda_{i+1}^2.
inline double phase_from(std::span<const double> lambda2, std::span<const int> tuple) {
  require(tuple.size() >= 2 && tuple.size() % 2 == 0, "phase: tuple length must be even and >= 2");
  double phi = lambda2[static_cast<std::size_t>(tuple[0] - 1)];
  for (std::size_t j = 1; j < tuple.size(); ++j)
    phi -= input_sign(static_cast<int>(j)) * lambda2[static_cast<std::size_t>(tuple[j] - 1)];
  return phi;
}

/// Squared eigenvalues lambda_1^2 .. lambda_count^2.
inline std::vector<double> squared_eigenvalues(int count) {
  std::vector<double> out = eigenvalues(count);
  for (double& v : out) v *= v;
  return out;
}

inline double phase(std::span<const int> tuple) {
  const int top = *std::max_element(tuple.begin(), tuple.end());
  require(*std::min_element(tuple.begin(), tuple.end()) >= 1, "phase: indices must be >= 1");
  return phase_from(squared_eigenvalues(top), tuple);
}

/// [x]: the greatest integer <= x.
inline std::int64_t bucket(double phi) { return static_cast<std::int64_t>(std::floor(phi)); }

struct PhaseQuery {
  std::vector<int> indices;  // (n, n_1, ..., n_{2k+1})
  std::vector<int> signs;    // iota_1 .. iota_{2k+1}
  double phase = 0.0;
  std::int64_t bucket = 0;
};

inline PhaseQuery make_phase_query(std::span<const int> tuple) {
  PhaseQuery q;
  q.indices.assign(tuple.begin(), tuple.end());
  for (std::size_t j = 1; j < tuple.size(); ++j) q.signs.push_back(input_sign(static_cast<int>(j)));
  q.phase = phase(tuple);
  q.bucket = discnls::bucket(q.phase);
  return q;
}

// ---------------------------------------------------------------------------
// Pairings.

struct PairingInfo {
  bool has_pairing = false;
  bool has_simple_pairing = false;
  bool has_over_pairing = false;
};

/// Classify pairings among the slots of `tuple` with signs `signs`.
/// A pairing is (i, j) with equal values and opposite signs; it is an
/// over-pairing when a third slot shares the value, simple otherwise.
inline PairingInfo classify_pairings(std::span<const int> tuple, std::span<const int> signs) {
  require(tuple.size() == signs.size(), "classify_pairings: tuple and sign lengths differ");
  std::map<int, std::pair<int, int>> counts;  // value -> (#plus, #minus)
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    auto& c = counts[tuple[i]];
    (signs[i] > 0 ? c.first : c.second)++;
  }
  PairingInfo info;
  for (const auto& [value, c] : counts) {
    if (c.first == 0 || c.second == 0) continue;
    info.has_pairing = true;
    if (c.first + c.second == 2)
      info.has_simple_pairing = true;
    else
      info.has_over_pairing = true;
  }
  return info;
}

/// Pairings in a full tuple (n, n_1, ..., n_{2k+1}) under the phase sign pattern.
inline PairingInfo classify_pairings(std::span<const int> tuple) {
  std::vector<int> signs(tuple.size());
  for (std::size_t i = 0; i < tuple.size(); ++i) signs[i] = slot_sign(i);
  return classify_pairings(tuple, signs);
}

// ---------------------------------------------------------------------------
// Pair counts in a box.

/// Square box [n1_lo, n1_lo + R - 1] x [n2_lo, n2_lo + R - 1] of mode indices.
struct IndexBox {
  int side = 1;
  int n1_lo = 1;
  int n2_lo = 1;

  IndexBox swapped() const { return {side, n2_lo, n1_lo}; }
  int n1_hi() const { return n1_lo + side - 1; }
  int n2_hi() const { return n2_lo + side - 1; }
};

namespace detail {

inline void check_box(const IndexBox& box) {
  require(box.side >= 1, "box side R must be >= 1, got " + std::to_string(box.side));
  require(box.n1_lo >= 1 && box.n2_lo >= 1, "box corners must be mode indices >= 1");
}

// Number of v in the sorted list with |v - target| < 1.
inline std::int64_t count_within_one(const std::vector<double>& sorted, double target) {
  const auto lo = std::upper_bound(sorted.begin(), sorted.end(), target - 1.0);
  const auto hi = std::lower_bound(sorted.begin(), sorted.end(), target + 1.0);
  return hi > lo ? hi - lo : 0;
}

}  // namespace detail

/// #{(n1, n2) in box : |lambda_{n1}^2 - lambda_{n2}^2 - m| < 1}, optionally n1 != n2.
inline std::int64_t count_diff_pairs(double m, const IndexBox& box, bool exclude_diagonal) {
  detail::check_box(box);
  const auto l2 = squared_eigenvalues(std::max(box.n1_hi(), box.n2_hi()));
  const std::vector<double> second(l2.begin() + box.n2_lo - 1, l2.begin() + box.n2_hi());
  std::int64_t count = 0;
  for (int n1 = box.n1_lo; n1 <= box.n1_hi(); ++n1) {
    const double a = l2[static_cast<std::size_t>(n1 - 1)];
    count += detail::count_within_one(second, a - m);
    if (exclude_diagonal && n1 >= box.n2_lo && n1 <= box.n2_hi() && std::abs(m) < 1.0) --count;
  }
  return count;
}

/// #{(n1, n2) in box : |lambda_{n1}^2 + lambda_{n2}^2 - m| < 1}.
inline std::int64_t count_sum_pairs(double m, const IndexBox& box) {
  detail::check_box(box);
  const auto l2 = squared_eigenvalues(std::max(box.n1_hi(), box.n2_hi()));
  const std::vector<double> second(l2.begin() + box.n2_lo - 1, l2.begin() + box.n2_hi());
  std::int64_t count = 0;
  for (int n1 = box.n1_lo; n1 <= box.n1_hi(); ++n1)
    count += detail::count_within_one(second, m - l2[static_cast<std::size_t>(n1 - 1)]);
  return count;
}

struct WorstCase {
  double m = 0.0;          // a centre attaining the maximum
  std::int64_t count = 0;  // sup over real m
};

namespace detail {

// Max number of sorted values inside an open interval of width 2, with a
// centre achieving it.
inline WorstCase densest_window(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  WorstCase best;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < values.size(); ++hi) {
    while (values[hi] - values[lo] >= 2.0) ++lo;
    const auto c = static_cast<std::int64_t>(hi - lo + 1);
    if (c > best.count) {
      best.count = c;
      best.m = 0.5 * (values[lo] + values[hi]);
    }
  }
  return best;
}

}  // namespace detail

/// sup_m of count_diff_pairs over the box [1, R]^2 with the diagonal excluded.
/// Exact: every window of width 2 is maximised by one whose closure touches
/// two phase values, which the sliding scan visits.
inline WorstCase worst_case_diff_pairs(int R) {
  require(R >= 1, "worst_case_diff_pairs: R must be >= 1");
  const auto l2 = squared_eigenvalues(R);
  std::vector<double> phases;
  phases.reserve(static_cast<std::size_t>(R) * static_cast<std::size_t>(R - 1));
  for (int a = 0; a < R; ++a)
    for (int b = 0; b < R; ++b)
      if (a != b) phases.push_back(l2[static_cast<std::size_t>(a)] - l2[static_cast<std::size_t>(b)]);
  if (phases.empty()) return {};
  return detail::densest_window(std::move(phases));
}

// ---------------------------------------------------------------------------
// Divisor counting over Z.

/// #{(a, b) in Z^2 : ab = m, |a - a0| <= M, |b - b0| <= N}.
inline std::int64_t divisor_count(std::int64_t m, double a0, double b0, double M, double N) {
  require(m != 0, "divisor_count: m must be nonzero");
  require(M >= 0 && N >= 0, "divisor_count: radii must be nonnegative");
  require(m > std::numeric_limits<std::int64_t>::min(), "divisor_count: m out of range");
  const auto am = static_cast<std::uint64_t>(m < 0 ? -m : m);
  std::int64_t count = 0;
  auto consider = [&](std::int64_t a) {
    const std::int64_t b = m / a;
    if (std::abs(static_cast<double>(a) - a0) <= M && std::abs(static_cast<double>(b) - b0) <= N) ++count;
  };
  for (std::uint64_t d = 1; d * d <= am; ++d) {
    if (am % d != 0) continue;
    const std::uint64_t e = am / d;
    consider(static_cast<std::int64_t>(d));
    consider(-static_cast<std::int64_t>(d));
    if (e != d) {
      consider(static_cast<std::int64_t>(e));
      consider(-static_cast<std::int64_t>(e));
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Base tensors.

/// Restriction applied to a full tuple (n, n_1, ..., n_{2k+1}).
using TupleConstraint = std::function<bool(std::span<const int>)>;

namespace constraints {

inline TupleConstraint none() {
  return [](std::span<const int>) { return true; };
}

/// n differs from the largest odd-slot frequency max_j n_{2j+1}.
inline TupleConstraint n_not_odd_max() {
  return [](std::span<const int> t) {
    int odd_max = 0;
    for (std::size_t j = 1; j < t.size(); j += 2) odd_max = std::max(odd_max, t[j]);
    return t[0] != odd_max;
  };
}

inline TupleConstraint no_simple_pairing() {
  return [](std::span<const int> t) { return !classify_pairings(t).has_simple_pairing; };
}

inline TupleConstraint no_pairing() {
  return [](std::span<const int> t) { return !classify_pairings(t).has_pairing; };
}

/// Membership in an explicit tuple set.
inline TupleConstraint in_set(std::set<std::vector<int>> members) {
  return [members = std::move(members)](std::span<const int> t) {
    return members.count(std::vector<int>(t.begin(), t.end())) != 0;
  };
}

}  // namespace constraints

inline constexpr double kBruteForceCeiling = 32.0;

struct BaseTensorSpec {
  double N = 1.0;                  // bound for the output index n
  std::vector<double> input_bounds;  // N_1 .. N_{2k+1}
  std::int64_t m = 0;
  TupleConstraint constraint = constraints::none();
  double ceiling = kBruteForceCeiling;

  int k() const { return static_cast<int>(input_bounds.size() - 1) / 2; }
};

namespace detail {

inline void check_spec(const BaseTensorSpec& spec) {
  require(spec.input_bounds.size() >= 3 && spec.input_bounds.size() % 2 == 1,
          "base tensor: need 2k+1 input bounds with k >= 1");
  double top = spec.N;
  for (double b : spec.input_bounds) top = std::max(top, b);
  if (top > spec.ceiling)
    throw PreconditionError("base tensor: frequency bound " + std::to_string(top) +
                            " exceeds the brute-force ceiling " + std::to_string(spec.ceiling) +
                            "; use a sampled estimator for larger boxes");
}

// Visit every tuple in E_N x prod E_{N_j} (odometer order, last slot fastest).
template <class F>
void for_each_tuple(const std::vector<int>& extents, F&& f) {
  const std::size_t len = extents.size();
  for (int e : extents)
    if (e == 0) return;
  std::vector<int> t(len, 1);
  while (true) {
    f(std::span<const int>(t));
    std::size_t pos = len;
    while (pos > 0) {
      --pos;
      if (t[pos] < extents[pos]) {
        ++t[pos];
        break;
      }
      t[pos] = 1;
      if (pos == 0) return;
    }
  }
}

inline std::vector<int> tensor_extents(const BaseTensorSpec& spec) {
  std::vector<int> ext{modes_below(spec.N)};
  for (double b : spec.input_bounds) ext.push_back(modes_below(b));
  return ext;
}

}  // namespace detail

/// Number of nonzero entries of T^{b,m} restricted by the constraint.
inline std::int64_t base_tensor_count(const BaseTensorSpec& spec) {
  detail::check_spec(spec);
  const auto ext = detail::tensor_extents(spec);
  const auto l2 = squared_eigenvalues(*std::max_element(ext.begin(), ext.end()));
  std::int64_t count = 0;
  detail::for_each_tuple(ext, [&](std::span<const int> t) {
    if (bucket(phase_from(l2, t)) == spec.m && spec.constraint(t)) ++count;
  });
  return count;
}

/// Hilbert-Schmidt norm of the 0/1 tensor: sqrt of its support size.
inline double base_tensor_hs_norm(const BaseTensorSpec& spec) {
  return std::sqrt(static_cast<double>(base_tensor_count(spec)));
}

/// sup over m of the restricted HS norm; returns (norm, maximising m).
inline std::pair<double, std::int64_t> base_tensor_sup_hs_norm(const BaseTensorSpec& spec) {
  detail::check_spec(spec);
  const auto ext = detail::tensor_extents(spec);
  const auto l2 = squared_eigenvalues(*std::max_element(ext.begin(), ext.end()));
  std::map<std::int64_t, std::int64_t> hist;
  detail::for_each_tuple(ext, [&](std::span<const int> t) {
    if (spec.constraint(t)) ++hist[bucket(phase_from(l2, t))];
  });
  std::pair<double, std::int64_t> best{0.0, 0};
  std::int64_t top = 0;
  for (const auto& [m, c] : hist) {
    if (c > top) {
      top = c;
      best = {std::sqrt(static_cast<double>(c)), m};
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Scaling heuristics.

inline double critical_regularity(int k) {
  require(k >= 1, "critical_regularity: k must be >= 1");
  return 1.0 - 1.0 / k;
}

inline double probabilistic_regularity(int k) {
  require(k >= 1, "probabilistic_regularity: k must be >= 1");
  return 0.5 - 3.0 / (4.0 * k);
}

struct ScalingReport {
  int k = 1;
  double N = 0.0;
  double s_crit = 0.0;
  double s_p = 0.0;
  std::int64_t max_count = 0;      // sup over (m, n) of pairing-free tuples per bucket
  double max_correlation = 0.0;    // sup |c| over the same tuples
  double counting_proxy = 0.0;     // max_count * max_correlation
  double reference = 0.0;          // N^{3k-2}
};

/// Regularity thresholds plus the measured counting quantity at frequency N:
/// sup_{m, n in E_N} #{(n_1..n_{2k+1}) in E_N : [Phi] = m, no pairing} times
/// sup |c| over pairing-free tuples, for comparison with N^{3k-2}.
inline ScalingReport scaling_report(int k, double N, std::int64_t max_tuples = 20'000'000) {
  ScalingReport r;
  r.k = k;
  r.N = N;
  r.s_crit = critical_regularity(k);
  r.s_p = probabilistic_regularity(k);
  r.reference = std::pow(N, 3.0 * k - 2.0);
  const int modes = modes_below(N);
  if (modes == 0) return r;
  const double total = std::pow(static_cast<double>(modes), 2.0 * k + 2.0);
  if (total > static_cast<double>(max_tuples))
    throw PreconditionError("scaling_report: " + std::to_string(static_cast<std::int64_t>(total)) +
                            " tuples exceed the enumeration limit; lower N");
  const SpectralBasis basis = build_basis(modes, 2 * k + 2);
  const auto l2 = squared_eigenvalues(modes);
  const std::vector<int> ext(static_cast<std::size_t>(2 * k + 2), modes);
  std::map<std::pair<int, std::int64_t>, std::int64_t> hist;  // (n, m) -> count
  const Eigen::MatrixXd& v = basis.values();
  detail::for_each_tuple(ext, [&](std::span<const int> t) {
    if (classify_pairings(t).has_pairing) return;
    ++hist[{t[0], bucket(phase_from(l2, t))}];
    double c = 0.0;
    for (int i = 0; i < basis.node_count(); ++i) {
      double p = basis.weights()(i);
      for (int n : t) p *= v(n - 1, i);
      c += p;
    }
    r.max_correlation = std::max(r.max_correlation, std::abs(c));
  });
  for (const auto& [key, c] : hist) r.max_count = std::max(r.max_count, c);
  r.counting_proxy = static_cast<double>(r.max_count) * r.max_correlation;
  return r;
}

}  // namespace discnls
