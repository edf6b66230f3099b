#pragma once

// Radial Dirichlet eigenbasis of the unit disc.
//
// e_n(r) = J0(lambda_n r) / ||J0(lambda_n .)||_{L^2(D)}, with lambda_n the n-th
// zero of J0. Coefficients use the orthonormal convention
// c_n = int_D f e_n dx, so that f = sum_n c_n e_n and ||f||_2^2 = sum |c_n|^2.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "discnls/bessel.hpp"
#include "discnls/errors.hpp"
#include "discnls/quadrature.hpp"

namespace discnls {

using Complex = std::complex<double>;

struct EigenMode {
  int index = 0;            // n >= 1
  double lambda = 0.0;      // n-th zero of J0
  double j0_l2_norm = 0.0;  // ||J0(lambda_n .)||_{L^2(D)}
};

class SpectralBasis {
 public:
  SpectralBasis() = default;

  /// Assemble from precomputed pieces (used by the cache loader).
  SpectralBasis(std::vector<EigenMode> modes, QuadratureRule quad, Eigen::MatrixXd values,
                int product_order)
      : modes_(std::move(modes)),
        quad_(std::move(quad)),
        values_(std::move(values)),
        product_order_(product_order) {
    weights_ = Eigen::Map<const Eigen::VectorXd>(quad_.weights.data(),
                                                 static_cast<Eigen::Index>(quad_.weights.size()));
  }

  int mode_count() const { return static_cast<int>(modes_.size()); }
  int node_count() const { return quad_.node_count(); }
  int product_order() const { return product_order_; }

  const std::vector<EigenMode>& modes() const { return modes_; }
  const EigenMode& mode(int n) const { return modes_.at(static_cast<std::size_t>(n - 1)); }
  double lambda(int n) const { return mode(n).lambda; }

  const QuadratureRule& quad() const { return quad_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// e_n(r_i), one row per mode.
  const Eigen::MatrixXd& values() const { return values_; }

  /// e_n at an arbitrary radius in [0, 1]; exactly 0 at r = 1.
  double eigenfunction(int n, double r) const {
    require(r >= 0.0 && r <= 1.0, "eigenfunction: radius must lie in [0, 1]");
    if (r == 1.0) return 0.0;
    const EigenMode& m = mode(n);
    return bessel_j0(m.lambda * r) / m.j0_l2_norm;
  }

  void check_mode(int n, const char* who) const {
    if (n < 1 || n > mode_count())
      throw PreconditionError(std::string(who) + ": mode index " + std::to_string(n) +
                              " outside basis range [1, " + std::to_string(mode_count()) + "]");
  }

 private:
  std::vector<EigenMode> modes_;
  QuadratureRule quad_;
  Eigen::MatrixXd values_;
  Eigen::VectorXd weights_;
  int product_order_ = 0;
};

/// Build a basis of `mode_count` modes whose quadrature resolves products of
/// up to `product_order` eigenfunctions.
inline SpectralBasis build_basis(int mode_count, int product_order) {
  require(mode_count >= 1, "build_basis: mode_count must be >= 1, got " + std::to_string(mode_count));
  require(product_order >= 2,
          "build_basis: product_order must be >= 2, got " + std::to_string(product_order));
  QuadratureRule quad = disc_quadrature(quadrature_size(mode_count, product_order));
  const int q = quad.node_count();

  std::vector<EigenMode> modes(static_cast<std::size_t>(mode_count));
  Eigen::MatrixXd values(mode_count, q);
  for (int n = 1; n <= mode_count; ++n) {
    const double lam = eigenvalue(n);
    double norm2 = 0.0;
    for (int i = 0; i < q; ++i) {
      const double v = bessel_j0(lam * quad.nodes[static_cast<std::size_t>(i)]);
      values(n - 1, i) = v;
      norm2 += quad.weights[static_cast<std::size_t>(i)] * v * v;
    }
    const double norm = std::sqrt(norm2);
    values.row(n - 1) /= norm;
    modes[static_cast<std::size_t>(n - 1)] = EigenMode{n, lam, norm};
  }
  return SpectralBasis(std::move(modes), std::move(quad), std::move(values), product_order);
}

/// Complex coefficient vector; coeffs[i] belongs to mode i + 1.
struct SpectralField {
  Eigen::VectorXcd coeffs;
  int k = 1;                    // nonlinearity degree
  double support_bound = 0.0;   // dyadic N; coefficients with lambda_n > N vanish

  int mode_count() const { return static_cast<int>(coeffs.size()); }
  Complex operator()(int n) const { return coeffs(n - 1); }
};

inline SpectralField zero_field(int mode_count, int k, double support_bound) {
  return SpectralField{Eigen::VectorXcd::Zero(mode_count), k, support_bound};
}

/// Copy of `field` resized to `mode_count` modes (zero padded or truncated).
inline SpectralField resized(const SpectralField& field, int mode_count) {
  SpectralField out = zero_field(mode_count, field.k, field.support_bound);
  const int m = std::min(mode_count, field.mode_count());
  out.coeffs.head(m) = field.coeffs.head(m);
  return out;
}

/// P_{<=N}: keep the modes with lambda_n <= N, zero the rest.
inline SpectralField project_below(const SpectralBasis& basis, const SpectralField& field,
                                   double frequency_bound) {
  SpectralField out = field;
  for (int n = 1; n <= out.mode_count(); ++n) {
    const double lam = n <= basis.mode_count() ? basis.lambda(n) : eigenvalue(n);
    if (lam > frequency_bound) out.coeffs(n - 1) = 0.0;
  }
  out.support_bound = std::min(out.support_bound, frequency_bound);
  return out;
}

/// (sum lambda_n^{2s} |c_n|^2)^{1/2}
inline double hs_norm(const SpectralBasis& basis, const SpectralField& field, double s) {
  require(field.mode_count() <= basis.mode_count(), "hs_norm: field exceeds basis range");
  double acc = 0.0;
  for (int n = 1; n <= field.mode_count(); ++n)
    acc += std::pow(basis.lambda(n), 2.0 * s) * std::norm(field.coeffs(n - 1));
  return std::sqrt(acc);
}

/// Grid values u(r_i) = sum_n c_n e_n(r_i).
inline Eigen::VectorXcd synthesize(const SpectralBasis& basis, const Eigen::VectorXcd& coeffs) {
  const auto m = coeffs.size();
  require(m <= basis.mode_count(), "synthesize: field has " + std::to_string(m) +
                                       " modes but basis only " + std::to_string(basis.mode_count()));
  Eigen::VectorXcd grid(basis.node_count());
  grid.real().noalias() = basis.values().topRows(m).transpose() * coeffs.real();
  grid.imag().noalias() = basis.values().topRows(m).transpose() * coeffs.imag();
  return grid;
}

inline Eigen::VectorXcd synthesize(const SpectralBasis& basis, const SpectralField& field) {
  return synthesize(basis, field.coeffs);
}

/// c_n = sum_i w_i u(r_i) e_n(r_i) for n = 1..mode_count.
inline Eigen::VectorXcd analyze_coeffs(const SpectralBasis& basis, const Eigen::VectorXcd& grid,
                                       int mode_count) {
  if (grid.size() != basis.node_count())
    throw PreconditionError("analyze: grid has " + std::to_string(grid.size()) +
                            " values but the quadrature has " + std::to_string(basis.node_count()) +
                            " nodes");
  require(mode_count >= 0 && mode_count <= basis.mode_count(), "analyze: mode_count outside basis");
  const Eigen::VectorXcd weighted = grid.cwiseProduct(basis.weights().cast<Complex>());
  Eigen::VectorXcd out(mode_count);
  out.real().noalias() = basis.values().topRows(mode_count) * weighted.real();
  out.imag().noalias() = basis.values().topRows(mode_count) * weighted.imag();
  return out;
}

inline SpectralField analyze(const SpectralBasis& basis, const Eigen::VectorXcd& grid, int k = 1,
                             double support_bound = std::numeric_limits<double>::infinity()) {
  return SpectralField{analyze_coeffs(basis, grid, basis.mode_count()), k, support_bound};
}

/// u(r) = sum_n c_n e_n(r) at an arbitrary radius.
inline Complex field_value_at(const SpectralBasis& basis, const Eigen::VectorXcd& coeffs, double r) {
  Complex acc = 0.0;
  for (int n = 1; n <= coeffs.size(); ++n) acc += coeffs(n - 1) * basis.eigenfunction(n, r);
  return acc;
}

namespace detail {

// Golden-section refinement of max |f| on [lo, hi].
template <class F>
double refine_abs_max(F&& f, double lo, double hi, double start_value) {
  constexpr double g = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = std::abs(f(c)), fd = std::abs(f(d));
  for (int it = 0; it < 60 && b - a > 1e-14; ++it) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a); fc = std::abs(f(c));
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a); fd = std::abs(f(d));
    }
  }
  return std::max({start_value, fc, fd});
}

// Sup norm of a radial function known on the quadrature grid and evaluable
// everywhere: grid maximum, the centre r = 0, then a refinement pass around
// the observed argmax.
template <class F>
double sup_norm(const QuadratureRule& quad, const Eigen::VectorXcd& grid, F&& eval) {
  Eigen::Index arg = 0;
  double best = grid.cwiseAbs().maxCoeff(&arg);
  best = std::max(best, std::abs(eval(0.0)));
  const auto i = static_cast<std::size_t>(arg);
  const double lo = i == 0 ? 0.0 : quad.nodes[i - 1];
  const double hi = i + 1 < quad.nodes.size() ? quad.nodes[i + 1] : 1.0;
  return refine_abs_max(eval, lo, hi, best);
}

}  // namespace detail

/// ||u||_{L^p(D)} of a grid function, p in [1, inf]; p = inf refines near the argmax.
inline double grid_lp_norm(const SpectralBasis& basis, const Eigen::VectorXcd& coeffs,
                           const Eigen::VectorXcd& grid, double p) {
  require(p >= 1.0, "lp norm: p must be >= 1");
  if (std::isinf(p)) {
    return detail::sup_norm(basis.quad(), grid,
                            [&](double r) { return field_value_at(basis, coeffs, r); });
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    acc += basis.weights()(i) * std::pow(std::abs(grid(i)), p);
  return std::pow(acc, 1.0 / p);
}

/// ||e_n||_{L^p(D)} by quadrature (sup over the disc for p = inf).
inline double lp_norm(const SpectralBasis& basis, int n, double p) {
  basis.check_mode(n, "lp_norm");
  require(p >= 1.0, "lp_norm: p must be >= 1");
  const auto row = basis.values().row(n - 1);
  if (std::isinf(p)) {
    Eigen::VectorXcd grid = row.transpose().cast<Complex>();
    return detail::sup_norm(basis.quad(), grid, [&](double r) { return basis.eigenfunction(n, r); });
  }
  double acc = 0.0;
  for (int i = 0; i < basis.node_count(); ++i) acc += basis.weights()(i) * std::pow(std::abs(row(i)), p);
  return std::pow(acc, 1.0 / p);
}

/// Gram matrix <e_n, e_m> under the basis quadrature.
inline Eigen::MatrixXd gram_matrix(const SpectralBasis& basis) {
  return basis.values() * basis.weights().asDiagonal() * basis.values().transpose();
}

}  // namespace discnls
