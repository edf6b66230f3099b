#pragma once

// Gaussian free field draws, rejection sampling of the truncated Gibbs
// measure, and the Monte Carlo invariance test under the truncated flow.
//
// Reference measure: u = sum_{n in E_N} g_n / (pi lambda_n) e_n with g_n
// independent standard complex Gaussians, so the coefficient law has density
// proportional to exp(-pi^2 sum lambda_n^2 |c_n|^2) = exp(-2 pi^2 K(u)),
// K = 1/2 int |grad u|^2. The weighted measure exp(-beta V(u)) dmu with
// V = (1/(2k+2)) int |u|^{2k+2} is a function of the truncated Hamiltonian
// K + V (hence invariant under the truncated flow) exactly when
// beta = 2 pi^2, which is the default coupling. beta = 1 is available.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "discnls/errors.hpp"
#include "discnls/parallel.hpp"
#include "discnls/random.hpp"
#include "discnls/spectral_basis.hpp"
#include "discnls/truncated_flow.hpp"

namespace discnls {

inline constexpr double kInvariantCoupling = 2.0 * std::numbers::pi * std::numbers::pi;

struct GaussianDraw {
  std::uint64_t seed = 0;
  SpectralField field;
};

/// Coefficient of mode n for master seed `seed`: g_n / (pi lambda_n), with g_n
/// drawn from a stream keyed by (seed, n) only, so truncations at different N
/// share their common modes.
inline Complex gff_coefficient(std::uint64_t seed, int n, double lambda) {
  Engine eng(derive_seed(seed, {static_cast<std::uint64_t>(n)}));
  return complex_gaussian(eng) / (std::numbers::pi * lambda);
}

/// The standard complex Gaussian g_n behind gff_coefficient.
inline Complex gff_gaussian(std::uint64_t seed, int n) {
  Engine eng(derive_seed(seed, {static_cast<std::uint64_t>(n)}));
  return complex_gaussian(eng);
}

/// Draw of mu_N on the modes E_N.
inline GaussianDraw sample_gff(const SpectralBasis& basis, double N, int k, std::uint64_t seed) {
  const int m = modes_below(N);
  require(m <= basis.mode_count(), "sample_gff: E_N exceeds the basis mode range");
  GaussianDraw d{seed, zero_field(m, k, N)};
  for (int n = 1; n <= m; ++n) d.field.coeffs(n - 1) = gff_coefficient(seed, n, basis.lambda(n));
  return d;
}

struct GibbsOptions {
  double coupling = kInvariantCoupling;  // beta in exp(-beta V)
  long attempt_cap = 100000;
  bool zero_potential = false;  // test hook: V forced to 0
};

struct GibbsSample {
  SpectralField field;
  double potential = 0.0;  // V = (1/(2k+2)) int |u|^{2k+2}
  bool accepted = false;
  long attempts = 0;
};

/// Exact sampling of exp(-beta V) dmu_N / Z by rejection from mu_N.
/// Attempt a uses the GFF stream derive_seed(seed, a) and an independent
/// uniform stream for the acceptance decision.
inline GibbsSample sample_gibbs(const SpectralBasis& basis, double N, int k, std::uint64_t seed,
                                const GibbsOptions& opt = {}) {
  require(k >= 1, "sample_gibbs: k must be >= 1");
  check_flow_basis(basis, k, modes_below(N));
  for (long a = 0; a < opt.attempt_cap; ++a) {
    GaussianDraw d = sample_gff(basis, N, k, derive_seed(seed, {static_cast<std::uint64_t>(a)}));
    const double V = opt.zero_potential ? 0.0 : potential_energy(basis, d.field.coeffs, k);
    Engine eng(derive_seed(seed, {static_cast<std::uint64_t>(a), 0xacce97ULL}));
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(eng);
    if (u < std::exp(-opt.coupling * V)) return GibbsSample{std::move(d.field), V, true, a + 1};
  }
  std::ostringstream msg;
  msg << "sample_gibbs: no acceptance after " << opt.attempt_cap << " attempts (N = " << N << ", k = " << k
      << ", coupling = " << opt.coupling << "); use the importance-sampling estimator instead";
  throw SamplingError(msg.str());
}

/// Self-normalised importance sampling of E_rho[f] with proposals from mu_N.
struct ImportanceEstimate {
  double mean = 0.0;
  double effective_sample_size = 0.0;
  double mean_weight = 0.0;  // estimate of E_mu[exp(-beta V)]
};

inline ImportanceEstimate importance_estimate(const SpectralBasis& basis, double N, int k, std::uint64_t seed,
                                              long n_samples,
                                              const std::function<double(const Eigen::VectorXcd&)>& f,
                                              double coupling = kInvariantCoupling, int workers = 1) {
  require(n_samples >= 1, "importance_estimate: need at least one sample");
  struct Term { double w, fw; };
  const auto terms = parallel_map<Term>(static_cast<std::size_t>(n_samples), workers, [&](std::size_t i) {
    const GaussianDraw d = sample_gff(basis, N, k, derive_seed(seed, {i}));
    const double w = std::exp(-coupling * potential_energy(basis, d.field.coeffs, k));
    return Term{w, w * f(d.field.coeffs)};
  });
  double sw = 0.0, sw2 = 0.0, sfw = 0.0;
  for (const Term& t : terms) {
    sw += t.w;
    sw2 += t.w * t.w;
    sfw += t.fw;
  }
  return {sfw / sw, sw * sw / sw2, sw / static_cast<double>(n_samples)};
}

// ---------------------------------------------------------------------------
// Observables.

struct Observable {
  std::string name;
  std::function<double(const SpectralBasis&, const Eigen::VectorXcd&)> eval;  // physical coefficients
};

/// Built-ins: "mass", "potential", "abs2:n", "re:n", "im:n".
inline Observable make_observable(const std::string& spec, int k) {
  if (spec == "mass") return {spec, [](const SpectralBasis&, const Eigen::VectorXcd& c) { return mass(c); }};
  if (spec == "potential")
    return {spec, [k](const SpectralBasis& b, const Eigen::VectorXcd& c) { return potential_energy(b, c, k); }};
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string kind = spec.substr(0, colon);
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(spec.substr(colon + 1), &used);
      if (used != spec.size() - colon - 1) n = 0;
    } catch (const std::exception&) {
      n = 0;
    }
    if (n >= 1) {
      auto coeff = [n](const Eigen::VectorXcd& c) { return n <= c.size() ? c(n - 1) : Complex(0.0); };
      if (kind == "abs2") return {spec, [coeff](const SpectralBasis&, const Eigen::VectorXcd& c) { return std::norm(coeff(c)); }};
      if (kind == "re") return {spec, [coeff](const SpectralBasis&, const Eigen::VectorXcd& c) { return coeff(c).real(); }};
      if (kind == "im") return {spec, [coeff](const SpectralBasis&, const Eigen::VectorXcd& c) { return coeff(c).imag(); }};
    }
  }
  throw PreconditionError("unknown observable '" + spec + "' (expected mass, potential, abs2:n, re:n or im:n)");
}

struct ObservableStat {
  std::string name;
  double mean0 = 0.0;
  double meanT = 0.0;
  double stderr_pooled = 0.0;
  double z = 0.0;
};

struct InvarianceOptions {
  GibbsOptions gibbs;
  FlowConfig flow;  // k and N are overwritten by the test arguments
  int workers = 1;
};

/// Draw n_samples from the truncated Gibbs measure, evolve each to time t and
/// compare the ensemble means of every observable at 0 and t.
/// z = (mean0 - meanT) / sqrt(var0/n + varT/n).
inline std::vector<ObservableStat> invariance_test(const SpectralBasis& basis, double N, int k, double t,
                                                   long n_samples, const std::vector<Observable>& observables,
                                                   std::uint64_t seed, const InvarianceOptions& opt = {}) {
  if (n_samples < 100)
    throw PreconditionError("invariance_test: n_samples = " + std::to_string(n_samples) +
                            " is below 100; the test would be underpowered");
  FlowConfig flow = opt.flow;
  flow.k = k;
  flow.N = N;
  flow.picture = Picture::physical;
  const std::size_t nobs = observables.size();
  using Row = std::vector<double>;  // [obs at 0..., obs at t...]
  const auto rows = parallel_map<Row>(static_cast<std::size_t>(n_samples), opt.workers, [&](std::size_t i) {
    const GibbsSample s = sample_gibbs(basis, N, k, derive_seed(seed, {i}), opt.gibbs);
    const Eigen::VectorXcd c0 = s.field.coeffs;
    const Eigen::VectorXcd cT = t == 0.0 ? c0 : flow_map(basis, s.field, t, flow).coeffs;
    Row r(2 * nobs);
    for (std::size_t o = 0; o < nobs; ++o) {
      r[o] = observables[o].eval(basis, c0);
      r[nobs + o] = observables[o].eval(basis, cT);
    }
    return r;
  });
  const auto n = static_cast<double>(n_samples);
  std::vector<ObservableStat> out;
  for (std::size_t o = 0; o < nobs; ++o) {
    double s0 = 0.0, sT = 0.0;
    for (const Row& r : rows) {
      s0 += r[o];
      sT += r[nobs + o];
    }
    const double m0 = s0 / n, mT = sT / n;
    double v0 = 0.0, vT = 0.0;
    for (const Row& r : rows) {
      v0 += (r[o] - m0) * (r[o] - m0);
      vT += (r[nobs + o] - mT) * (r[nobs + o] - mT);
    }
    v0 /= n - 1.0;
    vT /= n - 1.0;
    ObservableStat st{observables[o].name, m0, mT, std::sqrt(v0 / n + vT / n), 0.0};
    const double diff = m0 - mT;
    st.z = diff == 0.0 ? 0.0 : diff / st.stderr_pooled;
    out.push_back(st);
  }
  return out;
}

}  // namespace discnls
