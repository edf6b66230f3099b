#pragma once

// Random resonant operator.
//
// For a high block n in E_N \ E_{N/2} and a low level L, the resonant
// interaction with u_L rotates each coefficient by
//   H_n(t) = exp(i Theta_n(t)),  Theta_n(t) = -(k+1) int_0^t <e_n^2, |u_L(t')|^{2k}> dt'.
// psi_{N,L} applies H to the block of the initial data; y_N = v_N - v_{N/2}
// and z_N = y_N - psi_{N,L_N}, all in the interaction picture.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "discnls/correlation.hpp"
#include "discnls/errors.hpp"
#include "discnls/gibbs.hpp"
#include "discnls/parallel.hpp"
#include "discnls/spectral_basis.hpp"
#include "discnls/stats.hpp"
#include "discnls/truncated_flow.hpp"

namespace discnls {

inline constexpr double kDefaultKappa = 0.1;

inline bool is_dyadic(double N) {
  if (!(N >= 1.0)) return false;
  int e = 0;
  return std::frexp(N, &e) == 0.5;
}

/// L_N = max{L dyadic : L < N^{1 - kappa}} (1 when no L >= 2 qualifies).
inline double low_level(double N, double kappa = kDefaultKappa) {
  require(kappa > 0.0 && kappa < 1.0, "low_level: kappa must lie in (0, 1)");
  const double cap = std::pow(N, 1.0 - kappa);
  double L = 1.0;
  while (2.0 * L < cap) L *= 2.0;
  return L;
}

/// Mode indices of the dyadic block E_N \ E_{N/2}.
inline std::vector<int> block_modes(double N) {
  std::vector<int> out;
  for (int n = modes_below(N / 2.0) + 1; n <= modes_below(N); ++n) out.push_back(n);
  return out;
}

// ---------------------------------------------------------------------------
// Time quadrature.

inline double uniform_spacing(const std::vector<double>& times) {
  require(times.size() >= 2, "time grid needs at least two samples");
  const double h = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs((times[i] - times[i - 1]) - h) > 1e-9 * std::abs(h))
      throw PreconditionError("non-uniform time grid: spacing " + std::to_string(times[i] - times[i - 1]) +
                              " at sample " + std::to_string(i) + " differs from " + std::to_string(h));
  return h;
}

/// F(t_j) = int_0^{t_j} f for uniformly sampled f: composite Simpson at even j,
/// Simpson plus a closing 3/8 panel at odd j >= 3, and a quadratic fit on the
/// first panel at j = 1.
inline std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> F(n, 0.0);
  if (n < 2) return F;
  if (n == 2) {
    F[1] = 0.5 * h * (f[0] + f[1]);
    return F;
  }
  F[1] = h * (5.0 * f[0] + 8.0 * f[1] - f[2]) / 12.0;
  for (std::size_t j = 2; j < n; j += 2) F[j] = F[j - 2] + h / 3.0 * (f[j - 2] + 4.0 * f[j - 1] + f[j]);
  for (std::size_t j = 3; j < n; j += 2)
    F[j] = F[j - 3] + 3.0 * h / 8.0 * (f[j - 3] + 3.0 * f[j - 2] + 3.0 * f[j - 1] + f[j]);
  return F;
}

// ---------------------------------------------------------------------------
// Phases.

struct RROPhases {
  double N = 0.0;
  double L = 0.0;
  double kappa = kDefaultKappa;
  int k = 1;
  std::vector<int> modes;      // block E_N \ E_{N/2}
  std::vector<double> times;
  Eigen::MatrixXd theta;       // modes x times

  Complex H(std::size_t mode_pos, std::size_t time_pos) const {
    return std::polar(1.0, theta(static_cast<Eigen::Index>(mode_pos), static_cast<Eigen::Index>(time_pos)));
  }
};

/// <e_n^2, |u|^{2k}> for each n in `modes`, from physical coefficients of u.
inline Eigen::VectorXd resonant_weights(const SpectralBasis& basis, const Eigen::VectorXcd& c, int k,
                                        const std::vector<int>& modes) {
  Eigen::VectorXd density(basis.node_count());
  if (c.size() == 0) {
    density.setZero();
  } else {
    const Eigen::VectorXcd grid = synthesize(basis, c);
    for (Eigen::Index i = 0; i < grid.size(); ++i) density(i) = basis.weights()(i) * std::pow(std::norm(grid(i)), k);
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const auto row = basis.values().row(modes[j] - 1);
    out(static_cast<Eigen::Index>(j)) = (row.array().square() * density.transpose().array()).sum();
  }
  return out;
}

/// Gamma_n = -i (k+1) <e_n^2, |u|^{2k}> evaluated on the quadrature grid.
inline Complex gamma_physical(const SpectralBasis& basis, const Eigen::VectorXcd& c, int k, int n) {
  return Complex(0.0, -(k + 1.0)) * resonant_weights(basis, c, k, {n})(0);
}

/// The same quantity from the correlation tensor:
/// -i (k+1) sum_{n_2..n_{2k+1}} c(n, n, n_2, ..., n_{2k+1}) prod_j u_{n_j}^{iota_j},
/// with even j conjugated. Costs |E|^{2k} tensor entries.
inline Complex gamma_spectral(CorrelationTensor& tensor, const Eigen::VectorXcd& c, int n) {
  const int k = tensor.k();
  const int m = static_cast<int>(c.size());
  if (m == 0) return 0.0;
  std::vector<int> idx(static_cast<std::size_t>(2 * k + 2), 1);
  idx[0] = idx[1] = n;
  Complex acc = 0.0;
  while (true) {
    Complex prod = tensor(idx);
    for (int j = 2; j <= 2 * k + 1; ++j) {
      const Complex u = c(idx[static_cast<std::size_t>(j)] - 1);
      prod *= j % 2 == 0 ? std::conj(u) : u;
    }
    acc += prod;
    int pos = 2 * k + 1;
    while (pos >= 2 && idx[static_cast<std::size_t>(pos)] == m) idx[static_cast<std::size_t>(pos--)] = 1;
    if (pos < 2) break;
    ++idx[static_cast<std::size_t>(pos)];
  }
  return Complex(0.0, -(k + 1.0)) * acc;
}

/// Theta_n on the sample grid of a physical-picture trajectory of u_L.
inline RROPhases rro_phase(const SpectralBasis& basis, const Trajectory& traj_uL, double N, int k,
                           double kappa = kDefaultKappa) {
  require(traj_uL.picture == Picture::physical, "rro_phase: trajectory must be in the physical picture");
  require(!traj_uL.times.empty(), "rro_phase: empty trajectory");
  RROPhases ph;
  ph.N = N;
  ph.L = low_level(N, kappa);
  ph.kappa = kappa;
  ph.k = k;
  ph.modes = block_modes(N);
  ph.times = traj_uL.times;
  const std::size_t nt = ph.times.size();
  const double h = nt >= 2 ? uniform_spacing(ph.times) : 0.0;
  ph.theta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ph.modes.size()), static_cast<Eigen::Index>(nt));
  std::vector<std::vector<double>> integrand(ph.modes.size(), std::vector<double>(nt));
  for (std::size_t s = 0; s < nt; ++s) {
    const Eigen::VectorXd w = resonant_weights(basis, traj_uL.states[s].coeffs, k, ph.modes);
    for (std::size_t j = 0; j < ph.modes.size(); ++j) integrand[j][s] = w(static_cast<Eigen::Index>(j));
  }
  for (std::size_t j = 0; j < ph.modes.size(); ++j) {
    const auto F = cumulative_simpson(integrand[j], h);
    for (std::size_t s = 0; s < nt; ++s)
      ph.theta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(s)) = -(k + 1.0) * F[s];
  }
  return ph;
}

// ---------------------------------------------------------------------------
// Per-seed RRO block.

struct RROConfig {
  int k = 1;
  double kappa = kDefaultKappa;
  double t_final = 0.5;
  std::optional<double> dt;     // flow step; default from the largest level in play
  int phase_samples = 0;        // time samples for Theta; 0 picks a resolving default
  int output_samples = 10;      // stored y, psi, z samples (excluding t = 0)
};

/// Samples on [0, t_final] for the phase integral: a multiple of
/// `output_samples`, fine enough that 0.05 rad of the fastest oscillation of
/// |u_L|^{2k}, about 2k lambda_max(L)^2, elapses per sample.
inline int phase_sample_count(const RROConfig& cfg, double L) {
  const int outs = std::max(1, cfg.output_samples);
  if (cfg.phase_samples > 0) return ((cfg.phase_samples + outs - 1) / outs) * outs;
  const int m = modes_below(L);
  const double omega = m > 0 ? 2.0 * cfg.k * eigenvalue(m) * eigenvalue(m) : 1.0;
  const double target = std::abs(cfg.t_final) * omega / 0.05;
  const int per_out = std::max(2, static_cast<int>(std::ceil(target / outs)));
  return per_out * outs;
}

/// Physical trajectory of u_level = flow of P_{<=level} u0 sampled on `times`.
inline Trajectory level_trajectory(const SpectralBasis& basis, std::uint64_t seed, double level, int k,
                                   const std::vector<double>& times, double dt) {
  FlowConfig fc;
  fc.k = k;
  fc.N = level;
  fc.dt = dt;
  fc.picture = Picture::physical;
  const SpectralField u0 = sample_gff(basis, level, k, seed).field;
  return evolve_sampled(basis, u0, times, fc);
}

struct RROSample {
  std::uint64_t seed = 0;
  RROPhases phases;
  Eigen::VectorXcd gaussians;  // g_n on the block
  Eigen::VectorXcd data;       // g_n / (pi lambda_n) on the block

  /// Block coefficients of psi_{N,L} at phase sample s.
  Eigen::VectorXcd psi(std::size_t s) const {
    Eigen::VectorXcd out(data.size());
    for (Eigen::Index j = 0; j < data.size(); ++j) out(j) = phases.H(static_cast<std::size_t>(j), s) * data(j);
    return out;
  }
};

inline double flow_dt(const RROConfig& cfg, double N) { return cfg.dt ? *cfg.dt : default_dt(cfg.k, N); }

/// Phases driven by u_L (L defaults to L_N) and the block data for one seed.
inline RROSample rro_sample(const SpectralBasis& basis, std::uint64_t seed, double N, const RROConfig& cfg,
                            std::optional<double> level = std::nullopt) {
  const double L = level ? *level : low_level(N, cfg.kappa);
  const int ns = phase_sample_count(cfg, L);
  const std::vector<double> times = uniform_times(cfg.t_final, cfg.t_final / ns);
  RROSample out;
  out.seed = seed;
  if (modes_below(L) > 0) {
    const Trajectory tr = level_trajectory(basis, seed, L, cfg.k, times, flow_dt(cfg, L));
    out.phases = rro_phase(basis, tr, N, cfg.k, cfg.kappa);
  } else {
    out.phases.modes = block_modes(N);
    out.phases.times = times;
    out.phases.theta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out.phases.modes.size()),
                                             static_cast<Eigen::Index>(times.size()));
  }
  out.phases.N = N;
  out.phases.L = L;
  out.phases.kappa = cfg.kappa;
  out.phases.k = cfg.k;
  const auto& modes = out.phases.modes;
  out.gaussians.resize(static_cast<Eigen::Index>(modes.size()));
  out.data.resize(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t j = 0; j < modes.size(); ++j) {
    out.gaussians(static_cast<Eigen::Index>(j)) = gff_gaussian(seed, modes[j]);
    out.data(static_cast<Eigen::Index>(j)) = gff_coefficient(seed, modes[j], basis.lambda(modes[j]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition y_N = psi_{N,L_N} + z_N.

struct NormLog {
  double l2 = 0.0;
  double h_half = 0.0;  // H^{1/2}
};

struct AnsatzDecomposition {
  double N = 0.0;
  double L = 0.0;
  int k = 1;
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<SpectralField> y, psi, z;  // interaction picture, on E_N
  std::vector<NormLog> y_norms, psi_norms, z_norms;
  RROPhases phases;
};

inline NormLog norm_log(const SpectralBasis& basis, const SpectralField& f) {
  return {f.coeffs.norm(), hs_norm(basis, f, 0.5)};
}

inline AnsatzDecomposition decompose(const SpectralBasis& basis, std::uint64_t seed, double N, const RROConfig& cfg) {
  if (!(N >= 2.0) || !is_dyadic(N))
    throw PreconditionError("decompose: N must be a dyadic integer >= 2, got " + std::to_string(N));
  require(cfg.t_final > 0.0, "decompose: t_final must be positive");
  const int mN = modes_below(N);
  require(mN <= basis.mode_count(), "decompose: E_N exceeds the basis mode range");
  AnsatzDecomposition d;
  d.N = N;
  d.k = cfg.k;
  d.seed = seed;
  d.L = low_level(N, cfg.kappa);

  const RROSample rs = rro_sample(basis, seed, N, cfg);
  d.phases = rs.phases;
  const int outs = std::max(1, cfg.output_samples);
  const std::size_t stride = (rs.phases.times.size() - 1) / static_cast<std::size_t>(outs);
  std::vector<double> out_times;
  for (int o = 0; o <= outs; ++o) out_times.push_back(rs.phases.times[static_cast<std::size_t>(o) * stride]);
  d.times = out_times;

  const double dt = flow_dt(cfg, N);
  auto interaction_path = [&](double level) {
    std::vector<Eigen::VectorXcd> v;
    if (modes_below(level) == 0) {
      v.assign(out_times.size(), Eigen::VectorXcd::Zero(mN));
      return v;
    }
    const Trajectory tr = level_trajectory(basis, seed, level, cfg.k, out_times, dt);
    for (std::size_t s = 0; s < tr.size(); ++s) {
      Eigen::VectorXcd full = Eigen::VectorXcd::Zero(mN);
      const Eigen::VectorXcd vi = to_interaction(basis, tr.states[s].coeffs, tr.times[s]);
      full.head(vi.size()) = vi;
      v.push_back(full);
    }
    return v;
  };
  const auto vN = interaction_path(N);
  const auto vH = interaction_path(N / 2.0);

  const int first = modes_below(N / 2.0);
  for (std::size_t o = 0; o < out_times.size(); ++o) {
    SpectralField y{vN[o] - vH[o], cfg.k, N};
    SpectralField psi = zero_field(mN, cfg.k, N);
    if (rs.data.size() > 0) psi.coeffs.segment(first, rs.data.size()) = rs.psi(o * stride);
    SpectralField z{y.coeffs - psi.coeffs, cfg.k, N};
    d.y_norms.push_back(norm_log(basis, y));
    d.psi_norms.push_back(norm_log(basis, psi));
    d.z_norms.push_back(norm_log(basis, z));
    d.y.push_back(std::move(y));
    d.psi.push_back(std::move(psi));
    d.z.push_back(std::move(z));
  }
  return d;
}

// ---------------------------------------------------------------------------
// zeta^{N,L} = psi_{N,L} - psi_{N,L/2}.

struct FieldPath {
  std::vector<double> times;
  std::vector<SpectralField> fields;  // block coefficients, interaction picture
};

inline FieldPath psi_path(const SpectralBasis& basis, std::uint64_t seed, double N, double L, const RROConfig& cfg) {
  const RROSample rs = rro_sample(basis, seed, N, cfg, L);
  FieldPath p;
  p.times = rs.phases.times;
  for (std::size_t s = 0; s < p.times.size(); ++s) p.fields.push_back(SpectralField{rs.psi(s), cfg.k, N});
  return p;
}

inline FieldPath zeta_block(const SpectralBasis& basis, std::uint64_t seed, double N, double L, const RROConfig& cfg) {
  if (!is_dyadic(L)) throw PreconditionError("zeta_block: L must be dyadic, got " + std::to_string(L));
  const double LN = low_level(N, cfg.kappa);
  if (L < 2.0 || L > LN)
    throw PreconditionError("zeta_block: need 2 <= L <= L_N = " + std::to_string(LN) + ", got " + std::to_string(L));
  RROConfig fixed = cfg;
  // Both levels must share one phase grid; fix it from the larger level.
  fixed.phase_samples = phase_sample_count(cfg, L);
  FieldPath hi = psi_path(basis, seed, N, L, fixed);
  const FieldPath lo = psi_path(basis, seed, N, L / 2.0, fixed);
  for (std::size_t s = 0; s < hi.fields.size(); ++s) hi.fields[s].coeffs -= lo.fields[s].coeffs;
  return hi;
}

// ---------------------------------------------------------------------------
// Law invariance.

struct ModeLawStat {
  int n = 0;
  double expected_abs2 = 0.0;  // 1/(pi lambda_n)^2
  double mean_abs2 = 0.0;
  double stderr_abs2 = 0.0;
  double expected_re2 = 0.0;   // 1/(2 pi^2 lambda_n^2)
  double mean_re2 = 0.0;
  double stderr_re2 = 0.0;
  double corr_theta_re = 0.0;  // corr(Theta_n(t), Re g_n)
  double corr_theta_im = 0.0;
  double corr_stderr = 0.0;    // 1/sqrt(n_samples) under independence
  bool theta_degenerate = false;  // Theta_n(t) constant across the ensemble
};

namespace detail {

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace detail

/// Per-mode statistics of psi_{N,L}(t) across seeds, at phase sample `time_pos`.
inline std::vector<ModeLawStat> law_invariance_report(const SpectralBasis& basis, const std::vector<RROSample>& ensemble,
                                                      std::size_t time_pos) {
  if (ensemble.size() < 500)
    throw PreconditionError("law_invariance_report: ensemble of " + std::to_string(ensemble.size()) +
                            " seeds is below 500");
  const auto& modes = ensemble.front().phases.modes;
  std::vector<ModeLawStat> out;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const int n = modes[j];
    const double lam = basis.lambda(n);
    std::vector<double> abs2, re2, theta, gre, gim;
    for (const RROSample& s : ensemble) {
      const Complex p = s.phases.H(j, time_pos) * s.data(static_cast<Eigen::Index>(j));
      abs2.push_back(std::norm(p));
      re2.push_back(p.real() * p.real());
      theta.push_back(s.phases.theta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(time_pos)));
      gre.push_back(s.gaussians(static_cast<Eigen::Index>(j)).real());
      gim.push_back(s.gaussians(static_cast<Eigen::Index>(j)).imag());
    }
    ModeLawStat st;
    st.n = n;
    st.expected_abs2 = 1.0 / (std::numbers::pi * std::numbers::pi * lam * lam);
    st.expected_re2 = 0.5 * st.expected_abs2;
    const MeanStderr a = mean_stderr(abs2), r = mean_stderr(re2);
    st.mean_abs2 = a.mean;
    st.stderr_abs2 = a.stderr_mean;
    st.mean_re2 = r.mean;
    st.stderr_re2 = r.stderr_mean;
    st.theta_degenerate = std::all_of(theta.begin(), theta.end(), [&](double v) { return v == theta.front(); });
    st.corr_theta_re = detail::correlation(theta, gre);
    st.corr_theta_im = detail::correlation(theta, gim);
    st.corr_stderr = 1.0 / std::sqrt(static_cast<double>(ensemble.size()));
    out.push_back(st);
  }
  return out;
}

/// RRO samples for seeds derive_seed(master, i), i < count.
inline std::vector<RROSample> rro_ensemble(const SpectralBasis& basis, std::uint64_t master, std::size_t count,
                                           double N, const RROConfig& cfg, int workers = 1) {
  return parallel_map<RROSample>(count, workers, [&](std::size_t i) {
    return rro_sample(basis, derive_seed(master, {i}), N, cfg);
  });
}

}  // namespace discnls
