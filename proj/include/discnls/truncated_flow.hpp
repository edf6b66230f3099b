#pragma once

// Frequency-truncated defocusing NLS
//   i u_t + Delta u - P_{<=N}(|u|^{2k} u) = 0
// on the modes E_N = {n : lambda_n <= N}. In coefficients,
//   c_n' = -i (lambda_n^2 c_n + N_n(u)),   N_n(u) = <|u|^{2k} u, e_n>,
// integrated with classical RK4 on the interaction-picture variables
// v_n = e^{i lambda_n^2 t} c_n, which obey v_n' = -i e^{i lambda_n^2 t} N_n(u).

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "discnls/cache.hpp"
#include "discnls/errors.hpp"
#include "discnls/spectral_basis.hpp"

namespace discnls {

enum class Picture { physical, interaction };

inline const char* to_string(Picture p) { return p == Picture::physical ? "physical" : "interaction"; }

struct FlowConfig {
  int k = 1;
  double N = 16.0;
  std::optional<double> dt;  // unset selects default_dt(k, N)
  Picture picture = Picture::physical;
  bool nonlinear = true;
  double abort_drift = 1e-4;  // relative drift of mass or Hamiltonian
  int monitor_stride = 64;    // steps between conservation checks
};

/// min(1e-3, 0.1/N), further capped so that the fastest phase in the
/// interaction-picture forcing, about (2k+2) lambda_max^2, advances by at
/// most 0.5 rad per step.
inline double default_dt(int k, double N) {
  double dt = std::min(1e-3, 0.1 / N);
  const int m = modes_below(N);
  if (m > 0) {
    const double lam = eigenvalue(m);
    dt = std::min(dt, 0.5 / ((2.0 * k + 2.0) * lam * lam));
  }
  return dt;
}

inline double resolved_dt(const FlowConfig& c) { return c.dt ? *c.dt : default_dt(c.k, c.N); }

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  Picture picture = Picture::physical;
  std::vector<double> mass;
  std::vector<double> hamiltonian;
  double dt = 0.0;

  std::size_t size() const { return times.size(); }
  const SpectralField& back() const { return states.back(); }
};

// ---------------------------------------------------------------------------
// Pictures.

/// u = S(t) v for interaction-picture v: c_n = e^{-i lambda_n^2 t} v_n.
inline Eigen::VectorXcd to_physical(const SpectralBasis& basis, const Eigen::VectorXcd& v, double t) {
  Eigen::VectorXcd c(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double l = basis.lambda(static_cast<int>(i + 1));
    c(i) = std::polar(1.0, -l * l * t) * v(i);
  }
  return c;
}

/// v = S(-t) u.
inline Eigen::VectorXcd to_interaction(const SpectralBasis& basis, const Eigen::VectorXcd& c, double t) {
  return to_physical(basis, c, -t);
}

inline SpectralField to_picture(const SpectralBasis& basis, const SpectralField& f, double t, Picture from,
                                Picture to) {
  if (from == to) return f;
  SpectralField out = f;
  out.coeffs = from == Picture::interaction ? to_physical(basis, f.coeffs, t) : to_interaction(basis, f.coeffs, t);
  return out;
}

// ---------------------------------------------------------------------------
// Nonlinearity and conserved quantities.

inline void check_flow_basis(const SpectralBasis& basis, int k, int mode_count) {
  if (basis.product_order() < 2 * k + 2)
    throw PreconditionError("truncated flow: basis product_order " + std::to_string(basis.product_order()) +
                            " < 2k+2 = " + std::to_string(2 * k + 2) + " would alias the nonlinearity");
  require(mode_count <= basis.mode_count(), "truncated flow: field has more modes than the basis");
}

/// |u|^{2k} u on the grid.
inline Eigen::VectorXcd pointwise_power(const Eigen::VectorXcd& grid, int k) {
  Eigen::VectorXcd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) out(i) = std::pow(std::norm(grid(i)), k) * grid(i);
  return out;
}

/// Coefficients of P_{<=N}(|u|^{2k} u) for physical coefficients c on E_N.
inline Eigen::VectorXcd nonlinearity_coeffs(const SpectralBasis& basis, const Eigen::VectorXcd& c, int k) {
  const Eigen::VectorXcd grid = synthesize(basis, c);
  return analyze_coeffs(basis, pointwise_power(grid, k), static_cast<int>(c.size()));
}

inline SpectralField nonlinearity(const SpectralBasis& basis, const SpectralField& field, int k, double N) {
  const int m = modes_below(N);
  check_flow_basis(basis, k, m);
  for (int n = m + 1; n <= field.mode_count(); ++n)
    if (field(n) != Complex(0.0))
      throw PreconditionError("nonlinearity: field has a nonzero coefficient at mode " + std::to_string(n) +
                              " outside E_N");
  const SpectralField f = resized(field, m);
  return SpectralField{nonlinearity_coeffs(basis, f.coeffs, k), k, N};
}

/// M(u) = 1/2 int |u|^2.
inline double mass(const Eigen::VectorXcd& c) { return 0.5 * c.squaredNorm(); }

/// (1/(2k+2)) int |u|^{2k+2} under the basis quadrature.
inline double potential_energy(const SpectralBasis& basis, const Eigen::VectorXcd& c, int k) {
  const Eigen::VectorXcd grid = synthesize(basis, c);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) acc += basis.weights()(i) * std::pow(std::norm(grid(i)), k + 1);
  return acc / (2.0 * k + 2.0);
}

/// H_k(u) = 1/2 int |grad u|^2 + (1/(2k+2)) int |u|^{2k+2}.
inline double hamiltonian(const SpectralBasis& basis, const Eigen::VectorXcd& c, int k, bool nonlinear = true) {
  double kin = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double l = basis.lambda(static_cast<int>(i + 1));
    kin += l * l * std::norm(c(i));
  }
  return 0.5 * kin + (nonlinear ? potential_energy(basis, c, k) : 0.0);
}

// ---------------------------------------------------------------------------
// Integrator.

namespace detail {

struct Stepper {
  const SpectralBasis& basis;
  int k;
  bool nonlinear;
  Eigen::VectorXd lambda2;

  Stepper(const SpectralBasis& b, int k_, bool nl, int m) : basis(b), k(k_), nonlinear(nl), lambda2(m) {
    for (int i = 0; i < m; ++i) lambda2(i) = b.lambda(i + 1) * b.lambda(i + 1);
  }

  // dv/dt at time t.
  Eigen::VectorXcd rhs(double t, const Eigen::VectorXcd& v) const {
    if (!nonlinear) return Eigen::VectorXcd::Zero(v.size());
    Eigen::VectorXcd c(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) c(i) = std::polar(1.0, -lambda2(i) * t) * v(i);
    Eigen::VectorXcd nl = nonlinearity_coeffs(basis, c, k);
    for (Eigen::Index i = 0; i < v.size(); ++i) nl(i) *= Complex(0.0, -1.0) * std::polar(1.0, lambda2(i) * t);
    return nl;
  }

  void step(double t, double h, Eigen::VectorXcd& v) const {
    if (!nonlinear) return;
    const Eigen::VectorXcd k1 = rhs(t, v);
    const Eigen::VectorXcd k2 = rhs(t + 0.5 * h, v + (0.5 * h) * k1);
    const Eigen::VectorXcd k3 = rhs(t + 0.5 * h, v + (0.5 * h) * k2);
    const Eigen::VectorXcd k4 = rhs(t + h, v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

inline double relative_drift(double now, double ref) {
  const double scale = std::abs(ref) > 0.0 ? std::abs(ref) : 1.0;
  return std::abs(now - ref) / scale;
}

}  // namespace detail

/// Evolve u0 (physical coefficients) and record states at `sample_times`,
/// which must be monotone in one direction starting from 0. Steps of size dt
/// are taken between consecutive samples, the last one in each interval
/// shortened to land on the sample exactly.
inline Trajectory evolve_sampled(const SpectralBasis& basis, const SpectralField& u0,
                                 const std::vector<double>& sample_times, const FlowConfig& config) {
  if (config.dt && !(*config.dt > 0.0))
    throw PreconditionError("evolve: dt must be positive, got " + std::to_string(*config.dt));
  require(config.k >= 1, "evolve: k must be >= 1");
  require(!sample_times.empty() && sample_times.front() == 0.0, "evolve: sample times must start at 0");
  const int m = modes_below(config.N);
  check_flow_basis(basis, config.k, m);
  for (int n = m + 1; n <= u0.mode_count(); ++n)
    if (u0(n) != Complex(0.0))
      throw PreconditionError("evolve: initial data has a nonzero coefficient at mode " + std::to_string(n) +
                              " outside E_N");

  const double dt = resolved_dt(config);
  const double direction = sample_times.back() < 0.0 ? -1.0 : 1.0;
  for (std::size_t i = 1; i < sample_times.size(); ++i)
    require(direction * (sample_times[i] - sample_times[i - 1]) > 0.0, "evolve: sample times must be strictly monotone");

  const detail::Stepper stepper(basis, config.k, config.nonlinear, m);
  Eigen::VectorXcd v = resized(u0, m).coeffs;  // v(0) = u(0)

  Trajectory traj;
  traj.picture = config.picture;
  traj.dt = dt;
  const double m0 = mass(v);
  const double h0 = hamiltonian(basis, v, config.k, config.nonlinear);

  auto record = [&](double t) {
    const Eigen::VectorXcd c = to_physical(basis, v, t);
    SpectralField f{config.picture == Picture::physical ? c : v, config.k, config.N};
    traj.times.push_back(t);
    traj.states.push_back(std::move(f));
    traj.mass.push_back(mass(c));
    traj.hamiltonian.push_back(hamiltonian(basis, c, config.k, config.nonlinear));
  };
  auto monitor = [&](double t) {
    const Eigen::VectorXcd c = to_physical(basis, v, t);
    const double dm = detail::relative_drift(mass(c), m0);
    const double dh = detail::relative_drift(hamiltonian(basis, c, config.k, config.nonlinear), h0);
    if (!std::isfinite(dm) || !std::isfinite(dh) || dm > config.abort_drift || dh > config.abort_drift) {
      std::ostringstream msg;
      msg << "evolve: conservation drift exceeded " << config.abort_drift << " at t = " << t
          << " (mass drift " << dm << ", hamiltonian drift " << dh << ", dt = " << dt
          << "); reduce dt";
      throw FlowError(msg.str());
    }
  };

  record(0.0);
  double t = 0.0;
  long steps = 0;
  for (std::size_t s = 1; s < sample_times.size(); ++s) {
    const double start = t, target = sample_times[s];
    const long n = std::max(1L, static_cast<long>(std::ceil(std::abs(target - start) / dt - 1e-9)));
    for (long i = 0; i < n; ++i) {
      const double ti = start + direction * static_cast<double>(i) * dt;
      const double h = i + 1 == n ? target - ti : direction * dt;
      stepper.step(ti, h, v);
      if (config.nonlinear && ++steps % config.monitor_stride == 0) monitor(ti + h);
    }
    t = target;
    if (config.nonlinear) monitor(t);
    record(t);
  }
  return traj;
}

/// Uniform samples every `sample_interval` (or just the endpoints when it is
/// not positive) on [0, t_final].
inline std::vector<double> uniform_times(double t_final, double sample_interval) {
  std::vector<double> times{0.0};
  if (t_final == 0.0) return times;
  if (sample_interval <= 0.0) {
    times.push_back(t_final);
    return times;
  }
  const long n = std::max(1L, std::lround(std::abs(t_final) / sample_interval));
  for (long i = 1; i <= n; ++i) times.push_back(t_final * static_cast<double>(i) / static_cast<double>(n));
  return times;
}

inline Trajectory evolve(const SpectralBasis& basis, const SpectralField& u0, double t_final,
                         const FlowConfig& config, double sample_interval = 0.0) {
  return evolve_sampled(basis, u0, uniform_times(t_final, sample_interval), config);
}

/// Final physical state of the flow at time t.
inline SpectralField flow_map(const SpectralBasis& basis, const SpectralField& u0, double t, FlowConfig config) {
  config.picture = Picture::physical;
  return evolve(basis, u0, t, config).back();
}

/// L^2 distance between Phi_t(Phi_s(u0)) and Phi_{t+s}(u0).
inline double flow_property_check(const SpectralBasis& basis, const SpectralField& u0, double s, double t,
                                  const FlowConfig& config) {
  require(s >= 0.0 && t >= 0.0, "flow_property_check: s and t must be >= 0");
  const SpectralField two_step = flow_map(basis, flow_map(basis, u0, s, config), t, config);
  const SpectralField one_step = flow_map(basis, u0, s + t, config);
  return (two_step.coeffs - one_step.coeffs).norm();
}

// ---------------------------------------------------------------------------
// Export.

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const int m = traj.states.empty() ? 0 : traj.states.front().mode_count();
  os << "time";
  for (int n = 1; n <= m; ++n) os << ",re_" << n << ",im_" << n;
  os << ",mass,hamiltonian\n";
  os << std::setprecision(17);
  for (std::size_t s = 0; s < traj.size(); ++s) {
    os << traj.times[s];
    for (int n = 1; n <= m; ++n) os << ',' << traj.states[s](n).real() << ',' << traj.states[s](n).imag();
    os << ',' << traj.mass[s] << ',' << traj.hamiltonian[s] << '\n';
  }
}

inline CacheHeader trajectory_header(const Trajectory& traj) {
  const int m = traj.states.empty() ? 0 : traj.states.front().mode_count();
  const int k = traj.states.empty() ? 0 : traj.states.front().k;
  return CacheHeader{kCacheFormatVersion, CacheKind::trajectory, static_cast<std::uint64_t>(m),
                     static_cast<std::uint64_t>(traj.size()),
                     fingerprint({k, m, static_cast<std::int64_t>(traj.size()), static_cast<int>(traj.picture)})};
}

inline void save_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw CacheError("cannot open trajectory file for writing: " + path.string());
  write_header(os, trajectory_header(traj));
  const int k = traj.states.empty() ? 0 : traj.states.front().k;
  const double N = traj.states.empty() ? 0.0 : traj.states.front().support_bound;
  io::write_pod<std::int32_t>(os, static_cast<std::int32_t>(traj.picture));
  io::write_pod<std::int32_t>(os, k);
  io::write_pod(os, N);
  io::write_pod(os, traj.dt);
  io::write_vec(os, traj.times.data(), traj.times.size());
  io::write_vec(os, traj.mass.data(), traj.mass.size());
  io::write_vec(os, traj.hamiltonian.data(), traj.hamiltonian.size());
  for (const auto& s : traj.states) io::write_vec(os, s.coeffs.data(), static_cast<std::size_t>(s.coeffs.size()));
  if (!os) throw CacheError("failed writing trajectory file " + path.string());
}

inline Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CacheError("cannot open trajectory file: " + path.string());
  const CacheHeader h = read_header(is, CacheKind::trajectory);
  Trajectory traj;
  traj.picture = static_cast<Picture>(io::read_pod<std::int32_t>(is, "picture"));
  const int k = io::read_pod<std::int32_t>(is, "k");
  const double N = io::read_pod<double>(is, "N");
  traj.dt = io::read_pod<double>(is, "dt");
  traj.times = io::read_vec<double>(is, "times");
  traj.mass = io::read_vec<double>(is, "mass");
  traj.hamiltonian = io::read_vec<double>(is, "hamiltonian");
  if (traj.times.size() != h.node_count || traj.mass.size() != h.node_count || traj.hamiltonian.size() != h.node_count)
    throw CacheError("trajectory file corrupt: sample count disagrees with header");
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    const auto c = io::read_vec<Complex>(is, "state");
    if (c.size() != h.mode_count) throw CacheError("trajectory file corrupt: mode count disagrees with header");
    traj.states.push_back(SpectralField{Eigen::Map<const Eigen::VectorXcd>(c.data(), static_cast<Eigen::Index>(c.size())), k, N});
  }
  check_header(h, trajectory_header(traj));
  return traj;
}

}  // namespace discnls
