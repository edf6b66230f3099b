// discnls: command-line front end for the disc NLS toolkit.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "discnls/bessel.hpp"
#include "discnls/cache.hpp"
#include "discnls/correlation.hpp"
#include "discnls/counting.hpp"
#include "discnls/errors.hpp"
#include "discnls/gibbs.hpp"
#include "discnls/norms.hpp"
#include "discnls/parallel.hpp"
#include "discnls/random.hpp"
#include "discnls/rro.hpp"
#include "discnls/spectral_basis.hpp"
#include "discnls/stats.hpp"
#include "discnls/truncated_flow.hpp"
#include "json_config.hpp"

#ifndef DISCNLS_VERSION
#define DISCNLS_VERSION "unknown"
#endif

namespace {

using namespace discnls;
using nlohmann::json;

struct Globals {
  std::uint64_t seed = 0;
  int workers = 1;
  std::string cache_dir;
  bool rebuild_cache = false;
  std::string config;
  std::string csv;
  std::string json_out = "-";
};

// Output streams: "-" is stdout, "" disables.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    if (path == "-") {
      os_ = &std::cout;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw Error("cannot open output file '" + path + "'");
    os_ = file_.get();
  }
  explicit operator bool() const { return os_ != nullptr; }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

// Strings that look like JSON scalars are echoed as such.
json typed(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  return s;
}

json option_values(const CLI::Option* opt) {
  if (opt->get_expected_max() == 0) return opt->count() > 0 || opt->get_default_str() == "true";
  std::vector<std::string> raw;
  if (opt->count() > 0) {
    raw = opt->results();
  } else {
    const std::string d = opt->get_default_str();
    if (d.empty()) return nullptr;
    std::string cur;
    std::string trimmed = d;
    if (trimmed.size() >= 2 && trimmed.front() == '[' && trimmed.back() == ']')
      trimmed = trimmed.substr(1, trimmed.size() - 2);
    for (char c : trimmed) {
      if (c == ',') {
        raw.push_back(cur);
        cur.clear();
      } else if (c != ' ') {
        cur += c;
      }
    }
    raw.push_back(cur);
  }
  if (opt->get_expected_max() > 1 || raw.size() > 1) {
    json arr = json::array();
    for (const auto& r : raw) arr.push_back(typed(r));
    return arr;
  }
  return raw.empty() ? json(nullptr) : typed(raw.front());
}

// Options that describe where output goes or how fast it is computed are not
// part of the experiment and are left out of the echo.
json config_echo(const CLI::App& app) {
  static const std::vector<std::string> skip = {"help", "config", "workers", "csv", "json", "cache-dir",
                                                "rebuild-cache"};
  json out = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || std::find(skip.begin(), skip.end(), name) != skip.end()) continue;
    out[name] = option_values(opt);
  }
  return out;
}

class Report {
 public:
  Report(std::string command, const Globals& g) : command_(std::move(command)), globals_(g) {}

  SpectralBasis basis(int modes, int order) {
    const auto dir = resolve_cache_dir(globals_.cache_dir);
    const CacheHeader h = basis_header(modes, order);
    json entry{{"kind", "basis"},
               {"name", basis_cache_name(modes, order)},
               {"version", kCacheFormatVersion},
               {"fingerprint", h.fingerprint}};
    caches_.push_back(entry);
    return cached_basis(dir, modes, order, globals_.rebuild_cache);
  }

  void note_cache(json entry) { caches_.push_back(std::move(entry)); }

  json document(const CLI::App& sub, json result, double wall) const {
    json doc;
    doc["command"] = command_;
    doc["version"] = DISCNLS_VERSION;
    doc["seed"] = globals_.seed;
    doc["config"] = config_echo(sub);
    doc["caches"] = caches_;
    doc["result"] = std::move(result);
    doc["runtime"] = {{"workers", resolve_workers(globals_.workers)}, {"wall_time_s", wall}};
    return doc;
  }

 private:
  std::string command_;
  const Globals& globals_;
  json caches_ = json::array();
};

std::ostream& csv_precision(std::ostream& os) { return os << std::setprecision(17); }

int modes_for(double N) { return std::max(1, modes_below(N)); }

// ---------------------------------------------------------------------------
// Subcommands. Each writes its CSV table and returns the JSON result block.

struct BasisArgs {
  int modes = 32;
  int order = 4;
};

json run_basis(const BasisArgs& a, Report& rep, Sink& csv) {
  require(a.modes >= 1, "--modes must be >= 1");
  require(a.order >= 2, "--order must be >= 2");
  const SpectralBasis basis = rep.basis(a.modes, a.order);
  if (csv) {
    auto& os = csv_precision(*csv);
    os << "n,lambda,lambda_minus_asymptotic\n";
    for (int n = 1; n <= a.modes; ++n)
      os << n << ',' << basis.lambda(n) << ',' << basis.lambda(n) - std::numbers::pi * (n - 0.25) << '\n';
  }
  const Eigen::MatrixXd G = gram_matrix(basis);
  const double gram_err =
      (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
  return {{"modes", a.modes}, {"nodes", basis.node_count()}, {"product_order", a.order}, {"gram_error", gram_err}};
}

struct CorrelateArgs {
  int k = 1;
  std::vector<int> tuple;
  int max_index = 4;
};

json run_correlate(const CorrelateArgs& a, const Globals& g, Report& rep, Sink& csv) {
  require(a.k >= 0, "--k must be >= 0");
  const int len = 2 * a.k + 2;
  std::vector<std::vector<int>> tuples;
  int top = 0;
  if (!a.tuple.empty()) {
    require(static_cast<int>(a.tuple.size()) == len,
            "--tuple needs 2k+2 = " + std::to_string(len) + " indices, got " + std::to_string(a.tuple.size()));
    tuples.push_back(a.tuple);
    top = *std::max_element(a.tuple.begin(), a.tuple.end());
    require(*std::min_element(a.tuple.begin(), a.tuple.end()) >= 1, "--tuple indices must be >= 1");
  } else {
    require(a.max_index >= 1, "--max-index must be >= 1");
    top = a.max_index;
    std::vector<int> t(static_cast<std::size_t>(len), 1);
    while (true) {
      tuples.push_back(t);
      int pos = len - 1;
      while (pos >= 0 && t[static_cast<std::size_t>(pos)] == a.max_index) --pos;
      if (pos < 0) break;
      const int v = t[static_cast<std::size_t>(pos)] + 1;
      for (int j = pos; j < len; ++j) t[static_cast<std::size_t>(j)] = v;
    }
  }
  const SpectralBasis basis = rep.basis(top, len);
  CorrelationTensor tensor(basis, a.k);
  const auto dir = resolve_cache_dir(g.cache_dir);
  const std::string name = CorrelationTensor::cache_name(a.k, basis.mode_count(), basis.node_count());
  if (dir && !g.rebuild_cache && std::filesystem::exists(*dir / name)) tensor.load(*dir / name);
  rep.note_cache({{"kind", "correlation"},
                  {"name", name},
                  {"version", kCacheFormatVersion},
                  {"fingerprint", tensor.header().fingerprint}});

  const auto values = parallel_map<double>(tuples.size(), g.workers,
                                           [&](std::size_t i) { return tensor(tuples[i]); });
  if (dir) tensor.save(*dir / name);
  double max_abs = 0.0;
  if (csv) {
    auto& os = csv_precision(*csv);
    for (int j = 0; j < len; ++j) os << 'n' << j << ',';
    os << "value\n";
  }
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    max_abs = std::max(max_abs, std::abs(values[i]));
    if (csv) {
      for (int n : tuples[i]) *csv << n << ',';
      *csv << values[i] << '\n';
    }
  }
  return {{"k", a.k}, {"tuples", tuples.size()}, {"max_abs", max_abs}, {"nodes", basis.node_count()}};
}

struct CountArgs {
  std::vector<int> R = {128, 256, 512, 1024};
};

json run_count(const CountArgs& a, const Globals& g, Sink& csv) {
  require(!a.R.empty(), "--R needs at least one value");
  for (int r : a.R) require(r >= 1, "--R values must be >= 1");
  const auto worst = parallel_map<WorstCase>(a.R.size(), g.workers,
                                             [&](std::size_t i) { return worst_case_diff_pairs(a.R[i]); });
  json rows = json::array();
  std::vector<double> xs, ys;
  if (csv) csv_precision(*csv) << "R,m_worst,count\n";
  for (std::size_t i = 0; i < a.R.size(); ++i) {
    if (csv) *csv << a.R[i] << ',' << worst[i].m << ',' << worst[i].count << '\n';
    rows.push_back({{"R", a.R[i]}, {"m_worst", worst[i].m}, {"count", worst[i].count}});
    if (worst[i].count > 0) {
      xs.push_back(a.R[i]);
      ys.push_back(static_cast<double>(worst[i].count));
    }
  }
  json result{{"rows", rows}};
  result["growth_exponent"] = xs.size() >= 2 ? json(loglog_slope(xs, ys)) : json(nullptr);
  double max_step = 0.0;
  for (std::size_t i = 1; i < a.R.size(); ++i)
    if (worst[i - 1].count > 0 && a.R[i] == 2 * a.R[i - 1])
      max_step = std::max(max_step, static_cast<double>(worst[i].count) / static_cast<double>(worst[i - 1].count));
  result["max_octave_ratio"] = max_step;
  return result;
}

struct EvolveArgs {
  double N = 16.0;
  int k = 1;
  double t = 1.0;
  std::optional<double> dt;
  double interval = 0.01;
  std::string picture = "physical";
  bool linear = false;
  std::string save;
};

json run_evolve(const EvolveArgs& a, const Globals& g, Report& rep, Sink& csv) {
  require(a.k >= 1, "--k must be >= 1");
  require(a.N >= 1.0, "--N must be >= 1");
  require(a.picture == "physical" || a.picture == "interaction", "--picture must be physical or interaction");
  const int m = modes_below(a.N);
  require(m >= 1, "E_N is empty for N = " + std::to_string(a.N) + "; use N >= 2.41");
  const SpectralBasis basis = rep.basis(m, 2 * a.k + 2);
  FlowConfig fc;
  fc.k = a.k;
  fc.N = a.N;
  fc.dt = a.dt;
  fc.picture = a.picture == "physical" ? Picture::physical : Picture::interaction;
  fc.nonlinear = !a.linear;
  const SpectralField u0 = sample_gff(basis, a.N, a.k, g.seed).field;
  const Trajectory tr = evolve(basis, u0, a.t, fc, a.interval);
  if (csv) write_trajectory_csv(csv_precision(*csv), tr);
  if (!a.save.empty()) save_trajectory(tr, a.save);
  double mdrift = 0.0, hdrift = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    mdrift = std::max(mdrift, std::abs(tr.mass[i] - tr.mass.front()) / std::abs(tr.mass.front()));
    hdrift = std::max(hdrift, std::abs(tr.hamiltonian[i] - tr.hamiltonian.front()) / std::abs(tr.hamiltonian.front()));
  }
  return {{"modes", m},
          {"dt", tr.dt},
          {"samples", tr.size()},
          {"mass0", tr.mass.front()},
          {"hamiltonian0", tr.hamiltonian.front()},
          {"mass_drift", mdrift},
          {"hamiltonian_drift", hdrift}};
}

struct GibbsArgs {
  double N = 16.0;
  int k = 1;
  double t = 0.5;
  long samples = 4000;
  std::vector<std::string> observables = {"abs2:1", "abs2:2", "abs2:3", "re:1"};
  double coupling = kInvariantCoupling;
  long attempt_cap = 100000;
  std::optional<double> dt;
};

json run_gibbs(const GibbsArgs& a, const Globals& g, Report& rep, Sink& csv) {
  require(a.k >= 1, "--k must be >= 1");
  require(a.t >= 0.0, "--t must be >= 0");
  require(a.coupling >= 0.0, "--coupling must be >= 0");
  const int m = modes_below(a.N);
  require(m >= 1, "E_N is empty for N = " + std::to_string(a.N));
  const SpectralBasis basis = rep.basis(m, 2 * a.k + 2);
  std::vector<Observable> obs;
  for (const auto& s : a.observables) obs.push_back(make_observable(s, a.k));
  InvarianceOptions opt;
  opt.gibbs.coupling = a.coupling;
  opt.gibbs.attempt_cap = a.attempt_cap;
  opt.flow.dt = a.dt;
  opt.workers = g.workers;
  const auto stats = invariance_test(basis, a.N, a.k, a.t, a.samples, obs, g.seed, opt);
  json rows = json::array();
  double max_z = 0.0;
  if (csv) csv_precision(*csv) << "observable,mean0,meanT,stderr,z\n";
  for (const auto& s : stats) {
    rows.push_back({{"observable", s.name}, {"mean0", s.mean0}, {"meanT", s.meanT}, {"stderr", s.stderr_pooled},
                    {"z", s.z}});
    if (csv) *csv << s.name << ',' << s.mean0 << ',' << s.meanT << ',' << s.stderr_pooled << ',' << s.z << '\n';
    max_z = std::max(max_z, std::abs(s.z));
  }
  return {{"modes", m}, {"observables", rows}, {"max_abs_z", max_z}, {"all_within_3", max_z <= 3.0}};
}

struct AnsatzArgs {
  std::vector<double> N = {8, 16, 32, 64};
  int k = 2;
  double kappa = kDefaultKappa;
  int seeds = 10;
  double t = 0.3;
  int outputs = 10;
  std::optional<double> dt;
};

json run_ansatz(const AnsatzArgs& a, const Globals& g, Report& rep, Sink& csv) {
  require(a.k >= 1, "--k must be >= 1");
  require(a.seeds >= 1, "--seeds must be >= 1");
  require(a.t > 0.0, "--t must be positive");
  require(!a.N.empty(), "--N needs at least one value");
  for (double N : a.N) require(N >= 2.0 && is_dyadic(N), "--N values must be dyadic and >= 2");
  const double top = *std::max_element(a.N.begin(), a.N.end());
  const SpectralBasis basis = rep.basis(modes_for(top), 2 * a.k + 2);
  RROConfig cfg;
  cfg.k = a.k;
  cfg.kappa = a.kappa;
  cfg.t_final = a.t;
  cfg.dt = a.dt;
  cfg.output_samples = a.outputs;

  struct Job {
    double N;
    int s;
  };
  std::vector<Job> jobs;
  for (double N : a.N)
    for (int s = 0; s < a.seeds; ++s) jobs.push_back({N, s});
  const auto runs = parallel_map<AnsatzDecomposition>(jobs.size(), g.workers, [&](std::size_t i) {
    return decompose(basis, derive_seed(g.seed, {static_cast<std::uint64_t>(jobs[i].s)}), jobs[i].N, cfg);
  });

  if (csv) csv_precision(*csv) << "N,seed,time,y_l2,y_h12,psi_l2,psi_h12,z_l2,z_h12\n";
  json per_N = json::array();
  std::vector<double> ns, ymeans, zmeans;
  for (double N : a.N) {
    double ysum = 0.0, zsum = 0.0, psum = 0.0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].N != N) continue;
      const auto& d = runs[i];
      if (csv)
        for (std::size_t o = 0; o < d.times.size(); ++o)
          *csv << N << ',' << jobs[i].s << ',' << d.times[o] << ',' << d.y_norms[o].l2 << ',' << d.y_norms[o].h_half
               << ',' << d.psi_norms[o].l2 << ',' << d.psi_norms[o].h_half << ',' << d.z_norms[o].l2 << ','
               << d.z_norms[o].h_half << '\n';
      ysum += d.y_norms.back().l2;
      zsum += d.z_norms.back().l2;
      psum += d.psi_norms.back().l2;
    }
    const double cnt = a.seeds;
    per_N.push_back({{"N", N}, {"L", low_level(N, a.kappa)}, {"mean_y_l2", ysum / cnt},
                     {"mean_psi_l2", psum / cnt}, {"mean_z_l2", zsum / cnt}});
    ns.push_back(N);
    ymeans.push_back(ysum / cnt);
    zmeans.push_back(zsum / cnt);
  }
  json result{{"levels", per_N}};
  const bool fit = ns.size() >= 2 && std::all_of(zmeans.begin(), zmeans.end(), [](double v) { return v > 0; });
  result["y_slope"] = ns.size() >= 2 ? json(loglog_slope(ns, ymeans)) : json(nullptr);
  result["z_slope"] = fit ? json(loglog_slope(ns, zmeans)) : json(nullptr);
  return result;
}

struct NormsArgs {
  std::vector<double> N = {8, 16, 32, 64, 128};
  std::vector<double> s = {0.4, 0.6};
  std::vector<double> p = {2.0};
  int samples = 20;
};

json run_norms(const NormsArgs& a, const Globals& g, Report& rep, Sink& csv) {
  require(a.samples >= 1, "--samples must be >= 1");
  require(!a.N.empty() && !a.s.empty() && !a.p.empty(), "--N, --s and --p need at least one value each");
  for (double p : a.p) require(p >= 1.0, "--p values must be >= 1");
  const double top = *std::max_element(a.N.begin(), a.N.end());
  const SpectralBasis basis = rep.basis(modes_for(top), 2);
  if (csv) csv_precision(*csv) << "N,s,p,value\n";
  json rows = json::array();
  for (double N : a.N) {
    for (double s : a.s) {
      for (double p : a.p) {
        const auto vals = parallel_map<double>(static_cast<std::size_t>(a.samples), g.workers, [&](std::size_t i) {
          const auto d = sample_gff(basis, N, 1, derive_seed(g.seed, {i}));
          return sobolev_norm(basis, d.field, s, p);
        });
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= a.samples;
        if (csv) *csv << N << ',' << s << ',' << p << ',' << mean << '\n';
        rows.push_back({{"N", N}, {"s", s}, {"p", std::isinf(p) ? json("inf") : json(p)}, {"value", mean}});
      }
    }
  }
  return {{"rows", rows}, {"ensemble", a.samples}};
}

struct StrichartzArgs {
  std::vector<double> N = {8, 16, 32, 64, 128, 256};
  double eps = 0.1;
  std::string data = "gff";
};

json run_strichartz(const StrichartzArgs& a, const Globals& g, Report& rep, Sink& csv) {
  require(a.data == "gff" || a.data == "coherent", "--data must be gff or coherent");
  require(!a.N.empty(), "--N needs at least one value");
  const double top = *std::max_element(a.N.begin(), a.N.end());
  const SpectralBasis basis = rep.basis(modes_for(top), 4);
  const auto ratios = parallel_map<double>(a.N.size(), g.workers, [&](std::size_t i) {
    const int m = modes_below(a.N[i]);
    require(m >= 1, "E_N is empty for N = " + std::to_string(a.N[i]));
    SpectralField f = zero_field(m, 1, a.N[i]);
    if (a.data == "gff") {
      f = sample_gff(basis, a.N[i], 1, g.seed).field;
    } else {
      for (int n = 1; n <= m; ++n) f.coeffs(n - 1) = 1.0 / basis.lambda(n);
    }
    return strichartz_ratio(basis, f, a.eps);
  });
  if (csv) csv_precision(*csv) << "N,s,p,value\n";
  json rows = json::array();
  for (std::size_t i = 0; i < a.N.size(); ++i) {
    if (csv) *csv << a.N[i] << ',' << a.eps << ",4," << ratios[i] << '\n';
    rows.push_back({{"N", a.N[i]}, {"ratio", ratios[i]}});
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  return {{"rows", rows}, {"max_over_min", *hi / *lo}};
}

struct ScalingArgs {
  int k = 1;
  std::vector<double> N = {4, 8, 16, 32};
  long long max_tuples = 20'000'000;
};

json run_scaling(const ScalingArgs& a, const Globals& g, Sink& csv) {
  require(a.k >= 1, "--k must be >= 1");
  const auto reports = parallel_map<ScalingReport>(
      a.N.size(), g.workers, [&](std::size_t i) { return scaling_report(a.k, a.N[i], a.max_tuples); });
  if (csv) csv_precision(*csv) << "k,N,s_crit,s_p,max_count,max_correlation,counting_proxy,reference\n";
  json rows = json::array();
  std::vector<double> xs, ys;
  for (const auto& r : reports) {
    if (csv)
      *csv << r.k << ',' << r.N << ',' << r.s_crit << ',' << r.s_p << ',' << r.max_count << ',' << r.max_correlation
           << ',' << r.counting_proxy << ',' << r.reference << '\n';
    rows.push_back({{"N", r.N},
                    {"max_count", r.max_count},
                    {"max_correlation", r.max_correlation},
                    {"counting_proxy", r.counting_proxy},
                    {"reference", r.reference}});
    if (r.counting_proxy > 0.0) {
      xs.push_back(r.N);
      ys.push_back(r.counting_proxy);
    }
  }
  json result{{"k", a.k},
              {"s_crit", critical_regularity(a.k)},
              {"s_p", probabilistic_regularity(a.k)},
              {"reference_exponent", 3 * a.k - 2},
              {"rows", rows}};
  result["proxy_exponent"] = xs.size() >= 2 ? json(loglog_slope(xs, ys)) : json(nullptr);
  return result;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral Galerkin toolkit for the radial defocusing NLS on the unit disc"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", DISCNLS_VERSION);

  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--workers", g.workers, "Worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  app.add_option("--cache-dir", g.cache_dir, "Cache directory")->envname(kCacheDirEnv);
  app.add_flag("--rebuild-cache", g.rebuild_cache, "Overwrite cache files instead of reading them");
  app.add_option("--config", g.config, "JSON config file; command-line flags override it");
  app.add_option("--csv", g.csv, "CSV output path ('-' for stdout)");
  app.add_option("--json", g.json_out, "JSON report path ('-' for stdout, '' to disable)");

  BasisArgs basis_a;
  auto* basis = app.add_subcommand("basis", "Eigenvalues and quadrature basis");
  basis->add_option("--modes", basis_a.modes, "Number of modes");
  basis->add_option("--order", basis_a.order, "Highest product order the quadrature must resolve");

  CorrelateArgs corr_a;
  auto* corr = app.add_subcommand("correlate", "Correlation integrals of eigenfunction products");
  corr->add_option("--k", corr_a.k, "Nonlinearity degree (tuples have 2k+2 indices)");
  corr->add_option("--tuple", corr_a.tuple, "Single index tuple")->delimiter(',');
  corr->add_option("--max-index", corr_a.max_index, "Enumerate all sorted tuples with indices up to this");

  CountArgs count_a;
  auto* count = app.add_subcommand("count", "Worst-case difference-pair counts");
  count->add_option("--R", count_a.R, "Frequency bounds")->delimiter(',');

  EvolveArgs evolve_a;
  auto* evolve_c = app.add_subcommand("evolve", "Truncated flow from a Gaussian free field draw");
  evolve_c->add_option("--N", evolve_a.N, "Frequency truncation");
  evolve_c->add_option("--k", evolve_a.k, "Nonlinearity degree");
  evolve_c->add_option("--t", evolve_a.t, "Final time (may be negative)");
  evolve_c->add_option("--dt", evolve_a.dt, "RK4 step (default from N and k)");
  evolve_c->add_option("--interval", evolve_a.interval, "Output sample spacing");
  evolve_c->add_option("--picture", evolve_a.picture, "physical or interaction");
  evolve_c->add_flag("--linear", evolve_a.linear, "Drop the nonlinearity");
  evolve_c->add_option("--save", evolve_a.save, "Binary trajectory file");

  GibbsArgs gibbs_a;
  auto* gibbs = app.add_subcommand("gibbs-invariance", "Monte Carlo invariance test of the truncated Gibbs measure");
  gibbs->add_option("--N", gibbs_a.N, "Frequency truncation");
  gibbs->add_option("--k", gibbs_a.k, "Nonlinearity degree");
  gibbs->add_option("--t", gibbs_a.t, "Evolution time");
  gibbs->add_option("--samples", gibbs_a.samples, "Ensemble size (>= 100)");
  gibbs->add_option("--observables", gibbs_a.observables, "mass, potential, abs2:n, re:n, im:n")->delimiter(',');
  gibbs->add_option("--coupling", gibbs_a.coupling, "beta in exp(-beta V)");
  gibbs->add_option("--attempt-cap", gibbs_a.attempt_cap, "Rejection attempts per sample");
  gibbs->add_option("--dt", gibbs_a.dt, "RK4 step");

  AnsatzArgs ansatz_a;
  auto* ansatz = app.add_subcommand("ansatz", "Random resonant ansatz decomposition y = psi + z");
  ansatz->add_option("--N", ansatz_a.N, "Dyadic levels")->delimiter(',');
  ansatz->add_option("--k", ansatz_a.k, "Nonlinearity degree");
  ansatz->add_option("--kappa", ansatz_a.kappa, "Low-level exponent gap");
  ansatz->add_option("--seeds", ansatz_a.seeds, "Seeds per level");
  ansatz->add_option("--t", ansatz_a.t, "Final time");
  ansatz->add_option("--outputs", ansatz_a.outputs, "Stored time samples");
  ansatz->add_option("--dt", ansatz_a.dt, "RK4 step");

  NormsArgs norms_a;
  auto* norms = app.add_subcommand("norms", "Ensemble-mean Sobolev norms of truncated free field draws");
  norms->add_option("--N", norms_a.N, "Truncations")->delimiter(',');
  norms->add_option("--s", norms_a.s, "Regularities")->delimiter(',');
  norms->add_option("--p", norms_a.p, "Lebesgue exponents (inf allowed)")->delimiter(',');
  norms->add_option("--samples", norms_a.samples, "Ensemble size");

  StrichartzArgs str_a;
  auto* strich = app.add_subcommand("strichartz", "Windowed L4 Strichartz ratios");
  strich->add_option("--N", str_a.N, "Truncations")->delimiter(',');
  strich->add_option("--eps", str_a.eps, "Sobolev exponent of the denominator");
  strich->add_option("--data", str_a.data, "gff or coherent");

  ScalingArgs scal_a;
  auto* scaling = app.add_subcommand("scaling-report", "Regularity thresholds and resonance counting");
  scaling->add_option("--k", scal_a.k, "Nonlinearity degree");
  scaling->add_option("--N", scal_a.N, "Frequency bounds")->delimiter(',');
  scaling->add_option("--max-tuples", scal_a.max_tuples, "Enumeration budget per N");

  try {
    if (const auto path = discnls::cli::find_config_path(argc, argv)) discnls::cli::apply_config_file(app, *path);
    app.parse(argc, argv);
  } catch (const CLI::RequiredError& e) {
    if (!app.remaining().empty()) {
      std::cerr << "error: unknown subcommand '" << app.remaining().front() << "'\n";
      return 2;
    }
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const discnls::cli::ConfigFileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    CLI::App* sub = app.get_subcommands().front();
    Report rep(sub->get_name(), g);
    Sink csv(g.csv);
    json result;
    if (sub == basis) result = run_basis(basis_a, rep, csv);
    else if (sub == corr) result = run_correlate(corr_a, g, rep, csv);
    else if (sub == count) result = run_count(count_a, g, csv);
    else if (sub == evolve_c) result = run_evolve(evolve_a, g, rep, csv);
    else if (sub == gibbs) result = run_gibbs(gibbs_a, g, rep, csv);
    else if (sub == ansatz) result = run_ansatz(ansatz_a, g, rep, csv);
    else if (sub == norms) result = run_norms(norms_a, g, rep, csv);
    else if (sub == strich) result = run_strichartz(str_a, g, rep, csv);
    else result = run_scaling(scal_a, g, csv);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Sink out(g.json_out);
    if (out) *out << rep.document(*sub, std::move(result), wall).dump(2) << '\n';
  } catch (const discnls::CacheError& e) {
    std::cerr << "cache error: " << e.what() << " (rerun with --rebuild-cache to regenerate)\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
