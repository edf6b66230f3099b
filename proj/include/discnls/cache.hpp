#pragma once

// Versioned binary cache files.
//
// Layout: 8-byte magic, u32 format version, u32 payload kind, u64 mode_count,
// u64 node_count, u64 parameter fingerprint, then the payload. All integers
// and doubles are written in host byte order.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "discnls/errors.hpp"
#include "discnls/spectral_basis.hpp"

namespace discnls {

inline constexpr std::array<char, 8> kCacheMagic = {'D', 'N', 'L', 'S', 'C', 'A', 'C', 'H'};
inline constexpr std::uint32_t kCacheFormatVersion = 1;
inline constexpr const char* kCacheDirEnv = "DISCNLS_CACHE_DIR";

enum class CacheKind : std::uint32_t { basis = 1, correlation = 2, trajectory = 3 };

struct CacheHeader {
  std::uint32_t version = kCacheFormatVersion;
  CacheKind kind = CacheKind::basis;
  std::uint64_t mode_count = 0;
  std::uint64_t node_count = 0;
  std::uint64_t fingerprint = 0;
};

/// FNV-1a over a list of integers; identifies the parameters a cache was built for.
inline std::uint64_t fingerprint(std::initializer_list<std::int64_t> params) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::int64_t p : params) {
    auto u = static_cast<std::uint64_t>(p);
    for (int b = 0; b < 8; ++b) {
      h ^= (u >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

namespace io {

template <class T>
void write_pod(std::ostream& os, const T& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& is, const char* what) {
  static_assert(std::is_trivially_copyable_v<T>);
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw CacheError(std::string("cache truncated while reading ") + what);
  return v;
}

template <class T>
void write_vec(std::ostream& os, const T* data, std::size_t n) {
  write_pod<std::uint64_t>(os, n);
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(*data)));
}

template <class T>
std::vector<T> read_vec(std::istream& is, const char* what, std::size_t max_len = (1ULL << 32)) {
  const auto n = read_pod<std::uint64_t>(is, what);
  if (n > max_len) throw CacheError(std::string("cache corrupt: implausible length for ") + what);
  std::vector<T> v(n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
  if (!is) throw CacheError(std::string("cache truncated while reading ") + what);
  return v;
}

}  // namespace io

inline void write_header(std::ostream& os, const CacheHeader& h) {
  os.write(kCacheMagic.data(), kCacheMagic.size());
  io::write_pod(os, h.version);
  io::write_pod(os, static_cast<std::uint32_t>(h.kind));
  io::write_pod(os, h.mode_count);
  io::write_pod(os, h.node_count);
  io::write_pod(os, h.fingerprint);
}

/// Read a header and verify magic, version and kind.
inline CacheHeader read_header(std::istream& is, CacheKind expected_kind) {
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kCacheMagic) throw CacheError("cache header corrupt: bad magic string");
  CacheHeader h;
  h.version = io::read_pod<std::uint32_t>(is, "version");
  if (h.version != kCacheFormatVersion)
    throw CacheError("cache format version mismatch: file has " + std::to_string(h.version) +
                     ", expected " + std::to_string(kCacheFormatVersion));
  const auto kind = io::read_pod<std::uint32_t>(is, "kind");
  if (kind != static_cast<std::uint32_t>(expected_kind))
    throw CacheError("cache kind mismatch: file has kind " + std::to_string(kind));
  h.kind = expected_kind;
  h.mode_count = io::read_pod<std::uint64_t>(is, "mode_count");
  h.node_count = io::read_pod<std::uint64_t>(is, "node_count");
  h.fingerprint = io::read_pod<std::uint64_t>(is, "fingerprint");
  return h;
}

inline void check_header(const CacheHeader& found, const CacheHeader& expected) {
  if (found.mode_count != expected.mode_count || found.node_count != expected.node_count ||
      found.fingerprint != expected.fingerprint)
    throw CacheError("stale cache: built for mode_count=" + std::to_string(found.mode_count) +
                     " node_count=" + std::to_string(found.node_count) +
                     ", requested mode_count=" + std::to_string(expected.mode_count) +
                     " node_count=" + std::to_string(expected.node_count));
}

/// Cache directory from an explicit setting, else the environment, else none.
inline std::optional<std::filesystem::path> resolve_cache_dir(const std::string& explicit_dir = {}) {
  if (!explicit_dir.empty()) return std::filesystem::path(explicit_dir);
  if (const char* env = std::getenv(kCacheDirEnv); env != nullptr && *env != '\0')
    return std::filesystem::path(env);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Basis cache

inline CacheHeader basis_header(int mode_count, int product_order) {
  const int q = quadrature_size(mode_count, product_order);
  return CacheHeader{kCacheFormatVersion, CacheKind::basis, static_cast<std::uint64_t>(mode_count),
                     static_cast<std::uint64_t>(q), fingerprint({mode_count, product_order, q})};
}

inline std::string basis_cache_name(int mode_count, int product_order) {
  return "basis_m" + std::to_string(mode_count) + "_p" + std::to_string(product_order) + ".bin";
}

inline void save_basis(const SpectralBasis& basis, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw CacheError("cannot open cache file for writing: " + path.string());
  write_header(os, basis_header(basis.mode_count(), basis.product_order()));
  std::vector<double> lambdas, norms;
  for (const auto& m : basis.modes()) {
    lambdas.push_back(m.lambda);
    norms.push_back(m.j0_l2_norm);
  }
  io::write_vec(os, lambdas.data(), lambdas.size());
  io::write_vec(os, norms.data(), norms.size());
  io::write_vec(os, basis.quad().nodes.data(), basis.quad().nodes.size());
  io::write_vec(os, basis.quad().weights.data(), basis.quad().weights.size());
  const Eigen::MatrixXd& v = basis.values();
  io::write_vec(os, v.data(), static_cast<std::size_t>(v.size()));
  if (!os) throw CacheError("failed writing cache file " + path.string());
}

inline SpectralBasis load_basis(const std::filesystem::path& path, int mode_count, int product_order) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CacheError("cannot open cache file: " + path.string());
  const CacheHeader expected = basis_header(mode_count, product_order);
  check_header(read_header(is, CacheKind::basis), expected);
  const auto lambdas = io::read_vec<double>(is, "eigenvalues");
  const auto norms = io::read_vec<double>(is, "j0 norms");
  QuadratureRule quad;
  quad.nodes = io::read_vec<double>(is, "nodes");
  quad.weights = io::read_vec<double>(is, "weights");
  const auto vals = io::read_vec<double>(is, "values");
  const auto m = static_cast<std::size_t>(mode_count);
  const auto q = static_cast<std::size_t>(expected.node_count);
  if (lambdas.size() != m || norms.size() != m || quad.nodes.size() != q || quad.weights.size() != q ||
      vals.size() != m * q)
    throw CacheError("cache corrupt: payload sizes disagree with header in " + path.string());
  std::vector<EigenMode> modes(m);
  for (std::size_t i = 0; i < m; ++i) modes[i] = EigenMode{static_cast<int>(i + 1), lambdas[i], norms[i]};
  Eigen::MatrixXd values = Eigen::Map<const Eigen::MatrixXd>(vals.data(), mode_count,
                                                             static_cast<Eigen::Index>(q));
  return SpectralBasis(std::move(modes), std::move(quad), std::move(values), product_order);
}

/// Load the basis from `cache_dir` if present, otherwise build and store it.
/// A file whose header does not match is an error unless `rebuild` is set, in
/// which case it is overwritten.
inline SpectralBasis cached_basis(const std::optional<std::filesystem::path>& cache_dir, int mode_count,
                                  int product_order, bool rebuild = false) {
  if (!cache_dir) return build_basis(mode_count, product_order);
  const auto path = *cache_dir / basis_cache_name(mode_count, product_order);
  if (!rebuild && std::filesystem::exists(path)) return load_basis(path, mode_count, product_order);
  SpectralBasis basis = build_basis(mode_count, product_order);
  save_basis(basis, path);
  return basis;
}

}  // namespace discnls
