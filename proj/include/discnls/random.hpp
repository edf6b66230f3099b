#pragma once

// Counter-based seed derivation. Every random stream is keyed by integers
// (master seed, mode, sample, ...) so results never depend on call order or
// on how work is split across threads.

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace discnls {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Mix a master seed with a list of stream coordinates.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t c : coords) h = splitmix64(h ^ splitmix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

using Engine = std::mt19937_64;

/// Standard complex Gaussian: E|g|^2 = 1, real and imaginary parts
/// independent N(0, 1/2).
inline std::complex<double> complex_gaussian(Engine& eng) {
  std::normal_distribution<double> nd(0.0, 0.7071067811865476);
  const double re = nd(eng);
  const double im = nd(eng);
  return {re, im};
}

}  // namespace discnls
