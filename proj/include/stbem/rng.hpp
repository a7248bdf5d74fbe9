// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Splittable seeded random source. Streams are derived from a root seed
// plus an id path, so independent trials/users/noise draws get disjoint,
// reproducible substreams regardless of evaluation order or thread count.
// All distributions are generated from raw 64-bit draws (no std::
// distribution objects) so results are bit-identical across platforms.

#ifndef STBEM_RNG_HPP
#define STBEM_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace stbem {

namespace detail {

/// splitmix64 finalizer; good avalanche for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Seeded random source with explicit substream derivation.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(detail::splitmix64(seed)) {}

  RandomStream(std::uint64_t root, std::initializer_list<std::uint64_t> path)
      : gen_(derive(root, path)) {}

  static std::uint64_t derive(std::uint64_t root,
                              std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = detail::splitmix64(root);
    for (std::uint64_t id : path) s = detail::splitmix64(s ^ (id + 0x632BE59BD9B4E019ull));
    return s;
  }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform on [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Circularly-symmetric complex Gaussian, unit variance (CN(0,1)).
  std::complex<double> cnormal() {
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double r = std::sqrt(-std::log(u1));
    return std::polar(r, 2.0 * M_PI * u2);
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace stbem

#endif  // STBEM_RNG_HPP
