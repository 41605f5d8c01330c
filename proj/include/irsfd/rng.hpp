#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace irsfd {

// Seeded generator with a platform-independent draw sequence.
//
// The engine is std::mt19937_64, whose output stream is fixed by the
// standard. Distributions are implemented here rather than through
// <random> distribution classes, whose algorithms are implementation
// defined:
//   uniform()        one engine draw, top 53 bits -> [0, 1)
//   normal()         two uniforms, Box-Muller cosine branch
//   complex_normal() two uniforms, Box-Muller; real and imaginary parts
//                    are N(0, 1/2) so E|z|^2 = 1
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::complex<double> complex_normal();

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent sub-seed from a base seed and an index path, e.g.
/// derive_seed(seed, {value_index, realization}). Order-sensitive.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

}  // namespace irsfd
