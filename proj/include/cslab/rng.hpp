#ifndef CSLAB_RNG_HPP_
#define CSLAB_RNG_HPP_

#include <cstdint>
#include <random>

#include "cslab/types.hpp"

namespace cslab {

// splitmix64 step, used to derive independent streams from one base seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Deterministic RNG with an explicit uniform mapping (the standard
// distributions are implementation-defined, which would break byte-identical
// artifacts across toolchains).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Derives a child stream; (seed, stream index) fully determines the child.
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ull * (stream + 1));
    return Rng(splitmix64(s));
  }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1).
  Real uniform() { return Real(eng_() >> 11) * 0x1.0p-53; }

  Real uniform(Real lo, Real hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  int uniform_int(int n) { return int(uniform() * n) % n; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace cslab

#endif  // CSLAB_RNG_HPP_
