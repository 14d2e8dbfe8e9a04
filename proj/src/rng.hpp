#pragma once

#include <cstdint>
#include <random>

namespace diffract {

// Stream-seed derivation for ensembles: realization i draws from
// seed_stream(master, i). splitmix64 finalizer over master + (i+1)*phi64,
// so streams are decorrelated and the rule is reproducible anywhere.
inline std::uint64_t seed_stream(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Seeded generator with a platform-independent uniform. mt19937_64 output
/// is pinned by the standard; the double conversion uses the top 53 bits,
/// so identical seeds give identical streams on any conforming toolchain.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1)
  double uniform() { return (eng_() >> 11) * 0x1p-53; }

private:
  std::mt19937_64 eng_;
};

}  // namespace diffract
