// rng.hpp
// Seeded random streams. mt19937_64 is fully specified by the standard, and
// the uniform doubles below are derived from raw bits rather than
// std::uniform_real_distribution, so identical seeds give identical streams
// on every platform. That property backs the byte-identical-output contract
// of the CLI.

#pragma once

#include <cstdint>
#include <random>

namespace qfes {

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t bits() { return engine_(); }

  // Derive an independent child stream; used to keep parallel chunks
  // deterministic regardless of thread count.
  RandomStream child(std::uint64_t salt) {
    return RandomStream(engine_() ^ (salt * 0x9e3779b97f4a7c15ULL));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qfes
