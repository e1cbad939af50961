#pragma once

// Seeded randomness helpers. mt19937_64 output is pinned by the standard, and
// the uint64 -> double conversion below avoids std::uniform_real_distribution,
// whose stream is implementation-defined. Runs are reproducible bit for bit.

#include <cstdint>
#include <random>

namespace qpsc {

inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform in [lo, hi).
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * u01(rng);
}

inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace qpsc
