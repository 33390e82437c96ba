#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace nurse_boa {

// mt19937_64 output is fixed by the standard; the draw helpers below avoid the
// implementation-defined std:: distributions so streams replay on any toolchain.
using Rng = std::mt19937_64;

// Named sub-streams derived from a run's master seed.
enum class Stream : std::uint64_t {
  kInitialization = 1,
  kSelection = 2,
  kSampling = 3,
  kRules = 4,
  kGenerator = 5,
};

// SplitMix64 finalizer over (master, stream); distinct streams are decorrelated.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

inline Rng make_stream(std::uint64_t master, Stream stream) {
  return Rng{split_seed(master, static_cast<std::uint64_t>(stream))};
}

// Uniform integer in [0, bound). bound must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

inline std::size_t uniform_index(Rng& rng, std::size_t size) {
  return static_cast<std::size_t>(uniform_below(rng, size));
}

// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

}  // namespace nurse_boa
