#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace rainbow {

using Rng = std::mt19937_64;

/// Keyed stage seed: splitmix64 chained over the global seed, the FNV-1a
/// hash of the stage name and every index in order.  Stages that consume
/// randomness never share an engine, so adding a stage or reordering the
/// work inside one stage leaves every other stage's stream untouched.
std::uint64_t derive_seed(std::uint64_t global, std::string_view stage,
                          std::initializer_list<std::uint64_t> indices = {});

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform integer in [0, bound).
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

}  // namespace rainbow
