#include "rainbow/seed.hpp"

namespace rainbow {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t global, std::string_view stage,
                          std::initializer_list<std::uint64_t> indices) {
  std::uint64_t h = splitmix64(global);
  h = splitmix64(h ^ fnv1a(stage));
  for (std::uint64_t i : indices) h = splitmix64(h ^ i);
  return h;
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  // Rejection sampling keeps this identical across standard libraries.
  const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - bound + 1) % bound;
  for (;;) {
    std::uint64_t x = rng();
    if (x >= limit) return x % bound;
  }
}

}  // namespace rainbow
