// rng.hpp
// Seeded, splittable random streams. Draw primitives avoid the standard
// distribution templates so identical seeds replay bit-exactly everywhere.

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>

namespace qsdc {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

// A deterministic random stream. Children are keyed by name (and an optional
// index) rather than by draw position: deriving never consumes a draw, so
// adding draws in one component cannot perturb the draws seen by another.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed)
      : root_(seed), engine_(detail::splitmix64(seed)) {}

  RandomStream derive(std::string_view name) const {
    return RandomStream(detail::splitmix64(root_ ^ detail::fnv1a64(name)));
  }

  RandomStream derive(std::string_view name, std::uint64_t index) const {
    return RandomStream(detail::splitmix64(root_ ^ detail::fnv1a64(name) ^
                                           detail::splitmix64(index + 1)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in {0, ..., n-1}; rejection sampling keeps it exactly uniform.
  int uniform_int(int n) {
    if (n <= 0) throw std::domain_error("RandomStream: uniform_int needs n >= 1");
    const auto un = static_cast<std::uint64_t>(n);
    const std::uint64_t bound = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= bound);
    return static_cast<int>(x % un);
  }

  bool coin() { return (next_u64() >> 63) != 0; }

 private:
  std::uint64_t root_;
  std::mt19937_64 engine_;
};

}  // namespace qsdc
