#ifndef SDL_RANDOM_HPP
#define SDL_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace sdl {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based stream splitting: the same (seed, tag, counters) always
/// yields the same child seed, independent of the order streams are requested.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                                 std::initializer_list<std::uint64_t> counters = {}) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(hash_tag(tag)));
  for (std::uint64_t c : counters) s = splitmix64(s ^ splitmix64(c + 0x632be59bd9b4e019ULL));
  return s;
}

/// Small fast generator for per-pixel texture noise.
class Xoshiro256 {
public:
  explicit Xoshiro256(std::uint64_t seed) {
    for (auto& w : state_) {
      seed = splitmix64(seed);
      w = seed;
    }
  }

  std::uint64_t operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

}  // namespace sdl

#endif
