#pragma once

#include <cstdint>
#include <limits>

namespace pulseforge {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// splitmix64 generator; cheap to construct, so every Monte-Carlo shot gets its own.
class StreamEngine {
 public:
  using result_type = std::uint64_t;

  explicit constexpr StreamEngine(std::uint64_t state) noexcept : state_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Independent generator for sub-stream `index` of `seed`. Results depend only
// on (seed, index), never on evaluation order or thread assignment.
constexpr StreamEngine stream_engine(std::uint64_t seed, std::uint64_t index) noexcept {
  return StreamEngine(mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL)));
}

}  // namespace pulseforge
