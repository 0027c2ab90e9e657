#pragma once

#include <cstdint>
#include <random>

namespace dagbag {

// Random generator contract shared by every stochastic routine:
//   substream seed = splitmix64(splitmix64(master) ^ splitmix64(stream * 2^32 + attempt + 1))
//   engine         = std::mt19937_64 seeded with that value
//   index in [0,n) = high 64 bits of (engine() * n) as a 128-bit product
// All three pieces are fully specified by the C++ standard or below, so a
// substream can be reproduced by any implementation.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream,
                                       std::uint64_t attempt = 0) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64((stream << 32) + attempt + 1));
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t stream,
                                   std::uint64_t attempt = 0) {
  return std::mt19937_64(substream_seed(master, stream, attempt));
}

inline std::uint64_t uniform_index(std::mt19937_64& engine, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine()) * n) >> 64);
}

}  // namespace dagbag
