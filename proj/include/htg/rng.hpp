// Deterministic random streams. Each Monte Carlo replication owns one
// stream derived from (seed, stream index), so results do not depend on
// the order in which replications execute.
#pragma once

#include <cstdint>
#include <random>

namespace htg {

using Rng = std::mt19937_64;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

// Stream `stream` of the family identified by `seed`.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (0xd1b54a32d192ed03ull * (stream + 1));
  std::seed_seq seq{
      static_cast<std::uint32_t>(detail::splitmix64(state)),
      static_cast<std::uint32_t>(detail::splitmix64(state) >> 32),
      static_cast<std::uint32_t>(detail::splitmix64(state)),
      static_cast<std::uint32_t>(detail::splitmix64(state) >> 32),
      static_cast<std::uint32_t>(detail::splitmix64(state)),
      static_cast<std::uint32_t>(detail::splitmix64(state) >> 32),
  };
  return Rng(seq);
}

}  // namespace htg
