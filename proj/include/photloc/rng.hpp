#pragma once

// Counter-based random values keyed by (master seed, stream, realization,
// lattice site). Every draw is a pure function of its key, so disorder
// fields are reproducible independent of iteration order and of how
// realizations are distributed over workers. Nested boxes automatically
// agree on shared sites.

#include <cstdint>

#include "photloc/lattice.hpp"

namespace photloc {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t absorb(std::uint64_t h, std::uint64_t v) { return mix64(h ^ v); }

// Streams keep independent uses of the same (seed, realization, site) key
// from colliding.
enum class RngStream : std::uint64_t {
  disorder_field = 0,
  rho_hat = 1,
};

inline std::uint64_t site_key(std::uint64_t master_seed, RngStream stream,
                              std::uint64_t realization, const Site& x) {
  std::uint64_t h = mix64(master_seed);
  h = absorb(h, static_cast<std::uint64_t>(stream));
  h = absorb(h, realization);
  h = absorb(h, static_cast<std::uint64_t>(x.size()));
  for (int c : x) h = absorb(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
  return h;
}

// Uniform on [0,1) with 53 random bits.
inline double uniform01(std::uint64_t key) {
  return static_cast<double>(key >> 11) * 0x1.0p-53;
}

inline double site_uniform(std::uint64_t master_seed, RngStream stream,
                           std::uint64_t realization, const Site& x) {
  return uniform01(site_key(master_seed, stream, realization, x));
}

}  // namespace photloc
