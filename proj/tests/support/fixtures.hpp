#pragma once

#include "fscap/channel.hpp"
#include "fscap/policy.hpp"

#include <random>

namespace fscap::testing {

// Single state, y = x.
inline UnifilarChannel identity_channel() {
  RawChannel raw = RawChannel::with_states(1);
  raw.update = {0, 0, 0, 0};
  raw.kernel = {Rat(1), Rat(0), Rat(0), Rat(1)};
  raw.initial = {Rat(1)};
  return UnifilarChannel::from_raw(raw);
}

// Memoryless binary symmetric channel with crossover p.
inline UnifilarChannel bsc(const Rat& p) {
  RawChannel raw = RawChannel::with_states(1);
  raw.update = {0, 0, 0, 0};
  raw.kernel = {1 - p, p, p, 1 - p};
  raw.initial = {Rat(1)};
  return UnifilarChannel::from_raw(raw);
}

inline UnifilarChannel good(unsigned N) { return make_delayed_activation({N, Variant::Good}); }
inline UnifilarChannel bad(unsigned N) { return make_delayed_activation({N, Variant::Bad}); }

inline Rat random_prob(std::mt19937_64& rng, unsigned long max_den = 12) {
  const unsigned long den = 1 + rng() % max_den;
  Rat v(static_cast<unsigned long>(rng() % (den + 1)), den);
  v.canonicalize();
  return v;
}

inline UnifilarChannel random_channel(std::mt19937_64& rng, std::size_t states) {
  RawChannel raw = RawChannel::with_states(states);
  for (std::size_t s = 0; s < states; ++s) {
    for (unsigned x = 0; x < 2; ++x) {
      const Rat p1 = random_prob(rng);
      raw.kernel[table_index(s, x, 0)] = 1 - p1;
      raw.kernel[table_index(s, x, 1)] = p1;
      for (unsigned y = 0; y < 2; ++y) raw.update[table_index(s, x, y)] = static_cast<State>(rng() % states);
    }
  }
  Rat rest(1);
  for (std::size_t s = 0; s + 1 < states; ++s) {
    raw.initial[s] = rest * random_prob(rng, 4);
    rest -= raw.initial[s];
  }
  raw.initial[states - 1] = rest;
  return UnifilarChannel::from_raw(raw);
}

inline CausalPolicy random_policy(std::mt19937_64& rng, unsigned n, unsigned long max_den = 12) {
  PolicyCoordinates pc;
  pc.horizon = n;
  for (std::uint64_t i = 0; i < policy_dimension(n); ++i) pc.theta.push_back(random_prob(rng, max_den));
  return CausalPolicy::from_coordinates(std::move(pc));
}

}  // namespace fscap::testing
