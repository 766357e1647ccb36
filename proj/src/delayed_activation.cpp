#include "fscap/channel.hpp"

namespace fscap {

std::string to_string(Variant v) { return v == Variant::Good ? "good" : "bad"; }

Variant parse_variant(std::string_view text) {
  if (text == "good") return Variant::Good;
  if (text == "bad") return Variant::Bad;
  throw ParseError("variant must be 'good' or 'bad', got '" + std::string(text) + "'");
}

UnifilarChannel make_delayed_activation(const DelayedActivationSpec& spec) {
  if (spec.N < 1) throw std::invalid_argument("delayed activation needs N >= 1");
  const std::size_t k = spec.N + 2;
  const State active = static_cast<State>(spec.N + 1);

  RawChannel raw = RawChannel::with_states(k);
  raw.labels.back() = "*";
  raw.initial[0] = 1;
  for (State s = 0; s < k; ++s) {
    const State next = s < spec.N ? s + 1 : active;
    for (unsigned x = 0; x < kInputAlphabet; ++x) {
      for (unsigned y = 0; y < kOutputAlphabet; ++y) {
        raw.update[table_index(s, x, y)] = next;
        Rat p(0);
        if (s != active) {
          p = (y == 0) ? 1 : 0;
        } else if (spec.variant == Variant::Good) {
          p = (y == x) ? 1 : 0;
        } else {
          p = Rat(1, 2);
        }
        raw.kernel[table_index(s, x, y)] = p;
      }
    }
  }
  return UnifilarChannel::from_raw(raw);
}

Rat closed_form_normalized_value(const DelayedActivationSpec& spec, unsigned n) {
  if (n < 1) throw std::invalid_argument("horizon must be >= 1");
  if (spec.variant == Variant::Bad || n <= spec.N + 1) return Rat(0);
  Rat out(static_cast<long>(n - (spec.N + 1)), static_cast<long>(n));
  out.canonicalize();
  return out;
}

Rat closed_form_capacity(const DelayedActivationSpec& spec) {
  return spec.variant == Variant::Good ? Rat(1) : Rat(0);
}

std::optional<DelayedActivationSpec> match_delayed_activation(const UnifilarChannel& channel) {
  if (channel.state_count() < 3) return std::nullopt;
  const unsigned N = static_cast<unsigned>(channel.state_count() - 2);
  for (Variant v : {Variant::Good, Variant::Bad}) {
    DelayedActivationSpec spec{N, v};
    if (make_delayed_activation(spec) == channel) return spec;
  }
  return std::nullopt;
}

}  // namespace fscap
