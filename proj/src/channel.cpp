#include "fscap/channel.hpp"

#include "bytes.hpp"
#include "fscap/digest.hpp"

#include <sstream>

namespace fscap {

namespace {

constexpr std::uint8_t kMagic[4] = {'F', 'S', 'C', 'E'};
constexpr std::uint8_t kEncodingVersion = 1;
constexpr std::size_t kRowWidth = kInputAlphabet * kOutputAlphabet;

std::string default_label(std::size_t s) { return std::to_string(s); }

}  // namespace

RawChannel RawChannel::with_states(std::size_t k) {
  RawChannel raw;
  raw.state_count = k;
  raw.labels.resize(k);
  for (std::size_t s = 0; s < k; ++s) raw.labels[s] = default_label(s);
  raw.update.assign(k * kRowWidth, std::nullopt);
  raw.kernel.assign(k * kRowWidth, Rat(0));
  raw.initial.assign(k, Rat(0));
  return raw;
}

bool ValidationReport::has(Violation::Kind kind) const {
  for (const auto& v : violations) {
    if (v.kind == kind) return true;
  }
  return false;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) os << v.message << '\n';
  return os.str();
}

InvalidChannel::InvalidChannel(ValidationReport report)
    : std::runtime_error("invalid channel:\n" + report.to_string()), report_(std::move(report)) {}

ValidationOutcome validate_channel(const RawChannel& raw) {
  ValidationOutcome out;
  auto& violations = out.report.violations;
  auto add = [&](Violation::Kind kind, std::string msg) { violations.push_back({kind, std::move(msg)}); };

  const std::size_t k = raw.state_count;
  if (k == 0) {
    add(Violation::Kind::EmptyStateSet, "state set is empty");
    return out;
  }
  if (raw.update.size() != k * kRowWidth || raw.kernel.size() != k * kRowWidth ||
      raw.initial.size() != k || (!raw.labels.empty() && raw.labels.size() != k)) {
    add(Violation::Kind::TableShape, "table sizes do not match state count " + std::to_string(k));
    return out;
  }

  for (std::size_t s = 0; s < k; ++s) {
    for (unsigned x = 0; x < kInputAlphabet; ++x) {
      Rat row_sum(0);
      for (unsigned y = 0; y < kOutputAlphabet; ++y) {
        const Rat& p = raw.kernel[table_index(static_cast<State>(s), x, y)];
        if (!is_probability(p)) {
          add(Violation::Kind::KernelOutOfRange, "kernel entry P(y=" + std::to_string(y) + "|x=" +
                                                     std::to_string(x) + ",s=" + std::to_string(s) +
                                                     ") = " + to_string(p) + " outside [0,1]");
        }
        row_sum += p;
      }
      if (row_sum != 1) {
        add(Violation::Kind::NonStochasticRow, "kernel row (s=" + std::to_string(s) + ", x=" +
                                                   std::to_string(x) + ") sums to " +
                                                   to_string(row_sum) + ", not 1");
      }
    }
  }

  Rat init_sum(0);
  for (std::size_t s = 0; s < k; ++s) {
    if (!is_probability(raw.initial[s])) {
      add(Violation::Kind::InitialOutOfRange, "initial probability of state " + std::to_string(s) +
                                                  " = " + to_string(raw.initial[s]) +
                                                  " outside [0,1]");
    }
    init_sum += raw.initial[s];
  }
  if (init_sum != 1) {
    add(Violation::Kind::InitialNotNormalized,
        "initial distribution sums to " + to_string(init_sum) + ", not 1");
  }

  for (std::size_t s = 0; s < k; ++s) {
    for (unsigned x = 0; x < kInputAlphabet; ++x) {
      for (unsigned y = 0; y < kOutputAlphabet; ++y) {
        const auto& next = raw.update[table_index(static_cast<State>(s), x, y)];
        const std::string where =
            "(s=" + std::to_string(s) + ", x=" + std::to_string(x) + ", y=" + std::to_string(y) + ")";
        if (!next) {
          add(Violation::Kind::PartialUpdate, "update map undefined at " + where);
        } else if (*next >= k) {
          add(Violation::Kind::UpdateOutOfRange,
              "update map at " + where + " targets unknown state " + std::to_string(*next));
        }
      }
    }
  }

  if (!violations.empty()) return out;

  out.channel.emplace(UnifilarChannel::build_unchecked(raw));
  return out;
}

UnifilarChannel UnifilarChannel::from_raw(const RawChannel& raw) {
  ValidationOutcome outcome = validate_channel(raw);
  if (!outcome.report.ok()) throw InvalidChannel(std::move(outcome.report));
  return std::move(*outcome.channel);
}

UnifilarChannel UnifilarChannel::build_unchecked(const RawChannel& raw) {
  UnifilarChannel ch;
  ch.labels_ = raw.labels;
  if (ch.labels_.empty()) {
    for (std::size_t s = 0; s < raw.state_count; ++s) ch.labels_.push_back(default_label(s));
  }
  ch.update_.reserve(raw.update.size());
  for (const auto& u : raw.update) ch.update_.push_back(*u);
  ch.kernel_ = raw.kernel;
  ch.initial_ = raw.initial;
  return ch;
}

Rat UnifilarChannel::full_kernel(State s, unsigned x, unsigned y, State s_next) const {
  return next(s, x, y) == s_next ? output_prob(s, x, y) : Rat(0);
}

RawChannel UnifilarChannel::to_raw() const {
  RawChannel raw;
  raw.state_count = state_count();
  raw.labels = labels_;
  for (State u : update_) raw.update.emplace_back(u);
  raw.kernel = kernel_;
  raw.initial = initial_;
  return raw;
}

bool operator==(const UnifilarChannel& a, const UnifilarChannel& b) {
  return a.update_ == b.update_ && a.kernel_ == b.kernel_ && a.initial_ == b.initial_;
}

// ---------------------------------------------------------------------------

MalformedEncoding::MalformedEncoding(std::size_t position, const std::string& what)
    : std::runtime_error("malformed encoding at byte " + std::to_string(position) + ": " + what),
      position_(position) {}

ChannelEncoding encode_channel(const UnifilarChannel& channel) {
  detail::ByteWriter w;
  for (std::uint8_t b : kMagic) w.u8(b);
  w.u8(kEncodingVersion);
  w.u32(static_cast<std::uint32_t>(channel.state_count()));
  for (State u : channel.update_table()) w.u32(u);
  for (const Rat& p : channel.kernel_table()) w.nonneg_rat(p);
  for (const Rat& p : channel.initial_table()) w.nonneg_rat(p);
  return ChannelEncoding{w.take()};
}

UnifilarChannel decode_channel(const ChannelEncoding& encoding) {
  if (encoding.bytes.empty()) throw MalformedEncoding(0, "empty encoding");
  detail::ByteReader r(encoding.bytes);
  for (std::uint8_t b : kMagic) {
    const std::size_t at = r.position();
    if (r.u8() != b) throw MalformedEncoding(at, "bad magic");
  }
  {
    const std::size_t at = r.position();
    if (r.u8() != kEncodingVersion) throw MalformedEncoding(at, "unsupported version");
  }
  const std::size_t count_pos = r.position();
  const std::uint32_t k = r.u32();
  if (k == 0) throw MalformedEncoding(count_pos, "zero states");
  // Each state needs at least 4 update words and 5 rationals of 8 bytes.
  const std::size_t min_remaining = static_cast<std::size_t>(k) * (4 * 4 + 5 * 8);
  if (encoding.bytes.size() - r.position() < min_remaining) {
    throw MalformedEncoding(encoding.bytes.size(), "unexpected end of encoding");
  }

  RawChannel raw = RawChannel::with_states(k);
  for (auto& u : raw.update) u = r.u32();
  for (auto& p : raw.kernel) p = r.nonneg_rat();
  for (auto& p : raw.initial) p = r.nonneg_rat();
  if (!r.at_end()) throw MalformedEncoding(r.position(), "trailing bytes");
  return UnifilarChannel::from_raw(raw);
}

std::string encoding_hash(const ChannelEncoding& encoding) { return sha256_hex(encoding.bytes); }

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw ParseError("invalid hex digit");
  };
  if (hex.size() % 2 != 0) throw ParseError("odd-length hex string");
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return out;
}

}  // namespace fscap
