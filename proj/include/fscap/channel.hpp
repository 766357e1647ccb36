#pragma once

#include "fscap/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fscap {

using State = std::uint32_t;

inline constexpr unsigned kInputAlphabet = 2;
inline constexpr unsigned kOutputAlphabet = 2;

/// Row-major (s, x, y) position in the update and kernel tables.
constexpr std::size_t table_index(State s, unsigned x, unsigned y) {
  return (static_cast<std::size_t>(s) * kInputAlphabet + x) * kOutputAlphabet + y;
}

/// Unvalidated channel description, as read from a file or built by hand.
/// Missing update entries are empty optionals; missing kernel entries are 0.
struct RawChannel {
  std::size_t state_count = 0;
  std::vector<std::string> labels;
  std::vector<std::optional<State>> update;  // size state_count*4
  std::vector<Rat> kernel;                   // size state_count*4, P(y|x,s)
  std::vector<Rat> initial;                  // size state_count

  /// Empty description with correctly sized tables.
  static RawChannel with_states(std::size_t k);
};

struct Violation {
  enum class Kind {
    EmptyStateSet,
    TableShape,
    KernelOutOfRange,
    NonStochasticRow,
    InitialOutOfRange,
    InitialNotNormalized,
    PartialUpdate,
    UpdateOutOfRange,
  };
  Kind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(Violation::Kind kind) const;
  std::string to_string() const;
};

class InvalidChannel : public std::runtime_error {
 public:
  explicit InvalidChannel(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct ValidationOutcome;

/// A validated rational unifilar finite-state channel with binary input and
/// output. Immutable once constructed.
class UnifilarChannel {
 public:
  /// Throws InvalidChannel listing every violated invariant.
  static UnifilarChannel from_raw(const RawChannel& raw);

  std::size_t state_count() const { return initial_.size(); }
  const std::string& label(State s) const { return labels_[s]; }
  const std::vector<std::string>& labels() const { return labels_; }

  State next(State s, unsigned x, unsigned y) const { return update_[table_index(s, x, y)]; }
  /// P(y | x, s).
  const Rat& output_prob(State s, unsigned x, unsigned y) const {
    return kernel_[table_index(s, x, y)];
  }
  /// W(y, s' | x, s) = P(y|x,s) * [s' = next(s,x,y)].
  Rat full_kernel(State s, unsigned x, unsigned y, State s_next) const;
  const Rat& initial(State s) const { return initial_[s]; }

  const std::vector<State>& update_table() const { return update_; }
  const std::vector<Rat>& kernel_table() const { return kernel_; }
  const std::vector<Rat>& initial_table() const { return initial_; }

  RawChannel to_raw() const;

  /// Structural equality; labels are ignored.
  friend bool operator==(const UnifilarChannel& a, const UnifilarChannel& b);

 private:
  UnifilarChannel() = default;
  static UnifilarChannel build_unchecked(const RawChannel& raw);
  friend ValidationOutcome validate_channel(const RawChannel& raw);

  std::vector<std::string> labels_;
  std::vector<State> update_;
  std::vector<Rat> kernel_;
  std::vector<Rat> initial_;
};

struct ValidationOutcome {
  std::optional<UnifilarChannel> channel;
  ValidationReport report;
};

ValidationOutcome validate_channel(const RawChannel& raw);

// ---------------------------------------------------------------------------
// Canonical binary encoding.

struct ChannelEncoding {
  std::vector<std::uint8_t> bytes;

  friend bool operator==(const ChannelEncoding&, const ChannelEncoding&) = default;
};

/// Thrown on syntactically malformed encodings; position() is the byte offset
/// of the first violation.
class MalformedEncoding : public std::runtime_error {
 public:
  MalformedEncoding(std::size_t position, const std::string& what);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

ChannelEncoding encode_channel(const UnifilarChannel& channel);
/// Throws MalformedEncoding or InvalidChannel.
UnifilarChannel decode_channel(const ChannelEncoding& encoding);

/// Lowercase hex SHA-256 of the encoding bytes.
std::string encoding_hash(const ChannelEncoding& encoding);

std::string to_hex(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

// ---------------------------------------------------------------------------
// Textual format (fscv1).

/// Parses the line-oriented text format. Throws ParseError with the line
/// number on syntax errors. The result is not validated.
RawChannel parse_channel_text(std::string_view text);
std::string format_channel_text(const UnifilarChannel& channel);

UnifilarChannel read_channel_file(const std::string& path);
void write_channel_file(const std::string& path, const UnifilarChannel& channel);

// ---------------------------------------------------------------------------
// Delayed-activation family.

enum class Variant { Good, Bad };

struct DelayedActivationSpec {
  unsigned N = 1;
  Variant variant = Variant::Good;
};

std::string to_string(Variant v);
Variant parse_variant(std::string_view text);

/// States 0..N followed by the absorbing active state (index N+1, label "*").
UnifilarChannel make_delayed_activation(const DelayedActivationSpec& spec);

/// a_n = V_n / n for the family, exact.
Rat closed_form_normalized_value(const DelayedActivationSpec& spec, unsigned n);

/// Feedback capacity of the family: 1 for Good, 0 for Bad.
Rat closed_form_capacity(const DelayedActivationSpec& spec);

/// Recognizes a channel structurally equal to a family member.
std::optional<DelayedActivationSpec> match_delayed_activation(const UnifilarChannel& channel);

}  // namespace fscap
