#pragma once

#include "fscap/channel.hpp"
#include "fscap/solver.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fscap {

/// ⟨e,q⟩: u32 big-endian length of e, the bytes of e, then q as a sign byte
/// followed by length-prefixed numerator and denominator magnitudes.
std::vector<std::uint8_t> pair_query(const ChannelEncoding& e, const Rat& q);
/// Throws MalformedEncoding on truncated, trailing or non-canonical input.
std::pair<ChannelEncoding, Rat> unpair_query(std::span<const std::uint8_t> paired);

struct ThresholdQuery {
  ChannelEncoding encoding;
  Rat q;
  std::vector<std::uint8_t> paired;

  static ThresholdQuery make(const ChannelEncoding& e, const Rat& q);
  static ThresholdQuery make(const UnifilarChannel& channel, const Rat& q) { return make(encode_channel(channel), q); }
};

enum class ApproxMode { Target, ReportBound, ClosedForm };
std::string to_string(ApproxMode mode);
ApproxMode parse_approx_mode(std::string_view text);

enum class Verdict { Holds, Fails, Indeterminate };
std::string to_string(Verdict v);
Verdict parse_verdict(std::string_view text);

/// r > q - 2^-k + 2^-M, exact.
bool threshold_predicate(const Rat& r, const Rat& q, unsigned k, unsigned M);

/// Replacement ApproxA used by tests; returns r for (e, n, M).
using ApproxFunction = std::function<Rat(const ChannelEncoding&, unsigned n, unsigned M)>;

struct CheckOptions {
  ApproxMode mode = ApproxMode::Target;
  SolverOptions solver;
  unsigned report_grid = 2;      // grid resolution for report-bound mode
  ApproxFunction approx;         // when set, overrides `mode`
};

struct ThresholdCertificate {
  ThresholdQuery query;
  unsigned k = 0;
  unsigned n = 1;
  unsigned M = 1;
  ApproxMode mode = ApproxMode::Target;
  unsigned report_grid = 0;
  std::optional<Rat> r;
  std::optional<Rat> radius;
  Verdict verdict = Verdict::Indeterminate;
  std::string channel_hash;
  std::optional<CertifiedValue> value;  // solver record, absent for closed-form or injected ApproxA
  std::string note;                     // reason when indeterminate
};

/// Decides R(e,q,k,n,M) for one cell. Budget exhaustion and a report-bound
/// radius above 2^-M yield an indeterminate certificate.
ThresholdCertificate check_R(const ThresholdQuery& query, unsigned k, unsigned n, unsigned M,
                             const CheckOptions& opts = {});

/// (n, M) pairs ordered by n + M, then n.
std::vector<std::pair<unsigned, unsigned>> diagonal_order(unsigned horizon_cap, unsigned M_cap);

struct SearchResult {
  std::optional<ThresholdCertificate> certificate;  // first holding cell
  std::vector<std::pair<unsigned, unsigned>> examined;
  std::vector<std::pair<unsigned, unsigned>> indeterminate;
  bool exhausted() const { return !certificate.has_value(); }
};

SearchResult certificate_search(const ThresholdQuery& query, unsigned k, unsigned horizon_cap, unsigned M_cap,
                                const CheckOptions& opts = {});

// Textual certificate: `fscert1` header, one `key value` per line, closed by
// a `digest <sha256>` line over all preceding bytes.
std::string format_certificate(const ThresholdCertificate& cert);
ThresholdCertificate parse_certificate(std::string_view text);

struct VerifyResult {
  bool ok = false;
  std::string reason;
};

/// Parses, checks the digest and the channel hash (against `channel` when
/// given), reruns ApproxA under the recorded mode and compares the
/// re-serialized certificate byte for byte.
VerifyResult verify_certificate(std::string_view text, const UnifilarChannel* channel = nullptr,
                                const SolverOptions& solver = {});

struct AuditRow {
  unsigned k = 0;
  std::optional<unsigned> least_n;  // least n <= n_max with a_n > q - 2^-k
  bool exists = false;              // some n at all, from the closed form
};

struct SlackAudit {
  Rat capacity;
  bool capacity_at_least_q = false;
  bool all_k_satisfied = false;     // every row has exists = true
  bool agrees = false;              // the two sides of the equivalence match on k <= k_max
  std::vector<AuditRow> rows;
};

SlackAudit limsup_slack_audit(const DelayedActivationSpec& spec, const Rat& q, unsigned k_max, unsigned n_max);

}  // namespace fscap
