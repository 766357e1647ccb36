#include "fscap/certificate.hpp"

#include "bytes.hpp"
#include "fscap/digest.hpp"

#include <sstream>
#include <stdexcept>

namespace fscap {

std::vector<std::uint8_t> pair_query(const ChannelEncoding& e, const Rat& q) {
  detail::ByteWriter w;
  w.u32(static_cast<std::uint32_t>(e.bytes.size()));
  w.raw(e.bytes);
  Rat canonical = q;
  canonical.canonicalize();
  w.signed_rat(canonical);
  return w.take();
}

std::pair<ChannelEncoding, Rat> unpair_query(std::span<const std::uint8_t> paired) {
  const std::vector<std::uint8_t> bytes(paired.begin(), paired.end());
  detail::ByteReader r(bytes);
  const std::uint32_t len = r.u32();
  ChannelEncoding e{r.raw(len)};
  Rat q = r.signed_rat();
  if (!r.at_end()) throw MalformedEncoding(r.position(), "trailing bytes after pairing");
  return {std::move(e), std::move(q)};
}

ThresholdQuery ThresholdQuery::make(const ChannelEncoding& e, const Rat& q) {
  Rat canonical = q;
  canonical.canonicalize();
  return ThresholdQuery{e, canonical, pair_query(e, canonical)};
}

std::string to_string(ApproxMode mode) {
  switch (mode) {
    case ApproxMode::Target: return "target";
    case ApproxMode::ReportBound: return "report-bound";
    case ApproxMode::ClosedForm: return "closed-form";
  }
  return "?";
}

ApproxMode parse_approx_mode(std::string_view text) {
  if (text == "target") return ApproxMode::Target;
  if (text == "report-bound") return ApproxMode::ReportBound;
  if (text == "closed-form") return ApproxMode::ClosedForm;
  throw ParseError("unknown ApproxA mode '" + std::string(text) + "'");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "?";
}

Verdict parse_verdict(std::string_view text) {
  if (text == "holds") return Verdict::Holds;
  if (text == "fails") return Verdict::Fails;
  if (text == "indeterminate") return Verdict::Indeterminate;
  throw ParseError("unknown verdict '" + std::string(text) + "'");
}

bool threshold_predicate(const Rat& r, const Rat& q, unsigned k, unsigned M) {
  return r > q - pow2(-static_cast<long>(k)) + pow2(-static_cast<long>(M));
}

namespace {

unsigned ceil_log2(unsigned v) {
  unsigned bits = 0;
  while ((1U << bits) < v) ++bits;
  return bits;
}

// Report-bound ApproxA: evaluate the caller's grid, divide by n, and accept
// only when the normalized radius is within 2^-M.
CertifiedValue report_bound_normalized(const UnifilarChannel& channel, unsigned n, unsigned M, unsigned grid,
                                       const SolverOptions& solver) {
  CertifiedValue v = evaluate_net(channel, n, grid, M + 2 + ceil_log2(n), solver);
  const Rat scaled = v.estimate / n;
  const Rat estimate = floor_dyadic(scaled, M + 2);
  v.radius = ceil_dyadic(v.radius / n + (scaled - estimate), M + 8);
  v.estimate = estimate;
  v.normalized = true;
  return v;
}

}  // namespace

ThresholdCertificate check_R(const ThresholdQuery& query, unsigned k, unsigned n, unsigned M,
                             const CheckOptions& opts) {
  if (n < 1) throw std::invalid_argument("check_R: horizon must be at least 1");
  ThresholdCertificate cert;
  cert.query = query;
  cert.k = k;
  cert.n = n;
  cert.M = M;
  cert.mode = opts.mode;
  cert.channel_hash = encoding_hash(query.encoding);

  if (opts.approx) {
    cert.r = opts.approx(query.encoding, n, M);
  } else {
    const UnifilarChannel channel = decode_channel(query.encoding);
    try {
      switch (opts.mode) {
        case ApproxMode::Target: {
          CertifiedValue v = approx_normalized(query.encoding, n, M, opts.solver);
          cert.r = v.estimate;
          cert.radius = v.radius;
          cert.value = std::move(v);
          break;
        }
        case ApproxMode::ReportBound: {
          cert.report_grid = opts.report_grid;
          CertifiedValue v = report_bound_normalized(channel, n, M, opts.report_grid, opts.solver);
          if (v.radius > pow2(-static_cast<long>(M))) {
            cert.note = "report-bound radius " + to_string(v.radius) + " exceeds 2^-" + std::to_string(M);
            cert.value = std::move(v);
            return cert;
          }
          cert.r = v.estimate;
          cert.radius = v.radius;
          cert.value = std::move(v);
          break;
        }
        case ApproxMode::ClosedForm: {
          const auto spec = match_delayed_activation(channel);
          if (!spec) throw std::invalid_argument("closed-form ApproxA needs a delayed-activation channel");
          cert.r = closed_form_normalized_value(*spec, n);
          cert.radius = Rat(0);
          break;
        }
      }
    } catch (const BudgetExceeded& ex) {
      cert.note = ex.what();
      return cert;
    }
  }
  cert.verdict = threshold_predicate(*cert.r, query.q, k, M) ? Verdict::Holds : Verdict::Fails;
  return cert;
}

std::vector<std::pair<unsigned, unsigned>> diagonal_order(unsigned horizon_cap, unsigned M_cap) {
  std::vector<std::pair<unsigned, unsigned>> out;
  for (unsigned sum = 2; sum <= horizon_cap + M_cap; ++sum) {
    for (unsigned n = 1; n <= horizon_cap && n < sum; ++n) {
      const unsigned M = sum - n;
      if (M >= 1 && M <= M_cap) out.emplace_back(n, M);
    }
  }
  return out;
}

SearchResult certificate_search(const ThresholdQuery& query, unsigned k, unsigned horizon_cap, unsigned M_cap,
                                const CheckOptions& opts) {
  SearchResult out;
  for (const auto& [n, M] : diagonal_order(horizon_cap, M_cap)) {
    out.examined.emplace_back(n, M);
    ThresholdCertificate cert = check_R(query, k, n, M, opts);
    if (cert.verdict == Verdict::Holds) {
      out.certificate = std::move(cert);
      return out;
    }
    if (cert.verdict == Verdict::Indeterminate) out.indeterminate.emplace_back(n, M);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kHeader = "fscert1";

std::string optional_rat(const std::optional<Rat>& v) { return v ? to_string(*v) : std::string("none"); }

std::string certificate_body(const ThresholdCertificate& c) {
  std::ostringstream os;
  os << kHeader << '\n'
     << "query " << to_hex(c.query.paired) << '\n'
     << "q " << to_string(c.query.q) << '\n'
     << "channel_sha256 " << c.channel_hash << '\n'
     << "k " << c.k << '\n'
     << "n " << c.n << '\n'
     << "M " << c.M << '\n'
     << "mode " << to_string(c.mode) << '\n'
     << "report_grid " << c.report_grid << '\n'
     << "r " << optional_rat(c.r) << '\n'
     << "radius " << optional_rat(c.radius) << '\n'
     << "verdict " << to_string(c.verdict) << '\n'
     << "provenance " << (c.value ? format_certified_value(*c.value) : std::string("none")) << '\n'
     << "note " << c.note << '\n';
  return os.str();
}

unsigned parse_unsigned(const std::string& s, const std::string& key) {
  if (s.empty() || s.size() > 9 || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError("certificate: field '" + key + "' is not a small natural number");
  }
  return static_cast<unsigned>(std::stoul(s));
}

}  // namespace

std::string format_certificate(const ThresholdCertificate& cert) {
  const std::string body = certificate_body(cert);
  return body + "digest " + sha256_hex(body) + "\n";
}

ThresholdCertificate parse_certificate(std::string_view text) {
  const auto digest_pos = text.rfind("digest ");
  if (digest_pos == std::string_view::npos || (digest_pos > 0 && text[digest_pos - 1] != '\n')) {
    throw ParseError("certificate: missing digest line");
  }
  const std::string_view body = text.substr(0, digest_pos);
  std::string_view digest = text.substr(digest_pos + 7);
  if (!digest.empty() && digest.back() == '\n') digest.remove_suffix(1);
  if (digest != sha256_hex(body)) throw ParseError("certificate: digest does not match contents");

  std::istringstream is{std::string(body)};
  std::string line;
  if (!std::getline(is, line) || line != kHeader) throw ParseError("certificate: missing fscert1 header");
  const char* const keys[] = {"query", "q",  "channel_sha256", "k",      "n",          "M",   "mode",
                              "report_grid", "r", "radius", "verdict", "provenance", "note"};
  std::vector<std::string> values;
  for (const char* key : keys) {
    if (!std::getline(is, line)) throw ParseError(std::string("certificate: missing field '") + key + "'");
    const std::string prefix = std::string(key) + " ";
    if (line.rfind(prefix, 0) != 0) {
      if (line == key && std::string_view(key) == "note") {
        values.emplace_back();
        continue;
      }
      throw ParseError(std::string("certificate: expected field '") + key + "'");
    }
    values.push_back(line.substr(prefix.size()));
  }
  if (std::getline(is, line)) throw ParseError("certificate: unexpected line '" + line + "'");

  ThresholdCertificate c;
  const std::vector<std::uint8_t> paired = from_hex(values[0]);
  auto [encoding, q] = unpair_query(paired);
  c.query = ThresholdQuery::make(encoding, q);
  if (parse_rat(values[1]) != c.query.q) throw ParseError("certificate: q does not match the paired query");
  c.channel_hash = values[2];
  c.k = parse_unsigned(values[3], "k");
  c.n = parse_unsigned(values[4], "n");
  c.M = parse_unsigned(values[5], "M");
  c.mode = parse_approx_mode(values[6]);
  c.report_grid = parse_unsigned(values[7], "report_grid");
  if (values[8] != "none") c.r = parse_rat(values[8]);
  if (values[9] != "none") c.radius = parse_rat(values[9]);
  c.verdict = parse_verdict(values[10]);
  if (values[11] != "none") c.value = parse_certified_value(values[11]);
  c.note = values[12];
  return c;
}

VerifyResult verify_certificate(std::string_view text, const UnifilarChannel* channel, const SolverOptions& solver) {
  std::optional<ThresholdCertificate> parsed;
  try {
    parsed = parse_certificate(text);
  } catch (const std::exception& ex) {
    return {false, ex.what()};
  }
  ThresholdCertificate& cert = *parsed;
  if (cert.channel_hash != encoding_hash(cert.query.encoding)) {
    return {false, "recorded channel hash does not match the paired encoding"};
  }
  if (channel != nullptr && encoding_hash(encode_channel(*channel)) != cert.channel_hash) {
    return {false, "channel hash mismatch: certificate was issued for a different channel"};
  }
  if (format_certificate(cert) != text) return {false, "certificate is not in canonical form"};
  if (cert.r && cert.verdict != Verdict::Indeterminate &&
      (threshold_predicate(*cert.r, cert.query.q, cert.k, cert.M) ? Verdict::Holds : Verdict::Fails) !=
          cert.verdict) {
    return {false, "recorded verdict does not follow from r"};
  }
  if (cert.value) {
    const std::string issue = recheck(decode_channel(cert.query.encoding), *cert.value);
    if (!issue.empty()) return {false, "provenance recheck failed: " + issue};
  }

  CheckOptions opts;
  opts.mode = cert.mode;
  opts.solver = solver;
  opts.report_grid = cert.mode == ApproxMode::ReportBound ? cert.report_grid : 2;
  ThresholdCertificate replay = check_R(cert.query, cert.k, cert.n, cert.M, opts);
  if (cert.mode != ApproxMode::ReportBound) replay.report_grid = cert.report_grid;
  if (replay.r != cert.r) return {false, "replayed r differs from the recorded r"};
  if (replay.verdict != cert.verdict) return {false, "replayed verdict differs from the recorded verdict"};
  if (format_certificate(replay) != text) return {false, "replayed certificate differs from the recorded one"};
  return {true, ""};
}

SlackAudit limsup_slack_audit(const DelayedActivationSpec& spec, const Rat& q, unsigned k_max, unsigned n_max) {
  SlackAudit audit;
  audit.capacity = closed_form_capacity(spec);
  audit.capacity_at_least_q = audit.capacity >= q;
  audit.all_k_satisfied = true;
  // a_n < 1 for every n in the good variant and a_n = 0 for the bad one, so
  // some n qualifies exactly when the supremum exceeds the threshold.
  for (unsigned k = 0; k <= k_max; ++k) {
    AuditRow row;
    row.k = k;
    const Rat threshold = q - pow2(-static_cast<long>(k));
    row.exists = audit.capacity > threshold;
    for (unsigned n = 1; n <= n_max; ++n) {
      if (closed_form_normalized_value(spec, n) > threshold) {
        row.least_n = n;
        break;
      }
    }
    if (!row.exists) audit.all_k_satisfied = false;
    audit.rows.push_back(row);
  }
  audit.agrees = audit.capacity_at_least_q == audit.all_k_satisfied;
  return audit;
}

}  // namespace fscap
