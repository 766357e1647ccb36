#pragma once

#include "fscap/rational.hpp"

#include <functional>
#include <ostream>
#include <string>

namespace fscap {

/// Closed interval [lower, upper] with dyadic endpoints that contains an
/// exact real value.
class CertifiedReal {
 public:
  CertifiedReal() = default;
  /// Throws std::invalid_argument when lower > upper.
  CertifiedReal(Rat lower, Rat upper);
  static CertifiedReal exact(const Rat& value) { return CertifiedReal(value, value); }

  const Rat& lower() const { return lower_; }
  const Rat& upper() const { return upper_; }
  Rat width() const { return upper_ - lower_; }
  Rat midpoint() const { return (lower_ + upper_) / 2; }
  bool contains(const Rat& v) const { return lower_ <= v && v <= upper_; }

  CertifiedReal operator+(const CertifiedReal& o) const { return {lower_ + o.lower_, upper_ + o.upper_}; }
  CertifiedReal operator-(const CertifiedReal& o) const { return {lower_ - o.upper_, upper_ - o.lower_}; }
  CertifiedReal operator-() const { return {-upper_, -lower_}; }
  CertifiedReal& operator+=(const CertifiedReal& o) { return *this = *this + o; }

  /// Intersection with [lo, +inf).
  CertifiedReal clamp_below(const Rat& lo) const;

  /// "lower upper" as canonical rationals.
  std::string to_string() const;
  static CertifiedReal parse(std::string_view text);

  friend bool operator==(const CertifiedReal&, const CertifiedReal&) = default;

 private:
  Rat lower_;
  Rat upper_;
};

std::ostream& operator<<(std::ostream& os, const CertifiedReal& v);

/// Enclosure of log2(x), x > 0, computed with `bits` of working precision.
CertifiedReal log2_enclosure(const Rat& x, long bits);

/// Enclosure of -p log2 p for p in [0,1]; exactly 0 at p = 0.
CertifiedReal neg_p_log2_p(const Rat& p, long bits);

/// Re-evaluates `eval` at doubling working precision until the enclosure is
/// at most 2^-m wide. Throws std::runtime_error past the precision cap.
CertifiedReal refine_to_width(const std::function<CertifiedReal(long bits)>& eval, unsigned m);

/// Outward rounding of both ends to multiples of 2^-bits.
CertifiedReal round_outward(const CertifiedReal& v, unsigned bits);

}  // namespace fscap
