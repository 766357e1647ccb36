#include "fscap/certified_real.hpp"

#include "mpfr_util.hpp"

#include <sstream>
#include <stdexcept>

namespace fscap {

using detail::Mpfr;

namespace {

constexpr long kMaxWorkingBits = 1L << 16;

}  // namespace

CertifiedReal::CertifiedReal(Rat lower, Rat upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_ > upper_) {
    throw std::invalid_argument("CertifiedReal: lower " + fscap::to_string(lower_) + " > upper " +
                                fscap::to_string(upper_));
  }
}

CertifiedReal CertifiedReal::clamp_below(const Rat& lo) const {
  if (upper_ < lo) throw std::logic_error("clamp_below: enclosure lies entirely below the bound");
  return CertifiedReal(lower_ < lo ? lo : lower_, upper_);
}

std::string CertifiedReal::to_string() const { return fscap::to_string(lower_) + " " + fscap::to_string(upper_); }

CertifiedReal CertifiedReal::parse(std::string_view text) {
  const auto space = text.find(' ');
  if (space == std::string_view::npos) throw ParseError("expected '<lower> <upper>'");
  return CertifiedReal(parse_rat(text.substr(0, space)), parse_rat(text.substr(space + 1)));
}

std::ostream& operator<<(std::ostream& os, const CertifiedReal& v) {
  return os << '[' << v.lower().get_d() << ", " << v.upper().get_d() << ']';
}

CertifiedReal log2_enclosure(const Rat& x, long bits) {
  if (x <= 0) throw std::domain_error("log2 of nonpositive value");
  Mpfr lo(bits), hi(bits);
  mpfr_set_q(lo.get(), x.get_mpq_t(), MPFR_RNDD);
  mpfr_log2(lo.get(), lo.get(), MPFR_RNDD);
  mpfr_set_q(hi.get(), x.get_mpq_t(), MPFR_RNDU);
  mpfr_log2(hi.get(), hi.get(), MPFR_RNDU);
  return CertifiedReal(lo.to_rat(), hi.to_rat());
}

CertifiedReal neg_p_log2_p(const Rat& p, long bits) {
  if (p < 0 || p > 1) throw std::domain_error("neg_p_log2_p: argument outside [0,1]");
  if (p == 0 || p == 1) return CertifiedReal::exact(Rat(0));

  // lower: p_down * (-log2(p_up))_down ; upper: p_up * (-log2(p_down))_up
  Mpfr p_down(bits), p_up(bits), log_hi(bits), log_lo(bits), lo(bits), hi(bits);
  mpfr_set_q(p_down.get(), p.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(p_up.get(), p.get_mpq_t(), MPFR_RNDU);
  mpfr_log2(log_hi.get(), p_up.get(), MPFR_RNDU);
  mpfr_log2(log_lo.get(), p_down.get(), MPFR_RNDD);
  mpfr_neg(log_hi.get(), log_hi.get(), MPFR_RNDN);  // exact
  mpfr_neg(log_lo.get(), log_lo.get(), MPFR_RNDN);
  mpfr_mul(lo.get(), p_down.get(), log_hi.get(), MPFR_RNDD);
  mpfr_mul(hi.get(), p_up.get(), log_lo.get(), MPFR_RNDU);
  Rat l = lo.to_rat();
  if (l < 0) l = 0;
  return CertifiedReal(l, hi.to_rat());
}

CertifiedReal refine_to_width(const std::function<CertifiedReal(long bits)>& eval, unsigned m) {
  const Rat target = pow2(-static_cast<long>(m));
  for (long bits = static_cast<long>(m) + 32; bits <= kMaxWorkingBits; bits *= 2) {
    CertifiedReal v = eval(bits);
    if (v.width() <= target) return v;
  }
  throw std::runtime_error("enclosure did not reach width 2^-" + std::to_string(m));
}

CertifiedReal round_outward(const CertifiedReal& v, unsigned bits) {
  return CertifiedReal(floor_dyadic(v.lower(), bits), ceil_dyadic(v.upper(), bits));
}

}  // namespace fscap
