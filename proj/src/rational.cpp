#include "fscap/rational.hpp"

#include <cctype>
#include <cmath>

namespace fscap {

namespace {

bool valid_integer(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

Rat parse_rat(std::string_view text) {
  const auto slash = text.find('/');
  const auto num_text = text.substr(0, slash);
  if (!valid_integer(num_text)) {
    throw ParseError("invalid rational '" + std::string(text) + "'");
  }
  BigInt num(std::string(num_text[0] == '+' ? num_text.substr(1) : num_text));
  BigInt den(1);
  if (slash != std::string_view::npos) {
    const auto den_text = text.substr(slash + 1);
    if (!valid_integer(den_text) || den_text[0] == '-' || den_text[0] == '+') {
      throw ParseError("invalid rational '" + std::string(text) + "'");
    }
    den = BigInt(std::string(den_text));
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  }
  Rat out(num, den);
  out.canonicalize();
  return out;
}

std::string to_string(const Rat& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string to_string(const BigInt& value) { return value.get_str(); }

Rat pow2(long e) {
  BigInt p(1);
  const unsigned long mag = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), mag);
  if (e >= 0) return Rat(p);
  Rat out(BigInt(1), p);
  out.canonicalize();
  return out;
}

Rat floor_dyadic(const Rat& value, unsigned bits) {
  BigInt scaled = value.get_num();
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), bits);
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), value.get_den_mpz_t());
  Rat out(q, BigInt(1));
  mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), bits);
  return out;
}

Rat ceil_dyadic(const Rat& value, unsigned bits) {
  BigInt scaled = value.get_num();
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), bits);
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), value.get_den_mpz_t());
  Rat out(q, BigInt(1));
  mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), bits);
  return out;
}

bool is_dyadic(const Rat& value) {
  const BigInt& den = value.get_den();
  return mpz_popcount(den.get_mpz_t()) == 1;
}

double to_double(const Rat& value) { return value.get_d(); }

Rat from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite double");
  Rat out(value);
  out.canonicalize();
  return out;
}

}  // namespace fscap
