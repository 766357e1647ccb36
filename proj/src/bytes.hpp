#pragma once

// Length-prefixed big-endian byte serialization shared by the channel
// encoding and the query pairing.

#include "fscap/channel.hpp"
#include "fscap/rational.hpp"

#include <cstdint>
#include <vector>

namespace fscap::detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  void raw(const std::vector<std::uint8_t>& bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }

  /// Nonnegative integer as u32 length + minimal big-endian magnitude.
  void natural(const BigInt& v) {
    std::vector<std::uint8_t> mag;
    if (v != 0) {
      std::size_t count = 0;
      mag.resize((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8);
      mpz_export(mag.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
      mag.resize(count);
    }
    u32(static_cast<std::uint32_t>(mag.size()));
    raw(mag);
  }

  /// Nonnegative rational as numerator then denominator.
  void nonneg_rat(const Rat& v) {
    natural(v.get_num());
    natural(v.get_den());
  }

  /// Signed rational: sign byte (1 for negative) then magnitude.
  void signed_rat(const Rat& v) {
    u8(v < 0 ? 1 : 0);
    nonneg_rat(abs(v));
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& in) : in_(in) {}

  std::size_t position() const { return pos_; }
  bool at_end() const { return pos_ == in_.size(); }

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }

  std::vector<std::uint8_t> raw(std::size_t count) {
    need(count);
    std::vector<std::uint8_t> out(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                  in_.begin() + static_cast<std::ptrdiff_t>(pos_ + count));
    pos_ += count;
    return out;
  }

  BigInt natural() {
    const std::uint32_t len = u32();
    need(len);
    if (len > 0 && in_[pos_] == 0) throw MalformedEncoding(pos_, "non-minimal integer magnitude");
    BigInt v(0);
    if (len > 0) mpz_import(v.get_mpz_t(), len, 1, 1, 1, 0, in_.data() + pos_);
    pos_ += len;
    return v;
  }

  Rat nonneg_rat() {
    const std::size_t start = pos_;
    BigInt num = natural();
    const std::size_t den_pos = pos_;
    BigInt den = natural();
    if (den == 0) throw MalformedEncoding(den_pos, "zero denominator");
    BigInt g;
    mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (g != 1 && !(num == 0 && den == 1)) {
      throw MalformedEncoding(start, "rational not in lowest terms");
    }
    if (num == 0 && den != 1) throw MalformedEncoding(start, "zero must be encoded as 0/1");
    return Rat(num, den);
  }

  Rat signed_rat() {
    const std::size_t start = pos_;
    const std::uint8_t sign = u8();
    if (sign > 1) throw MalformedEncoding(start, "invalid sign byte");
    Rat v = nonneg_rat();
    if (sign == 1 && v == 0) throw MalformedEncoding(start, "negative zero");
    return sign == 1 ? Rat(-v) : v;
  }

 private:
  void need(std::size_t count) const {
    if (in_.size() - pos_ < count) throw MalformedEncoding(pos_, "unexpected end of encoding");
  }

  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

}  // namespace fscap::detail
