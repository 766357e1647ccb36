#pragma once

#include "fscap/rational.hpp"

#include <mpfr.h>

namespace fscap::detail {

class Mpfr {
 public:
  explicit Mpfr(long bits) { mpfr_init2(v_, bits); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  Rat to_rat() const {
    Rat out;
    mpfr_get_q(out.get_mpq_t(), v_);
    return out;
  }

 private:
  mpfr_t v_;
};

}  // namespace fscap::detail
