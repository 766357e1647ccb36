#include "fscap/info.hpp"

#include "mpfr_util.hpp"

#include <set>
#include <stdexcept>

namespace fscap {

using detail::Mpfr;

namespace {

unsigned ceil_log2(std::uint64_t v) {
  unsigned bits = 0;
  while ((std::uint64_t{1} << bits) < v) ++bits;
  return bits;
}

// Sum of -p log2 p with directed rounding, accumulated in MPFR.
CertifiedReal entropy_at(std::span<const Rat> pmf, long bits) {
  Mpfr lo_sum(bits), hi_sum(bits), p_down(bits), p_up(bits), lg(bits), term(bits);
  mpfr_set_zero(lo_sum.get(), 1);
  mpfr_set_zero(hi_sum.get(), 1);
  for (const Rat& p : pmf) {
    if (p == 0 || p == 1) continue;
    mpfr_set_q(p_down.get(), p.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(p_up.get(), p.get_mpq_t(), MPFR_RNDU);
    // lower term: p_down * -(log2(p_up) rounded up)
    mpfr_log2(lg.get(), p_up.get(), MPFR_RNDU);
    mpfr_neg(lg.get(), lg.get(), MPFR_RNDN);
    mpfr_mul(term.get(), p_down.get(), lg.get(), MPFR_RNDD);
    mpfr_add(lo_sum.get(), lo_sum.get(), term.get(), MPFR_RNDD);
    // upper term: p_up * -(log2(p_down) rounded down)
    mpfr_log2(lg.get(), p_down.get(), MPFR_RNDD);
    mpfr_neg(lg.get(), lg.get(), MPFR_RNDN);
    mpfr_mul(term.get(), p_up.get(), lg.get(), MPFR_RNDU);
    mpfr_add(hi_sum.get(), hi_sum.get(), term.get(), MPFR_RNDU);
  }
  Rat lo = lo_sum.to_rat();
  if (lo < 0) lo = 0;
  return CertifiedReal(lo, hi_sum.to_rat());
}

CertifiedReal entropy_unchecked(std::span<const Rat> pmf, unsigned m) {
  const unsigned extra = ceil_log2(pmf.size() + 1);
  return refine_to_width([&](long bits) { return entropy_at(pmf, bits + extra); }, m);
}

void check_pmf(std::span<const Rat> pmf) {
  Rat sum(0);
  for (const Rat& p : pmf) {
    if (!is_probability(p)) throw std::invalid_argument("pmf entry " + to_string(p) + " outside [0,1]");
    sum += p;
  }
  if (sum != 1) throw std::invalid_argument("pmf sums to " + to_string(sum) + ", not 1");
}

}  // namespace

CertifiedReal entropy(std::span<const Rat> pmf, unsigned m) {
  check_pmf(pmf);
  return entropy_unchecked(pmf, m);
}

CertifiedReal binary_entropy(const Rat& delta, unsigned m) {
  if (!is_probability(delta)) throw std::invalid_argument("binary_entropy: delta outside [0,1]");
  const Rat pmf[2] = {delta, 1 - delta};
  return entropy_unchecked(pmf, m);
}

CertifiedReal conditional_mutual_information(const JointLaw& law, const std::vector<Var>& u,
                                             const std::vector<Var>& v, const std::vector<Var>& w,
                                             unsigned m) {
  if (u.empty() || v.empty()) throw std::invalid_argument("conditional_mutual_information: empty U or V");
  std::set<Var> seen;
  for (const auto* group : {&u, &v, &w}) {
    for (const Var& x : *group) {
      if (!seen.insert(x).second) {
        throw std::invalid_argument("conditional_mutual_information: variable " + x.name() +
                                    " appears in more than one group");
      }
    }
  }
  auto concat = [](std::vector<Var> a, const std::vector<Var>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const unsigned mt = m + 2;
  auto h = [&](const std::vector<Var>& vars) {
    if (vars.empty()) return CertifiedReal::exact(Rat(0));
    const auto masses = marginal(law, vars).masses();
    return entropy_unchecked(masses, mt);
  };
  const CertifiedReal value = h(concat(u, w)) + h(concat(v, w)) - h(w) - h(concat(concat(u, v), w));
  return value.clamp_below(Rat(0));
}

std::vector<CertifiedReal> directed_information_terms(const JointLaw& law, unsigned m) {
  const unsigned n = law.horizon();
  const unsigned m_entropy = m + ceil_log2(n) + 2;

  // level[t][(x^t << t) | y^t] = P(x^t, y^t)
  std::vector<std::vector<Rat>> level(n + 1);
  level[n].assign(std::size_t{1} << (2 * n), Rat(0));
  for (const auto& [key, mass] : law.entries()) {
    level[n][(static_cast<std::size_t>(key.xbits) << n) | key.ybits] += mass;
  }
  for (unsigned t = n; t-- > 1;) {
    level[t].assign(std::size_t{1} << (2 * t), Rat(0));
    const std::size_t ymask_next = (std::size_t{1} << (t + 1)) - 1;
    for (std::size_t idx = 0; idx < level[t + 1].size(); ++idx) {
      const std::size_t xb = idx >> (t + 1);
      const std::size_t yb = idx & ymask_next;
      level[t][((xb >> 1) << t) | (yb >> 1)] += level[t + 1][idx];
    }
  }

  std::vector<CertifiedReal> terms;
  terms.reserve(n);
  CertifiedReal h_y_prev = CertifiedReal::exact(Rat(0));  // H(Y^{t-1})
  for (unsigned t = 1; t <= n; ++t) {
    const auto& joint = level[t];
    const std::size_t ymask = (std::size_t{1} << t) - 1;
    std::vector<Rat> x_yprev(std::size_t{1} << (2 * t - 1), Rat(0));  // P(x^t, y^{t-1})
    std::vector<Rat> y_only(std::size_t{1} << t, Rat(0));              // P(y^t)
    for (std::size_t idx = 0; idx < joint.size(); ++idx) {
      if (joint[idx] == 0) continue;
      const std::size_t xb = idx >> t;
      const std::size_t yb = idx & ymask;
      x_yprev[(xb << (t - 1)) | (yb >> 1)] += joint[idx];
      y_only[yb] += joint[idx];
    }
    const CertifiedReal h_y = entropy_unchecked(y_only, m_entropy);
    const CertifiedReal value =
        entropy_unchecked(x_yprev, m_entropy) + h_y - h_y_prev - entropy_unchecked(joint, m_entropy);
    terms.push_back(value.clamp_below(Rat(0)));
    h_y_prev = h_y;
  }
  return terms;
}

CertifiedReal directed_information(const JointLaw& law, unsigned m) {
  CertifiedReal sum = CertifiedReal::exact(Rat(0));
  for (const auto& term : directed_information_terms(law, m)) sum += term;
  return sum;
}

CertifiedReal directed_information(const UnifilarChannel& channel, const CausalPolicy& policy, unsigned n,
                                   unsigned m) {
  return directed_information(induced_joint_law(channel, policy, n), m);
}

CertifiedReal fannes_bound(std::uint64_t alphabet_size, const Rat& delta, unsigned m) {
  if (alphabet_size < 1) throw std::invalid_argument("fannes_bound: empty alphabet");
  if (delta < 0 || delta > Rat(1, 2)) {
    throw std::invalid_argument("fannes_bound: delta " + to_string(delta) + " outside [0, 1/2]");
  }
  if (delta == 0 || alphabet_size == 1) return CertifiedReal::exact(Rat(0));
  const Rat pmf[2] = {delta, 1 - delta};
  return refine_to_width(
      [&](long bits) {
        CertifiedReal h2 = entropy_at(pmf, bits + 1);
        if (alphabet_size <= 2) return h2;
        const CertifiedReal lg = log2_enclosure(Rat(static_cast<unsigned long>(alphabet_size - 1)), bits + 1);
        const CertifiedReal scaled(delta * lg.lower(), delta * lg.upper());
        return round_outward(scaled + h2, static_cast<unsigned>(bits));
      },
      m);
}

std::array<std::uint64_t, 4> cmi_alphabet_sizes(unsigned t) {
  if (t < 1 || t > 31) throw std::invalid_argument("cmi_alphabet_sizes: step out of range");
  return {std::uint64_t{1} << (2 * t - 1), std::uint64_t{1} << t, std::uint64_t{1} << (t - 1),
          std::uint64_t{1} << (2 * t)};
}

CertifiedReal cmi_modulus(unsigned t, unsigned n, const Rat& delta, unsigned m) {
  if (t < 1 || t > n) throw std::invalid_argument("cmi_modulus: step t outside 1..n");
  if (delta < 0 || delta > Rat(1, 2)) {
    throw std::invalid_argument("cmi_modulus: delta " + to_string(delta) + " outside [0, 1/2]");
  }
  CertifiedReal sum = CertifiedReal::exact(Rat(0));
  for (std::uint64_t size : cmi_alphabet_sizes(t)) sum += fannes_bound(size, delta, m + 2);
  return sum;
}

CertifiedReal step_modulus(unsigned t, unsigned n, const Rat& delta, unsigned m) {
  if (delta > Rat(1, 2)) return CertifiedReal::exact(Rat(1));
  const CertifiedReal omega = cmi_modulus(t, n, delta, m);
  if (omega.lower() >= 1) return CertifiedReal::exact(Rat(1));
  if (omega.upper() > 1) return CertifiedReal(omega.lower(), Rat(1));
  return omega;
}

}  // namespace fscap
