#include "fscap/fast_eval.hpp"
#include "fscap/info.hpp"
#include "fscap/solver.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace fscap {

namespace {

constexpr unsigned kBetaBits = 40;

double kl_bits(double a, double b) {
  double d = 0.0;
  if (a > 0.0) d += a * std::log2(a / b);
  if (a < 1.0) d += (1.0 - a) * std::log2((1.0 - a) / (1.0 - b));
  return d;
}

// argmin_beta max(D(a||beta), D(b||beta)) for a < b: the two divergences cross
// inside (a, b).
double best_beta(double a, double b) {
  double lo = a, hi = b;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (kl_bits(a, mid) < kl_bits(b, mid)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Upper end of D(a || beta) for dyadic beta in (0,1).
Rat kl_upper(const Rat& a, const Rat& beta, unsigned m) {
  const long bits = static_cast<long>(m) + 40;
  const CertifiedReal h = binary_entropy(a, m + 4);
  Rat upper = -h.lower();
  if (a > 0) upper -= a * log2_enclosure(beta, bits).lower();
  if (a < 1) upper -= (1 - a) * log2_enclosure(1 - beta, bits).lower();
  return ceil_dyadic(upper, m + 4);
}

}  // namespace

Rat binary_capacity_upper(const Rat& a, const Rat& b, unsigned m) {
  if (!is_probability(a) || !is_probability(b) || a > b) {
    throw std::invalid_argument("binary_capacity_upper: need 0 <= a <= b <= 1");
  }
  if (a == b) return Rat(0);
  Rat beta = floor_dyadic(from_double(best_beta(to_double(a), to_double(b))), kBetaBits);
  const Rat eps = pow2(-static_cast<long>(kBetaBits));
  if (beta <= 0) beta = eps;
  if (beta >= 1) beta = 1 - eps;
  const Rat da = kl_upper(a, beta, m);
  const Rat db = kl_upper(b, beta, m);
  Rat c = da > db ? da : db;
  return c > 1 ? Rat(1) : c;
}

Rat dual_upper_bound(const UnifilarChannel& channel, unsigned n, unsigned m) {
  const auto cc = ChannelConditionals::compute(channel, n);
  std::map<std::pair<Rat, Rat>, Rat> cache;
  Rat total(0);
  for (unsigned t = 1; t <= n; ++t) {
    const unsigned len = t - 1;
    const auto& cond = cc.prob_one[t - 1];
    const auto& reach = cc.reachable[t - 1];
    Rat step(0);
    for (std::size_t yb = 0; yb < (std::size_t{1} << len); ++yb) {
      const Rat* lo = nullptr;
      const Rat* hi = nullptr;
      for (std::size_t xt = 0; xt < (std::size_t{1} << t); ++xt) {
        const std::size_t idx = (xt << len) | yb;
        if (!reach[idx]) continue;
        if (lo == nullptr || cond[idx] < *lo) lo = &cond[idx];
        if (hi == nullptr || cond[idx] > *hi) hi = &cond[idx];
      }
      if (lo == nullptr || *lo == *hi) continue;
      auto key = std::make_pair(*lo, *hi);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, binary_capacity_upper(*lo, *hi, m + 4)).first;
      if (it->second > step) step = it->second;
      if (step == 1) break;
    }
    total += step;
  }
  return total;
}

}  // namespace fscap
