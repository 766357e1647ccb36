#include "fscap/fast_eval.hpp"

#include <cmath>

namespace fscap {

namespace {

double plogp_sum(const std::vector<double>& v) {
  double h = 0.0;
  for (double p : v) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

ChannelConditionals ChannelConditionals::compute(const UnifilarChannel& channel, unsigned n) {
  if (n < 1 || n > kMaxHorizon) throw std::invalid_argument("horizon out of range");
  const std::size_t k = channel.state_count();
  ChannelConditionals out;
  out.horizon = n;
  out.prob_one.resize(n);
  out.reachable.resize(n);

  // alpha[(x^{t-1} << (t-1)) | y^{t-1}][s] = sum_{s1} pi(s1) prod P(y_i | x_i, s_i) [s_t = s]
  std::vector<std::vector<Rat>> alpha(1, channel.initial_table());
  for (unsigned t = 1; t <= n; ++t) {
    const unsigned len = t - 1;
    const std::size_t hist_count = std::size_t{1} << (2 * len);
    auto& cond = out.prob_one[t - 1];
    auto& reach = out.reachable[t - 1];
    cond.assign(hist_count * 2, Rat(0));
    reach.assign(hist_count * 2, false);
    std::vector<std::vector<Rat>> next(hist_count * 4, std::vector<Rat>(k, Rat(0)));

    for (std::size_t hidx = 0; hidx < hist_count; ++hidx) {
      const std::size_t xb = hidx >> len;
      const std::size_t yb = hidx & ((std::size_t{1} << len) - 1);
      const auto& a = alpha[hidx];
      Rat mass(0);
      for (const Rat& v : a) mass += v;
      for (unsigned x = 0; x < kInputAlphabet; ++x) {
        const std::size_t cidx = (((xb << 1) | x) << len) | yb;
        if (mass == 0) {
          cond[cidx] = Rat(1, 2);
          continue;
        }
        reach[cidx] = true;
        Rat one(0);
        for (State s = 0; s < k; ++s) {
          if (a[s] == 0) continue;
          one += a[s] * channel.output_prob(s, x, 1);
          for (unsigned y = 0; y < kOutputAlphabet; ++y) {
            const Rat& py = channel.output_prob(s, x, y);
            if (py == 0) continue;
            const std::size_t nidx = (((xb << 1) | x) << t) | ((yb << 1) | y);
            next[nidx][channel.next(s, x, y)] += a[s] * py;
          }
        }
        cond[cidx] = one / mass;
      }
    }
    alpha = std::move(next);
  }
  return out;
}

bool ChannelConditionals::history_reachable(const History& h) const {
  const unsigned len = h.t - 1;
  return reachable.at(h.t - 1)[((static_cast<std::size_t>(h.xbits) << 1) << len) | h.ybits];
}

FastEvaluator::FastEvaluator(const UnifilarChannel& channel, unsigned n)
    : n_(n), dimension_(policy_dimension(n)) {
  const auto cc = ChannelConditionals::compute(channel, n);
  cond_.resize(n);
  for (unsigned t = 0; t < n; ++t) {
    cond_[t].resize(cc.prob_one[t].size());
    for (std::size_t i = 0; i < cond_[t].size(); ++i) cond_[t][i] = cc.prob_one[t][i].get_d();
  }
  for (std::uint64_t i = 0; i < dimension_; ++i) {
    if (cc.history_reachable(history_at(i))) relevant_.push_back(i);
  }
  level_.resize(n + 1);
}

double FastEvaluator::directed_information(const std::vector<double>& theta) const {
  // level_[t][(x^t << t) | y^t] = P(x^t, y^t)
  level_[0].assign(1, 1.0);
  double total = 0.0;
  double h_y_prev = 0.0;
  std::uint64_t offset = 0;
  for (unsigned t = 1; t <= n_; ++t) {
    const unsigned len = t - 1;
    const auto& prev = level_[len];
    auto& cur = level_[t];
    cur.assign(std::size_t{1} << (2 * t), 0.0);
    std::vector<double> x_yprev(std::size_t{1} << (2 * t - 1), 0.0);
    std::vector<double> y_only(std::size_t{1} << t, 0.0);
    const auto& cond = cond_[t - 1];
    for (std::size_t hidx = 0; hidx < prev.size(); ++hidx) {
      const double mass = prev[hidx];
      if (mass == 0.0) continue;
      const std::size_t xb = hidx >> len;
      const std::size_t yb = hidx & ((std::size_t{1} << len) - 1);
      const double p1 = theta[offset + hidx];
      for (unsigned x = 0; x < 2; ++x) {
        const double px = mass * (x == 1 ? p1 : 1.0 - p1);
        if (px == 0.0) continue;
        const std::size_t xt = (xb << 1) | x;
        x_yprev[(xt << len) | yb] += px;
        const double w1 = cond[(xt << len) | yb];
        const double m1 = px * w1;
        const double m0 = px - m1;
        cur[(xt << t) | (yb << 1)] += m0;
        cur[(xt << t) | (yb << 1) | 1] += m1;
        y_only[yb << 1] += m0;
        y_only[(yb << 1) | 1] += m1;
      }
    }
    const double h_y = plogp_sum(y_only);
    total += plogp_sum(x_yprev) + h_y - h_y_prev - plogp_sum(cur);
    h_y_prev = h_y;
    offset += prev.size();
  }
  return total;
}

}  // namespace fscap
