#pragma once

#include "fscap/channel.hpp"
#include "fscap/policy.hpp"

#include <cstdint>
#include <vector>

namespace fscap {

/// Exact channel-side conditional P(y_t = 1 | x^t, y^{t-1}). It does not
/// depend on the input policy. Entry `reachable` is false when no input
/// sequence makes y^{t-1} possible together with x^{t-1}.
struct ChannelConditionals {
  unsigned horizon = 0;
  // cond[t-1][(x^t << (t-1)) | y^{t-1}]
  std::vector<std::vector<Rat>> prob_one;
  std::vector<std::vector<bool>> reachable;

  static ChannelConditionals compute(const UnifilarChannel& channel, unsigned n);

  /// True when history (x^{t-1}, y^{t-1}) has positive channel-side mass.
  bool history_reachable(const History& h) const;
};

/// Double-precision directed information for policy search. Not certified.
class FastEvaluator {
 public:
  FastEvaluator(const UnifilarChannel& channel, unsigned n);

  unsigned horizon() const { return n_; }
  std::uint64_t dimension() const { return dimension_; }

  /// I(X^n -> Y^n) in bits for the policy with free coordinates `theta`.
  double directed_information(const std::vector<double>& theta) const;

  /// Coordinates whose history has positive channel-side mass; the others
  /// cannot affect the objective.
  const std::vector<std::uint64_t>& relevant_coordinates() const { return relevant_; }

 private:
  unsigned n_;
  std::uint64_t dimension_;
  std::vector<std::vector<double>> cond_;  // P(y_t=1 | x^t, y^{t-1})
  std::vector<std::uint64_t> relevant_;
  mutable std::vector<std::vector<double>> level_;
};

}  // namespace fscap
