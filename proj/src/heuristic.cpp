#include "fscap/fast_eval.hpp"
#include "fscap/solver.hpp"

#include <cmath>
#include <random>

namespace fscap {

namespace {

constexpr unsigned kStartBits = 24;
constexpr double kSweepTolerance = 1e-12;

struct LineSearch {
  const FastEvaluator& eval;
  std::vector<double>& theta;
  std::uint64_t index;

  double at(double v) {
    theta[index] = v;
    return eval.directed_information(theta);
  }

  // Golden-section maximization on [0,1]; the endpoints are checked as well
  // since the objective need not be unimodal in one coordinate.
  std::pair<double, double> maximize(double tolerance) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = 1.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = at(c), fd = at(d);
    while (b - a > tolerance) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = at(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = at(d);
      }
    }
    std::pair<double, double> best{0.5 * (a + b), 0.0};
    best.second = at(best.first);
    for (double v : {0.0, 1.0}) {
      const double f = at(v);
      if (f > best.second) best = {v, f};
    }
    return best;
  }
};

double dyadic_start(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> (64 - kStartBits)) / static_cast<double>(1ULL << kStartBits);
}

}  // namespace

HeuristicResult heuristic_value(const UnifilarChannel& channel, unsigned n, const HeuristicOptions& opts) {
  const FastEvaluator eval(channel, n);
  const auto& coords = eval.relevant_coordinates();
  std::mt19937_64 rng(opts.seed);
  const unsigned restarts = opts.restarts == 0 ? 1 : opts.restarts;

  std::vector<double> best_theta(eval.dimension(), 0.5);
  double best_value = eval.directed_information(best_theta);
  unsigned total_sweeps = 0;

  for (unsigned r = 0; r < restarts; ++r) {
    std::vector<double> theta(eval.dimension(), 0.5);
    if (r > 0) {
      for (std::uint64_t i : coords) theta[i] = dyadic_start(rng);
    }
    double current = eval.directed_information(theta);
    for (unsigned sweep = 0; sweep < opts.iterations; ++sweep) {
      ++total_sweeps;
      const double before = current;
      for (std::uint64_t i : coords) {
        const double old = theta[i];
        LineSearch ls{eval, theta, i};
        const auto [v, f] = ls.maximize(opts.line_tolerance);
        if (f > current) {
          theta[i] = v;
          current = f;
        } else {
          theta[i] = old;
        }
      }
      if (current - before < kSweepTolerance) break;
    }
    if (current > best_value) {
      best_value = current;
      best_theta = theta;
    }
  }

  PolicyCoordinates pc;
  pc.horizon = n;
  pc.theta.reserve(best_theta.size());
  std::vector<double> rounded(best_theta.size());
  for (std::size_t i = 0; i < best_theta.size(); ++i) {
    Rat v = floor_dyadic(from_double(best_theta[i]), kStartBits);
    const Rat up = v + pow2(-static_cast<long>(kStartBits));
    if (up <= 1 && from_double(best_theta[i]) - v > up - from_double(best_theta[i])) v = up;
    rounded[i] = v.get_d();
    pc.theta.push_back(std::move(v));
  }
  const double objective = eval.directed_information(rounded);
  Rat value = floor_dyadic(from_double(objective) - pow2(-kHeuristicSlackExponent), kHeuristicSlackExponent + 8);
  if (value < 0) value = 0;

  return HeuristicResult{std::move(value), CausalPolicy::from_coordinates(std::move(pc)), total_sweeps, restarts,
                         opts.seed};
}

SandwichVerdict sandwich_check(const UnifilarChannel& channel, unsigned n, const HeuristicResult& heuristic,
                               const CertifiedValue& certified, const Rat& tolerance) {
  SandwichVerdict verdict;
  auto fail = [&](std::string msg) {
    verdict.consistent = false;
    verdict.failures.push_back(std::move(msg));
  };
  if (certified.horizon != n || heuristic.policy.horizon() != n) {
    fail("horizon mismatch between inputs");
    return verdict;
  }
  const Rat lower = certified.normalized ? Rat(heuristic.value / n) : heuristic.value;
  if (lower - tolerance > certified.high()) {
    fail("heuristic lower bound " + to_string(lower) + " exceeds certified upper end " + to_string(certified.high()));
  }
  if (const auto spec = match_delayed_activation(channel)) {
    Rat closed = closed_form_normalized_value(*spec, n);
    if (!certified.normalized) closed *= n;
    if (!certified.contains(closed)) {
      fail("certified interval [" + to_string(certified.low()) + ", " + to_string(certified.high()) +
           "] excludes closed form " + to_string(closed));
    }
    if (lower - tolerance > closed) {
      fail("heuristic lower bound " + to_string(lower) + " exceeds closed form " + to_string(closed));
    }
  }
  return verdict;
}

}  // namespace fscap
