#include <doctest.h>

#include "fixtures.hpp"
#include "fscap/fast_eval.hpp"
#include "fscap/info.hpp"
#include "fscap/solver.hpp"

#include <cmath>

using namespace fscap;
using fscap::testing::bad;
using fscap::testing::good;

namespace {

constexpr double kBscQuarterCapacity = 0.18872187554086713609;

}  // namespace

TEST_CASE("fast evaluator agrees with the certified enclosure") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 20; ++i) {
    const auto c = fscap::testing::random_channel(rng, 1 + i % 3);
    const unsigned n = 1 + i % 3;
    const CausalPolicy p = fscap::testing::random_policy(rng, n);
    std::vector<double> theta;
    for (const Rat& v : p.coordinates().theta) theta.push_back(v.get_d());
    const double fast = FastEvaluator(c, n).directed_information(theta);
    const CertifiedReal exact = directed_information(c, p, n, 40);
    CHECK(std::abs(fast - exact.midpoint().get_d()) < 1e-9);
  }
}

TEST_CASE("relevant coordinates skip unreachable histories") {
  // The first N steps of the delay phase always output 0.
  const FastEvaluator ev(good(1), 3);
  CHECK(ev.dimension() == 21);
  CHECK(ev.relevant_coordinates().size() == 1 + 2 + 4);
}

TEST_CASE("Good(N=1) reaches n - 2") {
  for (unsigned n : {4u, 6u}) {
    const HeuristicResult h = heuristic_value(good(1), n);
    CHECK(std::abs(h.value.get_d() - (n - 2.0)) < 1e-3);
  }
}

TEST_CASE("Bad family stays at zero") {
  for (unsigned n = 1; n <= 4; ++n) CHECK(heuristic_value(bad(1), n).value == 0);
}

TEST_CASE("memoryless BSC(1/4)") {
  const auto bsc = fscap::testing::bsc(Rat(1, 4));
  for (unsigned n : {1u, 2u}) {
    const HeuristicResult h = heuristic_value(bsc, n);
    CHECK(std::abs(h.value.get_d() / n - kBscQuarterCapacity) < 1e-3);
  }
}

TEST_CASE("the witness policy achieves the reported value") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 10; ++i) {
    const auto c = fscap::testing::random_channel(rng, 2);
    const unsigned n = 1 + i % 3;
    const HeuristicResult h = heuristic_value(c, n);
    CHECK(is_dyadic(h.value));
    CHECK(directed_information(c, h.policy, n, 40).upper() >= h.value);
  }
}

TEST_CASE("heuristic is deterministic for a fixed seed") {
  HeuristicOptions opts;
  opts.seed = 99;
  const HeuristicResult a = heuristic_value(good(2), 5, opts), b = heuristic_value(good(2), 5, opts);
  CHECK(a.value == b.value);
  CHECK(a.policy == b.policy);
  CHECK(a.seed == 99);
}

TEST_CASE("sandwich check on the families") {
  for (unsigned n = 1; n <= 4; ++n) {
    for (const auto& c : {good(1), bad(1)}) {
      const HeuristicResult h = heuristic_value(c, n);
      const CertifiedValue v = approx_value(encode_channel(c), n, 10);
      const SandwichVerdict verdict = sandwich_check(c, n, h, v, pow2(-20));
      CHECK(verdict.consistent);
    }
  }
}

TEST_CASE("sandwich check on random channels at n=1") {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 20; ++i) {
    const auto c = fscap::testing::random_channel(rng, 1 + i % 4);
    const HeuristicResult h = heuristic_value(c, 1);
    const CertifiedValue v = approx_value(encode_channel(c), 1, 8);
    const SandwichVerdict verdict = sandwich_check(c, 1, h, v, pow2(-20));
    CAPTURE(i);
    CHECK(verdict.consistent);
  }
}

TEST_CASE("sandwich check flags an inconsistent certificate") {
  const HeuristicResult h = heuristic_value(good(1), 4);
  CertifiedValue v = approx_value(encode_channel(good(1)), 4, 10);
  v.estimate = Rat(1);
  v.radius = pow2(-10);
  const SandwichVerdict verdict = sandwich_check(good(1), 4, h, v, pow2(-20));
  CHECK_FALSE(verdict.consistent);
  CHECK_FALSE(verdict.failures.empty());
}
