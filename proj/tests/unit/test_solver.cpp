#include <doctest.h>

#include "fixtures.hpp"
#include "fscap/info.hpp"
#include "fscap/solver.hpp"

using namespace fscap;
using fscap::testing::bad;
using fscap::testing::good;

namespace {

UnifilarChannel budget_breaker() {
  std::mt19937_64 rng(31);
  fscap::testing::random_channel(rng, 2);
  fscap::testing::random_channel(rng, 2);
  return fscap::testing::random_channel(rng, 2);
}

// good(1) with an extra state that is never entered.
UnifilarChannel good_with_orphan(const Rat& orphan_p1) {
  const RawChannel base = good(1).to_raw();
  RawChannel raw = RawChannel::with_states(4);
  for (std::size_t i = 0; i < base.kernel.size(); ++i) {
    raw.kernel[i] = base.kernel[i];
    raw.update[i] = base.update[i];
  }
  for (unsigned x = 0; x < 2; ++x) {
    raw.kernel[table_index(3, x, 1)] = orphan_p1;
    raw.kernel[table_index(3, x, 0)] = 1 - orphan_p1;
    for (unsigned y = 0; y < 2; ++y) raw.update[table_index(3, x, y)] = 3;
  }
  raw.initial = {Rat(1), Rat(0), Rat(0), Rat(0)};
  return UnifilarChannel::from_raw(raw);
}

}  // namespace

TEST_CASE("net plan for the identity channel") {
  const NetPlan plan = plan_net(fscap::testing::identity_channel(), 1, 2);
  CHECK(plan.count == plan.M + 1);
  CHECK(plan.evaluated_count == plan.count);
  CHECK(plan.omega_sum <= pow2(-4));
  CHECK(Rat(plan.M) * plan.eta_target >= 1);
}

TEST_CASE("identity channel, n=1, k=2") {
  const auto id = fscap::testing::identity_channel();
  const CertifiedValue v = approx_normalized(encode_channel(id), 1, 2);
  CHECK(v.normalized);
  CHECK(v.contains(Rat(1)));
  CHECK(v.radius <= pow2(-2));
  CHECK(v.provenance.method == "net");
  CHECK(recheck(id, v).empty());
}

TEST_CASE("Bad family values are zero") {
  for (unsigned n = 1; n <= 3; ++n) {
    const CertifiedValue v = approx_normalized(encode_channel(bad(1)), n, 10);
    CHECK(v.contains(Rat(0)));
    CHECK(v.radius <= pow2(-10));
    CHECK(recheck(bad(1), v).empty());
  }
}

TEST_CASE("agreement with the closed form") {
  for (unsigned N = 1; N <= 2; ++N) {
    for (unsigned n = 1; n <= 5; ++n) {
      CAPTURE(N);
      CAPTURE(n);
      const CertifiedValue v = approx_normalized(encode_channel(good(N)), n, 8);
      CHECK(v.contains(closed_form_normalized_value({N, Variant::Good}, n)));
      CHECK(v.radius <= pow2(-8));
      CHECK(recheck(good(N), v).empty());
    }
  }
}

TEST_CASE("unnormalized value of Good(N=1), n=4") {
  const CertifiedValue v = approx_value(encode_channel(good(1)), 4, 12);
  CHECK_FALSE(v.normalized);
  CHECK(v.contains(Rat(2)));
  CHECK(v.radius <= pow2(-12));
  CHECK(v.provenance.method == "bracket");
}

TEST_CASE("evaluate_net on Bad(N=1), n=3, M=1") {
  const CertifiedValue v = evaluate_net(bad(1), 3, 1, 10);
  CHECK(v.provenance.method == "report-bound");
  CHECK(v.provenance.policies_evaluated == 128);
  CHECK(v.contains(Rat(0)));
  CHECK(recheck(bad(1), v).empty());
}

TEST_CASE("evaluate_net refines monotonically with M") {
  const auto bsc = fscap::testing::bsc(Rat(1, 4));
  Rat prev_radius(1000);
  for (unsigned M : {1u, 2u, 4u, 8u}) {
    const CertifiedValue v = evaluate_net(bsc, 2, M, 12);
    CHECK(v.radius <= prev_radius);
    CHECK(recheck(bsc, v).empty());
    prev_radius = v.radius;
  }
  // 2 * (1 - h2(1/4)).
  const CertifiedValue fine = evaluate_net(bsc, 2, 8, 12);
  CHECK(fine.low() <= Rat(0.3774437511));
  CHECK(Rat(0.3774437510) <= fine.high());
}

TEST_CASE("unreachable states do not change the value") {
  const CertifiedValue a = approx_value(encode_channel(good_with_orphan(Rat(1, 3))), 3, 10);
  const CertifiedValue b = approx_value(encode_channel(good_with_orphan(Rat(5, 7))), 3, 10);
  CHECK(a.estimate == b.estimate);
  CHECK(a.radius == b.radius);
  CHECK(a.contains(Rat(1)));
}

TEST_CASE("dual upper bound") {
  CHECK(dual_upper_bound(bad(1), 3, 20) == 0);
  CHECK(dual_upper_bound(good(1), 4, 20) >= 2);
  CHECK(dual_upper_bound(good(1), 4, 20) <= 2);
  CHECK(binary_capacity_upper(Rat(1, 3), Rat(1, 3), 20) == 0);
  const Rat bsc = binary_capacity_upper(Rat(1, 4), Rat(3, 4), 30);
  CHECK(bsc >= Rat(0.18872187554086713));
  CHECK(bsc <= Rat(0.18872187554086713) + pow2(-20));
}

TEST_CASE("dual bound dominates every policy and never exceeds n") {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 25; ++i) {
    const auto c = fscap::testing::random_channel(rng, 1 + i % 3);
    const unsigned n = 1 + i % 3;
    const Rat upper = dual_upper_bound(c, n, 20);
    CHECK(upper <= n);
    for (int j = 0; j < 4; ++j) {
      CHECK(directed_information(c, fscap::testing::random_policy(rng, n), n, 20).lower() <= upper);
    }
  }
}

TEST_CASE("budget exhaustion reports the largest feasible k") {
  const auto c = budget_breaker();
  SolverOptions opts;
  opts.budget = 1000;
  std::optional<unsigned> feasible;
  try {
    approx_value(encode_channel(c), 2, 12, opts);
    FAIL("expected ApproxBudgetExceeded");
  } catch (const ApproxBudgetExceeded& ex) {
    feasible = ex.feasible_k();
    CHECK(ex.budget() == 1000);
    CHECK(ex.required() > 1000);
  }
  REQUIRE(feasible.has_value());
  REQUIRE(*feasible < 12);
  const CertifiedValue v = approx_value(encode_channel(c), 2, *feasible, opts);
  CHECK(v.radius <= pow2(-static_cast<long>(*feasible)));
  CHECK(recheck(c, v).empty());
}

TEST_CASE("results do not depend on the worker count") {
  const auto bsc = fscap::testing::bsc(Rat(1, 4));
  SolverOptions one, many;
  many.workers = 4;
  CHECK(format_certified_value(evaluate_net(bsc, 2, 4, 12, one)) ==
        format_certified_value(evaluate_net(bsc, 2, 4, 12, many)));
  const auto id = encode_channel(fscap::testing::identity_channel());
  CHECK(format_certified_value(approx_normalized(id, 1, 2, one)) ==
        format_certified_value(approx_normalized(id, 1, 2, many)));
}

TEST_CASE("certified value text round trip") {
  const CertifiedValue v = evaluate_net(bad(1), 3, 1, 10);
  const std::string line = format_certified_value(v);
  CHECK(line.find('\n') == std::string::npos);
  const CertifiedValue back = parse_certified_value(line);
  CHECK(format_certified_value(back) == line);
  CHECK(back.estimate == v.estimate);
  CHECK(back.radius == v.radius);
  CHECK_THROWS(parse_certified_value("estimate=1"));
}

TEST_CASE("recheck rejects a tightened claim") {
  const auto bsc = fscap::testing::bsc(Rat(1, 4));
  CertifiedValue v = evaluate_net(bsc, 2, 1, 12);
  REQUIRE(v.radius > 0);
  v.radius /= 4;
  CHECK_FALSE(recheck(bsc, v).empty());
  CertifiedValue shifted = evaluate_net(bsc, 2, 2, 12);
  shifted.estimate += 1;
  CHECK_FALSE(recheck(bsc, shifted).empty());
}
