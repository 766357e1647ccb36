#include <doctest.h>

#include "fixtures.hpp"
#include "fscap/info.hpp"

using namespace fscap;
using fscap::testing::bad;
using fscap::testing::good;

namespace {

// Oracle constants from tests/oracles/oracle.py (mpmath, 50 digits).
constexpr double kH34 = 0.81127812445913286391;
constexpr double kFannes4Quarter = 1.2075187496394219093;
constexpr double kCmiModulusHalf = 3.7924812503605780907;
constexpr double kBscQuarterCapacity = 0.18872187554086713609;
constexpr double kTwoStateDi = 0.13574769047678452223;

bool encloses(const CertifiedReal& v, double expected, double slack = 1e-15) {
  return v.lower() <= Rat(expected + slack) && Rat(expected - slack) <= v.upper();
}

UnifilarChannel two_state_channel() {
  RawChannel raw = RawChannel::with_states(2);
  const Rat p1[2][2] = {{Rat(1, 3), Rat(3, 4)}, {Rat(2, 5), Rat(1, 7)}};
  for (State s = 0; s < 2; ++s) {
    for (unsigned x = 0; x < 2; ++x) {
      raw.kernel[table_index(s, x, 1)] = p1[s][x];
      raw.kernel[table_index(s, x, 0)] = 1 - p1[s][x];
      for (unsigned y = 0; y < 2; ++y) raw.update[table_index(s, x, y)] = x ^ y;
    }
  }
  raw.initial = {Rat(2, 3), Rat(1, 3)};
  return UnifilarChannel::from_raw(raw);
}

}  // namespace

TEST_CASE("entropy examples") {
  const std::vector<Rat> half{Rat(1, 2), Rat(1, 2)};
  CHECK(entropy(half, 40) == CertifiedReal::exact(Rat(1)));
  const std::vector<Rat> point{Rat(1), Rat(0)};
  CHECK(entropy(point, 40) == CertifiedReal::exact(Rat(0)));
  const std::vector<Rat> uniform4(4, Rat(1, 4));
  CHECK(entropy(uniform4, 10).contains(Rat(2)));
  const std::vector<Rat> skew{Rat(3, 4), Rat(1, 4)};
  const CertifiedReal h = entropy(skew, 50);
  CHECK(h.width() <= pow2(-50));
  CHECK(encloses(h, kH34));
  CHECK(encloses(binary_entropy(Rat(1, 4), 50), kH34));
}

TEST_CASE("entropy rejects non-distributions") {
  const std::vector<Rat> short_mass{Rat(1, 2), Rat(1, 3)};
  CHECK_THROWS_AS(entropy(short_mass, 10), std::invalid_argument);
  const std::vector<Rat> negative{Rat(3, 2), Rat(-1, 2)};
  CHECK_THROWS_AS(entropy(negative, 10), std::invalid_argument);
  CHECK_THROWS_AS(binary_entropy(Rat(2), 10), std::invalid_argument);
}

TEST_CASE("entropy widths meet the requested precision") {
  const std::vector<Rat> pmf{Rat(1, 3), Rat(1, 5), Rat(7, 15)};
  for (unsigned m : {4u, 16u, 40u, 80u}) CHECK(entropy(pmf, m).width() <= pow2(-static_cast<long>(m)));
  CHECK(entropy(pmf, 80).lower() <= entropy(pmf, 4).upper());
  CHECK(entropy(pmf, 4).lower() <= entropy(pmf, 80).upper());
}

TEST_CASE("Fannes bound") {
  CHECK(encloses(fannes_bound(4, Rat(1, 4), 50), kFannes4Quarter));
  CHECK(fannes_bound(2, Rat(1, 2), 30).contains(Rat(1)));
  CHECK(fannes_bound(7, Rat(0), 30) == CertifiedReal::exact(Rat(0)));
  CHECK(fannes_bound(1, Rat(1, 3), 30) == CertifiedReal::exact(Rat(0)));
  CHECK_THROWS_AS(fannes_bound(4, Rat(3, 4), 30), std::invalid_argument);
  CHECK_THROWS_AS(fannes_bound(0, Rat(1, 4), 30), std::invalid_argument);
}

TEST_CASE("continuity modulus") {
  CHECK(encloses(cmi_modulus(1, 1, Rat(1, 2), 50), kCmiModulusHalf));
  CHECK(cmi_modulus(2, 3, Rat(0), 10) == CertifiedReal::exact(Rat(0)));
  CHECK_THROWS_AS(cmi_modulus(1, 1, Rat(3, 4), 10), std::invalid_argument);
  CHECK_THROWS_AS(cmi_modulus(3, 2, Rat(1, 4), 10), std::invalid_argument);
  CHECK(step_modulus(1, 1, Rat(1, 2), 20) == CertifiedReal::exact(Rat(1)));
  CHECK(step_modulus(1, 1, Rat(2), 20) == CertifiedReal::exact(Rat(1)));
  CHECK(step_modulus(1, 1, Rat(1, 1024), 30).upper() < 1);
  const auto sizes = cmi_alphabet_sizes(2);
  CHECK(sizes == std::array<std::uint64_t, 4>{8, 4, 2, 16});
}

TEST_CASE("Fannes inequality on random pmf pairs") {
  std::mt19937_64 rng(21);
  int checked = 0;
  while (checked < 200) {
    const std::size_t k = 2 + rng() % 5;
    std::vector<Rat> p(k), q(k);
    Rat rp(1), rq(1);
    for (std::size_t i = 0; i + 1 < k; ++i) {
      p[i] = rp * fscap::testing::random_prob(rng);
      q[i] = rq * fscap::testing::random_prob(rng);
      rp -= p[i];
      rq -= q[i];
    }
    p[k - 1] = rp;
    q[k - 1] = rq;
    Rat dist(0);
    for (std::size_t i = 0; i < k; ++i) dist += abs(p[i] - q[i]);
    const Rat delta = dist / 2;
    if (delta > Rat(1, 2)) continue;
    ++checked;
    const CertifiedReal hp = entropy(p, 40), hq = entropy(q, 40);
    const Rat gap = abs(hp.midpoint() - hq.midpoint()) - hp.width() - hq.width();
    CHECK(gap <= fannes_bound(k, delta, 40).upper());
  }
}

TEST_CASE("conditional mutual information examples") {
  const auto id = fscap::testing::identity_channel();
  const JointLaw law = induced_joint_law(id, uniform_policy(1), 1);
  const Var x1{Var::Kind::X, 1}, y1{Var::Kind::Y, 1}, s1{Var::Kind::S, 1};
  CHECK(conditional_mutual_information(law, {x1}, {y1}, {}, 30).contains(Rat(1)));
  CHECK(conditional_mutual_information(law, {x1}, {s1}, {}, 30).contains(Rat(0)));
}

TEST_CASE("conditional mutual information rejects overlapping groups") {
  const JointLaw law = induced_joint_law(fscap::testing::identity_channel(), uniform_policy(1), 1);
  const Var x1{Var::Kind::X, 1}, y1{Var::Kind::Y, 1};
  CHECK_THROWS_AS(conditional_mutual_information(law, {x1}, {x1}, {}, 10), std::invalid_argument);
  CHECK_THROWS_AS(conditional_mutual_information(law, {x1}, {y1}, {y1}, 10), std::invalid_argument);
}

TEST_CASE("directed information examples") {
  const auto id = fscap::testing::identity_channel();
  CHECK(directed_information(id, uniform_policy(1), 1, 30).contains(Rat(1)));
  CHECK(directed_information(id, uniform_policy(3), 3, 30).contains(Rat(3)));
  CHECK(directed_information(id, deterministic_policy(2, 1), 2, 30) == CertifiedReal::exact(Rat(0)));
  CHECK(directed_information(good(1), uniform_policy(3), 3, 30).contains(Rat(1)));
  CHECK(directed_information(good(1), uniform_policy(2), 2, 30) == CertifiedReal::exact(Rat(0)));
  CHECK(directed_information(bad(1), uniform_policy(3), 3, 30) == CertifiedReal::exact(Rat(0)));
  CHECK(encloses(directed_information(fscap::testing::bsc(Rat(1, 4)), uniform_policy(1), 1, 50),
                 kBscQuarterCapacity));
}

TEST_CASE("two-state channel against the oracle") {
  const CausalPolicy p = CausalPolicy::from_coordinates(
      {2, {Rat(3, 5), Rat(1, 4), Rat(1, 2), Rat(5, 6), Rat(2, 9)}});
  const CertifiedReal di = directed_information(two_state_channel(), p, 2, 50);
  CHECK(di.width() <= pow2(-50));
  CHECK(encloses(di, kTwoStateDi));
}

TEST_CASE("per-step terms sum to the total and lie in [0,1]") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 30; ++i) {
    const auto c = fscap::testing::random_channel(rng, 1 + i % 3);
    const unsigned n = 1 + i % 3;
    const JointLaw law = induced_joint_law(c, fscap::testing::random_policy(rng, n), n);
    const auto terms = directed_information_terms(law, 30);
    REQUIRE(terms.size() == n);
    CertifiedReal sum = CertifiedReal::exact(Rat(0));
    for (const auto& term : terms) {
      CHECK(term.lower() >= 0);
      CHECK(term.upper() <= 1 + pow2(-30));
      sum += term;
    }
    const CertifiedReal total = directed_information(law, 30);
    CHECK(total.width() <= pow2(-30));
    CHECK(total.lower() <= sum.upper());
    CHECK(sum.lower() <= total.upper());
  }
}

TEST_CASE("CMI continuity along random policy pairs") {
  std::mt19937_64 rng(25);
  for (int i = 0; i < 30; ++i) {
    const auto c = fscap::testing::random_channel(rng, 1 + i % 2);
    const unsigned n = 1 + i % 2;
    const CausalPolicy a = fscap::testing::random_policy(rng, n, 40);
    CausalPolicy b = a;
    const std::uint64_t coord = rng() % a.dimension();
    b = b.with_coordinate(coord, a.coordinates().theta[coord] * Rat(15, 16));
    const JointLaw la = induced_joint_law(c, a, n), lb = induced_joint_law(c, b, n);
    const Rat delta = Rat(lipschitz_constant(c, n)) * l1_distance(a.coordinates(), b.coordinates());
    if (delta > Rat(1, 2)) continue;
    const auto ta = directed_information_terms(la, 40), tb = directed_information_terms(lb, 40);
    for (unsigned t = 1; t <= n; ++t) {
      const Rat gap = abs(ta[t - 1].midpoint() - tb[t - 1].midpoint());
      CHECK(gap <= cmi_modulus(t, n, delta, 40).upper() + ta[t - 1].width() + tb[t - 1].width());
    }
  }
}

TEST_CASE("directed information is bounded by n and consistent across precisions") {
  std::mt19937_64 rng(27);
  for (int i = 0; i < 20; ++i) {
    const auto c = fscap::testing::random_channel(rng, 2);
    const unsigned n = 1 + i % 3;
    const CausalPolicy p = fscap::testing::random_policy(rng, n);
    const CertifiedReal coarse = directed_information(c, p, n, 8), fine = directed_information(c, p, n, 40);
    CHECK(fine.lower() <= coarse.upper());
    CHECK(coarse.lower() <= fine.upper());
    CHECK(fine.width() <= pow2(-40));
    CHECK(fine.upper() <= n);
  }
}
