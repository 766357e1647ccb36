#include <doctest.h>

#include "fixtures.hpp"

using namespace fscap;

TEST_CASE("policy dimension") {
  CHECK(policy_dimension(1) == 1);
  CHECK(policy_dimension(2) == 5);
  CHECK(policy_dimension(3) == 21);
  CHECK(policy_dimension(fscap::testing::good(1), 3) == 21);
}

TEST_CASE("coordinate indexing is a bijection") {
  for (unsigned n = 1; n <= 4; ++n) {
    for (std::uint64_t i = 0; i < policy_dimension(n); ++i) {
      const History h = history_at(i);
      CHECK(h.t <= n);
      CHECK(coordinate_index(h) == i);
    }
  }
  CHECK(coordinate_index(History{2, 0, 0}) == 1);
  CHECK(coordinate_index(History{2, 1, 1}) == 4);
  CHECK(coordinate_index(History{3, 0b01, 0b00}) == 5 + 4);
}

TEST_CASE("uniform policy") {
  CHECK(uniform_policy(1).prob(History{1, 0, 0}, 1) == Rat(1, 2));
  CHECK(uniform_policy(3).prob(History{3, 0b01, 0b00}, 0) == Rat(1, 2));
  CHECK(uniform_policy(2).coordinates().theta == std::vector<Rat>(5, Rat(1, 2)));
}

TEST_CASE("from_coordinates validates") {
  CHECK_THROWS_AS(CausalPolicy::from_coordinates({2, std::vector<Rat>(4, Rat(0))}), std::invalid_argument);
  CHECK_THROWS_AS(CausalPolicy::from_coordinates({1, {Rat(3, 2)}}), std::invalid_argument);
  CHECK_THROWS_AS(CausalPolicy::from_coordinates({1, {Rat(-1, 2)}}), std::invalid_argument);
  const auto p = CausalPolicy::from_coordinates({1, {Rat(1, 3)}});
  CHECK(p.prob(History{1, 0, 0}, 0) == Rat(2, 3));
}

TEST_CASE("coordinate round trip through policy text") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const CausalPolicy p = fscap::testing::random_policy(rng, 1 + i % 3);
    const CausalPolicy back = CausalPolicy::from_coordinates(p.coordinates());
    CHECK(back == p);
    CHECK(parse_policy_text(format_policy_text(p)) == p);
  }
}

TEST_CASE("l1 distance") {
  const auto u = uniform_policy(1).coordinates();
  CHECK(l1_distance(u, u) == 0);
  CHECK(l1_distance(u, deterministic_policy(1, 1).coordinates()) == Rat(1, 2));
  CHECK(l1_distance(deterministic_policy(3, 0).coordinates(), deterministic_policy(3, 1).coordinates()) == 21);
  CHECK_THROWS_AS(l1_distance(uniform_policy(1).coordinates(), uniform_policy(2).coordinates()),
                  std::invalid_argument);
}

TEST_CASE("grid enumeration") {
  GridEnumerator g(1, 2, 100);
  REQUIRE(g.size() == 3);
  std::vector<Rat> seen;
  CausalPolicy p = uniform_policy(1);
  while (g.next(p)) seen.push_back(p.coordinates().theta[0]);
  CHECK(seen == std::vector<Rat>{Rat(0), Rat(1, 2), Rat(1)});
  CHECK(GridEnumerator(1, 1, 100).size() == 2);
  CHECK(GridEnumerator(2, 1, 100).size() == 32);
  CHECK(GridNet::make(2, 4).eta == Rat(5, 4));
}

TEST_CASE("grid enumeration is deterministic and matches at()") {
  GridEnumerator a(2, 1, 100), b(2, 1, 100);
  CausalPolicy pa = uniform_policy(2), pb = uniform_policy(2);
  std::uint64_t i = 0;
  while (a.next(pa)) {
    REQUIRE(b.next(pb));
    CHECK(pa == pb);
    CHECK(pa == a.at(i));
    ++i;
  }
  CHECK(i == 32);
  a.reset();
  REQUIRE(a.next(pa));
  CHECK(pa == deterministic_policy(2, 0));
}

TEST_CASE("budget exceeded reports the exact count") {
  try {
    GridEnumerator g(3, 2, 1000);
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& ex) {
    BigInt expected;
    mpz_ui_pow_ui(expected.get_mpz_t(), 3, 21);
    CHECK(ex.required() == expected);
    CHECK(ex.budget() == 1000);
  }
}

TEST_CASE("nearest grid point lies within d/M") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const unsigned n = 1 + i % 2;
    const unsigned M = 1 + static_cast<unsigned>(rng() % 3);
    const CausalPolicy p = fscap::testing::random_policy(rng, n, 50);
    GridEnumerator g(n, M, 1 << 20);
    const CausalPolicy nearest = g.at(g.nearest_index(p.coordinates()));
    CHECK(l1_distance(p.coordinates(), nearest.coordinates()) <= g.net().eta);
  }
}
