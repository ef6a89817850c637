#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pinkey/rates.hpp"
#include "pinkey/rng.hpp"

using namespace pinkey;

namespace {

std::vector<PairInformation> random_pairs(CounterRng& rng) {
  std::vector<PairInformation> pairs(2 + rng.below(5));
  for (auto& p : pairs) p = {4.0 * rng.uniform(), 4.0 * rng.uniform()};
  return pairs;
}

}  // namespace

TEST_SUITE("rates") {
  TEST_CASE("capacity examples") {
    CHECK(capacity(std::vector<double>{1.0, 1.0}) == 1.0);
    CHECK(capacity(std::vector<double>{0.5, 1.0, 2.0}) == 1.5);
    CHECK(capacity(std::vector<double>{0.0, 3.0}) == 0.0);
    CHECK(capacity_from_order_statistics(std::vector<double>{2.0, 0.5, 1.0}) == 1.5);
  }

  TEST_CASE("capacity rejects bad input") {
    CHECK_THROWS_AS(capacity(std::vector<double>{1.0}), ConfigError);
    CHECK_THROWS_AS(capacity(std::vector<double>{1.0, -0.1}), ConfigError);
    CHECK_THROWS_AS(capacity(std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}), ConfigError);
    CHECK_THROWS_AS(xor_baseline_rate(std::vector<double>{2.0}), ConfigError);
  }

  TEST_CASE("converse examples") {
    const std::vector<PairInformation> two{{1.0, 1.0}, {1.0, 1.0}};
    const auto b2 = converse_bound(two);
    CHECK(b2.bound == 1.0);
    CHECK(b2.cuts == std::vector<double>{1.0, 1.0});

    const std::vector<PairInformation> three{{0.5, 0.5}, {1.0, 1.0}, {2.0, 2.0}};
    const auto b3 = converse_bound(three);
    CHECK(b3.bound == 1.5);
    CHECK(b3.cuts == std::vector<double>{3.0, 2.5, 1.5});
  }

  TEST_CASE("partitions follow the link comparison") {
    const std::vector<PairInformation> pairs{{2.0, 1.0}, {1.0, 2.0}, {1.5, 1.5}};
    const auto b = converse_bound(pairs);
    REQUIRE(b.partitions.size() == 3);
    CHECK(b.partitions[2].m == 2);
    CHECK(b.partitions[2].alice_set == std::vector<std::size_t>{0});
    CHECK(b.partitions[2].bob_set == std::vector<std::size_t>{1});
    CHECK(b.partitions[0].bob_set == std::vector<std::size_t>{1, 2});  // tie goes to Bob
  }

  TEST_CASE("each cut equals the max flow and the best brute-force cut") {
    CounterRng rng(2024, 1);
    for (int trial = 0; trial < 300; ++trial) {
      const auto pairs = random_pairs(rng);
      const auto b = converse_bound(pairs);
      for (std::size_t m = 0; m < pairs.size(); ++m) {
        CHECK(b.cuts[m] == doctest::Approx(oracle::flow_without_relay(pairs, m)).epsilon(1e-12));
        CHECK(b.cuts[m] == doctest::Approx(oracle::brute_force_cut(pairs, m)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("capacity is tight against the converse") {
    CounterRng rng(7, 2);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto pairs = random_pairs(rng);
      const auto r = rate_report(pairs);
      CHECK(std::abs(r.capacity - r.converse.bound) <= 1e-12);
      CHECK(std::abs(r.capacity - r.capacity_order_form) <= 1e-12);
      CHECK(r.tight());
    }
  }

  TEST_CASE("xor baseline examples") {
    CHECK(xor_baseline_rate(std::vector<double>{1.0, 1.0}) == 1.0);
    CHECK(xor_baseline_rate(std::vector<double>{0.5, 1.0, 2.0, 2.0}) == 2.5);
    CHECK(xor_baseline_rate(std::vector<double>{1.0, 1.0, 1.0}) == 1.0);
    CHECK(capacity(std::vector<double>{1.0, 1.0, 1.0}) == 2.0);
  }

  TEST_CASE("properties over random inputs") {
    CounterRng rng(99, 3);
    for (int trial = 0; trial < 500; ++trial) {
      const auto pairs = random_pairs(rng);
      auto i = min_informations(pairs);
      const double c = capacity(i);
      CHECK(c >= 0.0);
      CHECK(xor_baseline_rate(i) <= c + 1e-12);
      // Permutation invariance.
      std::reverse(i.begin(), i.end());
      CHECK(std::abs(capacity(i) - c) <= 1e-12);
      // Raising one rate never lowers the capacity.
      i[0] += 0.5;
      CHECK(capacity(i) >= c - 1e-12);
    }
  }
}
