#include <cmath>

#include "doctest.h"
#include "pinkey/model.hpp"

using namespace pinkey;

namespace {

PinInstance make(std::vector<PairSource> pairs, std::uint64_t n) {
  PinInstance inst;
  inst.m = pairs.size();
  inst.pairs = std::move(pairs);
  inst.params.n = n;
  return inst;
}

std::size_t agreements(const BitString& a, const BitString& b) {
  std::size_t same = 0;
  for (std::size_t j = 0; j < a.size(); ++j) same += a[j] == b[j];
  return same;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("ideal pairs are perfectly shared") {
    const auto inst = make({PairSource::ideal_common(1, 1), PairSource::ideal_common(1, 1)}, 4);
    const auto r = sample(inst, 7);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(r.x_a[i].size() == 4);
      CHECK(r.x_a[i] == r.x_relays[i].from_alice);
      CHECK(r.x_b[i] == r.x_relays[i].from_bob);
    }
  }

  TEST_CASE("zero crossover gives identical sequences") {
    const auto inst = make({PairSource::dsbs(0.0, 0.0), PairSource::dsbs(0.0, 0.0)}, 7);
    const auto r = sample(inst, 1);
    CHECK(r.x_a[0] == r.x_relays[0].from_alice);
  }

  TEST_CASE("crossover one half gives independent sequences") {
    const auto inst = make({PairSource::dsbs(0.5, 0.5), PairSource::dsbs(0.5, 0.5)}, 100002);
    const auto r = sample(inst, 3);
    const double rate = static_cast<double>(agreements(r.x_a[0], r.x_relays[0].from_alice)) / 100002.0;
    CHECK(std::abs(rate - 0.5) <= 0.005);
  }

  TEST_CASE("flip counts follow the crossover (chi-square)") {
    const double p = 0.1;
    const std::uint64_t n = 7 * 20000;
    const auto inst = make({PairSource::dsbs(p, 0.3), PairSource::dsbs(0.2, p)}, n);
    const auto r = sample(inst, 9);
    const auto check_side = [&](const BitString& x, const BitString& y, double q) {
      const double flips = static_cast<double>(n - agreements(x, y));
      const double expected = q * n;
      const double chi2 = std::pow(flips - expected, 2) / expected + std::pow(flips - expected, 2) / (n - expected);
      CHECK(chi2 < 10.83);  // 1 dof, p = 0.001
    };
    check_side(r.x_a[0], r.x_relays[0].from_alice, p);
    check_side(r.x_b[0], r.x_relays[0].from_bob, 0.3);
    check_side(r.x_a[1], r.x_relays[1].from_alice, 0.2);
    check_side(r.x_b[1], r.x_relays[1].from_bob, p);
  }

  TEST_CASE("changing one pair leaves the others untouched") {
    auto inst = make({PairSource::ideal_common(2, 3), PairSource::ideal_common(1, 1)}, 5);
    const auto before = sample(inst, 21);
    inst.pairs[1] = PairSource::ideal_common(4, 2);
    const auto after = sample(inst, 21);
    CHECK(before.x_a[0] == after.x_a[0]);
    CHECK(before.x_b[0] == after.x_b[0]);
    CHECK(before.x_a[1] != after.x_a[1]);
  }

  TEST_CASE("pairwise mutual informations") {
    auto inst = make({PairSource::ideal_common(3, 2), PairSource::dsbs(0.11, 0.11), PairSource::dsbs(0.5, 0.25)}, 7);
    const auto mi = pair_mutual_informations(inst);
    CHECK(mi[0].alice == 3.0);
    CHECK(mi[0].bob == 2.0);
    CHECK(mi[1].alice == doctest::Approx(0.5).epsilon(0.002));
    CHECK(std::abs(mi[1].bob - 0.5) < 1e-3);
    CHECK(mi[2].alice == 0.0);
    CHECK(mi[2].bob == doctest::Approx(1.0 - binary_entropy(0.25)));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(0.5) == 1.0);
  }

  TEST_CASE("instance validation") {
    CHECK_THROWS_AS(make({PairSource::ideal_common(1, 1)}, 1).validate(), ConfigError);
    CHECK_THROWS_AS(make({PairSource::dsbs(0.1, 0.1), PairSource::dsbs(0.1, 0.1)}, 8).validate(), ConfigError);
    CHECK_THROWS_AS(make({PairSource::dsbs(0.6, 0.1), PairSource::dsbs(0.1, 0.1)}, 7).validate(), ConfigError);
    CHECK_NOTHROW(make({PairSource::dsbs(0.1, 0.1), PairSource::ideal_common(1, 2)}, 7).validate());
  }
}
