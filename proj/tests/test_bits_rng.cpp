#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "pinkey/bits.hpp"
#include "pinkey/rng.hpp"

using namespace pinkey;

TEST_SUITE("bits") {
  TEST_CASE("string and integer round trips") {
    const auto b = bits_from_string("1011");
    CHECK(bits_to_string(b) == "1011");
    CHECK(bits_to_uint(b) == 11);
    CHECK(uint_to_bits(11, 6) == bits_from_string("001011"));
    CHECK_THROWS(bits_from_string("10a"));
  }

  TEST_CASE("xor over the shorter prefix") {
    CHECK(xor_prefix(bits_from_string("1011"), bits_from_string("01")) == bits_from_string("11"));
    CHECK(xor_prefix(bits_from_string("1010"), bits_from_string("0110")) == bits_from_string("1100"));
  }

  TEST_CASE("hex packing pads the last byte") {
    const auto b = bits_from_string("101100001");
    CHECK(bits_to_hex(b) == "b080");
    CHECK(bits_from_hex("b080", 9) == b);
    CHECK(bits_to_hex(BitString{}).empty());
  }

  TEST_CASE("fnv1a reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(digest_hex(0xabcULL) == "0000000000000abc");
  }
}

TEST_SUITE("rng") {
  TEST_CASE("streams are pure functions of key and position") {
    CounterRng a(42, 7), b(42, 7);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    CounterRng c(42, 8);
    CounterRng d(42, 7);
    CHECK(c() != d());
  }

  TEST_CASE("substreams do not advance the parent") {
    CounterRng a(1, 2);
    const auto before = a.position();
    auto child = a.substream(9);
    child();
    CHECK(a.position() == before);
    CHECK(a.substream(9).key() == child.key());
  }

  TEST_CASE("below is unbiased over a small range") {
    CounterRng r(3, 0);
    std::array<int, 6> counts{};
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) ++counts[r.below(6)];
    double chi2 = 0.0;
    for (int c : counts) chi2 += std::pow(c - draws / 6.0, 2) / (draws / 6.0);
    CHECK(chi2 < 20.5);  // 5 dof, p = 0.001
  }

  TEST_CASE("normal has unit variance") {
    CounterRng r(5, 0);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double x = r.normal();
      sum += x;
      sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.015);
  }

  TEST_CASE("shuffle yields a permutation and depends on the seed") {
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    auto w = v;
    CounterRng r1(11, 0), r2(12, 0);
    shuffle(std::span<int>(v), r1);
    shuffle(std::span<int>(w), r2);
    CHECK(std::set<int>(v.begin(), v.end()).size() == 50);
    CHECK(v != w);
  }
}
