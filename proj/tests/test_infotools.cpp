#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "pinkey/infotools.hpp"
#include "pinkey/model.hpp"
#include "pinkey/rng.hpp"

using namespace pinkey;

namespace {

JointPmf dsbs_pmf(double p) { return JointPmf({2, 2}, {(1 - p) / 2, p / 2, p / 2, (1 - p) / 2}); }

}  // namespace

TEST_SUITE("infotools") {
  TEST_CASE("entropy examples") {
    CHECK(entropy_of(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == 2.0);
    CHECK(entropy_of(std::vector<double>{1.0, 0.0}) == 0.0);
    CHECK(entropy_of(std::vector<double>{0.5, 0.25, 0.25}) == 1.5);
  }

  TEST_CASE("mutual information examples") {
    const JointPmf independent({2, 2}, {0.25, 0.25, 0.25, 0.25});
    CHECK(exact_mi(independent, {0}, {1}) == 0.0);
    std::vector<double> diag(64, 0.0);
    for (int i = 0; i < 8; ++i) diag[i * 8 + i] = 1.0 / 8;
    CHECK(exact_mi(JointPmf({8, 8}, diag), {0}, {1}) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(std::abs(exact_mi(dsbs_pmf(0.11), {0}, {1}) - 0.5) < 1e-3);
    CHECK(exact_mi(dsbs_pmf(0.11), {0}, {1}) == doctest::Approx(1.0 - binary_entropy(0.11)).epsilon(1e-12));
  }

  TEST_CASE("conditional mutual information of an xor triple") {
    // Z = X xor Y: pairwise independent, but I(X;Y|Z) = 1.
    std::vector<double> t(8, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) t[x * 4 + y * 2 + (x ^ y)] = 0.25;
    const JointPmf pmf({2, 2, 2}, t);
    const std::size_t a[] = {0}, b[] = {1}, c[] = {2};
    CHECK(exact_mi(pmf, {0}, {1}) == 0.0);
    CHECK(exact_conditional_mi(pmf, a, b, c) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("pmf validation") {
    CHECK_THROWS(JointPmf({2}, {0.5, 0.6}));
    CHECK_THROWS(JointPmf({2}, {1.1, -0.1}));
    CHECK_THROWS(JointPmf({3}, {0.5, 0.5}));
    CHECK_THROWS(exact_mi(dsbs_pmf(0.1), {0}, {0}));
    const std::vector<double> counts{1, 1, 1};
    const auto pmf = JointPmf::from_counts({3}, counts);
    CHECK(std::accumulate(pmf.table().begin(), pmf.table().end(), 0.0) == 1.0);
  }

  TEST_CASE("negative information is clamped or rejected") {
    CHECK(clamp_information(-1e-12) == 0.0);
    CHECK(clamp_information(0.25) == 0.25);
    CHECK_THROWS_AS(clamp_information(-1e-6), InvariantViolation);
  }

  TEST_CASE("leakage of the three 2x2 partitions") {
    const auto parity = RbCodebook::from_bins({1, 1}, {{0b00, 0b11}, {0b01, 0b10}});
    CHECK(leakage_audit(parity, 0).leakage == 0.0);
    CHECK(leakage_audit(parity, 1).leakage == 0.0);

    const auto first = RbCodebook::from_bins({1, 1}, {{0b00, 0b01}, {0b10, 0b11}});
    CHECK(leakage_audit(first, 0).leakage == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(leakage_audit(first, 1).leakage == 0.0);

    double mean = 0.0;
    const auto parts = oracle::all_equal_partitions(4, 2);
    for (const auto& p : parts) mean += leakage_audit(RbCodebook::from_bins({1, 1}, p), 0).leakage;
    mean /= static_cast<double>(parts.size());
    CHECK(std::abs(mean - 1.0 / 3.0) <= 1e-12);
  }

  TEST_CASE("audit decomposition is consistent") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto cb = RbCodebook::build({3, 2, 3}, 4, seed);
      for (std::size_t m = 0; m < 3; ++m) {
        const auto a = leakage_audit(cb, m);
        CHECK(a.joint_exact);
        CHECK(a.leakage >= 0.0);
        CHECK(a.h_key == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(a.h_tuple_given_key == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(a.leakage == doctest::Approx(a.leakage_message + a.transcript_term).scale(1.0).epsilon(1e-12));
        CHECK(a.transcript_leakage == 0.0);
        // I(K; W_m) = H(K) + H(W_m) - H(K, W_m) and H(W^M|W_m,K) = total - H(K, W_m).
        CHECK(a.bin_slack == doctest::Approx(a.h_tuple_given_message_key - (3.0 - cb.message_bits()[m])));
      }
    }
  }

  TEST_CASE("transcript payloads leak nothing with uniform keys") {
    for (unsigned la = 0; la <= 5; ++la)
      for (unsigned lb = 0; lb <= 5; ++lb) CHECK(transcript_leakage({la, lb}) == 0.0);
  }

  TEST_CASE("the chain bound path matches the joint path when payloads are independent") {
    const auto cb = RbCodebook::build({4, 4, 4}, 6, 11);  // 2 * 12 > 20: bound path
    const auto a = leakage_audit(cb, 1);
    CHECK(a.joint_exact);
    CHECK(a.leakage == a.leakage_message);
  }

  TEST_CASE("xor key leaks nothing on equal-length inputs") {
    for (std::size_t m = 2; m <= 8; ++m) {
      for (unsigned b = 1; b * m <= 16; ++b) {
        for (std::size_t r = 0; r < m; ++r) CHECK(xor_leakage_audit(std::vector<unsigned>(m, b), r).leakage == 0.0);
      }
    }
  }

  TEST_CASE("empirical mi") {
    const std::size_t n = 100000;
    CounterRng rng(31, 0);
    std::vector<std::uint32_t> x(n), y(n), same(n), noisy(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.bit();
      y[i] = rng.bit();
      noisy[i] = x[i] ^ (rng.bernoulli(0.11) ? 1u : 0u);
    }
    EmpiricalMiConfig cfg;
    cfg.bootstrap = 200;
    cfg.seed = 4;
    const auto indep = empirical_mi(x, y, cfg);
    CHECK(std::abs(indep.estimate) <= 0.01);
    CHECK_FALSE(indep.unreliable);
    const auto ident = empirical_mi(x, x, cfg);
    CHECK(std::abs(ident.estimate - 1.0) <= 0.01);
    const auto d = empirical_mi(x, noisy, cfg);
    CHECK(std::abs(d.estimate - 0.5) <= 0.02);
    CHECK(d.ci_low <= d.estimate);
    CHECK(d.ci_high >= d.estimate);
    CHECK(std::abs(d.estimate - exact_mi(dsbs_pmf(0.11), {0}, {1})) <= 0.02);
    CHECK_THROWS(empirical_mi(std::span(x).first(999), std::span(y).first(999), cfg));
  }
}
