// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pinkey/cli/commands.hpp"
#include "pinkey/distillation.hpp"
#include "pinkey/infotools.hpp"
#include "pinkey/pipeline.hpp"
#include "pinkey/protocol.hpp"
#include "pinkey/rates.hpp"
#include "pinkey/rng.hpp"
#include "pinkey/wireless.hpp"

using namespace pinkey;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

std::vector<std::vector<PairInformation>> random_instances(std::uint64_t seed, std::size_t count) {
  std::vector<std::vector<PairInformation>> out;
  CounterRng rng(seed, 0);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<PairInformation> pairs(2 + rng.below(5));
    for (auto& p : pairs) p = {4.0 * rng.uniform(), 4.0 * rng.uniform()};
    out.push_back(std::move(pairs));
  }
  return out;
}

const auto kInstances = random_instances(20240601, 1000);

PinInstance ideal_instance(std::vector<std::pair<unsigned, unsigned>> bits, std::uint64_t n, std::uint64_t seed) {
  PinInstance inst;
  for (auto [a, b] : bits) inst.pairs.push_back(PairSource::ideal_common(a, b));
  inst.m = inst.pairs.size();
  inst.params.n = n;
  inst.params.seed = seed;
  return inst;
}

Result ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& pairs : kInstances) {
    const double c = capacity(min_informations(pairs));
    worst = std::max(worst, std::abs(c - converse_bound(pairs).bound));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-12 && secs < 1.0,
          fmt("1000 instances, max |capacity - converse| = %.3g, %.3f s", worst, secs)};
}

Result ac2() {
  double worst = 0.0;
  for (const auto& pairs : kInstances) {
    const auto i = min_informations(pairs);
    worst = std::max(worst, std::abs(capacity(i) - capacity_from_order_statistics(i)));
  }
  return {worst <= 1e-12, fmt("1000 instances, max |sum-max - order form| = %.3g", worst)};
}

// Codebooks generated by the end-to-end runs, reused for key uniformity.
std::vector<RbCodebook> g_codebooks;

Result ac3() {
  const auto inst = ideal_instance({{2, 2}, {3, 2}, {2, 3}}, 2, 0);
  std::size_t mismatches = 0, failures = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto cb = build_instance_codebook(inst, default_key_bits(inst), codebook_seed(s, 0));
    const auto out = run_trial(inst, cb, trial_seed(s, 0));
    failures += out.reconciliation_failed;
    mismatches += !out.keys_agree || out.alice_key.k != out.bob_key.k;
    g_codebooks.push_back(cb);
  }
  return {mismatches == 0 && failures == 0,
          fmt("100 seeds, 3 relays, key mismatches %.0f, failures %.0f", double(mismatches), double(failures))};
}

Result ac4() {
  for (unsigned b : {2u, 4u, 6u, 8u}) {
    for (std::size_t c = 0; c < 100; ++c) {
      g_codebooks.push_back(RbCodebook::build({b, b}, sweep_key_bits(2, b), codebook_seed(77, c)));
    }
  }
  double worst = 0.0;
  for (const auto& cb : g_codebooks) worst = std::max(worst, std::abs(key_entropy(cb) - cb.key_bits()));
  return {worst <= 1e-12,
          fmt("%.0f codebooks, max |H(K|C) - key_bits| = %.3g", double(g_codebooks.size()), worst)};
}

Result ac5() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<LeakageSweepRow> rows;
  for (unsigned b : {2u, 4u, 6u, 8u}) rows.push_back(leakage_sweep_row(2, b, 200, 20240602));
  bool decreasing = true, exact = true;
  std::string detail = "per-bit leakage";
  for (std::size_t j = 0; j < rows.size(); ++j) {
    detail += fmt(" b=%.0f:%.4f", rows[j].budget_bits, rows[j].mean_per_bit);
    if (j > 0 && !(rows[j].mean_per_bit < rows[j - 1].mean_per_bit)) decreasing = false;
    exact = exact && rows[j].all_exact;
  }
  // Degenerate case: one bit per message, no withheld bits, all three partitions.
  double mean = 0.0;
  const auto parts = oracle::all_equal_partitions(4, 2);
  for (const auto& p : parts) mean += leakage_audit(RbCodebook::from_bins({1, 1}, p), 0).leakage;
  mean /= static_cast<double>(parts.size());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail += fmt("; 200 codebooks each; 1-bit oracle mean %.12f; %.1f s", mean, secs);
  const bool pass = decreasing && exact && rows.back().mean_per_bit < 0.05 &&
                    std::abs(mean - 1.0 / 3.0) <= 1e-12 && parts.size() == 3 && secs < 300.0;
  return {pass, detail};
}

Result ac6() {
  std::size_t audits = 0;
  double worst = 0.0;
  for (std::size_t m = 2; m <= 16; ++m) {
    for (unsigned b = 1; b * m <= 16; ++b) {
      for (std::size_t r = 0; r < m; ++r) {
        worst = std::max(worst, xor_leakage_audit(std::vector<unsigned>(m, b), r).leakage);
        ++audits;
      }
    }
  }
  std::size_t exceed = 0;
  for (const auto& pairs : kInstances) {
    const auto i = min_informations(pairs);
    exceed += xor_baseline_rate(i) > capacity(i) + 1e-12;
  }
  const auto inst = ideal_instance({{1, 1}, {1, 1}, {1, 1}, {1, 1}}, 1, 3);
  const auto cb = build_instance_codebook(inst, default_key_bits(inst), 3);
  const auto trial = run_trial(inst, cb, 5);
  const std::vector<double> ones(4, 1.0);
  const bool gap = trial.alice_xor_key.size() == 2 && cb.key_bits() == 3 && xor_baseline_rate(ones) == 2.0 &&
                   capacity(ones) == 3.0;
  return {worst == 0.0 && exceed == 0 && gap,
          fmt("%.0f exhaustive audits, max leakage %.3g; xor > rb on %.0f/1000; ", double(audits), worst,
              double(exceed)) +
              fmt("M=4 unit rates: xor %.0f bits vs rb %.0f bits", double(trial.alice_xor_key.size()),
                  double(cb.key_bits()))};
}

Result ac7() {
  CounterRng rng(20240603, 0);
  double worst_gap = 0.0, worst_secs = 0.0;
  bool ok = true;
  for (int k = 0; k < 10; ++k) {
    const std::size_t m = 2 + rng.below(3);
    auto c = WirelessConfig::symmetric(m, 2.0 + 98.0 * rng.uniform(), 1);
    c.noise_var = 0.5 + 1.5 * rng.uniform();
    for (auto& v : c.channel_vars) v = {0.5 + 1.5 * rng.uniform(), 0.5 + 1.5 * rng.uniform()};
    c.allocation.t_a = 1 + static_cast<unsigned>(rng.below(3));
    c.allocation.t_b = 1 + static_cast<unsigned>(rng.below(3));
    for (auto& t : c.allocation.t_relays) t = 1 + static_cast<unsigned>(rng.below(3));
    c.block_len = c.allocation.total();
    const auto relay = static_cast<std::size_t>(rng.below(m));
    const Terminal term = rng.bit() ? Terminal::Alice : Terminal::Bob;
    const auto t0 = std::chrono::steady_clock::now();
    const auto est = mc_estimate_check(c, relay, term, 1000000, derive_key(20240603, k));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    worst_gap = std::max(worst_gap, est.gap);
    worst_secs = std::max(worst_secs, secs);
    ok = ok && !est.degenerate && est.gap <= 0.02 && secs < 60.0;
  }
  return {ok, fmt("10 random configs at 1e6 samples, max relative gap %.4f, slowest %.2f s", worst_gap, worst_secs)};
}

Result ac8() {
  bool ok = true;
  std::string detail = "P=1e8:";
  for (std::size_t m : {2u, 3u, 4u, 6u}) {
    const auto pts = multiplexing_gain_sweep(WirelessConfig::symmetric(m, 1.0, 2), {1e2, 1e4, 1e6, 1e8});
    const auto& last = pts.back();
    ok = ok && std::abs(last.rb_ratio - static_cast<double>(m - 1)) <= 0.05 &&
         std::abs(last.xor_ratio - static_cast<double>(m / 2)) <= 0.05;
    detail += fmt(" M=%.0f rb %.4f xor %.4f;", double(m), last.rb_ratio, last.xor_ratio);
  }
  return {ok, detail};
}

Result ac9() {
  std::size_t single = 0, single_ok = 0, dbl = 0, dbl_flagged = 0;
  for (std::uint64_t word = 0; word < 128; ++word) {
    const auto relay = uint_to_bits(word, 7);
    for (std::size_t p = 0; p < 7; ++p) {
      auto term = relay;
      term[p] ^= 1;
      ++single;
      const auto r = reconcile_pair(term, relay, 0.0);
      single_ok += r.terminal_key == r.relay_key && r.corrected_blocks == 1;
      for (std::size_t q = p + 1; q < 7; ++q) {
        auto two = relay;
        two[p] ^= 1;
        two[q] ^= 1;
        ++dbl;
        try {
          reconcile_pair(two, relay, 0.0);
        } catch (const BlockUncorrectable&) {
          ++dbl_flagged;
        }
      }
    }
  }
  // Syndrome plus parity detects every double error in a 7-bit block.
  const double detectable = 1.0;
  const double flagged = static_cast<double>(dbl_flagged) / static_cast<double>(dbl);
  return {single_ok == single && flagged >= detectable,
          fmt("single flips corrected %.0f/%.0f; ", double(single_ok), double(single)) +
              fmt("double flips flagged %.0f/%.0f", double(dbl_flagged), double(dbl))};
}

Result ac10() {
  using namespace pinkey::cli;
  const std::string dir = PINKEY_CONFIG_DIR;
  struct Run {
    Command cmd;
    std::string file;
  };
  const std::vector<Run> runs{{Command::Capacity, "capacity_unit.json"},
                              {Command::Protocol, "protocol_ideal.json"},
                              {Command::Protocol, "protocol_dsbs.json"},
                              {Command::Wireless, "wireless_m4.json"}};
  std::size_t same = 0;
  for (const auto& r : runs) {
    const auto cfg = load_config(dir + "/" + r.file);
    same += run_command(r.cmd, cfg, {}) == run_command(r.cmd, cfg, {});
  }
  auto sweep = parse_config_text(R"({"seed": 9, "sweep": {"instances": 200, "budgets": [2, 4], "codebooks": 20}})");
  same += run_command(Command::Sweep, sweep, {}) == run_command(Command::Sweep, sweep, {});
  return {same == runs.size() + 1, fmt("%.0f/%.0f reports byte-identical across two runs", double(same),
                                       double(runs.size() + 1))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria{
      {"AC1 capacity tightness", ac1},   {"AC2 capacity forms", ac2},   {"AC3 protocol correctness", ac3},
      {"AC4 key uniformity", ac4},       {"AC5 secrecy", ac5},          {"AC6 xor baseline", ac6},
      {"AC7 wireless formula", ac7},     {"AC8 multiplexing gains", ac8}, {"AC9 reconciliation", ac9},
      {"AC10 reproducibility", ac10}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %-26s %s [%.2f s]\n", r.pass ? "PASS" : "FAIL", name, r.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !r.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
