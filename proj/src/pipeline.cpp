#include "pinkey/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pinkey/parallel.hpp"
#include "pinkey/rng.hpp"

namespace pinkey {

std::vector<PairKeyLengths> pairwise_key_lengths(const PinInstance& instance) {
  instance.validate();
  const std::uint64_t n = instance.params.n;
  std::vector<PairKeyLengths> out;
  out.reserve(instance.m);
  for (const auto& p : instance.pairs) {
    if (p.mode == SourceMode::IdealCommon) {
      out.push_back({static_cast<unsigned>(n * p.bits_a), static_cast<unsigned>(n * p.bits_b)});
    } else {
      const auto blocks = static_cast<unsigned>(n / 7);
      out.push_back({blocks * reconciled_bits_per_block(p.crossover_a),
                     blocks * reconciled_bits_per_block(p.crossover_b)});
    }
  }
  return out;
}

std::vector<unsigned> common_message_bits(const PinInstance& instance) {
  std::vector<unsigned> out;
  for (const auto& len : pairwise_key_lengths(instance)) out.push_back(std::min(len.alice, len.bob));
  return out;
}

unsigned default_key_bits(const PinInstance& instance) {
  const auto bits = common_message_bits(instance);
  const unsigned total = std::accumulate(bits.begin(), bits.end(), 0u);
  const unsigned rb = total - *std::max_element(bits.begin(), bits.end());
  const auto withheld = static_cast<unsigned>(
      std::ceil(static_cast<double>(instance.params.n) * instance.params.epsilon - 1e-9));
  return rb > withheld ? rb - withheld : 0u;
}

RbCodebook build_instance_codebook(const PinInstance& instance, unsigned key_bits, std::uint64_t seed) {
  const auto bits = common_message_bits(instance);
  const unsigned total = std::accumulate(bits.begin(), bits.end(), 0u);
  if (total > kCodebookBudgetBits) {
    const auto widest = static_cast<std::size_t>(std::max_element(bits.begin(), bits.end()) - bits.begin());
    throw BudgetExceeded("codebook needs 2^" + std::to_string(total) + " tuples (budget 2^" +
                         std::to_string(kCodebookBudgetBits) + "); largest dimension is relay " +
                         std::to_string(widest + 1) + " with " + std::to_string(bits[widest]) +
                         " common-message bits");
  }
  return RbCodebook::build(bits, key_bits, seed);
}

TrialOutcome run_trial(const PinInstance& instance, const RbCodebook& codebook, std::uint64_t trial_seed) {
  TrialOutcome out;
  const SourceRealization realization = sample(instance, trial_seed);
  KeyAgreement agreement;
  try {
    agreement = agree_keys(realization, instance);
  } catch (const ReconciliationFailure&) {
    out.reconciliation_failed = true;
    return out;
  }
  out.transcript = xor_broadcast(agreement.keys, std::move(agreement.transcript));
  out.keys = std::move(agreement.keys);
  const auto at_alice = reconstruct_common(out.keys, out.transcript, SenderKind::Alice);
  const auto at_bob = reconstruct_common(out.keys, out.transcript, SenderKind::Bob);
  out.alice_key = distill(codebook, at_alice);
  out.bob_key = distill(codebook, at_bob);
  out.alice_xor_key = xor_distill(at_alice);
  out.bob_xor_key = xor_distill(at_bob);
  out.keys_agree = out.alice_key.k == out.bob_key.k;
  return out;
}

std::uint64_t codebook_seed(std::uint64_t seed, std::size_t c) {
  return derive_key(seed, (std::uint64_t{2} << 32) + c);
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t t) {
  return derive_key(seed, (std::uint64_t{1} << 32) + t);
}

unsigned sweep_key_bits(std::size_t relays, unsigned budget_bits) {
  const unsigned rb = budget_bits * static_cast<unsigned>(relays - 1);
  const unsigned withheld = (budget_bits + 3) / 4;
  return rb > withheld ? rb - withheld : 0u;
}

LeakageSweepRow leakage_sweep_row(std::size_t relays, unsigned budget_bits, std::size_t codebooks,
                                  std::uint64_t seed, std::size_t jobs) {
  if (relays < 2) throw ConfigError("relay count M must be at least 2");
  if (codebooks == 0) throw ConfigError("need at least one codebook");
  LeakageSweepRow row;
  row.budget_bits = budget_bits;
  row.key_bits = sweep_key_bits(relays, budget_bits);
  row.total_bits = budget_bits * static_cast<unsigned>(relays);
  row.codebooks = codebooks;
  const std::vector<unsigned> bits(relays, budget_bits);

  struct Sample {
    double max_leakage = 0.0;
    bool exact = true;
  };
  const auto samples = parallel_map<Sample>(codebooks, jobs, [&](std::size_t c) {
    const RbCodebook cb = RbCodebook::build(bits, row.key_bits, codebook_seed(seed, c));
    Sample s;
    for (std::size_t m = 0; m < relays; ++m) {
      const LeakageAudit audit = leakage_audit(cb, m);
      s.max_leakage = std::max(s.max_leakage, audit.leakage);
      s.exact = s.exact && audit.joint_exact;
    }
    return s;
  });

  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& s : samples) {
    const double per_bit = s.max_leakage / row.total_bits;
    sum += per_bit;
    sum_sq += per_bit * per_bit;
    row.max_per_bit = std::max(row.max_per_bit, per_bit);
    row.all_exact = row.all_exact && s.exact;
  }
  const double count = static_cast<double>(codebooks);
  row.mean_per_bit = sum / count;
  row.mean_max_leakage = row.mean_per_bit * row.total_bits;
  const double var = count > 1 ? std::max(0.0, (sum_sq - count * row.mean_per_bit * row.mean_per_bit) / (count - 1)) : 0.0;
  row.stderr_per_bit = std::sqrt(var / count);
  return row;
}

}  // namespace pinkey
