#pragma once

#include <cstdint>
#include <vector>

#include "pinkey/distillation.hpp"
#include "pinkey/infotools.hpp"
#include "pinkey/model.hpp"
#include "pinkey/protocol.hpp"

namespace pinkey {

/// Pairwise key lengths the instance produces at every relay.
std::vector<PairKeyLengths> pairwise_key_lengths(const PinInstance& instance);

/// Common message lengths n R_i in bits (the shorter key of each relay).
std::vector<unsigned> common_message_bits(const PinInstance& instance);

/// n (R_key - eps) in bits: sum of the common message bits minus the largest,
/// minus ceil(n eps) withheld bits, floored at zero.
unsigned default_key_bits(const PinInstance& instance);

/// Builds the codebook for an instance, naming the relay that dominates the
/// product space when the enumeration budget is exceeded.
RbCodebook build_instance_codebook(const PinInstance& instance, unsigned key_bits, std::uint64_t seed);

struct TrialOutcome {
  bool reconciliation_failed = false;
  bool keys_agree = false;
  KeyIndex alice_key;
  KeyIndex bob_key;
  BitString alice_xor_key;
  BitString bob_xor_key;
  Transcript transcript;
  PairwiseKeys keys;
};

/// One run of the full key-generation pipeline: sample, pairwise agreement,
/// XOR broadcast, reconstruction at both terminals, distillation at both.
TrialOutcome run_trial(const PinInstance& instance, const RbCodebook& codebook, std::uint64_t trial_seed);

/// Secrecy of random codebooks at one equal message budget: M relays with
/// `budget` bits each and key_bits = budget (M-1) - ceil(budget / 4).
struct LeakageSweepRow {
  unsigned budget_bits = 0;
  unsigned key_bits = 0;
  unsigned total_bits = 0;
  std::size_t codebooks = 0;
  double mean_max_leakage = 0.0;  // mean over codebooks of max_m I(K; W_m, F)
  double mean_per_bit = 0.0;      // same, divided by total_bits
  double stderr_per_bit = 0.0;
  double max_per_bit = 0.0;
  bool all_exact = true;
};

unsigned sweep_key_bits(std::size_t relays, unsigned budget_bits);

LeakageSweepRow leakage_sweep_row(std::size_t relays, unsigned budget_bits, std::size_t codebooks,
                                  std::uint64_t seed, std::size_t jobs = 1);

/// Seed of the c-th codebook in a family derived from `seed`.
std::uint64_t codebook_seed(std::uint64_t seed, std::size_t c);
std::uint64_t trial_seed(std::uint64_t seed, std::size_t t);

}  // namespace pinkey
