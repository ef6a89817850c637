#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinkey/bits.hpp"

namespace pinkey {

/// Thrown when an instance or config violates a precondition.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SourceMode { IdealCommon, DsbsPair };

/// One relay's two correlated links: (Y_{i,A}, Y_{A,i}) toward Alice and
/// (Y_{i,B}, Y_{B,i}) toward Bob.
///
/// IdealCommon: each repetition is a block of `bits_*` shared uniform bits.
/// DsbsPair: each repetition is one uniform bit seen by the relay through a
/// binary symmetric channel with the given crossover.
struct PairSource {
  SourceMode mode = SourceMode::IdealCommon;
  unsigned bits_a = 0;
  unsigned bits_b = 0;
  double crossover_a = 0.0;
  double crossover_b = 0.0;

  static PairSource ideal_common(unsigned bits_a, unsigned bits_b) {
    return {SourceMode::IdealCommon, bits_a, bits_b, 0.0, 0.0};
  }
  static PairSource dsbs(double crossover_a, double crossover_b) {
    return {SourceMode::DsbsPair, 0, 0, crossover_a, crossover_b};
  }

  /// Observation bits per repetition on each side.
  unsigned width_a() const { return mode == SourceMode::IdealCommon ? bits_a : 1u; }
  unsigned width_b() const { return mode == SourceMode::IdealCommon ? bits_b : 1u; }
};

struct ProtocolParams {
  std::uint64_t n = 1;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

struct PinInstance {
  std::size_t m = 0;
  std::vector<PairSource> pairs;
  ProtocolParams params;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
  bool all_ideal() const;
};

/// Alice-side and Bob-side pairwise mutual informations at one relay, in bits.
struct PairInformation {
  double alice = 0.0;
  double bob = 0.0;

  /// I_i: the smaller of the two links.
  double min() const { return alice < bob ? alice : bob; }
};

struct RelayObservation {
  BitString from_alice;  // Y_{A,m}^n
  BitString from_bob;    // Y_{B,m}^n
};

/// n repetitions of every source component. x_a[i] is Alice's component
/// Y_{i,A}^n, x_b[i] is Bob's Y_{i,B}^n, and x_relays[i] is relay i's block.
struct SourceRealization {
  std::uint64_t n = 0;
  std::vector<BitString> x_a;
  std::vector<BitString> x_b;
  std::vector<RelayObservation> x_relays;
};

/// Binary entropy in bits; h2(0) = h2(1) = 0.
double binary_entropy(double p);

/// Draws a realization. Pair i, side s uses the stream derive(seed, i, s), so
/// changing one pair never perturbs another.
SourceRealization sample(const PinInstance& instance, std::uint64_t seed);

std::vector<PairInformation> pair_mutual_informations(const PinInstance& instance);

}  // namespace pinkey
