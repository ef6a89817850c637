#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace pinkey {

/// Fading variances of relay i's links to Alice and Bob.
struct ChannelVariances {
  double alice = 1.0;
  double bob = 1.0;
};

/// Training-slot lengths of one fading block.
struct SlotAllocation {
  unsigned t_a = 1;
  unsigned t_b = 1;
  std::vector<unsigned> t_relays;

  unsigned total() const;
  friend bool operator==(const SlotAllocation&, const SlotAllocation&) = default;
};

struct WirelessConfig {
  std::size_t m = 2;
  double power = 1.0;
  double noise_var = 1.0;
  std::vector<ChannelVariances> channel_vars;
  unsigned block_len = 4;
  SlotAllocation allocation;

  void validate() const;

  /// Equal slots of `slot` symbols each and unit variances.
  static WirelessConfig symmetric(std::size_t m, double power, unsigned slot = 1);
};

/// Key rate (bits per fading block) of the pairwise key between a relay that
/// trains for t_relay symbols and a terminal that trains for t_terminal:
///   1/2 log2(1 + t_r t_a P^2 s^4 / (d^4 + (t_r + t_a) d^2 s^2 P))
/// with noise variance d^2 and fading variance s^2. All arguments > 0.
double pairwise_rate(double t_relay, double t_terminal, double power, double noise_var, double channel_var);

struct PairwiseRate {
  double alice = 0.0;
  double bob = 0.0;
};

struct WirelessRateReport {
  std::vector<PairwiseRate> pairwise;
  std::vector<double> i_g;
  double r_key = 0.0;             // (sum - max) / T
  double r_key_order_form = 0.0;  // (sum of M-1 smallest) / T
  double xor_r_key = 0.0;

  nlohmann::json to_json() const;
};

WirelessRateReport key_rate(const WirelessConfig& config);

enum class AllocationMethod { Exhaustive, CoordinateAscent };
std::string to_string(AllocationMethod m);

struct AllocationResult {
  SlotAllocation allocation;
  double r_key = 0.0;
  AllocationMethod method = AllocationMethod::Exhaustive;
  std::uint64_t evaluated = 0;

  nlohmann::json to_json() const;
};

/// Number of ways to split T symbols into `parts` slots of at least one.
std::uint64_t composition_count(unsigned total, unsigned parts);

inline constexpr std::uint64_t kExhaustiveLimit = 1'000'000;
inline constexpr unsigned kAscentRestarts = 16;

/// Best slot allocation for the given block. Exhaustive when the composition
/// count is at most kExhaustiveLimit, otherwise coordinate ascent (single
/// symbol moves) from the uniform allocation plus seeded random restarts.
AllocationResult optimize_allocation(std::size_t m, unsigned block_len, double power, double noise_var,
                                     const std::vector<ChannelVariances>& channel_vars, std::uint64_t seed = 0);

struct GainPoint {
  double power = 0.0;
  double rb_ratio = 0.0;
  double xor_ratio = 0.0;
  double r_key = 0.0;
  double r_s = 0.0;
};

/// Evaluates the base configuration at each power; r_s = log2(P) / (2T).
/// The grid must be increasing and reach at least 1e6.
std::vector<GainPoint> multiplexing_gain_sweep(const WirelessConfig& base, const std::vector<double>& powers);

std::string gain_table_csv(const std::vector<GainPoint>& points);

struct McEstimate {
  double estimate = 0.0;  // -1/2 log2(1 - rho^2) from the sample correlation
  double formula = 0.0;   // pairwise_rate for the same link
  double gap = 0.0;       // |estimate - formula| / formula
  double ci_low = 0.0;    // Fisher-z interval on the estimate
  double ci_high = 0.0;
  double correlation = 0.0;
  std::size_t samples = 0;
  /// Noise is negligible; the MI diverges and the gap is not checked.
  bool degenerate = false;
};

enum class Terminal { Alice, Bob };

/// Monte Carlo check of pairwise_rate. Each sample draws h ~ N(0, s^2); the
/// relay and the terminal each send constant training (amplitude sqrt(P)) for
/// their slot length through independent N(0, d^2) symbol noise and form the
/// linear MMSE estimate of h from their received block.
McEstimate mc_estimate_check(const WirelessConfig& config, std::size_t relay, Terminal terminal,
                             std::size_t samples, std::uint64_t seed);

}  // namespace pinkey
