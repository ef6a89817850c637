#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pinkey/model.hpp"

namespace pinkey {

/// Private key capacity: sum of I_i minus the largest I_i.
/// Requires at least two finite, non-negative values.
double capacity(std::span<const double> i_values);

/// Same quantity through the order statistics: sum of the M-1 smallest.
double capacity_from_order_statistics(std::span<const double> i_values);

/// Relay-oblivious XOR baseline: relays are paired in listed order (1,2),
/// (3,4), ... and each pair contributes the smaller of its two rates. With an
/// odd relay count the last relay contributes nothing.
double xor_baseline_rate(std::span<const double> i_values);

/// Node grouping of the m-th enhanced source model. Relay indices are
/// 0-based; Alice always sits in the Alice set and Bob in the Bob set.
struct EnhancedPartition {
  std::size_t m = 0;
  std::vector<std::size_t> alice_set;
  std::vector<std::size_t> bob_set;
};

struct ConverseBound {
  double bound = 0.0;
  std::vector<double> cuts;
  std::vector<EnhancedPartition> partitions;
};

/// Upper bound from the M enhanced source models. For each m the remaining
/// relays are split by comparing their two link informations (strictly larger
/// Alice link joins Alice, ties go to Bob) and the cut between the two sets is
/// the sum of the crossing links. The bound is the smallest cut.
ConverseBound converse_bound(std::span<const PairInformation> pairs);
ConverseBound converse_bound(const PinInstance& instance);

struct RateReport {
  std::vector<double> i_per_relay;
  std::vector<double> i_sorted;
  double capacity = 0.0;
  double capacity_order_form = 0.0;
  double xor_rate = 0.0;
  ConverseBound converse;
  std::size_t argmax_relay = 0;

  bool tight(double tolerance = 1e-12) const;
};

RateReport rate_report(std::span<const PairInformation> pairs);

std::vector<double> min_informations(std::span<const PairInformation> pairs);

}  // namespace pinkey
