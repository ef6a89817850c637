#include "pinkey/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pinkey {

namespace {

void check_information_values(std::span<const double> values) {
  if (values.size() < 2) throw ConfigError("at least two relays are required");
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ConfigError("mutual information values must be finite and non-negative");
    }
  }
}

}  // namespace

double capacity(std::span<const double> i_values) {
  check_information_values(i_values);
  const double total = std::accumulate(i_values.begin(), i_values.end(), 0.0);
  return total - *std::max_element(i_values.begin(), i_values.end());
}

double capacity_from_order_statistics(std::span<const double> i_values) {
  check_information_values(i_values);
  std::vector<double> sorted(i_values.begin(), i_values.end());
  std::sort(sorted.begin(), sorted.end());
  return std::accumulate(sorted.begin(), sorted.end() - 1, 0.0);
}

double xor_baseline_rate(std::span<const double> i_values) {
  check_information_values(i_values);
  double rate = 0.0;
  for (std::size_t j = 0; j + 1 < i_values.size(); j += 2) {
    rate += std::min(i_values[j], i_values[j + 1]);
  }
  return rate;
}

std::vector<double> min_informations(std::span<const PairInformation> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.min());
  return out;
}

ConverseBound converse_bound(std::span<const PairInformation> pairs) {
  check_information_values(min_informations(pairs));
  ConverseBound out;
  out.bound = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < pairs.size(); ++m) {
    EnhancedPartition part{m, {}, {}};
    double cut = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (i == m) continue;
      // A relay on Alice's side reaches Bob only through its Bob link, and
      // vice versa, so that link is the one crossing the cut.
      if (pairs[i].alice > pairs[i].bob) {
        part.alice_set.push_back(i);
        cut += pairs[i].bob;
      } else {
        part.bob_set.push_back(i);
        cut += pairs[i].alice;
      }
    }
    out.cuts.push_back(cut);
    out.partitions.push_back(std::move(part));
    out.bound = std::min(out.bound, cut);
  }
  return out;
}

ConverseBound converse_bound(const PinInstance& instance) {
  const auto pairs = pair_mutual_informations(instance);
  return converse_bound(pairs);
}

bool RateReport::tight(double tolerance) const {
  return std::abs(converse.bound - capacity) <= tolerance;
}

RateReport rate_report(std::span<const PairInformation> pairs) {
  RateReport r;
  r.i_per_relay = min_informations(pairs);
  r.i_sorted = r.i_per_relay;
  std::sort(r.i_sorted.begin(), r.i_sorted.end());
  r.capacity = capacity(r.i_per_relay);
  r.capacity_order_form = capacity_from_order_statistics(r.i_per_relay);
  r.xor_rate = xor_baseline_rate(r.i_per_relay);
  r.converse = converse_bound(pairs);
  r.argmax_relay = static_cast<std::size_t>(
      std::max_element(r.i_per_relay.begin(), r.i_per_relay.end()) - r.i_per_relay.begin());
  return r;
}

}  // namespace pinkey
