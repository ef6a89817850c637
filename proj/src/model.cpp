#include "pinkey/model.hpp"

#include <cmath>

#include "pinkey/rng.hpp"

namespace pinkey {

namespace {

enum class Side : std::uint64_t { Alice = 0, Bob = 1 };

void check_crossover(double p, const char* name) {
  if (!(p >= 0.0 && p <= 0.5)) {
    throw ConfigError(std::string(name) + " must lie in [0, 0.5]");
  }
}

// Fills the terminal and relay blocks of one link.
void sample_link(const PairSource& pair, Side side, std::uint64_t n, CounterRng rng,
                 BitString& terminal, BitString& relay) {
  const bool alice = side == Side::Alice;
  if (pair.mode == SourceMode::IdealCommon) {
    const std::uint64_t len = n * (alice ? pair.bits_a : pair.bits_b);
    terminal.resize(len);
    for (auto& b : terminal) b = rng.bit();
    relay = terminal;
    return;
  }
  const double crossover = alice ? pair.crossover_a : pair.crossover_b;
  terminal.resize(n);
  relay.resize(n);
  for (std::uint64_t t = 0; t < n; ++t) {
    terminal[t] = rng.bit();
    relay[t] = static_cast<std::uint8_t>(terminal[t] ^ (rng.bernoulli(crossover) ? 1u : 0u));
  }
}

}  // namespace

void PinInstance::validate() const {
  if (m < 2) throw ConfigError("relay count M must be at least 2");
  if (pairs.size() != m) throw ConfigError("expected exactly M pair sources");
  if (params.n < 1) throw ConfigError("n must be at least 1");
  if (!(params.epsilon >= 0.0) || !std::isfinite(params.epsilon)) {
    throw ConfigError("epsilon must be finite and non-negative");
  }
  for (const auto& p : pairs) {
    if (p.mode == SourceMode::DsbsPair) {
      check_crossover(p.crossover_a, "crossover_a");
      check_crossover(p.crossover_b, "crossover_b");
      if (params.n % 7 != 0) {
        throw ConfigError("DsbsPair sources need n to be a multiple of 7 (Hamming blocks)");
      }
    }
  }
}

bool PinInstance::all_ideal() const {
  for (const auto& p : pairs) {
    if (p.mode != SourceMode::IdealCommon) return false;
  }
  return true;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

SourceRealization sample(const PinInstance& instance, std::uint64_t seed) {
  instance.validate();
  SourceRealization out;
  out.n = instance.params.n;
  out.x_a.resize(instance.m);
  out.x_b.resize(instance.m);
  out.x_relays.resize(instance.m);
  for (std::size_t i = 0; i < instance.m; ++i) {
    const CounterRng pair_rng(seed, i);
    const auto& pair = instance.pairs[i];
    sample_link(pair, Side::Alice, out.n, pair_rng.substream(static_cast<std::uint64_t>(Side::Alice)),
                out.x_a[i], out.x_relays[i].from_alice);
    sample_link(pair, Side::Bob, out.n, pair_rng.substream(static_cast<std::uint64_t>(Side::Bob)),
                out.x_b[i], out.x_relays[i].from_bob);
  }
  return out;
}

std::vector<PairInformation> pair_mutual_informations(const PinInstance& instance) {
  instance.validate();
  std::vector<PairInformation> out;
  out.reserve(instance.m);
  for (const auto& p : instance.pairs) {
    if (p.mode == SourceMode::IdealCommon) {
      out.push_back({static_cast<double>(p.bits_a), static_cast<double>(p.bits_b)});
    } else {
      out.push_back({1.0 - binary_entropy(p.crossover_a), 1.0 - binary_entropy(p.crossover_b)});
    }
  }
  return out;
}

}  // namespace pinkey
