#include "pinkey/wireless.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "pinkey/model.hpp"
#include "pinkey/rates.hpp"
#include "pinkey/rng.hpp"

namespace pinkey {

unsigned SlotAllocation::total() const {
  return t_a + t_b + std::accumulate(t_relays.begin(), t_relays.end(), 0u);
}

void WirelessConfig::validate() const {
  if (m < 2) throw ConfigError("relay count M must be at least 2");
  if (!(power > 0.0) || !std::isfinite(power)) throw ConfigError("power must be positive");
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) throw ConfigError("noise variance must be positive");
  if (channel_vars.size() != m) throw ConfigError("expected M channel variance pairs");
  for (const auto& v : channel_vars) {
    if (!(v.alice > 0.0) || !(v.bob > 0.0)) throw ConfigError("channel variances must be positive");
  }
  if (allocation.t_relays.size() != m) throw ConfigError("allocation needs one slot per relay");
  if (allocation.t_a < 1 || allocation.t_b < 1) throw ConfigError("every slot needs at least one symbol");
  for (auto t : allocation.t_relays) {
    if (t < 1) throw ConfigError("every slot needs at least one symbol");
  }
  if (allocation.total() != block_len) {
    throw ConfigError("slot lengths sum to " + std::to_string(allocation.total()) + ", block length is " +
                      std::to_string(block_len));
  }
}

WirelessConfig WirelessConfig::symmetric(std::size_t m, double power, unsigned slot) {
  WirelessConfig c;
  c.m = m;
  c.power = power;
  c.noise_var = 1.0;
  c.channel_vars.assign(m, ChannelVariances{1.0, 1.0});
  c.allocation = SlotAllocation{slot, slot, std::vector<unsigned>(m, slot)};
  c.block_len = c.allocation.total();
  return c;
}

double pairwise_rate(double t_relay, double t_terminal, double power, double noise_var, double channel_var) {
  if (!(t_relay > 0.0) || !(t_terminal > 0.0) || !(power > 0.0) || !(noise_var > 0.0) || !(channel_var > 0.0)) {
    throw ConfigError("pairwise_rate arguments must be positive");
  }
  const double num = t_relay * t_terminal * power * power * channel_var * channel_var;
  const double den = noise_var * noise_var + (t_relay + t_terminal) * noise_var * channel_var * power;
  return 0.5 * std::log2(1.0 + num / den);
}

nlohmann::json WirelessRateReport::to_json() const {
  nlohmann::json pw = nlohmann::json::array();
  for (const auto& p : pairwise) pw.push_back({p.alice, p.bob});
  return {{"pairwise", pw}, {"i_g", i_g}, {"r_key", r_key}, {"r_key_order_form", r_key_order_form},
          {"xor_r_key", xor_r_key}};
}

namespace {

// r_key without validation or report assembly; used in the optimizer loop.
double fast_key_rate(const SlotAllocation& a, double power, double noise_var,
                     const std::vector<ChannelVariances>& vars, unsigned block_len) {
  double sum = 0.0;
  double max = 0.0;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const double ra = pairwise_rate(a.t_relays[i], a.t_a, power, noise_var, vars[i].alice);
    const double rb = pairwise_rate(a.t_relays[i], a.t_b, power, noise_var, vars[i].bob);
    const double ig = std::min(ra, rb);
    sum += ig;
    max = std::max(max, ig);
  }
  return (sum - max) / block_len;
}

}  // namespace

WirelessRateReport key_rate(const WirelessConfig& config) {
  config.validate();
  WirelessRateReport r;
  for (std::size_t i = 0; i < config.m; ++i) {
    const double t_i = config.allocation.t_relays[i];
    PairwiseRate p{pairwise_rate(t_i, config.allocation.t_a, config.power, config.noise_var, config.channel_vars[i].alice),
                   pairwise_rate(t_i, config.allocation.t_b, config.power, config.noise_var, config.channel_vars[i].bob)};
    r.pairwise.push_back(p);
    r.i_g.push_back(std::min(p.alice, p.bob));
  }
  const double t = config.block_len;
  r.r_key = capacity(r.i_g) / t;
  r.r_key_order_form = capacity_from_order_statistics(r.i_g) / t;
  r.xor_r_key = xor_baseline_rate(r.i_g) / t;
  return r;
}

std::string to_string(AllocationMethod m) {
  return m == AllocationMethod::Exhaustive ? "exhaustive" : "coordinate_ascent";
}

nlohmann::json AllocationResult::to_json() const {
  return {{"t_a", allocation.t_a},
          {"t_b", allocation.t_b},
          {"t_relays", allocation.t_relays},
          {"r_key", r_key},
          {"method", to_string(method)},
          {"evaluated", evaluated}};
}

std::uint64_t composition_count(unsigned total, unsigned parts) {
  if (parts == 0 || total < parts) return 0;
  // C(total - 1, parts - 1), saturating.
  const unsigned n = total - 1;
  const unsigned k = std::min(parts - 1, n - (parts - 1));
  long double c = 1.0L;
  for (unsigned j = 1; j <= k; ++j) {
    c = c * static_cast<long double>(n - k + j) / static_cast<long double>(j);
    if (c > 1e18L) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(c)));
}

namespace {

// Slot vector layout: [t_a, t_b, t_1, ..., t_M].
SlotAllocation to_allocation(const std::vector<unsigned>& slots) {
  return SlotAllocation{slots[0], slots[1], std::vector<unsigned>(slots.begin() + 2, slots.end())};
}

struct Search {
  double power;
  double noise_var;
  const std::vector<ChannelVariances>& vars;
  unsigned block_len;
  std::uint64_t evaluated = 0;

  double eval(const std::vector<unsigned>& slots) {
    ++evaluated;
    return fast_key_rate(to_allocation(slots), power, noise_var, vars, block_len);
  }
};

void enumerate(Search& s, std::vector<unsigned>& slots, std::size_t pos, unsigned remaining,
               std::vector<unsigned>& best, double& best_rate) {
  if (pos + 1 == slots.size()) {
    slots[pos] = remaining;
    const double r = s.eval(slots);
    if (r > best_rate) {
      best_rate = r;
      best = slots;
    }
    return;
  }
  const unsigned slots_after = static_cast<unsigned>(slots.size() - pos - 1);
  for (unsigned t = 1; t + slots_after <= remaining; ++t) {
    slots[pos] = t;
    enumerate(s, slots, pos + 1, remaining - t, best, best_rate);
  }
}

double ascend(Search& s, std::vector<unsigned>& slots) {
  double current = s.eval(slots);
  for (;;) {
    double best = current;
    std::size_t from = 0;
    std::size_t to = 0;
    for (std::size_t a = 0; a < slots.size(); ++a) {
      if (slots[a] <= 1) continue;
      for (std::size_t b = 0; b < slots.size(); ++b) {
        if (a == b) continue;
        --slots[a];
        ++slots[b];
        const double r = s.eval(slots);
        ++slots[a];
        --slots[b];
        if (r > best) {
          best = r;
          from = a;
          to = b;
        }
      }
    }
    if (!(best > current)) return current;
    --slots[from];
    ++slots[to];
    current = best;
  }
}

std::vector<unsigned> uniform_slots(std::size_t parts, unsigned total) {
  std::vector<unsigned> slots(parts, total / static_cast<unsigned>(parts));
  for (unsigned j = 0; j < total % parts; ++j) ++slots[j];
  return slots;
}

std::vector<unsigned> random_slots(std::size_t parts, unsigned total, CounterRng& rng) {
  std::vector<unsigned> slots(parts, 1);
  for (unsigned extra = total - static_cast<unsigned>(parts); extra > 0; --extra) {
    ++slots[rng.below(parts)];
  }
  return slots;
}

}  // namespace

AllocationResult optimize_allocation(std::size_t m, unsigned block_len, double power, double noise_var,
                                     const std::vector<ChannelVariances>& channel_vars, std::uint64_t seed) {
  const std::size_t parts = m + 2;
  if (block_len < parts) throw ConfigError("block length must be at least M+2 symbols");
  {
    WirelessConfig probe;
    probe.m = m;
    probe.power = power;
    probe.noise_var = noise_var;
    probe.channel_vars = channel_vars;
    probe.block_len = block_len;
    probe.allocation = to_allocation(uniform_slots(parts, block_len));
    probe.validate();
  }
  Search search{power, noise_var, channel_vars, block_len};
  AllocationResult out;
  const std::uint64_t count = composition_count(block_len, static_cast<unsigned>(parts));
  std::vector<unsigned> best;
  double best_rate = -1.0;
  if (count <= kExhaustiveLimit) {
    std::vector<unsigned> slots(parts, 1);
    enumerate(search, slots, 0, block_len, best, best_rate);
    out.method = AllocationMethod::Exhaustive;
  } else {
    best = uniform_slots(parts, block_len);
    best_rate = ascend(search, best);
    CounterRng rng(seed, 0xa110cULL);
    for (unsigned r = 0; r < kAscentRestarts; ++r) {
      auto slots = random_slots(parts, block_len, rng);
      const double rate = ascend(search, slots);
      if (rate > best_rate) {
        best_rate = rate;
        best = slots;
      }
    }
    out.method = AllocationMethod::CoordinateAscent;
  }
  out.allocation = to_allocation(best);
  out.r_key = best_rate;
  out.evaluated = search.evaluated;
  return out;
}

std::vector<GainPoint> multiplexing_gain_sweep(const WirelessConfig& base, const std::vector<double>& powers) {
  if (powers.empty()) throw ConfigError("power grid is empty");
  for (std::size_t j = 0; j < powers.size(); ++j) {
    if (!(powers[j] > 1.0)) throw ConfigError("power grid values must exceed 1 so that log P > 0");
    if (j > 0 && !(powers[j] > powers[j - 1])) throw ConfigError("power grid must be increasing");
  }
  if (powers.back() < 1e6) throw ConfigError("power grid must reach at least 1e6");
  std::vector<GainPoint> out;
  out.reserve(powers.size());
  WirelessConfig c = base;
  for (double p : powers) {
    c.power = p;
    const auto report = key_rate(c);
    GainPoint g;
    g.power = p;
    g.r_key = report.r_key;
    g.r_s = std::log2(p) / (2.0 * c.block_len);
    g.rb_ratio = report.r_key / g.r_s;
    g.xor_ratio = report.xor_r_key / g.r_s;
    out.push_back(g);
  }
  return out;
}

std::string gain_table_csv(const std::vector<GainPoint>& points) {
  std::string out = "P,rb_ratio,xor_ratio,r_key,r_s\n";
  char line[160];
  for (const auto& g : points) {
    std::snprintf(line, sizeof(line), "%.10g,%.10g,%.10g,%.10g,%.10g\n", g.power, g.rb_ratio, g.xor_ratio, g.r_key,
                  g.r_s);
    out += line;
  }
  return out;
}

McEstimate mc_estimate_check(const WirelessConfig& config, std::size_t relay, Terminal terminal,
                             std::size_t samples, std::uint64_t seed) {
  config.validate();
  if (relay >= config.m) throw std::out_of_range("relay index out of range");
  if (samples < 2) throw ConfigError("need at least two samples");
  const bool alice = terminal == Terminal::Alice;
  const unsigned t_relay = config.allocation.t_relays[relay];
  const unsigned t_terminal = alice ? config.allocation.t_a : config.allocation.t_b;
  const double fading_var = alice ? config.channel_vars[relay].alice : config.channel_vars[relay].bob;
  const double p = config.power;
  const double noise_sd = std::sqrt(config.noise_var);
  const double amp = std::sqrt(p);

  McEstimate out;
  out.samples = samples;
  out.formula = pairwise_rate(t_relay, t_terminal, p, config.noise_var, fading_var);
  out.degenerate = config.noise_var <= 1e-12 * p * fading_var;

  // Linear MMSE gain applied to the matched-filter output sum_k sqrt(P) r_k.
  const auto lmmse_gain = [&](unsigned slots) {
    return fading_var / (slots * p * fading_var + config.noise_var);
  };
  const double g_terminal = lmmse_gain(t_relay);  // terminal listens to the relay's slot
  const double g_relay = lmmse_gain(t_terminal);

  CounterRng rng(seed, 0x3c0ffeeULL + relay * 2 + (alice ? 0 : 1));
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double h = std::sqrt(fading_var) * rng.normal();
    double mf_terminal = 0.0;
    for (unsigned k = 0; k < t_relay; ++k) mf_terminal += amp * (amp * h + noise_sd * rng.normal());
    double mf_relay = 0.0;
    for (unsigned k = 0; k < t_terminal; ++k) mf_relay += amp * (amp * h + noise_sd * rng.normal());
    const double x = g_terminal * mf_terminal;
    const double y = g_relay * mf_relay;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double n = static_cast<double>(samples);
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = syy / n - (sy / n) * (sy / n);
  const double rho = cov / std::sqrt(vx * vy);
  out.correlation = rho;
  const auto mi_of = [](double r) {
    const double r2 = std::min(r * r, 1.0);
    return r2 >= 1.0 ? INFINITY : -0.5 * std::log2(1.0 - r2);
  };
  out.estimate = mi_of(rho);
  if (samples > 3) {
    const double z = std::atanh(std::clamp(rho, -1.0 + 1e-15, 1.0 - 1e-15));
    const double half = 1.959963984540054 / std::sqrt(n - 3.0);
    const double lo = std::tanh(z - half);
    const double hi = std::tanh(z + half);
    out.ci_low = lo <= 0.0 ? 0.0 : mi_of(lo);
    out.ci_high = mi_of(hi);
  } else {
    out.ci_low = out.ci_high = out.estimate;
  }
  out.gap = out.degenerate ? 0.0 : std::abs(out.estimate - out.formula) / out.formula;
  return out;
}

}  // namespace pinkey
