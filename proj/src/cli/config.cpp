#include "pinkey/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pinkey/bits.hpp"

namespace pinkey::cli {

using nlohmann::json;

namespace {

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  expect_object(j, where);
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown field '" + key + "'");
    }
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return get<T>(j, key, where);
}

PairSource parse_pair(const json& j, const std::string& where) {
  expect_object(j, where);
  const auto mode = get<std::string>(j, "mode", where);
  if (mode == "ideal") {
    reject_unknown(j, {"mode", "bits_a", "bits_b"}, where);
    return PairSource::ideal_common(get<unsigned>(j, "bits_a", where), get<unsigned>(j, "bits_b", where));
  }
  if (mode == "dsbs") {
    reject_unknown(j, {"mode", "crossover_a", "crossover_b"}, where);
    return PairSource::dsbs(get<double>(j, "crossover_a", where), get<double>(j, "crossover_b", where));
  }
  throw ConfigError(where + ".mode: expected 'ideal' or 'dsbs'");
}

PinInstance parse_instance(const json& j, std::uint64_t seed) {
  const std::string where = "instance";
  reject_unknown(j, {"n", "epsilon", "relays"}, where);
  PinInstance inst;
  inst.params.n = get_or<std::uint64_t>(j, "n", 1, where);
  inst.params.epsilon = get_or<double>(j, "epsilon", 0.0, where);
  inst.params.seed = seed;
  const auto& relays = j.at("relays");
  if (!relays.is_array()) throw ConfigError("instance.relays: expected an array");
  for (std::size_t i = 0; i < relays.size(); ++i) {
    inst.pairs.push_back(parse_pair(relays[i], "instance.relays[" + std::to_string(i) + "]"));
  }
  inst.m = inst.pairs.size();
  inst.validate();
  return inst;
}

CapacitySection parse_capacity(const json& j) {
  reject_unknown(j, {"informations"}, "capacity");
  CapacitySection c;
  if (j.contains("informations")) {
    for (const auto& row : j.at("informations")) {
      if (!row.is_array() || row.size() != 2) {
        throw ConfigError("capacity.informations: each entry must be [I_A, I_B]");
      }
      c.informations.push_back({row[0].get<double>(), row[1].get<double>()});
    }
    if (c.informations.size() < 2) throw ConfigError("capacity.informations: relay count M must be at least 2");
  }
  return c;
}

ProtocolSection parse_protocol(const json& j) {
  const std::string where = "protocol";
  reject_unknown(j, {"trials", "codebooks", "key_bits"}, where);
  ProtocolSection p;
  p.trials = get_or<std::size_t>(j, "trials", p.trials, where);
  p.codebooks = get_or<std::size_t>(j, "codebooks", p.codebooks, where);
  if (j.contains("key_bits")) p.key_bits = get<unsigned>(j, "key_bits", where);
  if (p.trials == 0) throw ConfigError("protocol.trials must be positive");
  return p;
}

WirelessSection parse_wireless(const json& j) {
  const std::string where = "wireless";
  reject_unknown(j, {"relays", "power", "noise_var", "channel_vars", "allocation", "power_grid", "optimize",
                     "mc_samples"},
                 where);
  WirelessSection w;
  const auto m = get<std::size_t>(j, "relays", where);
  w.base = WirelessConfig::symmetric(m, get_or<double>(j, "power", 1.0, where), 2);
  w.base.noise_var = get_or<double>(j, "noise_var", 1.0, where);
  if (j.contains("channel_vars")) {
    w.base.channel_vars.clear();
    for (const auto& row : j.at("channel_vars")) {
      if (!row.is_array() || row.size() != 2) throw ConfigError("wireless.channel_vars: entries are [alice, bob]");
      w.base.channel_vars.push_back({row[0].get<double>(), row[1].get<double>()});
    }
  }
  if (j.contains("allocation")) {
    const auto& a = j.at("allocation");
    reject_unknown(a, {"t_a", "t_b", "t_relays"}, "wireless.allocation");
    w.base.allocation.t_a = get<unsigned>(a, "t_a", "wireless.allocation");
    w.base.allocation.t_b = get<unsigned>(a, "t_b", "wireless.allocation");
    w.base.allocation.t_relays = get<std::vector<unsigned>>(a, "t_relays", "wireless.allocation");
  }
  w.base.block_len = w.base.allocation.total();
  w.base.validate();
  w.power_grid = get<std::vector<double>>(j, "power_grid", where);
  if (w.power_grid.empty()) throw ConfigError("wireless.power_grid must not be empty");
  w.optimize = get_or<bool>(j, "optimize", true, where);
  w.mc_samples = get_or<std::size_t>(j, "mc_samples", 0, where);
  return w;
}

SweepSection parse_sweep(const json& j) {
  const std::string where = "sweep";
  reject_unknown(j, {"instances", "min_relays", "max_relays", "max_information", "relays", "budgets", "codebooks"},
                 where);
  SweepSection s;
  s.instances = get_or<std::size_t>(j, "instances", s.instances, where);
  s.min_relays = get_or<std::size_t>(j, "min_relays", s.min_relays, where);
  s.max_relays = get_or<std::size_t>(j, "max_relays", s.max_relays, where);
  s.max_information = get_or<double>(j, "max_information", s.max_information, where);
  s.relays = get_or<std::size_t>(j, "relays", s.relays, where);
  s.budgets = get_or<std::vector<unsigned>>(j, "budgets", s.budgets, where);
  s.codebooks = get_or<std::size_t>(j, "codebooks", s.codebooks, where);
  if (s.min_relays < 2 || s.max_relays < s.min_relays) throw ConfigError("sweep: need 2 <= min_relays <= max_relays");
  if (s.relays < 2) throw ConfigError("sweep.relays: relay count M must be at least 2");
  if (!(s.max_information >= 0.0)) throw ConfigError("sweep.max_information must be non-negative");
  return s;
}

}  // namespace

std::string ExperimentConfig::digest() const { return digest_hex(fnv1a64(canonical)); }

ExperimentConfig parse_config(const json& doc) {
  reject_unknown(doc, {"seed", "output", "instance", "capacity", "protocol", "wireless", "sweep"}, "config");
  ExperimentConfig cfg;
  cfg.canonical = doc.dump();
  cfg.seed = get_or<std::uint64_t>(doc, "seed", 0, "config");
  cfg.output = get_or<std::string>(doc, "output", "-", "config");
  try {
    if (doc.contains("instance")) cfg.instance = parse_instance(doc.at("instance"), cfg.seed);
    if (doc.contains("capacity")) cfg.capacity = parse_capacity(doc.at("capacity"));
    if (doc.contains("protocol")) cfg.protocol = parse_protocol(doc.at("protocol"));
    if (doc.contains("wireless")) cfg.wireless = parse_wireless(doc.at("wireless"));
    if (doc.contains("sweep")) cfg.sweep = parse_sweep(doc.at("sweep"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace pinkey::cli
