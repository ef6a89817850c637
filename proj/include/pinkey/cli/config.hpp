#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pinkey/model.hpp"
#include "pinkey/wireless.hpp"

namespace pinkey::cli {

struct CapacitySection {
  /// Direct (I_A, I_B) pairs; used instead of the instance when present.
  std::vector<PairInformation> informations;
};

struct ProtocolSection {
  std::size_t trials = 100;
  std::size_t codebooks = 100;
  std::optional<unsigned> key_bits;
};

struct WirelessSection {
  WirelessConfig base;
  std::vector<double> power_grid;
  bool optimize = true;
  std::size_t mc_samples = 0;
};

struct SweepSection {
  std::size_t instances = 1000;
  std::size_t min_relays = 2;
  std::size_t max_relays = 6;
  double max_information = 4.0;
  std::size_t relays = 2;
  std::vector<unsigned> budgets = {2, 4, 6, 8};
  std::size_t codebooks = 100;
};

/// Parsed experiment config. Unknown fields anywhere are rejected.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output = "-";
  std::optional<PinInstance> instance;
  std::optional<CapacitySection> capacity;
  std::optional<ProtocolSection> protocol;
  std::optional<WirelessSection> wireless;
  std::optional<SweepSection> sweep;
  /// Canonical dump of the input document; its FNV-1a hash is the digest.
  std::string canonical;

  std::string digest() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace pinkey::cli
