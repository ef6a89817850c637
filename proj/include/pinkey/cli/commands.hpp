#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pinkey/cli/config.hpp"

namespace pinkey::cli {

enum class Command { Capacity, Protocol, Wireless, Sweep };
enum class Format { Json, Csv };

Command command_from_string(const std::string& name);
Format format_from_string(const std::string& name);

/// Command-line overrides; a set field wins over the config file.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<Format> format;
  std::size_t jobs = 1;
};

/// Exit codes of the pinkey tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitInvariant = 4;

void apply_overrides(ExperimentConfig& cfg, const RunOptions& opts);

std::string run_capacity(const ExperimentConfig& cfg, Format format);
std::string run_protocol(const ExperimentConfig& cfg, Format format, std::size_t jobs);
std::string run_wireless(const ExperimentConfig& cfg, Format format, std::size_t jobs);
std::string run_sweep(const ExperimentConfig& cfg, Format format, std::size_t jobs);

/// Applies the overrides, runs the command and returns the report text.
/// Wireless defaults to CSV output, the rest to JSON.
std::string run_command(Command command, ExperimentConfig cfg, const RunOptions& opts);

}  // namespace pinkey::cli
