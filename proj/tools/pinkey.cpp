// pinkey: capacity, protocol, wireless and sweep experiments from a JSON config.
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pinkey/cli/commands.hpp"
#include "pinkey/distillation.hpp"
#include "pinkey/infotools.hpp"

namespace {

int fail(int code, const std::string& what) {
  std::cerr << "pinkey: " << what << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pinkey::cli;
  CLI::App app{"Cooperative PIN secret-key simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  std::size_t jobs = 1;

  for (const char* name : {"capacity", "protocol", "wireless", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", out, "output path, - for stdout");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    RunOptions opts;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--out")) opts.out = out;
    if (sub->count("--format")) opts.format = format_from_string(format);
    opts.jobs = jobs;

    ExperimentConfig cfg = load_config(config_path);
    const Command command = command_from_string(sub->get_name());
    const std::string target = opts.out.value_or(cfg.output);
    const std::string report = run_command(command, std::move(cfg), opts);

    if (target == "-") {
      std::cout << report;
      std::cout.flush();
    } else {
      std::ofstream file(target, std::ios::binary);
      if (!file) return fail(kExitConfig, "cannot open output file " + target);
      file << report;
      if (!file) return fail(kExitConfig, "write failed for " + target);
    }
    return kExitOk;
  } catch (const pinkey::ConfigError& e) {
    return fail(kExitConfig, std::string("config error: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(kExitConfig, std::string("config error: ") + e.what());
  } catch (const pinkey::BudgetExceeded& e) {
    return fail(kExitBudget, std::string("budget exceeded: ") + e.what());
  } catch (const pinkey::InvariantViolation& e) {
    return fail(kExitInvariant, std::string("invariant violation: ") + e.what());
  } catch (const std::logic_error& e) {
    return fail(kExitInvariant, std::string("invariant violation: ") + e.what());
  } catch (const std::exception& e) {
    return fail(1, e.what());
  }
}
