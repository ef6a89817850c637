#include "pinkey/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "json.hpp"
#include "pinkey/infotools.hpp"
#include "pinkey/parallel.hpp"
#include "pinkey/pipeline.hpp"
#include "pinkey/rates.hpp"
#include "pinkey/rng.hpp"
#include "pinkey/wireless.hpp"

namespace pinkey::cli {

using nlohmann::json;

Command command_from_string(const std::string& name) {
  if (name == "capacity") return Command::Capacity;
  if (name == "protocol") return Command::Protocol;
  if (name == "wireless") return Command::Wireless;
  if (name == "sweep") return Command::Sweep;
  throw ConfigError("unknown command '" + name + "'");
}

Format format_from_string(const std::string& name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  throw ConfigError("unknown format '" + name + "' (expected json or csv)");
}

void apply_overrides(ExperimentConfig& cfg, const RunOptions& opts) {
  if (opts.seed) {
    cfg.seed = *opts.seed;
    if (cfg.instance) cfg.instance->params.seed = *opts.seed;
  }
  if (opts.out) cfg.output = *opts.out;
}

namespace {

json provenance(const std::string& command, const ExperimentConfig& cfg) {
  return {{"command", command}, {"config_digest", cfg.digest()}, {"seed", cfg.seed}};
}

std::string csv_preamble(const std::string& command, const ExperimentConfig& cfg) {
  return "# pinkey " + command + " config_digest=" + cfg.digest() + " seed=" + std::to_string(cfg.seed) + "\n";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json partition_json(const EnhancedPartition& p) {
  auto one_based = [](const std::vector<std::size_t>& v) {
    std::vector<std::size_t> out;
    for (auto i : v) out.push_back(i + 1);
    return out;
  };
  return {{"m", p.m + 1}, {"alice_set", one_based(p.alice_set)}, {"bob_set", one_based(p.bob_set)}};
}

json rate_report_json(const RateReport& r) {
  json parts = json::array();
  for (const auto& p : r.converse.partitions) parts.push_back(partition_json(p));
  return {{"i_per_relay", r.i_per_relay},
          {"i_sorted", r.i_sorted},
          {"capacity", r.capacity},
          {"capacity_order_form", r.capacity_order_form},
          {"xor_rate", r.xor_rate},
          {"argmax_relay", r.argmax_relay + 1},
          {"converse", {{"bound", r.converse.bound}, {"cuts", r.converse.cuts}, {"partitions", parts}}},
          {"tight", r.tight()}};
}

const PinInstance& require_instance(const ExperimentConfig& cfg, const char* command) {
  if (!cfg.instance) throw ConfigError(std::string(command) + " needs an 'instance' section");
  return *cfg.instance;
}

}  // namespace

std::string run_capacity(const ExperimentConfig& cfg, Format format) {
  std::vector<PairInformation> pairs;
  if (cfg.capacity && !cfg.capacity->informations.empty()) {
    pairs = cfg.capacity->informations;
  } else {
    pairs = pair_mutual_informations(require_instance(cfg, "capacity"));
  }
  const RateReport report = rate_report(pairs);
  if (format == Format::Csv) {
    std::string out = csv_preamble("capacity", cfg);
    out += "# capacity=" + fmt(report.capacity) + " converse=" + fmt(report.converse.bound) +
           " xor_rate=" + fmt(report.xor_rate) + " tight=" + (report.tight() ? "true" : "false") + "\n";
    out += "relay,i_alice,i_bob,i_min,cut_without_relay\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      out += std::to_string(i + 1) + "," + fmt(pairs[i].alice) + "," + fmt(pairs[i].bob) + "," +
             fmt(report.i_per_relay[i]) + "," + fmt(report.converse.cuts[i]) + "\n";
    }
    return out;
  }
  json j = provenance("capacity", cfg);
  json pj = json::array();
  for (const auto& p : pairs) pj.push_back({p.alice, p.bob});
  j["pair_informations"] = pj;
  j["report"] = rate_report_json(report);
  return dump(j);
}

std::string run_protocol(const ExperimentConfig& cfg, Format format, std::size_t jobs) {
  const PinInstance& instance = require_instance(cfg, "protocol");
  const ProtocolSection section = cfg.protocol.value_or(ProtocolSection{});
  const auto message_bits = common_message_bits(instance);
  const auto key_lengths = pairwise_key_lengths(instance);
  const unsigned key_bits = section.key_bits.value_or(default_key_bits(instance));
  const RbCodebook codebook = build_instance_codebook(instance, key_bits, codebook_seed(cfg.seed, 0));

  struct TrialSummary {
    bool failed = false;
    bool agree = false;
    bool xor_agree = false;
    bool schedule_ok = true;
    std::uint64_t digest = 0;
    std::size_t rounds = 0;
    std::size_t public_bits = 0;
  };
  const auto trials = parallel_map<TrialSummary>(section.trials, jobs, [&](std::size_t t) {
    const TrialOutcome o = run_trial(instance, codebook, trial_seed(cfg.seed, t));
    TrialSummary s;
    s.failed = o.reconciliation_failed;
    if (s.failed) return s;
    s.agree = o.keys_agree;
    s.xor_agree = o.alice_xor_key == o.bob_xor_key;
    s.schedule_ok = o.transcript.schedule_consistent();
    s.digest = o.transcript.digest();
    s.rounds = o.transcript.rounds().size();
    for (const auto& r : o.transcript.rounds()) s.public_bits += r.payload.size();
    return s;
  });

  std::size_t failures = 0, mismatches = 0, xor_mismatches = 0, schedule_errors = 0;
  for (const auto& s : trials) {
    if (s.failed) {
      ++failures;
      continue;
    }
    if (!s.agree) ++mismatches;
    if (!s.xor_agree) ++xor_mismatches;
    if (!s.schedule_ok) ++schedule_errors;
  }
  // Transcript digest: first trial that completed agreement.
  const auto first_ok = std::find_if(trials.begin(), trials.end(), [](const TrialSummary& s) { return !s.failed; });

  const auto infos = pair_mutual_informations(instance);
  const auto targets = min_informations(infos);
  const double n = static_cast<double>(instance.params.n);
  std::vector<double> achieved;
  for (auto b : message_bits) achieved.push_back(b / n);
  const unsigned xor_bits = static_cast<unsigned>(xor_distill(codebook.unpack(0)).size());

  // Exact secrecy audits over a codebook family (ideal sources only).
  const bool auditable = instance.all_ideal();
  std::vector<std::vector<LeakageAudit>> audits;
  if (auditable && section.codebooks > 0) {
    audits = parallel_map<std::vector<LeakageAudit>>(section.codebooks, jobs, [&](std::size_t c) {
      const RbCodebook cb = c == 0 ? codebook : build_instance_codebook(instance, key_bits, codebook_seed(cfg.seed, c));
      std::vector<LeakageAudit> per_relay;
      for (std::size_t m = 0; m < instance.m; ++m) per_relay.push_back(leakage_audit(cb, m, key_lengths));
      return per_relay;
    });
  }
  const unsigned total_bits = std::accumulate(message_bits.begin(), message_bits.end(), 0u);
  std::vector<double> mean_leak(instance.m, 0.0), max_leak(instance.m, 0.0);
  for (const auto& per_relay : audits) {
    for (std::size_t m = 0; m < instance.m; ++m) {
      mean_leak[m] += per_relay[m].leakage / static_cast<double>(audits.size());
      max_leak[m] = std::max(max_leak[m], per_relay[m].leakage);
    }
  }

  const double h_key = key_entropy(codebook);
  const std::size_t completed = section.trials - failures;

  if (format == Format::Csv) {
    std::string out = csv_preamble("protocol", cfg);
    out += "# trials=" + std::to_string(section.trials) + " reconciliation_failures=" + std::to_string(failures) +
           " key_mismatches=" + std::to_string(mismatches) + " key_bits=" + std::to_string(key_bits) +
           " h_key=" + fmt(h_key) + "\n";
    out += "relay,target_bits,achieved_rate,mean_leakage,max_leakage\n";
    for (std::size_t m = 0; m < instance.m; ++m) {
      out += std::to_string(m + 1) + "," + fmt(targets[m]) + "," + fmt(achieved[m]) + "," +
             (auditable ? fmt(mean_leak[m]) : "") + "," + (auditable ? fmt(max_leak[m]) : "") + "\n";
    }
    return out;
  }

  json j = provenance("protocol", cfg);
  j["instance"] = {{"m", instance.m},
                   {"n", instance.params.n},
                   {"epsilon", instance.params.epsilon},
                   {"all_ideal", auditable},
                   {"message_bits", message_bits}};
  j["agreement"] = {
      {"trials", section.trials},
      {"reconciliation_failures", failures},
      {"completed", completed},
      {"key_mismatches", mismatches},
      {"p_key_mismatch", completed ? static_cast<double>(mismatches) / completed : 0.0},
      {"success_rate", static_cast<double>(completed - mismatches) / static_cast<double>(section.trials)},
      {"xor_key_mismatches", xor_mismatches},
      {"schedule_violations", schedule_errors}};
  j["key"] = {{"key_bits", key_bits},
              {"entropy_bits", h_key},
              {"log_alphabet", static_cast<double>(key_bits)},
              {"xor_key_bits", xor_bits},
              {"codebook_seed", codebook.seed()}};
  j["rates"] = {{"targets", targets},
                {"achieved", achieved},
                {"capacity", capacity(targets)},
                {"achieved_key_rate", key_bits / n},
                {"xor_key_rate", xor_bits / n}};
  if (first_ok != trials.end()) {
    j["transcript"] = {{"digest", digest_hex(first_ok->digest)},
                       {"rounds", first_ok->rounds},
                       {"public_bits", first_ok->public_bits}};
  } else {
    j["transcript"] = nullptr;
  }
  if (auditable && !audits.empty()) {
    json per = json::array();
    for (std::size_t m = 0; m < instance.m; ++m) {
      per.push_back({{"relay", m + 1},
                     {"mean_leakage", mean_leak[m]},
                     {"max_leakage", max_leak[m]},
                     {"mean_per_bit", total_bits ? mean_leak[m] / total_bits : 0.0}});
    }
    json first = json::array();
    for (const auto& a : audits.front()) first.push_back(a.to_json());
    j["leakage"] = {{"codebooks", audits.size()}, {"per_relay", per}, {"first_codebook", first}};
  } else {
    j["leakage"] = {{"skipped", auditable ? "no codebooks requested"
                                          : "exact audit needs ideal common-randomness sources"}};
  }
  return dump(j);
}

std::string run_wireless(const ExperimentConfig& cfg, Format format, std::size_t jobs) {
  if (!cfg.wireless) throw ConfigError("wireless needs a 'wireless' section");
  const WirelessSection& w = *cfg.wireless;
  const auto sweep = multiplexing_gain_sweep(w.base, w.power_grid);
  const WirelessRateReport base = key_rate(w.base);
  std::optional<AllocationResult> best;
  if (w.optimize) {
    best = optimize_allocation(w.base.m, w.base.block_len, w.base.power, w.base.noise_var, w.base.channel_vars,
                               cfg.seed);
  }
  std::vector<McEstimate> mc;
  if (w.mc_samples > 0) {
    mc = parallel_map<McEstimate>(2 * w.base.m, jobs, [&](std::size_t k) {
      const std::size_t relay = k / 2;
      const Terminal t = k % 2 == 0 ? Terminal::Alice : Terminal::Bob;
      return mc_estimate_check(w.base, relay, t, w.mc_samples, derive_key(cfg.seed, k));
    });
  }

  if (format == Format::Csv) {
    std::string out = csv_preamble("wireless", cfg);
    out += "# base_power=" + fmt(w.base.power) + " r_key=" + fmt(base.r_key) + " xor_r_key=" + fmt(base.xor_r_key) +
           "\n";
    if (best) {
      std::string slots = std::to_string(best->allocation.t_a) + ";" + std::to_string(best->allocation.t_b);
      for (auto t : best->allocation.t_relays) slots += ";" + std::to_string(t);
      out += "# optimized_allocation=" + slots + " r_key=" + fmt(best->r_key) + " method=" + to_string(best->method) +
             " evaluated=" + std::to_string(best->evaluated) + "\n";
    }
    for (std::size_t k = 0; k < mc.size(); ++k) {
      out += "# mc relay=" + std::to_string(k / 2 + 1) + (k % 2 == 0 ? " alice" : " bob") +
             " estimate=" + fmt(mc[k].estimate) + " formula=" + fmt(mc[k].formula) + " gap=" + fmt(mc[k].gap) + "\n";
    }
    out += gain_table_csv(sweep);
    return out;
  }
  json j = provenance("wireless", cfg);
  json rows = json::array();
  for (const auto& g : sweep) {
    rows.push_back({{"P", g.power}, {"rb_ratio", g.rb_ratio}, {"xor_ratio", g.xor_ratio}, {"r_key", g.r_key},
                    {"r_s", g.r_s}});
  }
  j["sweep"] = rows;
  j["base"] = base.to_json();
  j["optimized_allocation"] = best ? best->to_json() : json(nullptr);
  json mcj = json::array();
  for (std::size_t k = 0; k < mc.size(); ++k) {
    mcj.push_back({{"relay", k / 2 + 1},
                   {"terminal", k % 2 == 0 ? "alice" : "bob"},
                   {"estimate", mc[k].estimate},
                   {"formula", mc[k].formula},
                   {"gap", mc[k].gap},
                   {"ci", {mc[k].ci_low, mc[k].ci_high}},
                   {"degenerate", mc[k].degenerate}});
  }
  j["mc_checks"] = mcj;
  return dump(j);
}

std::string run_sweep(const ExperimentConfig& cfg, Format format, std::size_t jobs) {
  const SweepSection s = cfg.sweep.value_or(SweepSection{});

  struct Check {
    double gap = 0.0;
    double order_gap = 0.0;
    bool xor_exceeds = false;
  };
  const auto checks = parallel_map<Check>(s.instances, jobs, [&](std::size_t k) {
    CounterRng rng(cfg.seed, (std::uint64_t{3} << 32) + k);
    const std::size_t m = s.min_relays + static_cast<std::size_t>(rng.below(s.max_relays - s.min_relays + 1));
    std::vector<PairInformation> pairs(m);
    for (auto& p : pairs) {
      p.alice = rng.uniform() * s.max_information;
      p.bob = rng.uniform() * s.max_information;
    }
    const RateReport r = rate_report(pairs);
    return Check{std::abs(r.capacity - r.converse.bound), std::abs(r.capacity - r.capacity_order_form),
                 r.xor_rate > r.capacity + 1e-12};
  });
  std::size_t failures = 0, xor_exceeds = 0;
  double max_gap = 0.0, max_order_gap = 0.0;
  for (const auto& c : checks) {
    if (c.gap > 1e-12) ++failures;
    if (c.xor_exceeds) ++xor_exceeds;
    max_gap = std::max(max_gap, c.gap);
    max_order_gap = std::max(max_order_gap, c.order_gap);
  }

  std::vector<LeakageSweepRow> rows;
  for (auto b : s.budgets) rows.push_back(leakage_sweep_row(s.relays, b, s.codebooks, cfg.seed, jobs));

  if (format == Format::Csv) {
    std::string out = csv_preamble("sweep", cfg);
    out += "# tightness instances=" + std::to_string(s.instances) + " failures=" + std::to_string(failures) +
           " max_gap=" + fmt(max_gap) + " xor_exceeds_rb=" + std::to_string(xor_exceeds) + "\n";
    out += "budget_bits,key_bits,total_bits,codebooks,mean_per_bit,stderr_per_bit,max_per_bit\n";
    for (const auto& r : rows) {
      out += std::to_string(r.budget_bits) + "," + std::to_string(r.key_bits) + "," + std::to_string(r.total_bits) +
             "," + std::to_string(r.codebooks) + "," + fmt(r.mean_per_bit) + "," + fmt(r.stderr_per_bit) + "," +
             fmt(r.max_per_bit) + "\n";
    }
    return out;
  }
  json j = provenance("sweep", cfg);
  j["tightness"] = {{"instances", s.instances},
                    {"failures", failures},
                    {"max_abs_gap", max_gap},
                    {"order_form_max_gap", max_order_gap},
                    {"xor_exceeds_rb", xor_exceeds}};
  json lj = json::array();
  for (const auto& r : rows) {
    lj.push_back({{"budget_bits", r.budget_bits},
                  {"key_bits", r.key_bits},
                  {"total_bits", r.total_bits},
                  {"codebooks", r.codebooks},
                  {"mean_max_leakage", r.mean_max_leakage},
                  {"mean_per_bit", r.mean_per_bit},
                  {"stderr_per_bit", r.stderr_per_bit},
                  {"max_per_bit", r.max_per_bit},
                  {"exact", r.all_exact}});
  }
  j["leakage"] = {{"relays", s.relays}, {"rows", lj}};
  return dump(j);
}

std::string run_command(Command command, ExperimentConfig cfg, const RunOptions& opts) {
  apply_overrides(cfg, opts);
  const std::size_t jobs = std::max<std::size_t>(1, opts.jobs);
  switch (command) {
    case Command::Capacity:
      return run_capacity(cfg, opts.format.value_or(Format::Json));
    case Command::Protocol:
      return run_protocol(cfg, opts.format.value_or(Format::Json), jobs);
    case Command::Wireless:
      return run_wireless(cfg, opts.format.value_or(Format::Csv), jobs);
    case Command::Sweep:
      return run_sweep(cfg, opts.format.value_or(Format::Json), jobs);
  }
  throw std::logic_error("unhandled command");
}

}  // namespace pinkey::cli
