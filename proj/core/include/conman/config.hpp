#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conman/embed.hpp"
#include "conman/platform_sim.hpp"
#include "conman/report.hpp"

namespace conman {

struct PipelineConfig {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;

  // Relative paths resolve against the config file's directory. Empty input
  // paths fall back to the built-in defaults (rules, bank, registry) or skip
  // the stage (chain fixtures).
  struct Paths {
    std::filesystem::path out_dir = "out";
    std::filesystem::path report_dir;  // default: out_dir/report
    std::filesystem::path bank;
    std::filesystem::path rules;
    std::filesystem::path registry;
    std::filesystem::path payment_rules;
    std::filesystem::path btc_ledger;
    std::filesystem::path btc_addresses;
    std::filesystem::path eth_ledger;
    std::filesystem::path honey_wallets;
  } paths;

  struct Lure {
    int profiles = 4;
    int per_profile = 100;
    std::string start = "2022-10-14";
    int interval_minutes = 15;
  } lure;

  struct Sim {
    int n_scammers = 200;
    int horizon_days = 90;
    int n_campaigns = 20;
    double repeat_text_prob = 0.3278;
    double suspension_hazard = 0.025;
    double deactivation_hazard = 0.01;
    double engagement_lambda = 0.01;
    double response_prob = 0.35;
    double benign_rate = 0.05;
  } sim;

  struct Embed {
    std::size_t total = 500;
    std::size_t dim = 32;
    bool unit_norm = false;
    SweepGrid grid{{2, 4, 8, 16, 32}, {1.0, 1.5, 2.0, 3.0, 4.0}, {10, 20, 30, 40}};
  } embed;

  struct Engage {
    int probe_after_days = 14;
  } engage;

  struct Chain {
    double usd_per_eth = 1300.0;
    double threshold = 0.10;
    int bucket_days = 30;
  } chain;

  ReportFormat format = ReportFormat::Csv;

  std::filesystem::path report_dir() const;
  Timestamp start_time() const;
};

// Parses TOML text. base_dir anchors relative paths. Unknown keys are a
// ConfigError so typos do not silently fall back to defaults.
PipelineConfig parse_config(const std::string& toml_text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

// CONMAN_<SECTION>_<KEY> (e.g. CONMAN_SIM_N_SCAMMERS, CONMAN_SEED) override
// the matching key. Paths from the environment resolve against base_dir.
void apply_env(PipelineConfig& cfg, const std::map<std::string, std::string>& env,
               const std::filesystem::path& base_dir);
std::map<std::string, std::string> conman_environment();

// Seed present, ranges sane, every configured input file exists.
void validate(const PipelineConfig& cfg);

// Simulator settings, with the planted campaigns drawn from the seed.
SimConfig make_sim_config(const PipelineConfig& cfg);

}  // namespace conman
