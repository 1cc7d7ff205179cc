#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "conman/chain.hpp"
#include "conman/cluster.hpp"
#include "conman/config.hpp"
#include "conman/embed.hpp"
#include "conman/engagement.hpp"
#include "conman/extract.hpp"
#include "conman/ingest.hpp"
#include "conman/lure.hpp"
#include "conman/platform_sim.hpp"
#include "conman/report.hpp"

namespace conman {

// Artifact names inside the work directory.
namespace artifact {
inline constexpr const char* kProfiles = "profiles.jsonl";
inline constexpr const char* kPlan = "plan.jsonl";
inline constexpr const char* kAccounts = "accounts.jsonl";
inline constexpr const char* kInteractions = "interactions.jsonl";
inline constexpr const char* kGroundTruth = "ground_truth.jsonl";
inline constexpr const char* kCampaigns = "campaigns.jsonl";
inline constexpr const char* kVerdicts = "verdicts.jsonl";
inline constexpr const char* kScamAccounts = "scam_accounts.jsonl";
inline constexpr const char* kScamInteractions = "scam_interactions.jsonl";
inline constexpr const char* kChannels = "channels.jsonl";
inline constexpr const char* kUnmatchedUrls = "unmatched_urls.txt";
inline constexpr const char* kClusters = "clusters.jsonl";
inline constexpr const char* kGroups = "groups.jsonl";
inline constexpr const char* kEmbeddings = "embeddings.jsonl";
inline constexpr const char* kSweep = "sweep.csv";
inline constexpr const char* kProfileClusters = "profile_clusters.jsonl";
inline constexpr const char* kSessions = "sessions.jsonl";
inline constexpr const char* kOutbound = "outbound";
inline constexpr const char* kProbes = "probes.jsonl";
inline constexpr const char* kThefts = "thefts.jsonl";
inline constexpr const char* kTheftTable = "theft_table.json";
inline constexpr const char* kBtcSummaries = "btc_summaries.jsonl";
inline constexpr const char* kBtcSeries = "btc_series.jsonl";
}  // namespace artifact

struct Inputs {
  LureTemplateBank bank;
  ExtractionRuleSet rules;
  OfficialRegistry registry;
  PaymentRules payment_rules;
};

// Configured files, or the built-in defaults where a path is empty.
Inputs load_inputs(const PipelineConfig& cfg);
OfficialRegistry default_registry();

struct LureOutput {
  std::vector<HoneyProfile> profiles;
  PostingPlan plan;
};
LureOutput run_lure(const PipelineConfig& cfg, const LureTemplateBank& bank);

SimOutput run_simulate(const PipelineConfig& cfg, const PostingPlan& plan);

struct IngestOutput {
  std::vector<AccountVerdict> verdicts;
  std::vector<ScamAccount> scam_accounts;
  std::vector<Interaction> scam_interactions;
};
IngestOutput run_ingest(std::span<const ScamAccount> accounts, std::span<const Interaction> interactions,
                        const Inputs& inputs, unsigned threads);

ChannelCollection run_extract(std::span<const ScamAccount> accounts, std::span<const Interaction> interactions,
                              const ExtractionRuleSet& rules, const std::unordered_map<TweetId, WalletKind>& tweet_wallets,
                              unsigned threads);
std::unordered_map<TweetId, WalletKind> tweet_wallets(const PostingPlan& plan);

struct ClusterOutput {
  ClusterSet clusters;
  std::vector<CampaignGroup> groups;
};
ClusterOutput run_cluster(std::span<const ChannelSighting> sightings, std::span<const Interaction> interactions);

struct EmbedOutput {
  std::vector<EmbeddingRecord> embeddings;
  std::optional<SweepResult> sweep;
  std::vector<EngagementRow> rows;
};
// Skipped (empty output) when there are no scam accounts.
EmbedOutput run_embed(const PipelineConfig& cfg, std::span<const ScamAccount> accounts,
                      std::span<const Interaction> interactions);

struct EngageOutput {
  std::map<std::string, EngagementSession> sessions;
  EngagementSummary summary;
  std::vector<ProbeResult> probes;
};
// Email and Instagram channels get one outbound message each, logged to
// work_dir/sessions.jsonl (rewritten from scratch) with drafts under
// work_dir/outbound. Answers come from the simulator's planted campaigns.
EngageOutput run_engage(const PipelineConfig& cfg, std::span<const ContactChannel> channels,
                        const PaymentRules& payment_rules, const std::filesystem::path& work_dir);

struct ChainOutput {
  std::optional<TheftReport> theft;
  std::vector<AddressSummary> btc;
  std::vector<ActivityPoint> btc_series;
};
// Each half runs only when its fixture paths are configured.
ChainOutput run_chain(const PipelineConfig& cfg);

struct PipelineState {
  LureOutput lure;
  SimOutput sim;
  IngestOutput ingest;
  ChannelCollection channels;
  ClusterOutput clusters;
  EmbedOutput embed;
  EngageOutput engage;
  ChainOutput chain;
};

ReportInputs report_inputs(const PipelineState& s, const PipelineConfig& cfg);

// Writes every artifact of a stage under dir.
void write_lure(const std::filesystem::path& dir, const LureOutput& o);
void write_sim(const std::filesystem::path& dir, const SimOutput& o, const SimConfig& sim);
void write_ingest(const std::filesystem::path& dir, const IngestOutput& o);
void write_extract(const std::filesystem::path& dir, const ChannelCollection& c);
void write_cluster(const std::filesystem::path& dir, const ClusterOutput& o);
void write_embed(const std::filesystem::path& dir, const EmbedOutput& o);
void write_engage(const std::filesystem::path& dir, const EngageOutput& o);
void write_chain(const std::filesystem::path& dir, const ChainOutput& o);

// Rebuilds report inputs from the artifacts of an earlier run.
ReportInputs load_report_inputs(const std::filesystem::path& work_dir, int lifespan_days = 90);

// lure -> simulate -> ingest -> extract -> cluster -> embed -> engage ->
// chain -> report, all artifacts under cfg.paths.out_dir.
PipelineState run_e2e(const PipelineConfig& cfg);

void to_json(nlohmann::json& j, const EngagementRow& r);
void from_json(const nlohmann::json& j, EngagementRow& r);
void to_json(nlohmann::json& j, const AddressSummary& s);
void from_json(const nlohmann::json& j, AddressSummary& s);
void to_json(nlohmann::json& j, const ActivityPoint& p);
void from_json(const nlohmann::json& j, ActivityPoint& p);
void to_json(nlohmann::json& j, const TheftReport& r);
void from_json(const nlohmann::json& j, TheftReport& r);

}  // namespace conman
