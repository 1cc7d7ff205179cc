#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conman/embed.hpp"
#include "conman/lure.hpp"
#include "conman/model.hpp"

namespace conman {

enum class CampaignCategory : std::uint8_t { KeyPhraseRequest, FeePayment };
std::string_view to_string(CampaignCategory c);

struct PlantedCampaign {
  std::string campaign_id;
  std::set<int> member_account_indices;
  // Raw identifiers as they are posted; each must normalize cleanly.
  std::vector<std::pair<ChannelKind, std::string>> identifiers;
  WalletKind wallet_focus = WalletKind::MetaMask;
  CampaignCategory category = CampaignCategory::KeyPhraseRequest;

  bool operator==(const PlantedCampaign&) const = default;
};

struct SimConfig {
  std::uint64_t seed = 42;
  int n_scammers = 200;
  // Per-account participation probability for each mode.
  std::map<InteractionKind, double> mode_weights{
      {InteractionKind::Reply, 0.8692},   {InteractionKind::Like, 0.4661},
      {InteractionKind::QuotedTweet, 0.2660}, {InteractionKind::Retweet, 0.0494},
      {InteractionKind::Follow, 0.0721}};
  double repeat_text_prob = 0.3278;
  // Relative weights; normalised on use.
  std::map<Source, double> source_mix{{Source::iPhone, 6520},
                                      {Source::Android, 6620},
                                      {Source::WebApp, 2822},
                                      {Source::Deck, 196},
                                      {Source::iPad, 44}};
  double suspension_hazard = 0.025;
  double deactivation_hazard = 0.01;
  int horizon_days = 90;
  // Expected engagements per (participating account, mode, tweet).
  double engagement_lambda = 0.01;
  // Chance that a planted campaign answers one of our outbound messages.
  double response_prob = 0.35;
  std::vector<PlantedCampaign> planted_campaigns;
};

// Throws ConfigError on out-of-range values or campaigns naming accounts
// outside [0, n_scammers).
void validate(const SimConfig& c);

// n campaigns of 2..8 members drawn from [0, n_scammers); roughly one in four
// shares a member with an earlier campaign so some campaigns chain into
// larger groups. Identifiers are unique across campaigns.
std::vector<PlantedCampaign> plant_campaigns(int n_campaigns, int n_scammers, std::uint64_t seed);

enum class AccountRole : std::uint8_t { Scammer, Benign, Official };
std::string_view to_string(AccountRole r);

struct GroundTruthEntry {
  ChannelKind kind = ChannelKind::Email;
  std::string identifier;  // normalized
  std::string campaign_id;

  bool operator==(const GroundTruthEntry&) const = default;
};

struct SimOutput {
  std::vector<ScamAccount> accounts;        // sorted by account_id
  std::vector<Interaction> interactions;    // sorted by (at, interaction_id)
  std::vector<GroundTruthEntry> ground_truth;  // sorted by (kind, identifier)
  std::map<AccountId, AccountRole> roles;

  bool operator==(const SimOutput&) const = default;
};

void to_json(nlohmann::json& j, const GroundTruthEntry& g);
void from_json(const nlohmann::json& j, GroundTruthEntry& g);
void to_json(nlohmann::json& j, const PlantedCampaign& c);
void from_json(const nlohmann::json& j, PlantedCampaign& c);

// Scammer accounts are "sc-00000".. by index. Each account draws from its own
// stream derived from (seed, index), so adding accounts leaves earlier ones
// untouched. Campaign members open with a reply (or a quote when they never
// reply) listing every campaign identifier; other scammers post key-phrase
// or fee pitches that carry no contact channel.
SimOutput run_sim(const SimConfig& config, const PostingPlan& plan);

// Adds round(rate * n_scammers) benign accounts (plain sympathetic replies
// and likes) and, when rate > 0, verified official wallet handles and one
// verified non-official account. rate = 0 leaves the output unchanged.
void inject_benign(SimOutput& out, const SimConfig& config, const PostingPlan& plan, double rate);

struct ScriptedReply {
  std::string text;
  std::vector<std::string> urls;
  Timestamp at = 0;
};

// The planted campaign's answer to one of our outbound messages, if it
// answers at all. Deterministic in (config.seed, identifier).
std::optional<ScriptedReply> scripted_response(const SimConfig& config,
                                               const ContactChannel& channel, Timestamp sent_at);

// Liveness checks for every channel at `at`, blocked with per-platform
// rates (Gmail 8.8%, Google Forms 38.07%, JotForm 9.43%, Instagram 57.55%,
// Telegram 0%, WhatsApp 31.77%). TwitterDM channels are not probed.
std::vector<ProbeResult> simulate_probes(const SimConfig& config,
                                         std::span<const ContactChannel> channels, Timestamp at);

struct SyntheticEmbeddings {
  std::vector<EmbeddingRecord> records;
  // Planted blob per account: index into kProfileClusterNames, -1 for outliers.
  std::map<AccountId, int> truth;
};

// Seven gaussian blobs in `dim` dimensions with uneven sizes plus a few
// outliers; accounts first, then "ext-NNNN" fillers up to `total`.
SyntheticEmbeddings synthetic_embeddings(std::span<const ScamAccount> accounts, std::size_t total,
                                         std::size_t dim, std::uint64_t seed);

// Names each label after the planted blob most of its members came from.
std::map<int, std::string> name_labels(const ClusterAssignment& assignment,
                                       const std::map<AccountId, int>& truth);

}  // namespace conman
