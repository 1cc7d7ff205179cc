#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conman/extract.hpp"
#include "conman/model.hpp"

namespace conman {

struct SeenSpan {
  Timestamp first_seen = 0;
  Timestamp last_seen = 0;

  bool operator==(const SeenSpan&) const = default;
};

// An identifier posted by at least two distinct accounts.
struct ChannelCluster {
  std::string cluster_id;
  ChannelKind kind = ChannelKind::Email;
  std::string identifier;
  std::set<AccountId> members;
  std::set<TweetId> reply_tweet_ids;
  std::set<TweetId> quoted_tweet_ids;
  std::set<InteractionId> interaction_ids;
  std::map<AccountId, SeenSpan> member_seen;

  std::size_t text_count() const { return interaction_ids.size(); }
  bool operator==(const ChannelCluster&) const = default;
};

// An identifier seen from exactly one account.
struct SingletonChannel {
  ChannelKind kind = ChannelKind::Email;
  std::string identifier;
  AccountId account_id;
  std::size_t text_count = 0;

  bool operator==(const SingletonChannel&) const = default;
};

struct ClusterSet {
  std::vector<ChannelCluster> clusters;  // sorted by (kind, identifier); ids "cl-00000"..
  std::vector<SingletonChannel> singletons;
};

ClusterSet build_clusters(std::span<const ChannelSighting> sightings);

// Nearest rank: the value at index ceil(p * n) - 1 of the sorted input.
// Throws ValidationError on empty input or p outside (0, 1].
std::size_t nearest_rank(std::vector<std::size_t> values, double p);
std::int64_t nearest_rank(std::vector<std::int64_t> values, double p);

struct ClusterStatsRow {
  std::string label;  // ChannelKind name or "Distinct (All)"
  std::size_t total_clusters = 0;
  std::size_t distinct_reply_tweet_ids = 0;
  std::size_t distinct_quoted_tweet_ids = 0;
  std::size_t distinct_tweet_ids = 0;
  std::size_t all_text_count = 0;
  std::size_t total_scammers = 0;
  std::size_t min_size = 0;
  std::size_t median_size = 0;
  std::size_t p90_size = 0;
  std::size_t max_size = 0;
  std::int64_t median_seen_diff_days = 0;

  bool operator==(const ClusterStatsRow&) const = default;
};

// One row per kind that has clusters, then the all-kinds row. Seen-diff is
// per account: whole days between its first and last sighting across the
// row's clusters; the row reports the nearest-rank median.
std::vector<ClusterStatsRow> cluster_stats(std::span<const ChannelCluster> clusters);

using SharedMatrix = std::array<std::array<std::size_t, 6>, 6>;

// cell(i, j) = accounts in some cluster of kind i and some cluster of kind j.
SharedMatrix shared_campaign_matrix(std::span<const ChannelCluster> clusters);

struct CampaignGroup {
  std::string group_id;  // smallest member cluster_id
  std::set<std::string> cluster_ids;
  std::set<AccountId> accounts;
  std::size_t interaction_count = 0;

  bool operator==(const CampaignGroup&) const = default;
};

// Connected components of clusters linked by shared accounts. Groups are
// ordered by account count descending, then group_id. interaction_count sums
// the interaction counts of the group's accounts.
std::vector<CampaignGroup> agglomerate_groups(std::span<const ChannelCluster> clusters,
                                              const std::map<AccountId, std::size_t>& interactions_per_account = {});

void to_json(nlohmann::json& j, const ChannelCluster& c);
void from_json(const nlohmann::json& j, ChannelCluster& c);
void to_json(nlohmann::json& j, const CampaignGroup& g);
void from_json(const nlohmann::json& j, CampaignGroup& g);

}  // namespace conman
