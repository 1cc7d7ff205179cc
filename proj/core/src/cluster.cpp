#include "conman/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#include "conman/error.hpp"
#include "conman/model_json.hpp"
#include "conman/union_find.hpp"

namespace conman {
namespace {

template <typename T>
T nearest_rank_impl(std::vector<T> values, double p) {
  if (values.empty()) throw ValidationError("percentile of empty set");
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError("percentile must be in (0, 1]");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

ClusterStatsRow make_row(std::string label, std::span<const ChannelCluster* const> clusters) {
  ClusterStatsRow row;
  row.label = std::move(label);
  row.total_clusters = clusters.size();
  if (clusters.empty()) return row;
  std::set<TweetId> reply, quoted, all_tweets;
  std::set<InteractionId> texts;
  std::map<AccountId, SeenSpan> seen;
  std::vector<std::size_t> sizes;
  for (const auto* c : clusters) {
    reply.insert(c->reply_tweet_ids.begin(), c->reply_tweet_ids.end());
    quoted.insert(c->quoted_tweet_ids.begin(), c->quoted_tweet_ids.end());
    texts.insert(c->interaction_ids.begin(), c->interaction_ids.end());
    sizes.push_back(c->members.size());
    for (const auto& [acct, span] : c->member_seen) {
      auto [it, fresh] = seen.emplace(acct, span);
      if (!fresh) {
        it->second.first_seen = std::min(it->second.first_seen, span.first_seen);
        it->second.last_seen = std::max(it->second.last_seen, span.last_seen);
      }
    }
  }
  all_tweets = reply;
  all_tweets.insert(quoted.begin(), quoted.end());
  row.distinct_reply_tweet_ids = reply.size();
  row.distinct_quoted_tweet_ids = quoted.size();
  row.distinct_tweet_ids = all_tweets.size();
  row.all_text_count = texts.size();
  row.total_scammers = seen.size();
  row.min_size = *std::min_element(sizes.begin(), sizes.end());
  row.max_size = *std::max_element(sizes.begin(), sizes.end());
  row.median_size = nearest_rank(sizes, 0.5);
  row.p90_size = nearest_rank(sizes, 0.9);
  std::vector<std::int64_t> diffs;
  for (const auto& [_, s] : seen) diffs.push_back(whole_days(s.first_seen, s.last_seen));
  row.median_seen_diff_days = nearest_rank(diffs, 0.5);
  return row;
}

}  // namespace

std::size_t nearest_rank(std::vector<std::size_t> values, double p) {
  return nearest_rank_impl(std::move(values), p);
}

std::int64_t nearest_rank(std::vector<std::int64_t> values, double p) {
  return nearest_rank_impl(std::move(values), p);
}

ClusterSet build_clusters(std::span<const ChannelSighting> sightings) {
  std::map<std::pair<ChannelKind, std::string>, std::vector<const ChannelSighting*>> by_id;
  for (const auto& s : sightings) by_id[{s.kind, s.identifier}].push_back(&s);

  ClusterSet out;
  for (const auto& [key, list] : by_id) {
    std::set<AccountId> accounts;
    for (const auto* s : list) accounts.insert(s->account_id);
    if (accounts.size() < 2) {
      std::set<InteractionId> ids;
      for (const auto* s : list) ids.insert(s->interaction_id);
      out.singletons.push_back({key.first, key.second, *accounts.begin(), ids.size()});
      continue;
    }
    ChannelCluster c;
    c.cluster_id = fmt::format("cl-{:05}", out.clusters.size());
    c.kind = key.first;
    c.identifier = key.second;
    c.members = std::move(accounts);
    for (const auto* s : list) {
      if (s->tweet_id) {
        if (s->interaction_kind == InteractionKind::Reply) c.reply_tweet_ids.insert(*s->tweet_id);
        if (s->interaction_kind == InteractionKind::QuotedTweet) {
          c.quoted_tweet_ids.insert(*s->tweet_id);
        }
      }
      c.interaction_ids.insert(s->interaction_id);
      auto [it, fresh] = c.member_seen.emplace(s->account_id, SeenSpan{s->at, s->at});
      if (!fresh) {
        it->second.first_seen = std::min(it->second.first_seen, s->at);
        it->second.last_seen = std::max(it->second.last_seen, s->at);
      }
    }
    out.clusters.push_back(std::move(c));
  }
  return out;
}

std::vector<ClusterStatsRow> cluster_stats(std::span<const ChannelCluster> clusters) {
  std::vector<ClusterStatsRow> rows;
  if (clusters.empty()) return rows;
  std::vector<const ChannelCluster*> all;
  for (const auto& c : clusters) all.push_back(&c);
  for (const auto k : kAllChannelKinds) {
    std::vector<const ChannelCluster*> of_kind;
    for (const auto* c : all) {
      if (c->kind == k) of_kind.push_back(c);
    }
    if (!of_kind.empty()) rows.push_back(make_row(std::string(to_string(k)), of_kind));
  }
  rows.push_back(make_row("Distinct (All)", all));
  return rows;
}

SharedMatrix shared_campaign_matrix(std::span<const ChannelCluster> clusters) {
  std::map<AccountId, std::array<bool, 6>> kinds_of;
  for (const auto& c : clusters) {
    for (const auto& m : c.members) kinds_of[m][static_cast<std::size_t>(c.kind)] = true;
  }
  SharedMatrix mat{};
  for (const auto& [_, ks] : kinds_of) {
    for (std::size_t i = 0; i < 6; ++i) {
      if (!ks[i]) continue;
      for (std::size_t j = 0; j < 6; ++j) {
        if (ks[j]) ++mat[i][j];
      }
    }
  }
  return mat;
}

std::vector<CampaignGroup> agglomerate_groups(
    std::span<const ChannelCluster> clusters,
    const std::map<AccountId, std::size_t>& interactions_per_account) {
  UnionFind uf(clusters.size());
  std::map<AccountId, std::size_t> first_cluster;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (const auto& m : clusters[i].members) {
      auto [it, fresh] = first_cluster.emplace(m, i);
      if (!fresh) uf.unite(it->second, i);
    }
  }
  std::map<std::size_t, CampaignGroup> by_root;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    auto& g = by_root[uf.find(i)];
    g.cluster_ids.insert(clusters[i].cluster_id);
    g.accounts.insert(clusters[i].members.begin(), clusters[i].members.end());
  }
  std::vector<CampaignGroup> out;
  for (auto& [_, g] : by_root) {
    g.group_id = *g.cluster_ids.begin();
    for (const auto& a : g.accounts) {
      if (auto it = interactions_per_account.find(a); it != interactions_per_account.end()) {
        g.interaction_count += it->second;
      }
    }
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(), [](const CampaignGroup& a, const CampaignGroup& b) {
    if (a.accounts.size() != b.accounts.size()) return a.accounts.size() > b.accounts.size();
    return a.group_id < b.group_id;
  });
  return out;
}

void to_json(nlohmann::json& j, const ChannelCluster& c) {
  auto seen = nlohmann::json::object();
  for (const auto& [a, s] : c.member_seen) seen[a] = {s.first_seen, s.last_seen};
  j = {{"cluster_id", c.cluster_id},
       {"kind", c.kind},
       {"identifier", c.identifier},
       {"members", c.members},
       {"reply_tweet_ids", c.reply_tweet_ids},
       {"quoted_tweet_ids", c.quoted_tweet_ids},
       {"interaction_ids", c.interaction_ids},
       {"member_seen", seen}};
}

void from_json(const nlohmann::json& j, ChannelCluster& c) {
  j.at("cluster_id").get_to(c.cluster_id);
  j.at("kind").get_to(c.kind);
  j.at("identifier").get_to(c.identifier);
  j.at("members").get_to(c.members);
  j.at("reply_tweet_ids").get_to(c.reply_tweet_ids);
  j.at("quoted_tweet_ids").get_to(c.quoted_tweet_ids);
  j.at("interaction_ids").get_to(c.interaction_ids);
  c.member_seen.clear();
  for (const auto& [a, s] : j.at("member_seen").items()) {
    c.member_seen[a] = {s.at(0).get<Timestamp>(), s.at(1).get<Timestamp>()};
  }
  if (c.members.size() < 2) {
    throw ValidationError(fmt::format("cluster {} has fewer than 2 members", c.cluster_id));
  }
}

void to_json(nlohmann::json& j, const CampaignGroup& g) {
  j = {{"group_id", g.group_id},
       {"cluster_ids", g.cluster_ids},
       {"accounts", g.accounts},
       {"interaction_count", g.interaction_count}};
}

void from_json(const nlohmann::json& j, CampaignGroup& g) {
  j.at("group_id").get_to(g.group_id);
  j.at("cluster_ids").get_to(g.cluster_ids);
  j.at("accounts").get_to(g.accounts);
  j.at("interaction_count").get_to(g.interaction_count);
}

}  // namespace conman
