#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "conman/model.hpp"

namespace conman {

struct LureTemplateBank {
  std::vector<std::string> greetings;
  // Each contains "{wallet}" and "help" or "support".
  std::vector<std::string> problem_patterns;
  std::vector<std::string> urgency_patterns;
  // "{wallet}" expands to the lowercase wallet name.
  std::vector<std::string> hashtag_patterns;
};

// Throws ConfigError when a list is empty or a problem pattern lacks the
// wallet placeholder or a help/support keyword.
void validate_bank(const LureTemplateBank& bank);

// 12 greetings x 20 problems x 12 urgencies x 6 hashtags.
const LureTemplateBank& default_bank();

LureTemplateBank load_bank(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const LureTemplateBank& b);
void from_json(const nlohmann::json& j, LureTemplateBank& b);

// Display form used inside sentences ("Trust Wallet").
std::string wallet_display_name(WalletKind w);

// A HoneyTweet without tweet_id, profile_id and posted_at. The wallet index
// is always drawn first so the sentence choice does not depend on whether
// the wallet was supplied.
HoneyTweet generate_lure(const LureTemplateBank& bank, std::optional<WalletKind> wallet,
                         std::uint64_t seed);

inline constexpr std::size_t kTweetLimit = 280;

enum class LureVerdict { Accepted, Duplicate, TooLong };

std::string_view to_string(LureVerdict v);

LureVerdict validate_lure(const HoneyTweet& draft,
                          const std::unordered_set<std::string>& history);

// Draws lures until one is accepted against history, then records it there.
// attempt_seed advances deterministically from seed on each rejection.
HoneyTweet next_unique_lure(const LureTemplateBank& bank, std::uint64_t& seed,
                            std::unordered_set<std::string>& history);

struct PlanEntry {
  ProfileId profile_id;
  HoneyTweet tweet;
  Timestamp scheduled_at = 0;

  bool operator==(const PlanEntry&) const = default;
};

struct PostingPlan {
  std::vector<PlanEntry> entries;
  Duration interval = 15 * kMinute;

  bool operator==(const PostingPlan&) const = default;

  std::vector<HoneyTweet> tweets() const;
};

// Profile p posts its k-th lure at start + p*interval/|profiles| + k*interval,
// so every profile keeps the exact interval and the profiles interleave.
// Entries are sorted by (scheduled_at, profile order). Tweet ids are
// "tw-000000"... in entry order. Throws ConfigError when interval <= 0 or
// count_per_profile < 0.
PostingPlan schedule_posts(std::span<const HoneyProfile> profiles, int count_per_profile,
                           Timestamp start, Duration interval, const LureTemplateBank& bank,
                           std::uint64_t seed);

// Global posting rate: one post per profile per interval.
double posts_per_hour(const PostingPlan& plan);

// Four enthusiast personas, created the day before start.
std::vector<HoneyProfile> default_profiles(int n, Timestamp start);

void to_json(nlohmann::json& j, const PlanEntry& e);
void from_json(const nlohmann::json& j, PlanEntry& e);

// JSONL: one PlanEntry per line, each carrying "interval_s".
void write_plan(const std::filesystem::path& path, const PostingPlan& plan);
PostingPlan read_plan(const std::filesystem::path& path);

}  // namespace conman
