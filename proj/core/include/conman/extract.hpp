#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "conman/model.hpp"
#include "conman/normalize.hpp"

namespace conman {

struct HostRule {
  std::string host_suffix;  // lowercase, matched on label boundaries
  std::string path_prefix;  // optional, e.g. "/forms"
  ChannelKind kind = ChannelKind::Form;
};

struct ExtractionRuleSet {
  std::string email_pattern;
  std::vector<HostRule> host_map;
  // lowercase keyword -> wallet; must cover all ten wallets
  std::map<std::string, WalletKind> wallet_keywords;
  // Reply phrases that ask for a Twitter DM without a URL; the channel is the
  // actor's own handle. Heuristic.
  std::vector<std::string> dm_phrases;
  // Platform names that, followed by "@handle" in text, yield that kind.
  std::map<std::string, ChannelKind> handle_keywords;
  NormalizeOptions normalize;
};

// Throws ConfigError on uppercase host keys or incomplete wallet coverage.
void validate_rules(const ExtractionRuleSet& rules);
const ExtractionRuleSet& default_rules();
ExtractionRuleSet load_rules(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const ExtractionRuleSet& r);
void from_json(const nlohmann::json& j, ExtractionRuleSet& r);

struct ChannelMatch {
  ChannelKind kind = ChannelKind::Email;
  std::string identifier;
  std::string raw;

  bool operator==(const ChannelMatch&) const = default;
};

struct ExtractionResult {
  // Deduplicated by (kind, identifier), sorted by (kind, identifier).
  std::vector<ChannelMatch> channels;
  // Sorted, deduplicated; disjoint from the matched URLs.
  std::vector<std::string> unmatched_urls;
  // Every URL seen in the urls list or the text, sorted, deduplicated.
  std::vector<std::string> urls;
};

// Compiles a rule set once; extraction is then a pure, thread-safe call.
class ChannelExtractor {
 public:
  explicit ChannelExtractor(ExtractionRuleSet rules);
  ~ChannelExtractor();
  ChannelExtractor(const ChannelExtractor&);
  ChannelExtractor& operator=(const ChannelExtractor&);

  // URLs are taken from both `urls` and any http(s) links inside `text`.
  ExtractionResult extract(const std::optional<std::string>& text,
                           std::span<const std::string> urls,
                           std::string_view actor_handle = {}) const;

  // Host rule lookup; nullopt when the URL belongs to no known channel.
  std::optional<ChannelKind> classify_url(std::string_view url) const;

  const ExtractionRuleSet& rules() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

ExtractionResult extract_channels(const std::optional<std::string>& text,
                                  std::span<const std::string> urls,
                                  const ExtractionRuleSet& rules);

// Longest keyword found in the identifier wins (ties: earliest occurrence);
// otherwise the honey tweet's wallet.
std::optional<WalletKind> attribute_wallet(std::string_view identifier,
                                           std::optional<WalletKind> context_wallet,
                                           const ExtractionRuleSet& rules);

// One identifier seen in one interaction.
struct ChannelSighting {
  ChannelKind kind = ChannelKind::Email;
  std::string identifier;
  std::string raw;
  AccountId account_id;
  InteractionId interaction_id;
  InteractionKind interaction_kind = InteractionKind::Reply;
  std::optional<TweetId> tweet_id;
  Timestamp at = 0;
};

struct ChannelCollection {
  std::vector<ContactChannel> channels;    // sorted by (kind, identifier)
  std::vector<ChannelSighting> sightings;  // sorted by (at, interaction_id, kind, identifier)
  std::vector<std::string> unmatched_urls;
};

// Runs the extractor over every Reply/QuotedTweet. handles maps account id to
// handle (for the DM-phrase rule); tweet_wallets maps tweet id to the wallet
// the honey tweet asked about (attribution fallback).
ChannelCollection collect_channels(std::span<const Interaction> interactions,
                                   const ChannelExtractor& extractor,
                                   const std::unordered_map<AccountId, std::string>& handles,
                                   const std::unordered_map<TweetId, WalletKind>& tweet_wallets,
                                   unsigned threads = 1);

// Rebuilds sightings from a channels file joined with its interactions.
std::vector<ChannelSighting> sightings_from(std::span<const ContactChannel> channels,
                                            std::span<const Interaction> interactions);

struct DistributionRow {
  std::string label;  // ChannelKind name or "All"
  std::size_t honey_profiles = 0;
  std::size_t total = 0;
};

// Distinct identifiers per kind; "total" counts the union of both inputs.
// Six kind rows plus an "All" row equal to their sums.
std::vector<DistributionRow> channel_distribution(std::span<const ContactChannel> honey,
                                                  std::span<const ContactChannel> all);

struct WalletBreakdownRow {
  std::string label;  // wallet name or "Total"
  std::array<std::size_t, 6> per_kind{};
  std::size_t all = 0;
};

// Distinct identifiers per attributed wallet and channel kind.
std::vector<WalletBreakdownRow> wallet_breakdown(std::span<const ContactChannel> channels);

}  // namespace conman
