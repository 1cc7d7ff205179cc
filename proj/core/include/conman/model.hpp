#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "conman/time.hpp"

namespace conman {

using AccountId = std::string;
using TweetId = std::string;
using InteractionId = std::string;
using ProfileId = std::string;

enum class WalletKind : std::uint8_t {
  Badger,
  Binance,
  BitPay,
  Coinbase,
  Exodus,
  Free,
  Ledger,
  MetaMask,
  Trezor,
  TrustWallet,
};

inline constexpr std::array kAllWallets{
    WalletKind::Badger, WalletKind::Binance, WalletKind::BitPay,  WalletKind::Coinbase,
    WalletKind::Exodus, WalletKind::Free,    WalletKind::Ledger,  WalletKind::MetaMask,
    WalletKind::Trezor, WalletKind::TrustWallet,
};

enum class InteractionKind : std::uint8_t { Reply, Retweet, QuotedTweet, Like, Follow };

inline constexpr std::array kAllInteractionKinds{
    InteractionKind::Reply, InteractionKind::Retweet, InteractionKind::QuotedTweet,
    InteractionKind::Like,  InteractionKind::Follow,
};

enum class Source : std::uint8_t { iPhone, Android, WebApp, Deck, iPad };

inline constexpr std::array kAllSources{Source::iPhone, Source::Android, Source::WebApp,
                                        Source::Deck, Source::iPad};

enum class StatusKind : std::uint8_t { Active, Suspended, NotFound };

inline constexpr std::array kAllStatusKinds{StatusKind::Active, StatusKind::Suspended,
                                            StatusKind::NotFound};

enum class ChannelKind : std::uint8_t { Email, Form, Instagram, Telegram, TwitterDM, WhatsApp };

inline constexpr std::array kAllChannelKinds{
    ChannelKind::Email,    ChannelKind::Form,      ChannelKind::Instagram,
    ChannelKind::Telegram, ChannelKind::TwitterDM, ChannelKind::WhatsApp,
};

std::string_view to_string(WalletKind w);
std::string_view to_string(InteractionKind k);
std::string_view to_string(Source s);
std::string_view to_string(StatusKind s);
std::string_view to_string(ChannelKind k);

// Case-insensitive parsers; throw ValidationError on unknown names.
WalletKind parse_wallet(std::string_view s);
InteractionKind parse_interaction_kind(std::string_view s);
Source parse_source(std::string_view s);
StatusKind parse_status(std::string_view s);
ChannelKind parse_channel_kind(std::string_view s);

constexpr bool carries_text(InteractionKind k) {
  return k == InteractionKind::Reply || k == InteractionKind::QuotedTweet;
}

struct HoneyProfile {
  ProfileId profile_id;
  std::string handle;
  std::string persona_description;
  Timestamp created_at = 0;

  bool operator==(const HoneyProfile&) const = default;
};

struct HoneyTweet {
  TweetId tweet_id;
  ProfileId profile_id;
  WalletKind wallet = WalletKind::MetaMask;
  // greeting, problem, urgency
  std::array<std::string, 3> sentences;
  std::string full_text;
  std::vector<std::string> hashtags;
  Timestamp posted_at = 0;

  bool operator==(const HoneyTweet&) const = default;
};

// Joins sentences and hashtags with single spaces.
std::string compose_full_text(const std::array<std::string, 3>& sentences,
                              const std::vector<std::string>& hashtags);

// Number of Unicode code points in a UTF-8 string.
std::size_t code_point_length(std::string_view utf8);

struct Interaction {
  InteractionId interaction_id;
  InteractionKind kind = InteractionKind::Reply;
  AccountId actor;
  std::optional<TweetId> target_tweet;
  std::optional<ProfileId> target_profile;
  std::optional<std::string> text;
  std::vector<std::string> urls;
  Source source = Source::iPhone;
  std::string lang = "en";
  Timestamp at = 0;

  bool operator==(const Interaction&) const = default;
};

// Throws ValidationError when the kind-specific shape rules are broken.
void validate(const Interaction& i);

struct AccountStatus {
  StatusKind status = StatusKind::Active;
  Timestamp observed_at = 0;

  bool operator==(const AccountStatus&) const = default;
};

constexpr bool is_terminal(StatusKind s) { return s != StatusKind::Active; }

// Appends to a status history, enforcing time order and that an account
// never returns to Active after Suspended or NotFound.
void append_status(std::vector<AccountStatus>& history, AccountStatus next);

// First Suspended/NotFound entry, if any.
std::optional<AccountStatus> terminal_status(const std::vector<AccountStatus>& history);

struct ScamAccount {
  AccountId account_id;
  std::string handle;
  Timestamp created_at = 0;
  std::string name;
  std::string location;
  std::string description;
  std::int64_t followers_count = 0;
  std::int64_t following_count = 0;
  bool verified = false;
  std::optional<std::string> profile_image_ref;
  std::vector<AccountStatus> status_history;

  bool operator==(const ScamAccount&) const = default;
};

struct ContactChannel {
  ChannelKind kind = ChannelKind::Email;
  std::string identifier;
  std::string raw;
  std::optional<WalletKind> wallet_attribution;
  Timestamp first_seen = 0;
  Timestamp last_seen = 0;
  std::set<InteractionId> observed_in;

  bool operator==(const ContactChannel&) const = default;
};

enum class ProbeOutcome : std::uint8_t { Alive, Blocked, Deleted, Unreachable };

std::string_view to_string(ProbeOutcome o);
ProbeOutcome parse_probe_outcome(std::string_view s);

// One liveness check of an off-platform channel.
struct ProbeResult {
  ContactChannel channel;
  Timestamp probed_at = 0;
  ProbeOutcome outcome = ProbeOutcome::Alive;

  bool operator==(const ProbeResult&) const = default;
};

}  // namespace conman
