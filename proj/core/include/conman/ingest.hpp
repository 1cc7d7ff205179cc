#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conman/engagement.hpp"
#include "conman/extract.hpp"
#include "conman/model.hpp"

namespace conman {

struct MarkingPoint {
  AccountId account_id;
  // Empty until the first successful pull.
  InteractionId last_interaction_id;
  Timestamp last_at = 0;

  bool started() const { return !last_interaction_id.empty(); }
  bool operator==(const MarkingPoint&) const = default;
};

struct PullResult {
  std::vector<Interaction> records;
  MarkingPoint mark;
};

// Returns the records strictly after mark in (at, interaction_id) order.
// Throws IngestError naming the first record that breaks that order.
PullResult pull_timeline(std::span<const Interaction> stream, const MarkingPoint& mark);

struct OfficialRegistry {
  std::set<std::string> official_handles;
  std::set<std::string> official_domains;  // second-level, e.g. "trustwallet.com"
  std::set<std::string> exchange_names;
  std::set<std::string> coin_names;
};

// Throws ConfigError on entries that are not lowercase.
void validate_registry(const OfficialRegistry& r);
OfficialRegistry load_registry(const std::filesystem::path& path);
void to_json(nlohmann::json& j, const OfficialRegistry& r);
void from_json(const nlohmann::json& j, OfficialRegistry& r);

// True when the handle names an official wallet, exchange or coin account.
bool is_official_handle(std::string_view handle, const OfficialRegistry& r);

enum class VerdictKind : std::uint8_t { Scam, Benign, Official, Verified, Excluded };
std::string_view to_string(VerdictKind v);
VerdictKind parse_verdict_kind(std::string_view s);

struct AccountVerdict {
  AccountId account_id;
  VerdictKind verdict = VerdictKind::Benign;
  // R0 no interactions, R1 official handle, R2 verified, R3 official links
  // only, R4 scam evidence, R5 fallthrough.
  std::string rule;
  std::string reason;

  bool operator==(const AccountVerdict&) const = default;
};

void to_json(nlohmann::json& j, const AccountVerdict& v);
void from_json(const nlohmann::json& j, AccountVerdict& v);

// First matching rule wins: R1 official handle, R2 verified, R0 no
// interactions, R3 every embedded email/URL is on an official domain, R4 a
// payment or key-phrase request or any extracted contact channel, R5 benign.
// Interactions are sorted internally, so input order does not matter.
AccountVerdict classify_account(const ScamAccount& acct, std::span<const Interaction> interactions,
                                const OfficialRegistry& registry,
                                const ChannelExtractor& extractor,
                                const PaymentRules& payment_rules = default_payment_rules());

// One verdict per account, ordered by account_id.
std::vector<AccountVerdict> classify_accounts(std::span<const ScamAccount> accounts,
                                              std::span<const Interaction> interactions,
                                              const OfficialRegistry& registry,
                                              const ChannelExtractor& extractor,
                                              const PaymentRules& payment_rules,
                                              unsigned threads = 1);

enum class ApiResult : std::uint8_t { Ok, Forbidden, NotFound };

// Ok -> Active, Forbidden -> Suspended, NotFound -> NotFound.
AccountStatus snapshot_status(ApiResult result, Timestamp at);

}  // namespace conman
