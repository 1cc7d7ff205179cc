#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conman/model.hpp"

namespace conman {

enum class Chain : std::uint8_t { BTC, ETH };
enum class GiftVendor : std::uint8_t { CardDelivery, Amazon, Other };

std::string_view to_string(Chain c);
std::string_view to_string(GiftVendor v);

struct PaymentMethod {
  enum class Type : std::uint8_t { PayPal, Crypto, GiftCard };
  Type type = Type::PayPal;
  // PayPal: handle or email (lowercase). Crypto: address as written.
  // GiftCard: empty.
  std::string value;
  Chain chain = Chain::BTC;
  GiftVendor vendor = GiftVendor::Other;

  static PaymentMethod paypal(std::string handle);
  static PaymentMethod crypto(std::string address, Chain chain);
  static PaymentMethod gift_card(GiftVendor vendor);

  bool operator==(const PaymentMethod&) const = default;
  auto operator<=>(const PaymentMethod&) const = default;
};

std::string describe(const PaymentMethod& m);

struct ScammerCategory {
  enum class Kind : std::uint8_t { KeyPhraseRequest, FeePayment, Unclassified };
  Kind kind = Kind::Unclassified;
  std::vector<PaymentMethod> methods;  // non-empty iff FeePayment

  bool operator==(const ScammerCategory&) const = default;
};

std::string_view to_string(ScammerCategory::Kind k);

struct PaymentRules {
  // Case-insensitive substrings that mark a key-phrase request.
  std::vector<std::string> key_phrase_cues;
  // A form link alone is not enough; the text must also mention one of these.
  std::vector<std::string> form_context_cues;
  // host[/path-prefix] of form providers.
  std::vector<std::string> form_hosts;
  // lowercase phrase -> vendor; "gift card" falls back to Other.
  std::map<std::string, GiftVendor> gift_vendors;
};

const PaymentRules& default_payment_rules();
PaymentRules load_payment_rules(const std::filesystem::path& path);
void to_json(nlohmann::json& j, const PaymentRules& r);
void from_json(const nlohmann::json& j, PaymentRules& r);

// Methods in order of first appearance, deduplicated. Crypto addresses are
// only returned when their checksum verifies.
std::vector<PaymentMethod> extract_payment(std::string_view text,
                                           const PaymentRules& rules = default_payment_rules());

// Key-phrase request wins over fee payment.
ScammerCategory classify_response(std::string_view text, std::span<const std::string> urls,
                                  const PaymentRules& rules = default_payment_rules());

// Dollar amounts ("$725", "$2,550", "$99.50") in order of appearance.
std::vector<double> extract_prices(std::string_view text);

struct PriceQuote {
  double amount_usd = 0;
  std::string session_id;

  bool operator==(const PriceQuote&) const = default;
};

struct PriceStats {
  std::size_t count = 0;
  std::optional<double> min;
  std::optional<double> median;  // lower median
  std::optional<double> max;
};

PriceStats price_stats(std::span<const PriceQuote> quotes);

struct EmailTemplates {
  std::vector<std::string> subjects;  // "{wallet}"
  std::vector<std::string> bodies;    // "{wallet}", "{ref}"
};

const EmailTemplates& default_email_templates();

struct EmailDraft {
  std::string to;
  WalletKind wallet = WalletKind::MetaMask;
  std::string subject;
  std::string body;

  bool operator==(const EmailDraft&) const = default;
};

// Wallet from attribution when present, else drawn from seed. The reference
// number is salted with the identifier so two channels never get the same
// body. Throws ValidationError for non-Email channels.
EmailDraft craft_email(const ContactChannel& channel, const EmailTemplates& templates,
                       std::uint64_t seed);

// Plain-text rendering used for the outbound draft files.
std::string render_eml(const EmailDraft& draft);

// Throws ValidationError on an empty handle.
std::string craft_dm(std::string_view handle, WalletKind wallet,
                     std::string_view address_placeholder);

enum class SessionState : std::uint8_t { Drafted, Sent, Responded, Categorized, Dead };
std::string_view to_string(SessionState s);
SessionState parse_session_state(std::string_view s);

struct TranscriptEntry {
  enum class Direction : std::uint8_t { Outbound, Inbound };
  Direction direction = Direction::Outbound;
  std::string text;
  Timestamp at = 0;

  bool operator==(const TranscriptEntry&) const = default;
};

struct EngagementSession {
  std::string session_id;
  ContactChannel channel;
  SessionState state = SessionState::Drafted;
  std::vector<TranscriptEntry> transcript;
  std::optional<ScammerCategory> category;

  bool operator==(const EngagementSession&) const = default;
};

// Forward-only transitions; Dead is reachable from anything except Dead.
// Throws ValidationError otherwise.
void advance(EngagementSession& s, SessionState next);

// One line of the append-only session log.
struct SessionEvent {
  std::string session_id;
  std::string type;  // "open", "message", "state", "category"
  Timestamp at = 0;
  nlohmann::json payload;

  bool operator==(const SessionEvent&) const = default;
};

void to_json(nlohmann::json& j, const SessionEvent& e);
void from_json(const nlohmann::json& j, SessionEvent& e);
void to_json(nlohmann::json& j, const PaymentMethod& m);
void from_json(const nlohmann::json& j, PaymentMethod& m);
void to_json(nlohmann::json& j, const ScammerCategory& c);
void from_json(const nlohmann::json& j, ScammerCategory& c);

// Append-only JSONL log. Every mutation is written before it is applied, so
// a log truncated at any line boundary replays to a valid prefix state.
class SessionLog {
 public:
  explicit SessionLog(std::filesystem::path path);

  EngagementSession& open(std::string session_id, const ContactChannel& channel, Timestamp at);
  void message(const std::string& session_id, TranscriptEntry entry);
  void transition(const std::string& session_id, SessionState next, Timestamp at);
  void categorize(const std::string& session_id, ScammerCategory category, Timestamp at);

  const std::map<std::string, EngagementSession>& sessions() const { return sessions_; }

  // Rebuilds all sessions from a log file.
  static std::map<std::string, EngagementSession> replay(const std::filesystem::path& path);

 private:
  void append(const SessionEvent& e);
  static void apply(std::map<std::string, EngagementSession>& sessions, const SessionEvent& e);

  std::filesystem::path path_;
  std::map<std::string, EngagementSession> sessions_;
};

struct EngagementSummary {
  std::size_t contacted = 0;
  std::size_t responded = 0;
  std::size_t key_phrase = 0;
  std::size_t fee_paypal = 0;
  std::size_t fee_crypto = 0;
  std::size_t fee_gift = 0;
  std::vector<PriceQuote> quotes;
  PriceStats prices;
};

EngagementSummary summarize_sessions(const std::map<std::string, EngagementSession>& sessions);

}  // namespace conman
