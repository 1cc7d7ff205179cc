#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "conman/model.hpp"
#include "conman/time.hpp"

namespace conman {

// Satoshis or wei. Signed so balance arithmetic can detect underflow.
using Amount = __int128;

std::string amount_to_string(Amount a);
// Decimal integer, optional leading '-'. Throws ValidationError.
Amount parse_amount(std::string_view s);
// 384000000 sat, 8 -> "3.84000000"
std::string format_units(Amount a, int decimals);

inline constexpr std::size_t kWordListSize = 2048;
inline constexpr std::size_t kPhraseWords = 12;

// Synthetic consonant-vowel word list. Deliberately not BIP39: a phrase drawn
// from it can never be imported into a real wallet.
const std::array<std::string, kWordListSize>& honey_word_list();
bool is_honey_word(std::string_view w);

// NOT key derivation. "0x" + first 40 hex digits of SHA-256(words joined by
// single spaces). Only used to give each honey wallet a stable label.
std::string derive_honey_address(std::string_view key_phrase);

// Where a key phrase was handed out: the six channel kinds plus plain URLs.
enum class ReleaseMedium : std::uint8_t { Email, Form, Instagram, Telegram, TwitterDM, WhatsApp, Url };

inline constexpr std::array kAllReleaseMedia{
    ReleaseMedium::Email,     ReleaseMedium::Form,     ReleaseMedium::Instagram,
    ReleaseMedium::Telegram,  ReleaseMedium::TwitterDM, ReleaseMedium::WhatsApp,
    ReleaseMedium::Url,
};

std::string_view to_string(ReleaseMedium m);
ReleaseMedium parse_release_medium(std::string_view s);
ReleaseMedium release_medium(ChannelKind k);
// Row label used in the theft table ("Forms", "URLs", ...).
std::string_view table_label(ReleaseMedium m);

struct HoneyWallet {
  std::string wallet_id;
  std::string key_phrase;
  std::string address;
  double funded_usd = 1.26;
  std::optional<ReleaseMedium> released_on;
  std::optional<Timestamp> released_at;

  bool operator==(const HoneyWallet&) const = default;
};

// Throws ValidationError on a bad phrase or address mismatch.
void validate(const HoneyWallet& w);

std::vector<HoneyWallet> mint_honey_wallets(std::size_t n, std::uint64_t seed);

struct TxLeg {
  std::string address;
  Amount value = 0;

  bool operator==(const TxLeg&) const = default;
};

struct BtcTx {
  std::string txid;
  std::vector<TxLeg> inputs;
  std::vector<TxLeg> outputs;
  Timestamp at = 0;

  Amount fee() const;
  bool operator==(const BtcTx&) const = default;
};

struct EthTx {
  std::string txid;
  std::string from;
  std::string to;
  Amount value = 0;
  Timestamp at = 0;

  bool self_transfer() const { return from == to; }
  bool operator==(const EthTx&) const = default;
};

// Throw LedgerError naming the txid.
void validate(const BtcTx& tx);
void validate(const EthTx& tx);

struct AddressSummary {
  std::string address;
  std::size_t n_received = 0;
  std::size_t n_sent = 0;
  Amount total_received = 0;
  Amount total_sent = 0;
  Amount balance = 0;
  std::optional<Timestamp> first_activity;
  std::optional<Timestamp> last_activity;

  bool active() const { return n_received + n_sent > 0; }
  bool operator==(const AddressSummary&) const = default;
};

struct SummaryTotals {
  std::size_t addresses = 0;
  std::size_t active = 0;
  std::size_t n_received = 0;
  std::size_t n_sent = 0;
  Amount total_received = 0;
  Amount total_sent = 0;
  std::size_t nonzero_balances = 0;
  Amount balance = 0;
};

// UTXO walk in time order (ties by ledger position). Each input of a watched
// address consumes that address's unspent outputs oldest first; running short
// is a LedgerError. Balance is what is left unspent.
std::vector<AddressSummary> summarize_addresses(std::span<const std::string> addresses,
                                                std::span<const BtcTx> ledger);
// Account model: balance = received - sent, never negative.
std::vector<AddressSummary> summarize_addresses(std::span<const std::string> addresses,
                                                std::span<const EthTx> ledger);
SummaryTotals totals(std::span<const AddressSummary> rows);

struct AddressCluster {
  std::string representative;  // lexicographically smallest member
  std::vector<std::string> members;

  bool operator==(const AddressCluster&) const = default;
};

// Co-spend heuristic: all inputs of one tx share an owner. Output addresses
// that never co-spend come back as singletons. Sorted by representative.
std::vector<AddressCluster> cospend_clusters(std::span<const BtcTx> ledger);
const AddressCluster* cluster_containing(std::span<const AddressCluster> clusters,
                                         std::string_view address);

struct ActivityPoint {
  Timestamp bucket_start = 0;
  Amount received = 0;
  Amount sent = 0;

  bool operator==(const ActivityPoint&) const = default;
};

// Buckets start at the first activity of any watched address and run through
// the last one, empty buckets included.
std::vector<ActivityPoint> activity_series(std::span<const std::string> addresses,
                                           std::span<const BtcTx> ledger, Duration bucket);
std::vector<ActivityPoint> activity_series(std::span<const std::string> addresses,
                                           std::span<const EthTx> ledger, Duration bucket);

struct TheftEvent {
  std::string wallet_id;
  std::string drain_txid;
  std::vector<std::string> recipients;
  Timestamp at = 0;

  bool operator==(const TheftEvent&) const = default;
};

struct TheftRow {
  std::string label;
  std::size_t sent = 0;
  std::size_t stolen = 0;
};

struct TheftReport {
  std::vector<TheftEvent> events;
  // One row per medium with at least one release, then "All".
  std::vector<TheftRow> table;
  std::vector<std::string> distinct_recipients;
};

struct TheftConfig {
  double usd_per_eth = 1300.0;
  // Stolen once the balance drops below this share of the funding.
  double threshold = 0.10;
};

// Wei equivalent of a USD amount, rounded to nearest.
Amount usd_to_wei(double usd, double usd_per_eth);

// Walks each wallet's own transfers in time order. The first outbound tx that
// leaves the balance under the threshold is the drain; recipients are every
// outbound counterparty up to and including it.
TheftReport detect_theft(std::span<const HoneyWallet> wallets, std::span<const EthTx> ledger,
                         const TheftConfig& config = {});

void to_json(nlohmann::json& j, ReleaseMedium m);
void from_json(const nlohmann::json& j, ReleaseMedium& m);
void to_json(nlohmann::json& j, const HoneyWallet& w);
void from_json(const nlohmann::json& j, HoneyWallet& w);
void to_json(nlohmann::json& j, const BtcTx& t);
void from_json(const nlohmann::json& j, BtcTx& t);
void to_json(nlohmann::json& j, const EthTx& t);
void from_json(const nlohmann::json& j, EthTx& t);
void to_json(nlohmann::json& j, const TheftEvent& e);
void from_json(const nlohmann::json& j, TheftEvent& e);

}  // namespace conman
