#include "conman/chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "conman/crypto.hpp"
#include "conman/error.hpp"
#include "conman/normalize.hpp"
#include "conman/random.hpp"
#include "conman/union_find.hpp"

namespace conman {
namespace {

constexpr std::string_view kConsonants = "bdfghjklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

// Indices of the ledger sorted by (at, position).
template <typename Tx>
std::vector<std::size_t> time_order(std::span<const Tx> ledger) {
  std::vector<std::size_t> order(ledger.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ledger[a].at < ledger[b].at; });
  return order;
}

void touch(AddressSummary& s, Timestamp at) {
  if (!s.first_activity || at < *s.first_activity) s.first_activity = at;
  if (!s.last_activity || at > *s.last_activity) s.last_activity = at;
}

Amount json_amount(const nlohmann::json& j) {
  if (j.is_string()) return parse_amount(j.get<std::string>());
  if (j.is_number_unsigned()) return static_cast<Amount>(j.get<std::uint64_t>());
  if (j.is_number_integer()) return static_cast<Amount>(j.get<std::int64_t>());
  throw ValidationError("amount must be an integer or a decimal string");
}

nlohmann::json sat_json(Amount a) {
  if (a >= std::numeric_limits<std::int64_t>::min() && a <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<std::int64_t>(a);
  }
  return amount_to_string(a);
}

std::vector<ActivityPoint> bucketize(std::vector<std::tuple<Timestamp, Amount, Amount>> events,
                                     Duration bucket) {
  if (bucket <= 0) throw ValidationError("bucket must be positive");
  if (events.empty()) return {};
  Timestamp first = std::get<0>(events.front());
  Timestamp last = first;
  for (const auto& e : events) {
    first = std::min(first, std::get<0>(e));
    last = std::max(last, std::get<0>(e));
  }
  std::vector<ActivityPoint> out(static_cast<std::size_t>((last - first) / bucket + 1));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].bucket_start = first + static_cast<Timestamp>(i) * bucket;
  }
  for (const auto& [at, rx, tx] : events) {
    auto& p = out[static_cast<std::size_t>((at - first) / bucket)];
    p.received += rx;
    p.sent += tx;
  }
  return out;
}

}  // namespace

std::string amount_to_string(Amount a) {
  if (a == 0) return "0";
  const bool neg = a < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(a + 1)) + 1 : static_cast<unsigned __int128>(a);
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

Amount parse_amount(std::string_view s) {
  const std::string_view orig = s;
  bool neg = false;
  if (!s.empty() && s.front() == '-') {
    neg = true;
    s.remove_prefix(1);
  }
  if (s.empty() || s.size() > 38) throw ValidationError(fmt::format("bad amount '{}'", orig));
  Amount v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw ValidationError(fmt::format("bad amount '{}'", orig));
    v = v * 10 + (c - '0');
  }
  return neg ? -v : v;
}

std::string format_units(Amount a, int decimals) {
  std::string digits = amount_to_string(a < 0 ? -a : a);
  if (decimals <= 0) return (a < 0 ? "-" : "") + digits;
  const auto d = static_cast<std::size_t>(decimals);
  if (digits.size() <= d) digits.insert(0, d + 1 - digits.size(), '0');
  digits.insert(digits.size() - d, ".");
  return (a < 0 ? "-" : "") + digits;
}

const std::array<std::string, kWordListSize>& honey_word_list() {
  static const auto words = [] {
    std::array<std::string, kWordListSize> w;
    for (std::size_t i = 0; i < kWordListSize; ++i) {
      w[i] = {kConsonants[i / 400], kVowels[(i / 80) % 5], kConsonants[(i / 5) % 16], kVowels[i % 5]};
    }
    return w;
  }();
  return words;
}

bool is_honey_word(std::string_view w) {
  const auto& list = honey_word_list();
  return std::binary_search(list.begin(), list.end(), w,
                            [](std::string_view a, std::string_view b) { return a < b; });
}

std::string derive_honey_address(std::string_view key_phrase) {
  return "0x" + crypto::to_hex(crypto::sha256(key_phrase)).substr(0, 40);
}

std::string_view to_string(ReleaseMedium m) {
  switch (m) {
    case ReleaseMedium::Email: return "Email";
    case ReleaseMedium::Form: return "Form";
    case ReleaseMedium::Instagram: return "Instagram";
    case ReleaseMedium::Telegram: return "Telegram";
    case ReleaseMedium::TwitterDM: return "TwitterDM";
    case ReleaseMedium::WhatsApp: return "WhatsApp";
    case ReleaseMedium::Url: return "Url";
  }
  return "?";
}

ReleaseMedium parse_release_medium(std::string_view s) {
  const auto low = to_lower(s);
  for (auto m : kAllReleaseMedia) {
    if (to_lower(to_string(m)) == low) return m;
  }
  throw ValidationError(fmt::format("unknown release medium '{}'", s));
}

ReleaseMedium release_medium(ChannelKind k) {
  switch (k) {
    case ChannelKind::Email: return ReleaseMedium::Email;
    case ChannelKind::Form: return ReleaseMedium::Form;
    case ChannelKind::Instagram: return ReleaseMedium::Instagram;
    case ChannelKind::Telegram: return ReleaseMedium::Telegram;
    case ChannelKind::TwitterDM: return ReleaseMedium::TwitterDM;
    case ChannelKind::WhatsApp: return ReleaseMedium::WhatsApp;
  }
  return ReleaseMedium::Url;
}

std::string_view table_label(ReleaseMedium m) {
  switch (m) {
    case ReleaseMedium::Form: return "Forms";
    case ReleaseMedium::Url: return "URLs";
    default: return to_string(m);
  }
}

void validate(const HoneyWallet& w) {
  std::size_t count = 0;
  std::size_t pos = 0;
  const std::string_view p = w.key_phrase;
  while (pos <= p.size()) {
    const auto sp = p.find(' ', pos);
    const auto word = p.substr(pos, sp == std::string_view::npos ? std::string_view::npos : sp - pos);
    if (!is_honey_word(word)) {
      throw ValidationError(fmt::format("wallet {}: '{}' is not in the word list", w.wallet_id, word));
    }
    ++count;
    if (sp == std::string_view::npos) break;
    pos = sp + 1;
  }
  if (count != kPhraseWords) {
    throw ValidationError(fmt::format("wallet {}: phrase has {} words", w.wallet_id, count));
  }
  if (w.address != derive_honey_address(w.key_phrase)) {
    throw ValidationError(fmt::format("wallet {}: address does not match phrase", w.wallet_id));
  }
  if (!(w.funded_usd > 0)) throw ValidationError(fmt::format("wallet {}: funding must be positive", w.wallet_id));
}

std::vector<HoneyWallet> mint_honey_wallets(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const auto& words = honey_word_list();
  std::set<std::string> seen;
  std::vector<HoneyWallet> out;
  out.reserve(n);
  while (out.size() < n) {
    std::string phrase;
    for (std::size_t i = 0; i < kPhraseWords; ++i) {
      if (i) phrase.push_back(' ');
      phrase += words[rng.below(kWordListSize)];
    }
    auto addr = derive_honey_address(phrase);
    if (!seen.insert(addr).second) continue;
    HoneyWallet w;
    w.wallet_id = fmt::format("hw-{:03}", out.size());
    w.key_phrase = std::move(phrase);
    w.address = std::move(addr);
    out.push_back(std::move(w));
  }
  return out;
}

Amount BtcTx::fee() const {
  Amount in = 0;
  Amount outs = 0;
  for (const auto& l : inputs) in += l.value;
  for (const auto& l : outputs) outs += l.value;
  return in - outs;
}

void validate(const BtcTx& tx) {
  if (tx.txid.empty()) throw LedgerError("btc tx with empty txid");
  if (tx.inputs.empty() || tx.outputs.empty()) {
    throw LedgerError(fmt::format("tx {}: needs at least one input and one output", tx.txid));
  }
  for (const auto* legs : {&tx.inputs, &tx.outputs}) {
    for (const auto& l : *legs) {
      if (l.value < 0) throw LedgerError(fmt::format("tx {}: negative value for {}", tx.txid, l.address));
      if (l.address.empty()) throw LedgerError(fmt::format("tx {}: empty address", tx.txid));
    }
  }
  if (tx.fee() < 0) throw LedgerError(fmt::format("tx {}: outputs exceed inputs", tx.txid));
}

void validate(const EthTx& tx) {
  if (tx.txid.empty()) throw LedgerError("eth tx with empty txid");
  if (tx.value < 0) throw LedgerError(fmt::format("tx {}: negative value", tx.txid));
  if (tx.from.empty() || tx.to.empty()) throw LedgerError(fmt::format("tx {}: empty address", tx.txid));
}

std::vector<AddressSummary> summarize_addresses(std::span<const std::string> addresses,
                                                std::span<const BtcTx> ledger) {
  std::map<std::string, std::size_t> index;
  std::vector<AddressSummary> out;
  for (const auto& a : addresses) {
    if (index.emplace(a, out.size()).second) {
      AddressSummary s;
      s.address = a;
      out.push_back(std::move(s));
    }
  }
  std::vector<std::deque<Amount>> unspent(out.size());
  for (const auto& tx : ledger) validate(tx);
  for (auto t : time_order(ledger)) {
    const auto& tx = ledger[t];
    std::set<std::size_t> senders;
    std::set<std::size_t> receivers;
    for (const auto& in : tx.inputs) {
      auto it = index.find(in.address);
      if (it == index.end()) continue;
      auto& s = out[it->second];
      auto& q = unspent[it->second];
      Amount need = in.value;
      while (need > 0) {
        if (q.empty()) {
          throw LedgerError(fmt::format("tx {}: {} spends more than it holds", tx.txid, in.address));
        }
        const Amount take = std::min(need, q.front());
        q.front() -= take;
        need -= take;
        if (q.front() == 0) q.pop_front();
      }
      s.total_sent += in.value;
      senders.insert(it->second);
    }
    for (const auto& o : tx.outputs) {
      auto it = index.find(o.address);
      if (it == index.end()) continue;
      out[it->second].total_received += o.value;
      if (o.value > 0) unspent[it->second].push_back(o.value);
      receivers.insert(it->second);
    }
    for (auto i : senders) {
      ++out[i].n_sent;
      touch(out[i], tx.at);
    }
    for (auto i : receivers) {
      ++out[i].n_received;
      touch(out[i], tx.at);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].balance = std::accumulate(unspent[i].begin(), unspent[i].end(), Amount{0});
  }
  return out;
}

std::vector<AddressSummary> summarize_addresses(std::span<const std::string> addresses,
                                                std::span<const EthTx> ledger) {
  std::map<std::string, std::size_t> index;
  std::vector<AddressSummary> out;
  for (const auto& a : addresses) {
    if (index.emplace(a, out.size()).second) {
      AddressSummary s;
      s.address = a;
      out.push_back(std::move(s));
    }
  }
  for (const auto& tx : ledger) validate(tx);
  for (auto t : time_order(ledger)) {
    const auto& tx = ledger[t];
    if (auto it = index.find(tx.from); it != index.end()) {
      auto& s = out[it->second];
      ++s.n_sent;
      s.total_sent += tx.value;
      s.balance -= tx.value;
      touch(s, tx.at);
    }
    if (auto it = index.find(tx.to); it != index.end()) {
      auto& s = out[it->second];
      ++s.n_received;
      s.total_received += tx.value;
      s.balance += tx.value;
      touch(s, tx.at);
    }
    if (auto it = index.find(tx.from); it != index.end() && out[it->second].balance < 0) {
      throw LedgerError(fmt::format("tx {}: {} spends more than it holds", tx.txid, tx.from));
    }
  }
  return out;
}

SummaryTotals totals(std::span<const AddressSummary> rows) {
  SummaryTotals t;
  for (const auto& r : rows) {
    ++t.addresses;
    if (r.active()) ++t.active;
    t.n_received += r.n_received;
    t.n_sent += r.n_sent;
    t.total_received += r.total_received;
    t.total_sent += r.total_sent;
    if (r.balance != 0) ++t.nonzero_balances;
    t.balance += r.balance;
  }
  return t;
}

std::vector<AddressCluster> cospend_clusters(std::span<const BtcTx> ledger) {
  std::map<std::string, std::size_t> index;
  std::vector<std::string> names;
  auto id = [&](const std::string& a) {
    auto [it, fresh] = index.emplace(a, names.size());
    if (fresh) names.push_back(a);
    return it->second;
  };
  std::vector<std::vector<std::size_t>> groups;
  for (const auto& tx : ledger) {
    std::vector<std::size_t> ins;
    for (const auto& in : tx.inputs) ins.push_back(id(in.address));
    for (const auto& o : tx.outputs) id(o.address);
    groups.push_back(std::move(ins));
  }
  UnionFind uf(names.size());
  for (const auto& g : groups) {
    for (std::size_t i = 1; i < g.size(); ++i) uf.unite(g[0], g[i]);
  }
  std::map<std::size_t, std::vector<std::string>> comps;
  for (std::size_t i = 0; i < names.size(); ++i) comps[uf.find(i)].push_back(names[i]);
  std::vector<AddressCluster> out;
  for (auto& [_, members] : comps) {
    std::sort(members.begin(), members.end());
    out.push_back({members.front(), std::move(members)});
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.representative < b.representative; });
  return out;
}

const AddressCluster* cluster_containing(std::span<const AddressCluster> clusters,
                                         std::string_view address) {
  for (const auto& c : clusters) {
    if (std::binary_search(c.members.begin(), c.members.end(), address,
                           [](std::string_view a, std::string_view b) { return a < b; })) {
      return &c;
    }
  }
  return nullptr;
}

std::vector<ActivityPoint> activity_series(std::span<const std::string> addresses,
                                           std::span<const BtcTx> ledger, Duration bucket) {
  if (bucket <= 0) throw ValidationError("bucket must be positive");
  const std::set<std::string> watched(addresses.begin(), addresses.end());
  std::vector<std::tuple<Timestamp, Amount, Amount>> events;
  for (const auto& tx : ledger) {
    validate(tx);
    Amount rx = 0;
    Amount sx = 0;
    bool hit = false;
    for (const auto& in : tx.inputs) {
      if (watched.count(in.address)) {
        sx += in.value;
        hit = true;
      }
    }
    for (const auto& o : tx.outputs) {
      if (watched.count(o.address)) {
        rx += o.value;
        hit = true;
      }
    }
    if (hit) events.emplace_back(tx.at, rx, sx);
  }
  return bucketize(std::move(events), bucket);
}

std::vector<ActivityPoint> activity_series(std::span<const std::string> addresses,
                                           std::span<const EthTx> ledger, Duration bucket) {
  if (bucket <= 0) throw ValidationError("bucket must be positive");
  const std::set<std::string> watched(addresses.begin(), addresses.end());
  std::vector<std::tuple<Timestamp, Amount, Amount>> events;
  for (const auto& tx : ledger) {
    validate(tx);
    const bool out = watched.count(tx.from) > 0;
    const bool in = watched.count(tx.to) > 0;
    if (out || in) events.emplace_back(tx.at, in ? tx.value : 0, out ? tx.value : 0);
  }
  return bucketize(std::move(events), bucket);
}

Amount usd_to_wei(double usd, double usd_per_eth) {
  if (!(usd_per_eth > 0)) throw ConfigError("usd_per_eth must be positive");
  return static_cast<Amount>(std::llround(static_cast<long double>(usd) / usd_per_eth * 1e18L));
}

TheftReport detect_theft(std::span<const HoneyWallet> wallets, std::span<const EthTx> ledger,
                         const TheftConfig& config) {
  if (!(config.threshold > 0) || config.threshold > 1) {
    throw ConfigError("theft threshold must be in (0, 1]");
  }
  for (const auto& tx : ledger) validate(tx);
  const auto order = time_order(ledger);
  std::map<std::string, std::size_t> by_address;
  for (std::size_t i = 0; i < wallets.size(); ++i) {
    if (!by_address.emplace(wallets[i].address, i).second) {
      throw ValidationError("duplicate honey wallet address " + wallets[i].address);
    }
  }

  struct State {
    Amount balance = 0;
    std::vector<std::string> recipients;
    std::optional<TheftEvent> event;
  };
  std::vector<State> state(wallets.size());
  for (auto t : order) {
    const auto& tx = ledger[t];
    if (auto it = by_address.find(tx.to); it != by_address.end()) state[it->second].balance += tx.value;
    auto it = by_address.find(tx.from);
    if (it == by_address.end()) continue;
    auto& s = state[it->second];
    const auto& w = wallets[it->second];
    s.balance -= tx.value;
    if (s.balance < 0) throw LedgerError(fmt::format("tx {}: {} spends more than it holds", tx.txid, tx.from));
    if (s.event) continue;
    if (std::find(s.recipients.begin(), s.recipients.end(), tx.to) == s.recipients.end()) {
      s.recipients.push_back(tx.to);
    }
    // Integer comparison: balance < threshold * funded, with threshold as a
    // rational over 10^6 to keep it exact for the usual 0.1.
    const Amount funded = usd_to_wei(w.funded_usd, config.usd_per_eth);
    const auto ppm = static_cast<Amount>(std::llround(config.threshold * 1e6));
    if (s.balance * 1000000 < funded * ppm) {
      auto recips = s.recipients;
      std::sort(recips.begin(), recips.end());
      s.event = TheftEvent{w.wallet_id, tx.txid, std::move(recips), tx.at};
    }
  }

  TheftReport report;
  std::map<ReleaseMedium, TheftRow> rows;
  std::set<std::string> recipients;
  TheftRow total{"All", 0, 0};
  for (std::size_t i = 0; i < wallets.size(); ++i) {
    const auto& w = wallets[i];
    if (w.released_on) {
      auto& row = rows[*w.released_on];
      row.label = std::string(table_label(*w.released_on));
      ++row.sent;
      ++total.sent;
      if (state[i].event) {
        ++row.stolen;
        ++total.stolen;
      }
    }
    if (state[i].event) {
      recipients.insert(state[i].event->recipients.begin(), state[i].event->recipients.end());
      report.events.push_back(*state[i].event);
    }
  }
  for (auto& [_, r] : rows) report.table.push_back(std::move(r));
  report.table.push_back(total);
  report.distinct_recipients.assign(recipients.begin(), recipients.end());
  return report;
}

void to_json(nlohmann::json& j, ReleaseMedium m) { j = std::string(to_string(m)); }
void from_json(const nlohmann::json& j, ReleaseMedium& m) { m = parse_release_medium(j.get<std::string>()); }

void to_json(nlohmann::json& j, const HoneyWallet& w) {
  j = {{"wallet_id", w.wallet_id},
       {"key_phrase", w.key_phrase},
       {"address", w.address},
       {"funded_usd", w.funded_usd}};
  j["released_on"] = w.released_on ? nlohmann::json(*w.released_on) : nlohmann::json(nullptr);
  j["released_at"] = w.released_at ? nlohmann::json(to_iso8601(*w.released_at)) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, HoneyWallet& w) {
  j.at("wallet_id").get_to(w.wallet_id);
  j.at("key_phrase").get_to(w.key_phrase);
  j.at("address").get_to(w.address);
  w.funded_usd = j.value("funded_usd", 1.26);
  w.released_on.reset();
  w.released_at.reset();
  if (j.contains("released_on") && !j["released_on"].is_null()) w.released_on = j["released_on"].get<ReleaseMedium>();
  if (j.contains("released_at") && !j["released_at"].is_null()) {
    w.released_at = parse_iso8601(j["released_at"].get<std::string>());
  }
  validate(w);
}

void to_json(nlohmann::json& j, const BtcTx& t) {
  auto legs = [](const std::vector<TxLeg>& v) {
    auto a = nlohmann::json::array();
    for (const auto& l : v) a.push_back({{"address", l.address}, {"value", sat_json(l.value)}});
    return a;
  };
  j = {{"txid", t.txid}, {"inputs", legs(t.inputs)}, {"outputs", legs(t.outputs)}, {"at", to_iso8601(t.at)}};
}

void from_json(const nlohmann::json& j, BtcTx& t) {
  auto legs = [](const nlohmann::json& a) {
    std::vector<TxLeg> v;
    for (const auto& l : a) v.push_back({l.at("address").get<std::string>(), json_amount(l.at("value"))});
    return v;
  };
  j.at("txid").get_to(t.txid);
  t.inputs = legs(j.at("inputs"));
  t.outputs = legs(j.at("outputs"));
  t.at = parse_iso8601(j.at("at").get<std::string>());
  validate(t);
}

void to_json(nlohmann::json& j, const EthTx& t) {
  j = {{"txid", t.txid},
       {"from", t.from},
       {"to", t.to},
       {"value", amount_to_string(t.value)},
       {"at", to_iso8601(t.at)}};
}

void from_json(const nlohmann::json& j, EthTx& t) {
  j.at("txid").get_to(t.txid);
  j.at("from").get_to(t.from);
  j.at("to").get_to(t.to);
  t.value = json_amount(j.at("value"));
  t.at = parse_iso8601(j.at("at").get<std::string>());
  validate(t);
}

void to_json(nlohmann::json& j, const TheftEvent& e) {
  j = {{"wallet_id", e.wallet_id},
       {"drain_txid", e.drain_txid},
       {"recipients", e.recipients},
       {"at", to_iso8601(e.at)}};
}

void from_json(const nlohmann::json& j, TheftEvent& e) {
  j.at("wallet_id").get_to(e.wallet_id);
  j.at("drain_txid").get_to(e.drain_txid);
  j.at("recipients").get_to(e.recipients);
  e.at = parse_iso8601(j.at("at").get<std::string>());
}

}  // namespace conman
