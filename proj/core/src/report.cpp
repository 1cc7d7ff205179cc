#include "conman/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "conman/error.hpp"
#include "conman/normalize.hpp"

namespace conman {
namespace {

using Row = std::vector<std::string>;

std::string n2s(std::size_t v) { return std::to_string(v); }

std::string_view channel_label(ChannelKind k) {
  switch (k) {
    case ChannelKind::Email: return "Email";
    case ChannelKind::Form: return "Form";
    case ChannelKind::Instagram: return "Instagram";
    case ChannelKind::Telegram: return "Telegram";
    case ChannelKind::TwitterDM: return "Twitter DM";
    case ChannelKind::WhatsApp: return "WhatsApp";
  }
  return "?";
}

std::string_view mode_label(InteractionKind k) {
  switch (k) {
    case InteractionKind::Reply: return "Replies";
    case InteractionKind::Retweet: return "Retweets";
    case InteractionKind::QuotedTweet: return "Quoted Tweets";
    case InteractionKind::Like: return "Likes";
    case InteractionKind::Follow: return "Follow";
  }
  return "?";
}

std::string_view source_label(Source s) {
  switch (s) {
    case Source::iPhone: return "Twitter for iPhone";
    case Source::Android: return "Twitter for Android";
    case Source::WebApp: return "Twitter for Web App";
    case Source::Deck: return "Twitter Deck";
    case Source::iPad: return "Twitter for iPad";
  }
  return "?";
}

std::string btc(Amount a) { return format_units(a, 8); }

// Latest probe per channel, later input winning ties.
std::vector<const ProbeResult*> latest_probes(std::span<const ProbeResult> probes) {
  std::map<std::pair<ChannelKind, std::string>, const ProbeResult*> latest;
  for (const auto& p : probes) {
    auto& slot = latest[{p.channel.kind, p.channel.identifier}];
    if (!slot || p.probed_at >= slot->probed_at) slot = &p;
  }
  std::vector<const ProbeResult*> out;
  for (const auto& [_, p] : latest) out.push_back(p);
  return out;
}

std::map<AccountId, const ScamAccount*> index_accounts(std::span<const ScamAccount> accounts) {
  std::map<AccountId, const ScamAccount*> m;
  for (const auto& a : accounts) m.emplace(a.account_id, &a);
  return m;
}

std::optional<StatusKind> terminal_kind(const ScamAccount& a) {
  auto t = terminal_status(a.status_history);
  if (!t) return std::nullopt;
  return t->status;
}

CsvTable interactions_table(const ReportInputs& in) {
  CsvTable t{{"Modes of Interaction", "Total #", "Distinct #", "Distinct TweetID #",
              "Suspended Account #", "Inactive Account #", "All Account #"},
             {}};
  if (in.interactions.empty()) return t;
  const auto accounts = index_accounts(in.accounts);
  struct Acc {
    std::size_t total = 0;
    std::set<std::string> texts;
    std::set<TweetId> tweets;
    std::set<AccountId> actors;
  };
  std::map<InteractionKind, Acc> per;
  Acc all;
  for (const auto& x : in.interactions) {
    auto& a = per[x.kind];
    ++a.total;
    ++all.total;
    if (x.text) a.texts.insert(*x.text);
    if (x.target_tweet) {
      a.tweets.insert(*x.target_tweet);
      all.tweets.insert(*x.target_tweet);
    }
    a.actors.insert(x.actor);
    all.actors.insert(x.actor);
  }
  auto status_counts = [&](const std::set<AccountId>& actors) {
    std::size_t suspended = 0;
    std::size_t inactive = 0;
    for (const auto& id : actors) {
      const auto k = terminal_kind(*accounts.at(id));
      if (k) ++inactive;
      if (k == StatusKind::Suspended) ++suspended;
    }
    return std::pair{suspended, inactive};
  };
  std::size_t distinct_sum = 0;
  for (auto k : kAllInteractionKinds) {
    const auto& a = per[k];
    const std::size_t distinct = carries_text(k) ? a.texts.size() : a.total;
    distinct_sum += distinct;
    const auto [s, i] = status_counts(a.actors);
    t.rows.push_back({std::string(mode_label(k)), n2s(a.total), n2s(distinct), n2s(a.tweets.size()),
                      n2s(s), n2s(i), n2s(a.actors.size())});
  }
  const auto [s, i] = status_counts(all.actors);
  t.rows.push_back({"Total Interact", n2s(all.total), n2s(distinct_sum), n2s(all.tweets.size()),
                    n2s(s), n2s(i), n2s(all.actors.size())});
  return t;
}

CsvTable sources_table(const ReportInputs& in) {
  CsvTable t{{"Source", "TweetID Interact #", "TweetID Interact %", "Scammers #"}, {}};
  if (in.interactions.empty()) return t;
  std::map<Source, std::set<TweetId>> tweets;
  std::map<Source, std::set<AccountId>> actors;
  std::set<TweetId> all_tweets;
  std::set<AccountId> all_actors;
  for (const auto& x : in.interactions) {
    if (x.target_tweet) {
      tweets[x.source].insert(*x.target_tweet);
      all_tweets.insert(*x.target_tweet);
    }
    actors[x.source].insert(x.actor);
    all_actors.insert(x.actor);
  }
  for (auto s : kAllSources) {
    t.rows.push_back({std::string(source_label(s)), n2s(tweets[s].size()),
                      pct_string(tweets[s].size(), all_tweets.size()), n2s(actors[s].size())});
  }
  t.rows.push_back({"All", n2s(all_tweets.size()), pct_string(all_tweets.size(), all_tweets.size()),
                    n2s(all_actors.size())});
  return t;
}

CsvTable profile_table(const ReportInputs& in) {
  CsvTable t{{"Cluster Label", "Scammer #", "Scammer %", "Followers #", "Followers %", "Replies #",
              "Replies %", "Quoted Tweets #", "Quoted Tweets %", "Suspended #", "Suspended %"},
             {}};
  std::size_t scammers = 0, followers = 0, replies = 0, quoted = 0;
  for (const auto& r : in.profile_clusters) {
    scammers += r.scammers;
    followers += r.followers;
    replies += r.replies;
    quoted += r.quoted;
  }
  for (const auto& r : in.profile_clusters) {
    t.rows.push_back({r.name, n2s(r.scammers), pct_string(r.scammers, scammers), n2s(r.followers),
                      pct_string(r.followers, followers), n2s(r.replies), pct_string(r.replies, replies),
                      n2s(r.quoted), pct_string(r.quoted, quoted), n2s(r.suspended),
                      pct_string(r.suspended, r.scammers)});
  }
  return t;
}

CsvTable channels_table(const ReportInputs& in) {
  CsvTable t{{"Channels", "Honey Profiles", "Total"}, {}};
  if (in.honey_channels.empty() && in.all_channels.empty()) return t;
  for (const auto& r : channel_distribution(in.honey_channels, in.all_channels)) {
    std::string label = r.label;
    if (label != "All") {
      const auto k = parse_channel_kind(label);
      label = k == ChannelKind::Form ? "Forms" : std::string(channel_label(k));
    }
    t.rows.push_back({label, n2s(r.honey_profiles), n2s(r.total)});
  }
  return t;
}

CsvTable wallets_table(const ReportInputs& in) {
  CsvTable t{{"Wallet Names"}, {}};
  for (auto k : kAllChannelKinds) t.header.push_back(fmt::format("Dist. {}", channel_label(k)));
  t.header.push_back("Dist. All");
  for (const auto& r : wallet_breakdown(in.honey_channels)) {
    Row row{r.label};
    for (auto v : r.per_kind) row.push_back(n2s(v));
    row.push_back(n2s(r.all));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable key_phrase_table(const ReportInputs& in) {
  CsvTable t{{"Media", "Key Phrases Sent", "Key Phrases Stolen", "Stolen %"}, {}};
  if (!in.theft || in.theft->table.size() <= 1) return t;
  for (const auto& r : in.theft->table) {
    t.rows.push_back({r.label, n2s(r.sent), n2s(r.stolen), pct_string(r.stolen, r.sent)});
  }
  return t;
}

CsvTable matrix_table(const ReportInputs& in) {
  CsvTable t{{"Channels"}, {}};
  for (auto k : kAllChannelKinds) t.header.emplace_back(channel_label(k));
  if (in.clusters.empty()) return t;
  const auto m = shared_campaign_matrix(in.clusters);
  for (auto k : kAllChannelKinds) {
    Row row{std::string(channel_label(k))};
    for (auto v : m[static_cast<std::size_t>(k)]) row.push_back(n2s(v));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable cluster_table(const ReportInputs& in) {
  CsvTable t{{"Scam Channels", "Total Clusters", "Distinct Replies TwtID", "Distinct Quoted TwtID",
              "Distinct TweetID", "All Text", "Total Scammers", "Min Clust. Size", "Median Clust. Size",
              "90Pct Clust. Size", "Max Clust. Size", "Median Seen Diff"},
             {}};
  for (const auto& r : cluster_stats(in.clusters)) {
    std::string label = r.label;
    if (label != "Distinct (All)") label = std::string(channel_label(parse_channel_kind(label)));
    t.rows.push_back({label, n2s(r.total_clusters), n2s(r.distinct_reply_tweet_ids),
                      n2s(r.distinct_quoted_tweet_ids), n2s(r.distinct_tweet_ids), n2s(r.all_text_count),
                      n2s(r.total_scammers), n2s(r.min_size), n2s(r.median_size), n2s(r.p90_size),
                      n2s(r.max_size), std::to_string(r.median_seen_diff_days)});
  }
  return t;
}

CsvTable efficacy_table(const ReportInputs& in) {
  CsvTable t{{"Scam Media", "Total #", "Blocked #", "Blocked %"}, {}};
  for (const auto& r : blocking_table(in.probes, in.accounts)) {
    t.rows.push_back({r.platform, n2s(r.total), n2s(r.blocked), pct_string(r.blocked, r.total)});
  }
  return t;
}

std::map<AccountId, Timestamp> first_interactions(std::span<const Interaction> interactions) {
  std::map<AccountId, Timestamp> first;
  for (const auto& x : interactions) {
    auto [it, fresh] = first.emplace(x.actor, x.at);
    if (!fresh) it->second = std::min(it->second, x.at);
  }
  return first;
}

CsvTable lifespan_table(const ReportInputs& in) {
  CsvTable t{{"Day", "Suspended #", "Deactivated #", "Accounts #", "Suspended %", "Deactivated %"}, {}};
  if (in.accounts.empty()) return t;
  for (const auto& p : lifespan_curves(in.accounts, first_interactions(in.interactions), in.lifespan_days)) {
    t.rows.push_back({std::to_string(p.day), n2s(p.suspended), n2s(p.deactivated), n2s(p.accounts),
                      pct_string(p.suspended, p.accounts), pct_string(p.deactivated, p.accounts)});
  }
  return t;
}

CsvTable forms_table(const ReportInputs& in) {
  CsvTable t{{"Provider", "Wallet", "Total #", "Blocked #", "Blocked %"}, {}};
  for (const auto& r : form_blocking_breakdown(in.probes)) {
    t.rows.push_back({r.provider, r.wallet, n2s(r.total), n2s(r.blocked), pct_string(r.blocked, r.total)});
  }
  return t;
}

CsvTable groups_table(const ReportInputs& in) {
  CsvTable t{{"Group", "Clusters #", "Accounts #", "Accounts %", "Interactions #", "Interactions %"}, {}};
  if (in.groups.empty()) return t;
  std::set<AccountId> accounts;
  std::size_t clusters = 0;
  for (const auto& g : in.groups) {
    accounts.insert(g.accounts.begin(), g.accounts.end());
    clusters += g.cluster_ids.size();
  }
  const std::size_t total_ix = in.interactions.size();
  for (const auto& g : in.groups) {
    t.rows.push_back({g.group_id, n2s(g.cluster_ids.size()), n2s(g.accounts.size()),
                      pct_string(g.accounts.size(), accounts.size()), n2s(g.interaction_count),
                      pct_string(g.interaction_count, total_ix)});
  }
  t.rows.push_back({"All", n2s(clusters), n2s(accounts.size()), pct_string(accounts.size(), accounts.size()),
                    n2s(total_ix), pct_string(total_ix, total_ix)});
  return t;
}

CsvTable btc_table(const ReportInputs& in) {
  CsvTable t{{"Address", "Received Txs", "Sent Txs", "Received BTC", "Sent BTC", "Balance BTC",
              "First Activity", "Last Activity"},
             {}};
  if (in.btc_addresses.empty()) return t;
  auto ts = [](const std::optional<Timestamp>& v) { return v ? to_iso8601(*v) : std::string(); };
  for (const auto& s : in.btc_addresses) {
    t.rows.push_back({s.address, n2s(s.n_received), n2s(s.n_sent), btc(s.total_received), btc(s.total_sent),
                      btc(s.balance), ts(s.first_activity), ts(s.last_activity)});
  }
  const auto tot = totals(in.btc_addresses);
  t.rows.push_back({"Total", n2s(tot.n_received), n2s(tot.n_sent), btc(tot.total_received),
                    btc(tot.total_sent), btc(tot.balance), "", ""});
  return t;
}

CsvTable btc_series_table(const ReportInputs& in) {
  CsvTable t{{"Bucket Start", "Received BTC", "Sent BTC"}, {}};
  for (const auto& p : in.btc_series) {
    t.rows.push_back({to_iso8601(p.bucket_start), btc(p.received), btc(p.sent)});
  }
  return t;
}

CsvTable engagement_table(const ReportInputs& in) {
  CsvTable t{{"Metric", "Value"}, {}};
  if (!in.engagement) return t;
  const auto& e = *in.engagement;
  auto usd = [](const std::optional<double>& v) { return v ? fmt::format("{:.2f}", *v) : std::string(); };
  t.rows = {{"Contacted", n2s(e.contacted)},
            {"Responded", n2s(e.responded)},
            {"Key phrase requests", n2s(e.key_phrase)},
            {"Fee via PayPal", n2s(e.fee_paypal)},
            {"Fee via crypto", n2s(e.fee_crypto)},
            {"Fee via gift card", n2s(e.fee_gift)},
            {"Price quotes", n2s(e.prices.count)},
            {"Min price USD", usd(e.prices.min)},
            {"Median price USD", usd(e.prices.median)},
            {"Max price USD", usd(e.prices.max)}};
  return t;
}

CsvTable verdicts_table(const ReportInputs& in) {
  CsvTable t{{"Verdict", "Accounts #", "Accounts %"}, {}};
  if (in.verdicts.empty()) return t;
  std::map<VerdictKind, std::size_t> counts;
  for (const auto& v : in.verdicts) ++counts[v.verdict];
  for (auto k : {VerdictKind::Scam, VerdictKind::Benign, VerdictKind::Official, VerdictKind::Verified,
                 VerdictKind::Excluded}) {
    t.rows.push_back({std::string(to_string(k)), n2s(counts[k]), pct_string(counts[k], in.verdicts.size())});
  }
  t.rows.push_back({"All", n2s(in.verdicts.size()), pct_string(in.verdicts.size(), in.verdicts.size())});
  return t;
}

// ---- audit ----------------------------------------------------------------

struct Den {
  enum class Kind { SameRow, LabeledRow, ColumnSum } kind;
  std::string column;
  std::string label;  // LabeledRow only
};

struct PctRule {
  std::string table;
  std::string pct;
  std::string num;
  Den den;
};

struct SumRule {
  std::string table;
  std::string total_label;
  std::vector<std::string> columns;
  std::vector<std::string> excluded;
};

const std::vector<PctRule>& pct_rules() {
  using K = Den::Kind;
  static const std::vector<PctRule> rules{
      {"table2_sources", "TweetID Interact %", "TweetID Interact #", {K::LabeledRow, "TweetID Interact #", "All"}},
      {"table3_profile_clusters", "Scammer %", "Scammer #", {K::ColumnSum, "Scammer #", ""}},
      {"table3_profile_clusters", "Followers %", "Followers #", {K::ColumnSum, "Followers #", ""}},
      {"table3_profile_clusters", "Replies %", "Replies #", {K::ColumnSum, "Replies #", ""}},
      {"table3_profile_clusters", "Quoted Tweets %", "Quoted Tweets #", {K::ColumnSum, "Quoted Tweets #", ""}},
      {"table3_profile_clusters", "Suspended %", "Suspended #", {K::SameRow, "Scammer #", ""}},
      {"table6_key_phrases", "Stolen %", "Key Phrases Stolen", {K::SameRow, "Key Phrases Sent", ""}},
      {"efficacy", "Blocked %", "Blocked #", {K::SameRow, "Total #", ""}},
      {"lifespan", "Suspended %", "Suspended #", {K::SameRow, "Accounts #", ""}},
      {"lifespan", "Deactivated %", "Deactivated #", {K::SameRow, "Accounts #", ""}},
      {"forms", "Blocked %", "Blocked #", {K::SameRow, "Total #", ""}},
      {"groups", "Accounts %", "Accounts #", {K::LabeledRow, "Accounts #", "All"}},
      {"groups", "Interactions %", "Interactions #", {K::LabeledRow, "Interactions #", "All"}},
      {"verdicts", "Accounts %", "Accounts #", {K::LabeledRow, "Accounts #", "All"}},
  };
  return rules;
}

const std::vector<SumRule>& sum_rules() {
  static const std::vector<SumRule> rules{
      {"table1_interactions", "Total Interact", {"Total #", "Distinct #"}, {}},
      {"table4_channels", "All", {"Honey Profiles", "Total"}, {}},
      {"table5_wallets",
       "Total",
       {"Dist. Email", "Dist. Form", "Dist. Instagram", "Dist. Telegram", "Dist. Twitter DM", "Dist. WhatsApp",
        "Dist. All"},
       {}},
      {"table6_key_phrases", "All", {"Key Phrases Sent", "Key Phrases Stolen"}, {}},
      {"table8_clusters", "Distinct (All)", {"Total Clusters"}, {}},
      {"efficacy", "All", {"Total #", "Blocked #"}, {"Twitter"}},
      {"groups", "All", {"Clusters #"}, {}},
      {"btc_addresses", "Total", {"Received Txs", "Sent Txs", "Received BTC", "Sent BTC", "Balance BTC"}, {}},
      {"verdicts", "All", {"Accounts #"}, {}},
  };
  return rules;
}

std::optional<std::size_t> column_index(const CsvTable& t, const std::string& name) {
  auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - t.header.begin());
}

// Integer or fixed-point decimal; the point is dropped, so only compare cells
// that share a scale.
std::optional<Amount> cell_int(const std::string& s) {
  std::string digits;
  for (char c : s) {
    if (c != '.') digits.push_back(c);
  }
  if (digits.empty()) return std::nullopt;
  try {
    return parse_amount(digits);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void check_table(const NamedTable& nt, AuditResult& res) {
  const auto& t = nt.table;
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) {
      res.problems.push_back(fmt::format("{}: row '{}' has {} cells, header has {}", nt.name,
                                         row.empty() ? "" : row[0], row.size(), t.header.size()));
      return;
    }
  }
  for (const auto& rule : pct_rules()) {
    if (rule.table != nt.name || t.rows.empty()) continue;
    const auto pc = column_index(t, rule.pct);
    const auto nc = column_index(t, rule.num);
    const auto dc = column_index(t, rule.den.column);
    if (!pc || !nc || !dc) {
      res.problems.push_back(fmt::format("{}: missing column for '{}'", nt.name, rule.pct));
      continue;
    }
    std::optional<Amount> fixed_den;
    if (rule.den.kind == Den::Kind::ColumnSum) {
      Amount sum = 0;
      for (const auto& row : t.rows) sum += cell_int(row[*dc]).value_or(0);
      fixed_den = sum;
    } else if (rule.den.kind == Den::Kind::LabeledRow) {
      auto it = std::find_if(t.rows.begin(), t.rows.end(), [&](const Row& r) { return r[0] == rule.den.label; });
      if (it == t.rows.end()) {
        res.problems.push_back(fmt::format("{}: no '{}' row", nt.name, rule.den.label));
        continue;
      }
      fixed_den = cell_int((*it)[*dc]);
    }
    for (const auto& row : t.rows) {
      ++res.checked;
      const auto num = cell_int(row[*nc]);
      const auto den = fixed_den ? fixed_den : cell_int(row[*dc]);
      if (!num || !den || *num < 0 || *den < 0) {
        res.problems.push_back(fmt::format("{}: row '{}' has non-integer counts for '{}'", nt.name, row[0], rule.pct));
        continue;
      }
      const auto want = pct_string(static_cast<std::uint64_t>(*num), static_cast<std::uint64_t>(*den));
      if (row[*pc] != want) {
        res.problems.push_back(fmt::format("{}: row '{}' column '{}' is {}, counts give {}", nt.name, row[0],
                                           rule.pct, row[*pc], want));
      }
    }
  }
  for (const auto& rule : sum_rules()) {
    if (rule.table != nt.name || t.rows.empty()) continue;
    auto total = std::find_if(t.rows.begin(), t.rows.end(), [&](const Row& r) { return r[0] == rule.total_label; });
    if (total == t.rows.end()) {
      res.problems.push_back(fmt::format("{}: no '{}' row", nt.name, rule.total_label));
      continue;
    }
    for (const auto& col : rule.columns) {
      const auto c = column_index(t, col);
      if (!c) {
        res.problems.push_back(fmt::format("{}: missing column '{}'", nt.name, col));
        continue;
      }
      ++res.checked;
      Amount sum = 0;
      for (const auto& row : t.rows) {
        if (row[0] == rule.total_label) continue;
        if (std::find(rule.excluded.begin(), rule.excluded.end(), row[0]) != rule.excluded.end()) continue;
        sum += cell_int(row[*c]).value_or(0);
      }
      if (cell_int((*total)[*c]) != sum) {
        res.problems.push_back(fmt::format("{}: '{}' {} is {}, rows sum to {}", nt.name, rule.total_label, col,
                                           (*total)[*c], amount_to_string(sum)));
      }
    }
  }
}

// Markdown cells escape "|" and "\" with a leading backslash.
std::string md_escape(std::string_view cell) {
  std::string s;
  for (char c : cell) {
    if (c == '|' || c == '\\') s += '\\';
    s += c;
  }
  return s;
}

std::vector<std::string> split_md_row(std::string_view line) {
  std::vector<std::string> cells;
  line = trim(line);
  if (!line.empty() && line.front() == '|') line.remove_prefix(1);
  std::string cell;
  bool escaped = false;
  for (char c : line) {
    if (escaped) {
      cell += c;
      escaped = false;
    } else if (c == '\\') {
      escaped = true;
    } else if (c == '|') {
      cells.emplace_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (!trim(cell).empty() || cells.empty()) cells.emplace_back(trim(cell));
  return cells;
}

}  // namespace

std::string pct_string(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return "0.00";
  const unsigned __int128 n = num;
  const auto hundredths = static_cast<std::uint64_t>((n * 20000 + den) / (2 * static_cast<unsigned __int128>(den)));
  return fmt::format("{}.{:02}", hundredths / 100, hundredths % 100);
}

double pct_value(std::uint64_t num, std::uint64_t den) { return std::stod(pct_string(num, den)); }

double ratio_pct(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

std::string form_provider(std::string_view identifier) {
  const auto url = parse_url(identifier);
  if (!url) return "Other";
  if (host_matches(url->host, "forms.gle") || host_matches(url->host, "docs.google.com")) return "Google Forms";
  if (host_matches(url->host, "jotform.com")) return "JotForm";
  return "Other";
}

std::vector<EfficacyRow> blocking_table(std::span<const ProbeResult> probes,
                                        std::span<const ScamAccount> accounts) {
  std::map<std::string, EfficacyRow> rows;
  EfficacyRow all{"All", 0, 0, 0};
  for (const auto* p : latest_probes(probes)) {
    std::string label = p->channel.kind == ChannelKind::Form ? "Forms" : std::string(channel_label(p->channel.kind));
    auto& r = rows[label];
    r.platform = label;
    ++r.total;
    ++all.total;
    if (p->outcome == ProbeOutcome::Blocked) {
      ++r.blocked;
      ++all.blocked;
    }
  }
  if (!accounts.empty()) {
    EfficacyRow tw{"Twitter", accounts.size(), 0, 0};
    for (const auto& a : accounts) {
      if (terminal_kind(a) == StatusKind::Suspended) ++tw.blocked;
    }
    rows["Twitter"] = tw;
  }
  std::vector<EfficacyRow> out;
  for (auto& [_, r] : rows) out.push_back(r);  // map order is alphabetical
  if (!out.empty()) out.push_back(all);
  for (auto& r : out) r.blocked_pct = pct_value(r.blocked, r.total);
  return out;
}

std::vector<LifespanPoint> lifespan_curves(std::span<const ScamAccount> accounts,
                                           const std::map<AccountId, Timestamp>& first_interaction,
                                           int min_days) {
  if (accounts.empty()) return {};
  std::vector<std::pair<int, StatusKind>> terminal;
  int last_day = std::max(min_days, 0);
  for (const auto& a : accounts) {
    auto it = first_interaction.find(a.account_id);
    if (it == first_interaction.end()) {
      throw ReportError(fmt::format("account {} has no interaction to start its lifespan", a.account_id));
    }
    const auto t = terminal_status(a.status_history);
    if (!t) continue;
    const auto day = whole_days(it->second, t->observed_at);
    if (day < 0) {
      throw ReportError(fmt::format("account {} became {} before its first interaction", a.account_id,
                                    to_string(t->status)));
    }
    terminal.emplace_back(static_cast<int>(day), t->status);
    last_day = std::max(last_day, static_cast<int>(day));
  }
  std::vector<std::size_t> susp(static_cast<std::size_t>(last_day) + 1, 0);
  std::vector<std::size_t> deact(susp.size(), 0);
  for (const auto& [d, s] : terminal) {
    (s == StatusKind::Suspended ? susp : deact)[static_cast<std::size_t>(d)]++;
  }
  std::vector<LifespanPoint> out;
  std::size_t cs = 0;
  std::size_t cd = 0;
  for (int d = 0; d <= last_day; ++d) {
    cs += susp[static_cast<std::size_t>(d)];
    cd += deact[static_cast<std::size_t>(d)];
    out.push_back({d, cs, cd, accounts.size(), pct_value(cs, accounts.size()), pct_value(cd, accounts.size())});
  }
  return out;
}

std::vector<FormBlockingRow> form_blocking_breakdown(std::span<const ProbeResult> probes) {
  // provider -> wallet index (10 = unattributed) -> row
  std::map<std::string, std::map<int, FormBlockingRow>> rows;
  for (const auto* p : latest_probes(probes)) {
    if (p->channel.kind != ChannelKind::Form) continue;
    const auto provider = form_provider(p->channel.identifier);
    const auto& w = p->channel.wallet_attribution;
    auto& r = rows[provider][w ? static_cast<int>(*w) : 10];
    r.provider = provider;
    r.wallet = w ? std::string(to_string(*w)) : "Unattributed";
    ++r.total;
    if (p->outcome == ProbeOutcome::Blocked) ++r.blocked;
  }
  std::vector<FormBlockingRow> out;
  for (auto& [provider, by_wallet] : rows) {
    FormBlockingRow all{provider, "All", 0, 0};
    for (auto& [_, r] : by_wallet) {
      all.total += r.total;
      all.blocked += r.blocked;
      out.push_back(r);
    }
    out.push_back(all);
  }
  return out;
}

void check_consistency(const ReportInputs& in) {
  const auto accounts = index_accounts(in.accounts);
  std::set<InteractionId> ix;
  for (const auto& x : in.interactions) {
    if (!accounts.count(x.actor)) {
      throw ReportError(fmt::format("interaction {} references unknown account {}", x.interaction_id, x.actor));
    }
    ix.insert(x.interaction_id);
  }
  for (const auto* list : {&in.honey_channels, &in.all_channels}) {
    for (const auto& c : *list) {
      for (const auto& id : c.observed_in) {
        if (!ix.count(id)) {
          throw ReportError(fmt::format("channel {} references unknown interaction {}", c.identifier, id));
        }
      }
    }
  }
  for (const auto& c : in.clusters) {
    for (const auto& m : c.members) {
      if (!accounts.count(m)) {
        throw ReportError(fmt::format("cluster {} references unknown account {}", c.cluster_id, m));
      }
    }
  }
  for (const auto& g : in.groups) {
    for (const auto& m : g.accounts) {
      if (!accounts.count(m)) {
        throw ReportError(fmt::format("group {} references unknown account {}", g.group_id, m));
      }
    }
  }
}

std::vector<NamedTable> build_tables(const ReportInputs& in) {
  check_consistency(in);
  return {
      {"table1_interactions", interactions_table(in)},
      {"table2_sources", sources_table(in)},
      {"table3_profile_clusters", profile_table(in)},
      {"table4_channels", channels_table(in)},
      {"table5_wallets", wallets_table(in)},
      {"table6_key_phrases", key_phrase_table(in)},
      {"table7_matrix", matrix_table(in)},
      {"table8_clusters", cluster_table(in)},
      {"efficacy", efficacy_table(in)},
      {"lifespan", lifespan_table(in)},
      {"forms", forms_table(in)},
      {"groups", groups_table(in)},
      {"btc_addresses", btc_table(in)},
      {"btc_series", btc_series_table(in)},
      {"engagement", engagement_table(in)},
      {"verdicts", verdicts_table(in)},
  };
}

std::string render_summary(const ReportInputs& in, std::span<const NamedTable> tables) {
  auto find = [&](std::string_view name) -> const CsvTable& {
    for (const auto& t : tables) {
      if (t.name == name) return t.table;
    }
    throw ReportError(fmt::format("summary needs table {}", name));
  };
  auto row = [](const CsvTable& t, std::string_view label) -> const Row* {
    for (const auto& r : t.rows) {
      if (r[0] == label) return &r;
    }
    return nullptr;
  };
  std::string out = "# Report summary\n\n";
  const std::size_t n = in.accounts.size();
  std::size_t suspended = 0;
  std::size_t deactivated = 0;
  for (const auto& a : in.accounts) {
    const auto k = terminal_kind(a);
    if (k == StatusKind::Suspended) ++suspended;
    if (k == StatusKind::NotFound) ++deactivated;
  }
  out += fmt::format("- Scam accounts: {}\n", n);
  out += fmt::format("- Suspended: {} ({}%)\n", suspended, pct_string(suspended, n));
  out += fmt::format("- Deleted or deactivated: {} ({}%)\n", deactivated, pct_string(deactivated, n));
  out += fmt::format("- Inactive: {} ({}%)\n", suspended + deactivated, pct_string(suspended + deactivated, n));
  if (const auto* r = row(find("table1_interactions"), "Total Interact")) {
    out += fmt::format("- Interactions: {} ({} distinct) on {} honey tweets\n", (*r)[1], (*r)[2], (*r)[3]);
  }
  if (const auto* r = row(find("table4_channels"), "All")) {
    out += fmt::format("- Distinct contact channels: {}\n", (*r)[2]);
  }
  if (const auto* r = row(find("table8_clusters"), "Distinct (All)")) {
    out += fmt::format("- Channel clusters: {} covering {} accounts\n", (*r)[1], (*r)[6]);
  }
  if (!in.groups.empty()) {
    const auto& g = in.groups.front();
    out += fmt::format("- Campaign groups: {}; largest {} has {} accounts and {} of {} interactions ({}%)\n",
                       in.groups.size(), g.group_id, g.accounts.size(), g.interaction_count,
                       in.interactions.size(), pct_string(g.interaction_count, in.interactions.size()));
  }
  if (const auto* r = row(find("efficacy"), "All")) {
    out += fmt::format("- Channels blocked: {} of {} ({}%)\n", (*r)[2], (*r)[1], (*r)[3]);
  }
  if (in.theft) {
    const auto& t = in.theft->table.back();
    out += fmt::format("- Key phrases stolen: {} of {} ({}%), to {} distinct addresses\n", t.stolen, t.sent,
                       pct_string(t.stolen, t.sent), in.theft->distinct_recipients.size());
  }
  if (!in.btc_addresses.empty()) {
    const auto t = totals(in.btc_addresses);
    out += fmt::format("- BTC addresses: {} of {} active; received {} BTC in {} txs, sent {} BTC in {} txs\n",
                       t.active, t.addresses, btc(t.total_received), t.n_received, btc(t.total_sent), t.n_sent);
    out += fmt::format("- BTC non-zero balances: {} holding {} BTC\n", t.nonzero_balances, btc(t.balance));
  }
  if (in.engagement) {
    const auto& e = *in.engagement;
    out += fmt::format("- Engagement: {} contacted, {} responded, {} asked for a key phrase, {} asked for a fee\n",
                       e.contacted, e.responded, e.key_phrase, e.fee_paypal + e.fee_crypto + e.fee_gift);
    if (e.prices.count > 0) {
      out += fmt::format("- Quoted prices: ${:.2f} to ${:.2f}, median ${:.2f}\n", *e.prices.min, *e.prices.max,
                         *e.prices.median);
    }
  }
  return out;
}

ReportFormat parse_report_format(std::string_view s) {
  const auto l = to_lower(s);
  if (l == "csv") return ReportFormat::Csv;
  if (l == "json") return ReportFormat::Json;
  if (l == "markdown" || l == "md") return ReportFormat::Markdown;
  throw ConfigError(fmt::format("unknown report format '{}'", s));
}

std::string_view extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::Csv: return ".csv";
    case ReportFormat::Json: return ".json";
    case ReportFormat::Markdown: return ".md";
  }
  return ".csv";
}

std::string render_table(const CsvTable& t, ReportFormat f) {
  switch (f) {
    case ReportFormat::Csv: return render_csv(t);
    case ReportFormat::Json: {
      nlohmann::ordered_json j;
      j["columns"] = t.header;
      j["rows"] = t.rows;
      return j.dump(2) + "\n";
    }
    case ReportFormat::Markdown: {
      auto line = [](const Row& r) {
        std::string s = "|";
        for (const auto& c : r) s += " " + md_escape(c) + " |";
        return s + "\n";
      };
      std::string s = line(t.header);
      s += "|";
      for (std::size_t i = 0; i < t.header.size(); ++i) s += " --- |";
      s += "\n";
      for (const auto& r : t.rows) s += line(r);
      return s;
    }
  }
  return {};
}

CsvTable parse_table(const std::string& text, ReportFormat f) {
  switch (f) {
    case ReportFormat::Csv: return parse_csv(text);
    case ReportFormat::Json: {
      CsvTable t;
      try {
        const auto j = nlohmann::json::parse(text);
        j.at("columns").get_to(t.header);
        j.at("rows").get_to(t.rows);
      } catch (const nlohmann::json::exception& e) {
        throw ReportError(std::string("bad json table: ") + e.what());
      }
      return t;
    }
    case ReportFormat::Markdown: {
      CsvTable t;
      std::istringstream in(text);
      std::string line;
      int n = 0;
      while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++n;
        if (n == 1) {
          t.header = split_md_row(line);
        } else if (n > 2) {
          t.rows.push_back(split_md_row(line));
        }
      }
      return t;
    }
  }
  return {};
}

AuditResult audit_tables(std::span<const NamedTable> tables) {
  AuditResult res;
  for (const auto& t : tables) check_table(t, res);
  return res;
}

std::vector<NamedTable> load_bundle(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ReportError(fmt::format("{} is not a report directory", dir.string()));
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "summary.md") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<NamedTable> out;
  for (const auto& p : files) {
    ReportFormat f;
    const auto ext = p.extension().string();
    if (ext == ".csv") {
      f = ReportFormat::Csv;
    } else if (ext == ".json") {
      f = ReportFormat::Json;
    } else if (ext == ".md") {
      f = ReportFormat::Markdown;
    } else {
      continue;
    }
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out.push_back({p.stem().string(), parse_table(ss.str(), f)});
  }
  return out;
}

AuditResult audit_bundle(const std::filesystem::path& dir) { return audit_tables(load_bundle(dir)); }

std::vector<std::filesystem::path> emit_report(const ReportInputs& in, const std::filesystem::path& dir,
                                               ReportFormat format) {
  const auto tables = build_tables(in);
  const auto audit = audit_tables(tables);
  if (!audit.ok()) throw ReportError("report failed its own audit: " + audit.problems.front());
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    out << body;
    written.push_back(p);
  };
  for (const auto& t : tables) {
    write(dir / (t.name + std::string(extension(format))), render_table(t.table, format));
  }
  write(dir / "summary.md", render_summary(in, tables));
  return written;
}

}  // namespace conman
