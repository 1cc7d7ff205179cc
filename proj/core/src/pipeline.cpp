#include "conman/pipeline.hpp"

#include <fstream>

#include <fmt/format.h>

#include "conman/csv.hpp"
#include "conman/error.hpp"
#include "conman/jsonl.hpp"
#include "conman/log.hpp"
#include "conman/model_json.hpp"
#include "conman/random.hpp"

namespace conman {
namespace fs = std::filesystem;

namespace {

std::uint64_t stage_seed(const PipelineConfig& cfg, std::string_view stage) {
  return derive_seed(cfg.seed.value_or(0), fnv1a(stage));
}

void write_text(const fs::path& p, const std::string& body) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << body;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open " + p.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = std::string(trim(line));
    if (!t.empty() && t.front() != '#') out.push_back(std::move(t));
  }
  return out;
}

template <typename T>
std::vector<T> read_if_exists(const fs::path& p) {
  return fs::exists(p) ? read_jsonl<T>(p) : std::vector<T>{};
}

}  // namespace

OfficialRegistry default_registry() {
  OfficialRegistry r;
  r.official_handles = {"trustwallet",   "metamask",     "metamasksupport", "binancehelpdesk", "coinbase",
                        "coinbasesupport", "ledger",     "ledger_support",  "trezor",          "exodus_io",
                        "bitpay",        "badgerdao",    "freewallet_org"};
  r.official_domains = {"trustwallet.com", "metamask.io", "binance.com", "coinbase.com", "ledger.com",
                        "trezor.io",       "exodus.com",  "bitpay.com",  "badger.com",   "freewallet.org"};
  r.exchange_names = {"binance", "kraken", "kucoin"};
  r.coin_names = {"bitcoin", "ethereum"};
  return r;
}

Inputs load_inputs(const PipelineConfig& cfg) {
  Inputs in{
      cfg.paths.bank.empty() ? default_bank() : load_bank(cfg.paths.bank),
      cfg.paths.rules.empty() ? default_rules() : load_rules(cfg.paths.rules),
      cfg.paths.registry.empty() ? default_registry() : load_registry(cfg.paths.registry),
      cfg.paths.payment_rules.empty() ? default_payment_rules() : load_payment_rules(cfg.paths.payment_rules),
  };
  return in;
}

LureOutput run_lure(const PipelineConfig& cfg, const LureTemplateBank& bank) {
  LureOutput o;
  const auto start = cfg.start_time();
  o.profiles = default_profiles(cfg.lure.profiles, start);
  o.plan = schedule_posts(o.profiles, cfg.lure.per_profile, start, cfg.lure.interval_minutes * kMinute, bank,
                          stage_seed(cfg, "lure"));
  log::info("lure", {{"tweets", o.plan.entries.size()}, {"profiles", o.profiles.size()}});
  return o;
}

SimOutput run_simulate(const PipelineConfig& cfg, const PostingPlan& plan) {
  const auto sim = make_sim_config(cfg);
  auto out = run_sim(sim, plan);
  if (sim.n_scammers > 0) inject_benign(out, sim, plan, cfg.sim.benign_rate);
  log::info("simulate", {{"accounts", out.accounts.size()}, {"interactions", out.interactions.size()},
                         {"planted_identifiers", out.ground_truth.size()}});
  return out;
}

IngestOutput run_ingest(std::span<const ScamAccount> accounts, std::span<const Interaction> interactions,
                        const Inputs& inputs, unsigned threads) {
  IngestOutput o;
  const ChannelExtractor extractor(inputs.rules);
  o.verdicts = classify_accounts(accounts, interactions, inputs.registry, extractor, inputs.payment_rules, threads);
  std::set<AccountId> scam;
  for (const auto& v : o.verdicts) {
    if (v.verdict == VerdictKind::Scam) scam.insert(v.account_id);
  }
  for (const auto& a : accounts) {
    if (scam.count(a.account_id)) o.scam_accounts.push_back(a);
  }
  std::sort(o.scam_accounts.begin(), o.scam_accounts.end(),
            [](const auto& a, const auto& b) { return a.account_id < b.account_id; });
  for (const auto& x : interactions) {
    if (scam.count(x.actor)) o.scam_interactions.push_back(x);
  }
  log::info("ingest", {{"accounts", accounts.size()}, {"scam", o.scam_accounts.size()}});
  return o;
}

std::unordered_map<TweetId, WalletKind> tweet_wallets(const PostingPlan& plan) {
  std::unordered_map<TweetId, WalletKind> m;
  for (const auto& e : plan.entries) m.emplace(e.tweet.tweet_id, e.tweet.wallet);
  return m;
}

ChannelCollection run_extract(std::span<const ScamAccount> accounts, std::span<const Interaction> interactions,
                              const ExtractionRuleSet& rules,
                              const std::unordered_map<TweetId, WalletKind>& wallets, unsigned threads) {
  std::unordered_map<AccountId, std::string> handles;
  for (const auto& a : accounts) handles.emplace(a.account_id, a.handle);
  const ChannelExtractor extractor(rules);
  auto c = collect_channels(interactions, extractor, handles, wallets, threads);
  log::info("extract", {{"channels", c.channels.size()}, {"unmatched_urls", c.unmatched_urls.size()}});
  return c;
}

ClusterOutput run_cluster(std::span<const ChannelSighting> sightings, std::span<const Interaction> interactions) {
  ClusterOutput o;
  o.clusters = build_clusters(sightings);
  std::map<AccountId, std::size_t> per_account;
  for (const auto& x : interactions) ++per_account[x.actor];
  o.groups = agglomerate_groups(o.clusters.clusters, per_account);
  log::info("cluster", {{"clusters", o.clusters.clusters.size()}, {"groups", o.groups.size()}});
  return o;
}

EmbedOutput run_embed(const PipelineConfig& cfg, std::span<const ScamAccount> accounts,
                      std::span<const Interaction> interactions) {
  EmbedOutput o;
  if (accounts.empty()) return o;
  auto synth = synthetic_embeddings(accounts, std::max(cfg.embed.total, accounts.size()), cfg.embed.dim,
                                    stage_seed(cfg, "embed"));
  o.embeddings = synth.records;
  try {
    auto result = sweep(o.embeddings, cfg.embed.grid, cfg.threads, cfg.embed.unit_norm);
    result.assignment.label_names = name_labels(result.assignment, synth.truth);
    o.rows = cluster_engagement_table(result.assignment, accounts, interactions);
    log::info("embed", {{"best_reduce_to", result.best.reduce_to},
                        {"best_cutoff", result.best.linkage_cutoff},
                        {"best_min_size", result.best.min_cluster_size},
                        {"clusters", result.assignment.cluster_count()}});
    o.sweep = std::move(result);
  } catch (const SweepFailed& e) {
    log::warn("embed", {{"sweep_failed", e.what()}});
  }
  return o;
}

EngageOutput run_engage(const PipelineConfig& cfg, std::span<const ContactChannel> channels,
                        const PaymentRules& payment_rules, const fs::path& work_dir) {
  EngageOutput o;
  const auto sim = make_sim_config(cfg);
  const auto log_path = work_dir / artifact::kSessions;
  const auto outbound = work_dir / artifact::kOutbound;
  fs::remove(log_path);
  fs::remove_all(outbound);
  SessionLog session_log(log_path);
  std::size_t n = 0;
  for (const auto& ch : channels) {
    if (ch.kind != ChannelKind::Email && ch.kind != ChannelKind::Instagram) continue;
    const auto sid = fmt::format("s-{:05}", n++);
    const Timestamp sent_at = ch.last_seen + kHour;
    session_log.open(sid, ch, sent_at);
    std::string body;
    if (ch.kind == ChannelKind::Email) {
      const auto draft = craft_email(ch, default_email_templates(), stage_seed(cfg, "engage"));
      body = draft.body;
      write_text(outbound / (sid + ".eml"), render_eml(draft));
    } else {
      body = craft_dm(ch.identifier, ch.wallet_attribution.value_or(WalletKind::MetaMask), "[wallet address]");
      write_text(outbound / (sid + ".txt"), body + "\n");
    }
    session_log.message(sid, {TranscriptEntry::Direction::Outbound, body, sent_at});
    session_log.transition(sid, SessionState::Sent, sent_at);
    const auto reply = scripted_response(sim, ch, sent_at);
    if (!reply) continue;
    std::string text = reply->text;
    for (const auto& u : reply->urls) text += " " + u;
    session_log.message(sid, {TranscriptEntry::Direction::Inbound, text, reply->at});
    session_log.transition(sid, SessionState::Responded, reply->at);
    session_log.categorize(sid, classify_response(reply->text, reply->urls, payment_rules), reply->at);
    session_log.transition(sid, SessionState::Categorized, reply->at);
  }
  o.sessions = session_log.sessions();
  o.summary = summarize_sessions(o.sessions);
  const Timestamp probe_at = cfg.start_time() + (cfg.sim.horizon_days + cfg.engage.probe_after_days) * kDay;
  o.probes = simulate_probes(sim, channels, probe_at);
  log::info("engage", {{"contacted", o.summary.contacted}, {"responded", o.summary.responded},
                       {"probes", o.probes.size()}});
  return o;
}

ChainOutput run_chain(const PipelineConfig& cfg) {
  ChainOutput o;
  if (!cfg.paths.honey_wallets.empty()) {
    const auto wallets = read_jsonl<HoneyWallet>(cfg.paths.honey_wallets);
    const auto ledger = read_jsonl<EthTx>(cfg.paths.eth_ledger);
    o.theft = detect_theft(wallets, ledger, TheftConfig{cfg.chain.usd_per_eth, cfg.chain.threshold});
    log::info("chain", {{"wallets", wallets.size()}, {"stolen", o.theft->events.size()},
                        {"recipients", o.theft->distinct_recipients.size()}});
  }
  if (!cfg.paths.btc_ledger.empty()) {
    const auto addresses = read_lines(cfg.paths.btc_addresses);
    const auto ledger = read_jsonl<BtcTx>(cfg.paths.btc_ledger);
    o.btc = summarize_addresses(addresses, ledger);
    o.btc_series = activity_series(addresses, ledger, cfg.chain.bucket_days * kDay);
    log::info("chain", {{"btc_addresses", o.btc.size()}, {"btc_txs", ledger.size()}});
  }
  return o;
}

ReportInputs report_inputs(const PipelineState& s, const PipelineConfig& cfg) {
  ReportInputs r;
  r.accounts = s.ingest.scam_accounts;
  r.interactions = s.ingest.scam_interactions;
  r.honey_channels = s.channels.channels;
  r.all_channels = s.channels.channels;
  r.clusters = s.clusters.clusters.clusters;
  r.groups = s.clusters.groups;
  r.profile_clusters = s.embed.rows;
  r.probes = s.engage.probes;
  r.theft = s.chain.theft;
  r.btc_addresses = s.chain.btc;
  r.btc_series = s.chain.btc_series;
  if (!s.engage.sessions.empty()) r.engagement = s.engage.summary;
  r.verdicts = s.ingest.verdicts;
  r.lifespan_days = cfg.sim.horizon_days;
  return r;
}

void write_lure(const fs::path& dir, const LureOutput& o) {
  write_jsonl(dir / artifact::kProfiles, o.profiles);
  write_plan(dir / artifact::kPlan, o.plan);
}

void write_sim(const fs::path& dir, const SimOutput& o, const SimConfig& sim) {
  write_jsonl(dir / artifact::kAccounts, o.accounts);
  write_jsonl(dir / artifact::kInteractions, o.interactions);
  write_jsonl(dir / artifact::kGroundTruth, o.ground_truth);
  write_jsonl(dir / artifact::kCampaigns, sim.planted_campaigns);
}

void write_ingest(const fs::path& dir, const IngestOutput& o) {
  write_jsonl(dir / artifact::kVerdicts, o.verdicts);
  write_jsonl(dir / artifact::kScamAccounts, o.scam_accounts);
  write_jsonl(dir / artifact::kScamInteractions, o.scam_interactions);
}

void write_extract(const fs::path& dir, const ChannelCollection& c) {
  write_jsonl(dir / artifact::kChannels, c.channels);
  std::string urls;
  for (const auto& u : c.unmatched_urls) urls += u + "\n";
  write_text(dir / artifact::kUnmatchedUrls, urls);
}

void write_cluster(const fs::path& dir, const ClusterOutput& o) {
  write_jsonl(dir / artifact::kClusters, o.clusters.clusters);
  write_jsonl(dir / artifact::kGroups, o.groups);
}

void write_embed(const fs::path& dir, const EmbedOutput& o) {
  write_jsonl(dir / artifact::kEmbeddings, o.embeddings);
  write_jsonl(dir / artifact::kProfileClusters, o.rows);
  CsvTable t{{"reduce_to", "linkage_cutoff", "min_cluster_size", "silhouette", "clusters", "noise"}, {}};
  if (o.sweep) {
    for (const auto& r : o.sweep->table) {
      t.rows.push_back({std::to_string(r.config.reduce_to), fmt::format("{}", r.config.linkage_cutoff),
                        std::to_string(r.config.min_cluster_size), r.score ? fmt::format("{:.6f}", *r.score) : "",
                        std::to_string(r.clusters), std::to_string(r.noise)});
    }
  }
  write_csv(dir / artifact::kSweep, t);
}

void write_engage(const fs::path& dir, const EngageOutput& o) { write_jsonl(dir / artifact::kProbes, o.probes); }

void write_chain(const fs::path& dir, const ChainOutput& o) {
  if (o.theft) {
    write_jsonl(dir / artifact::kThefts, o.theft->events);
    write_text(dir / artifact::kTheftTable, nlohmann::json(*o.theft).dump(2) + "\n");
  }
  if (!o.btc.empty()) {
    write_jsonl(dir / artifact::kBtcSummaries, o.btc);
    write_jsonl(dir / artifact::kBtcSeries, o.btc_series);
  }
}

ReportInputs load_report_inputs(const fs::path& dir, int lifespan_days) {
  ReportInputs r;
  r.accounts = read_jsonl<ScamAccount>(dir / artifact::kScamAccounts);
  r.interactions = read_jsonl<Interaction>(dir / artifact::kScamInteractions);
  r.honey_channels = read_jsonl<ContactChannel>(dir / artifact::kChannels);
  r.all_channels = r.honey_channels;
  r.clusters = read_if_exists<ChannelCluster>(dir / artifact::kClusters);
  r.groups = read_if_exists<CampaignGroup>(dir / artifact::kGroups);
  r.profile_clusters = read_if_exists<EngagementRow>(dir / artifact::kProfileClusters);
  r.probes = read_if_exists<ProbeResult>(dir / artifact::kProbes);
  r.verdicts = read_if_exists<AccountVerdict>(dir / artifact::kVerdicts);
  if (fs::exists(dir / artifact::kTheftTable)) {
    std::ifstream in(dir / artifact::kTheftTable);
    r.theft = nlohmann::json::parse(in).get<TheftReport>();
  }
  r.btc_addresses = read_if_exists<AddressSummary>(dir / artifact::kBtcSummaries);
  r.btc_series = read_if_exists<ActivityPoint>(dir / artifact::kBtcSeries);
  if (fs::exists(dir / artifact::kSessions)) {
    const auto sessions = SessionLog::replay(dir / artifact::kSessions);
    if (!sessions.empty()) r.engagement = summarize_sessions(sessions);
  }
  r.lifespan_days = lifespan_days;
  return r;
}

PipelineState run_e2e(const PipelineConfig& cfg) {
  validate(cfg);
  const auto dir = cfg.paths.out_dir;
  fs::create_directories(dir);
  const auto inputs = load_inputs(cfg);
  PipelineState s;
  s.lure = run_lure(cfg, inputs.bank);
  write_lure(dir, s.lure);
  s.sim = run_simulate(cfg, s.lure.plan);
  write_sim(dir, s.sim, make_sim_config(cfg));
  s.ingest = run_ingest(s.sim.accounts, s.sim.interactions, inputs, cfg.threads);
  write_ingest(dir, s.ingest);
  s.channels = run_extract(s.ingest.scam_accounts, s.ingest.scam_interactions, inputs.rules,
                           tweet_wallets(s.lure.plan), cfg.threads);
  write_extract(dir, s.channels);
  s.clusters = run_cluster(s.channels.sightings, s.ingest.scam_interactions);
  write_cluster(dir, s.clusters);
  s.embed = run_embed(cfg, s.ingest.scam_accounts, s.ingest.scam_interactions);
  write_embed(dir, s.embed);
  s.engage = run_engage(cfg, s.channels.channels, inputs.payment_rules, dir);
  write_engage(dir, s.engage);
  s.chain = run_chain(cfg);
  write_chain(dir, s.chain);
  const auto written = emit_report(report_inputs(s, cfg), cfg.report_dir(), cfg.format);
  log::info("report", {{"dir", cfg.report_dir().string()}, {"files", written.size()}});
  return s;
}

void to_json(nlohmann::json& j, const EngagementRow& r) {
  j = {{"name", r.name},           {"label", r.label},         {"scammers", r.scammers},
       {"followers", r.followers}, {"replies", r.replies},     {"quoted", r.quoted},
       {"suspended", r.suspended}};
}

void from_json(const nlohmann::json& j, EngagementRow& r) {
  j.at("name").get_to(r.name);
  j.at("label").get_to(r.label);
  j.at("scammers").get_to(r.scammers);
  j.at("followers").get_to(r.followers);
  j.at("replies").get_to(r.replies);
  j.at("quoted").get_to(r.quoted);
  j.at("suspended").get_to(r.suspended);
}

void to_json(nlohmann::json& j, const AddressSummary& s) {
  j = {{"address", s.address},
       {"n_received", s.n_received},
       {"n_sent", s.n_sent},
       {"total_received", amount_to_string(s.total_received)},
       {"total_sent", amount_to_string(s.total_sent)},
       {"balance", amount_to_string(s.balance)}};
  j["first_activity"] = s.first_activity ? nlohmann::json(to_iso8601(*s.first_activity)) : nlohmann::json(nullptr);
  j["last_activity"] = s.last_activity ? nlohmann::json(to_iso8601(*s.last_activity)) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, AddressSummary& s) {
  j.at("address").get_to(s.address);
  j.at("n_received").get_to(s.n_received);
  j.at("n_sent").get_to(s.n_sent);
  s.total_received = parse_amount(j.at("total_received").get<std::string>());
  s.total_sent = parse_amount(j.at("total_sent").get<std::string>());
  s.balance = parse_amount(j.at("balance").get<std::string>());
  s.first_activity.reset();
  s.last_activity.reset();
  if (!j.at("first_activity").is_null()) s.first_activity = parse_iso8601(j["first_activity"].get<std::string>());
  if (!j.at("last_activity").is_null()) s.last_activity = parse_iso8601(j["last_activity"].get<std::string>());
}

void to_json(nlohmann::json& j, const ActivityPoint& p) {
  j = {{"bucket_start", to_iso8601(p.bucket_start)},
       {"received", amount_to_string(p.received)},
       {"sent", amount_to_string(p.sent)}};
}

void from_json(const nlohmann::json& j, ActivityPoint& p) {
  p.bucket_start = parse_iso8601(j.at("bucket_start").get<std::string>());
  p.received = parse_amount(j.at("received").get<std::string>());
  p.sent = parse_amount(j.at("sent").get<std::string>());
}

void to_json(nlohmann::json& j, const TheftReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& t : r.table) rows.push_back({{"label", t.label}, {"sent", t.sent}, {"stolen", t.stolen}});
  j = {{"events", r.events}, {"table", rows}, {"distinct_recipients", r.distinct_recipients}};
}

void from_json(const nlohmann::json& j, TheftReport& r) {
  j.at("events").get_to(r.events);
  r.table.clear();
  for (const auto& t : j.at("table")) {
    r.table.push_back({t.at("label").get<std::string>(), t.at("sent").get<std::size_t>(),
                       t.at("stolen").get<std::size_t>()});
  }
  j.at("distinct_recipients").get_to(r.distinct_recipients);
}

}  // namespace conman
