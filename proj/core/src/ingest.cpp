#include "conman/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "conman/error.hpp"
#include "conman/normalize.hpp"
#include "conman/parallel.hpp"

namespace conman {
namespace {

bool before(const Interaction& a, const Interaction& b) {
  return std::tie(a.at, a.interaction_id) < std::tie(b.at, b.interaction_id);
}

std::set<std::string> lower_set(const nlohmann::json& j, const char* key) {
  std::set<std::string> out;
  if (auto it = j.find(key); it != j.end()) {
    for (const auto& v : *it) out.insert(v.get<std::string>());
  }
  return out;
}

bool on_official_domain(std::string_view host, const OfficialRegistry& r) {
  return r.official_domains.contains(second_level_domain(host));
}

}  // namespace

PullResult pull_timeline(std::span<const Interaction> stream, const MarkingPoint& mark) {
  PullResult out;
  out.mark = mark;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto& x = stream[i];
    if (i > 0 && !before(stream[i - 1], x)) {
      throw IngestError(x.interaction_id,
                        fmt::format("timeline out of order at interaction {}", x.interaction_id));
    }
    const bool after = !mark.started() || std::tie(x.at, x.interaction_id) >
                                              std::tie(mark.last_at, mark.last_interaction_id);
    if (after) out.records.push_back(x);
  }
  if (!out.records.empty()) {
    out.mark.last_interaction_id = out.records.back().interaction_id;
    out.mark.last_at = out.records.back().at;
  }
  return out;
}

void validate_registry(const OfficialRegistry& r) {
  for (const auto* set : {&r.official_handles, &r.official_domains, &r.exchange_names,
                          &r.coin_names}) {
    for (const auto& s : *set) {
      if (s != to_lower(s)) throw ConfigError(fmt::format("registry entry not lowercase: '{}'", s));
    }
  }
}

void to_json(nlohmann::json& j, const OfficialRegistry& r) {
  j = {{"official_handles", r.official_handles},
       {"official_domains", r.official_domains},
       {"exchange_names", r.exchange_names},
       {"coin_names", r.coin_names}};
}

void from_json(const nlohmann::json& j, OfficialRegistry& r) {
  r.official_handles = lower_set(j, "official_handles");
  r.official_domains = lower_set(j, "official_domains");
  r.exchange_names = lower_set(j, "exchange_names");
  r.coin_names = lower_set(j, "coin_names");
}

OfficialRegistry load_registry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open registry " + path.string());
  OfficialRegistry r;
  try {
    r = nlohmann::json::parse(in).get<OfficialRegistry>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  validate_registry(r);
  return r;
}

bool is_official_handle(std::string_view handle, const OfficialRegistry& r) {
  std::string h = to_lower(trim(handle));
  if (h.starts_with('@')) h.erase(h.begin());
  return r.official_handles.contains(h) || r.exchange_names.contains(h) || r.coin_names.contains(h);
}

std::string_view to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::Scam:
      return "Scam";
    case VerdictKind::Benign:
      return "Benign";
    case VerdictKind::Official:
      return "Official";
    case VerdictKind::Verified:
      return "Verified";
    case VerdictKind::Excluded:
      return "Excluded";
  }
  return "?";
}

VerdictKind parse_verdict_kind(std::string_view s) {
  for (auto v : {VerdictKind::Scam, VerdictKind::Benign, VerdictKind::Official,
                 VerdictKind::Verified, VerdictKind::Excluded}) {
    if (to_lower(to_string(v)) == to_lower(s)) return v;
  }
  throw ValidationError(fmt::format("unknown verdict '{}'", s));
}

void to_json(nlohmann::json& j, const AccountVerdict& v) {
  j = {{"account_id", v.account_id},
       {"verdict", std::string(to_string(v.verdict))},
       {"rule", v.rule},
       {"reason", v.reason}};
}

void from_json(const nlohmann::json& j, AccountVerdict& v) {
  j.at("account_id").get_to(v.account_id);
  v.verdict = parse_verdict_kind(j.at("verdict").get<std::string>());
  j.at("rule").get_to(v.rule);
  v.reason = j.value("reason", std::string{});
}

AccountVerdict classify_account(const ScamAccount& acct, std::span<const Interaction> interactions,
                                const OfficialRegistry& registry,
                                const ChannelExtractor& extractor,
                                const PaymentRules& payment_rules) {
  auto verdict = [&](VerdictKind k, const char* rule, std::string reason) {
    return AccountVerdict{acct.account_id, k, rule, std::move(reason)};
  };
  if (is_official_handle(acct.handle, registry)) {
    return verdict(VerdictKind::Official, "R1", "official handle");
  }
  if (acct.verified) return verdict(VerdictKind::Verified, "R2", "verified account");
  if (interactions.empty()) return verdict(VerdictKind::Excluded, "R0", "no_interactions");

  std::vector<const Interaction*> sorted;
  for (const auto& x : interactions) sorted.push_back(&x);
  std::sort(sorted.begin(), sorted.end(),
            [](const Interaction* a, const Interaction* b) { return before(*a, *b); });

  std::vector<ExtractionResult> results;
  std::size_t links = 0;
  bool all_official = true;
  for (const auto* x : sorted) {
    if (!carries_text(x->kind)) continue;
    auto r = extractor.extract(x->text, x->urls, acct.handle);
    for (const auto& c : r.channels) {
      if (c.kind != ChannelKind::Email) continue;
      ++links;
      const auto at = c.identifier.rfind('@');
      all_official = all_official && on_official_domain(c.identifier.substr(at + 1), registry);
    }
    for (const auto& u : r.urls) {
      ++links;
      const auto parts = parse_url(u.find("://") == std::string::npos ? "https://" + u : u);
      all_official = all_official && parts && on_official_domain(parts->host, registry);
    }
    results.push_back(std::move(r));
  }
  if (links > 0 && all_official) {
    return verdict(VerdictKind::Benign, "R3", "only official-domain links");
  }

  std::size_t ri = 0;
  for (const auto* x : sorted) {
    if (!carries_text(x->kind)) continue;
    const auto& r = results[ri++];
    const auto cat = classify_response(x->text.value_or(""), x->urls, payment_rules);
    if (cat.kind != ScammerCategory::Kind::Unclassified) {
      return verdict(VerdictKind::Scam, "R4",
                     fmt::format("{} in {}", to_string(cat.kind), x->interaction_id));
    }
    if (!r.channels.empty()) {
      const auto& c = r.channels.front();
      return verdict(VerdictKind::Scam, "R4",
                     fmt::format("{} channel {} in {}", to_string(c.kind), c.identifier,
                                 x->interaction_id));
    }
  }
  return verdict(VerdictKind::Benign, "R5", "no scam evidence");
}

std::vector<AccountVerdict> classify_accounts(std::span<const ScamAccount> accounts,
                                              std::span<const Interaction> interactions,
                                              const OfficialRegistry& registry,
                                              const ChannelExtractor& extractor,
                                              const PaymentRules& payment_rules,
                                              unsigned threads) {
  std::map<AccountId, std::vector<Interaction>> by_actor;
  for (const auto& x : interactions) by_actor[x.actor].push_back(x);
  std::vector<const ScamAccount*> order;
  for (const auto& a : accounts) order.push_back(&a);
  std::sort(order.begin(), order.end(),
            [](const ScamAccount* a, const ScamAccount* b) { return a->account_id < b->account_id; });
  std::vector<AccountVerdict> out(order.size());
  static const std::vector<Interaction> kNone;
  parallel_for(order.size(), threads, [&](std::size_t i) {
    const auto it = by_actor.find(order[i]->account_id);
    const auto& xs = it == by_actor.end() ? kNone : it->second;
    out[i] = classify_account(*order[i], xs, registry, extractor, payment_rules);
  });
  return out;
}

AccountStatus snapshot_status(ApiResult result, Timestamp at) {
  switch (result) {
    case ApiResult::Ok:
      return {StatusKind::Active, at};
    case ApiResult::Forbidden:
      return {StatusKind::Suspended, at};
    case ApiResult::NotFound:
      return {StatusKind::NotFound, at};
  }
  return {StatusKind::Active, at};
}

}  // namespace conman
