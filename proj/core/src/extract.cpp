#include "conman/extract.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include <boost/regex.hpp>
#include <fmt/format.h>

#include "conman/error.hpp"
#include "conman/model_json.hpp"
#include "conman/parallel.hpp"

namespace conman {
namespace {

ExtractionRuleSet make_default_rules() {
  ExtractionRuleSet r;
  r.email_pattern = R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})";
  r.host_map = {
      {"instagram.com", "", ChannelKind::Instagram},
      {"t.me", "", ChannelKind::Telegram},
      {"telegram.me", "", ChannelKind::Telegram},
      {"wa.me", "", ChannelKind::WhatsApp},
      {"api.whatsapp.com", "", ChannelKind::WhatsApp},
      {"docs.google.com", "/forms", ChannelKind::Form},
      {"forms.gle", "", ChannelKind::Form},
      {"jotform.com", "", ChannelKind::Form},
      {"form.jotform.com", "", ChannelKind::Form},
      {"twitter.com", "/messages", ChannelKind::TwitterDM},
      {"twitter.com", "/dm", ChannelKind::TwitterDM},
  };
  r.wallet_keywords = {
      {"badger", WalletKind::Badger},      {"binance", WalletKind::Binance},
      {"bitpay", WalletKind::BitPay},      {"coinbase", WalletKind::Coinbase},
      {"exodus", WalletKind::Exodus},      {"freewallet", WalletKind::Free},
      {"ledger", WalletKind::Ledger},      {"metamask", WalletKind::MetaMask},
      {"trezor", WalletKind::Trezor},      {"trustwallet", WalletKind::TrustWallet},
  };
  r.dm_phrases = {"dm me", "send a dm"};
  r.handle_keywords = {
      {"instagram", ChannelKind::Instagram},
      {"telegram", ChannelKind::Telegram},
      {"whatsapp", ChannelKind::WhatsApp},
  };
  return r;
}

std::string regex_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::string_view(R"(\^$.|?*+()[]{}/)").find(c) != std::string_view::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string strip_trailing_punct(std::string s) {
  while (!s.empty() && std::string_view(".,;:!?)]}'\"").find(s.back()) != std::string_view::npos) {
    s.pop_back();
  }
  return s;
}

}  // namespace

void validate_rules(const ExtractionRuleSet& rules) {
  for (const auto& h : rules.host_map) {
    if (h.host_suffix.empty() || h.host_suffix != to_lower(h.host_suffix)) {
      throw ConfigError(fmt::format("host_map key must be non-empty lowercase: '{}'", h.host_suffix));
    }
  }
  for (const auto w : kAllWallets) {
    const bool covered = std::any_of(rules.wallet_keywords.begin(), rules.wallet_keywords.end(),
                                     [w](const auto& kv) { return kv.second == w; });
    if (!covered) throw ConfigError(fmt::format("wallet_keywords misses {}", to_string(w)));
  }
  for (const auto& [kw, _] : rules.wallet_keywords) {
    if (kw.empty() || kw != to_lower(kw)) {
      throw ConfigError(fmt::format("wallet keyword must be non-empty lowercase: '{}'", kw));
    }
  }
  try {
    boost::regex re(rules.email_pattern);
  } catch (const boost::regex_error& e) {
    throw ConfigError(fmt::format("bad email_pattern: {}", e.what()));
  }
}

const ExtractionRuleSet& default_rules() {
  static const ExtractionRuleSet rules = make_default_rules();
  return rules;
}

void to_json(nlohmann::json& j, const ExtractionRuleSet& r) {
  auto hosts = nlohmann::json::array();
  for (const auto& h : r.host_map) {
    nlohmann::json e{{"host_suffix", h.host_suffix}, {"kind", h.kind}};
    if (!h.path_prefix.empty()) e["path_prefix"] = h.path_prefix;
    hosts.push_back(std::move(e));
  }
  auto wallets = nlohmann::json::object();
  for (const auto& [kw, w] : r.wallet_keywords) wallets[kw] = w;
  auto handles = nlohmann::json::object();
  for (const auto& [kw, k] : r.handle_keywords) handles[kw] = k;
  j = {{"email_pattern", r.email_pattern}, {"host_map", hosts},
       {"wallet_keywords", wallets},       {"dm_phrases", r.dm_phrases},
       {"handle_keywords", handles},       {"gmail_canonical", r.normalize.gmail_canonical}};
}

void from_json(const nlohmann::json& j, ExtractionRuleSet& r) {
  const auto& d = default_rules();
  r.email_pattern = j.value("email_pattern", d.email_pattern);
  r.host_map.clear();
  if (auto it = j.find("host_map"); it != j.end()) {
    for (const auto& e : *it) {
      r.host_map.push_back({e.at("host_suffix").get<std::string>(),
                            e.value("path_prefix", std::string{}),
                            e.at("kind").get<ChannelKind>()});
    }
  } else {
    r.host_map = d.host_map;
  }
  r.wallet_keywords.clear();
  if (auto it = j.find("wallet_keywords"); it != j.end()) {
    for (const auto& [kw, w] : it->items()) r.wallet_keywords[kw] = w.get<WalletKind>();
  } else {
    r.wallet_keywords = d.wallet_keywords;
  }
  r.dm_phrases = j.value("dm_phrases", d.dm_phrases);
  r.handle_keywords.clear();
  if (auto it = j.find("handle_keywords"); it != j.end()) {
    for (const auto& [kw, k] : it->items()) r.handle_keywords[kw] = k.get<ChannelKind>();
  } else {
    r.handle_keywords = d.handle_keywords;
  }
  r.normalize.gmail_canonical = j.value("gmail_canonical", true);
}

ExtractionRuleSet load_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rules " + path.string());
  ExtractionRuleSet rules;
  try {
    rules = nlohmann::json::parse(in).get<ExtractionRuleSet>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  } catch (const ValidationError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  validate_rules(rules);
  return rules;
}

struct ChannelExtractor::Impl {
  ExtractionRuleSet rules;
  boost::regex email;
  boost::regex url{R"((?:https?://|www\.)[^\s<>"'\[\]]+)", boost::regex::icase};
  boost::regex dm;
  // (kind, regex) for "<platform> ... @handle" or "whatsapp ... +phone"
  std::vector<std::pair<ChannelKind, boost::regex>> handle_res;
};

ChannelExtractor::ChannelExtractor(ExtractionRuleSet rules) {
  validate_rules(rules);
  auto impl = std::make_shared<Impl>();
  impl->email = boost::regex(rules.email_pattern);
  std::string dm_alt;
  for (const auto& p : rules.dm_phrases) {
    if (!dm_alt.empty()) dm_alt += '|';
    dm_alt += regex_escape(p);
  }
  if (!dm_alt.empty()) impl->dm = boost::regex("\\b(?:" + dm_alt + ")\\b", boost::regex::icase);
  for (const auto& [kw, kind] : rules.handle_keywords) {
    const std::string k = regex_escape(kw);
    if (kind == ChannelKind::WhatsApp) {
      impl->handle_res.emplace_back(
          kind, boost::regex("\\b" + k + "\\b[^\\d+@\\n]{0,30}?(\\+?\\d[\\d -]{4,18}\\d)",
                             boost::regex::icase));
    } else {
      impl->handle_res.emplace_back(
          kind, boost::regex("\\b" + k +
                                 "\\b[^@\\n]{0,30}?(?<![A-Za-z0-9._%+-])@([A-Za-z0-9_.]{1,40})",
                             boost::regex::icase));
    }
  }
  impl->rules = std::move(rules);
  impl_ = std::move(impl);
}

ChannelExtractor::~ChannelExtractor() = default;
ChannelExtractor::ChannelExtractor(const ChannelExtractor&) = default;
ChannelExtractor& ChannelExtractor::operator=(const ChannelExtractor&) = default;

const ExtractionRuleSet& ChannelExtractor::rules() const { return impl_->rules; }

std::optional<ChannelKind> ChannelExtractor::classify_url(std::string_view url) const {
  std::string u(url);
  if (!u.starts_with("http://") && !u.starts_with("https://") && !u.starts_with("HTTP")) {
    u = "https://" + u;
  }
  const auto parts = parse_url(u);
  if (!parts) return std::nullopt;
  const std::string path = to_lower(parts->path);
  const HostRule* best = nullptr;
  for (const auto& h : impl_->rules.host_map) {
    if (!host_matches(parts->host, h.host_suffix)) continue;
    if (!h.path_prefix.empty() && !path.starts_with(h.path_prefix)) continue;
    if (!best || h.host_suffix.size() + h.path_prefix.size() >
                     best->host_suffix.size() + best->path_prefix.size()) {
      best = &h;
    }
  }
  if (!best) return std::nullopt;
  return best->kind;
}

ExtractionResult ChannelExtractor::extract(const std::optional<std::string>& text,
                                           std::span<const std::string> urls,
                                           std::string_view actor_handle) const {
  const auto& rules = impl_->rules;
  std::vector<ChannelMatch> found;
  auto add = [&](ChannelKind kind, const std::string& raw, std::string_view to_normalize) {
    try {
      found.push_back({kind, normalize_identifier(to_normalize, kind, rules.normalize), raw});
      return true;
    } catch (const NormalizationError&) {
      return false;
    }
  };

  std::vector<std::string> all_urls;
  for (const auto& u : urls) {
    auto t = strip_trailing_punct(std::string(trim(u)));
    if (!t.empty()) all_urls.push_back(std::move(t));
  }
  if (text) {
    const std::string& s = *text;
    for (boost::sregex_iterator it(s.begin(), s.end(), impl_->url), end; it != end; ++it) {
      auto t = strip_trailing_punct(it->str());
      if (!t.empty()) all_urls.push_back(std::move(t));
    }
  }
  std::sort(all_urls.begin(), all_urls.end());
  all_urls.erase(std::unique(all_urls.begin(), all_urls.end()), all_urls.end());

  ExtractionResult result;
  result.urls = all_urls;
  for (const auto& u : all_urls) {
    bool matched = false;
    if (auto kind = classify_url(u)) {
      const std::string full = (u.starts_with("http://") || u.starts_with("https://") ||
                                to_lower(u.substr(0, 4)) == "http")
                                   ? u
                                   : "https://" + u;
      matched = add(*kind, u, full);
    }
    if (!matched) result.unmatched_urls.push_back(u);
  }

  if (text) {
    const std::string& s = *text;
    if (s.find('@') != std::string::npos) {
      for (boost::sregex_iterator it(s.begin(), s.end(), impl_->email), end; it != end; ++it) {
        // Skip addresses that are part of a URL already handled above.
        const auto pos = static_cast<std::size_t>(it->position());
        if (pos > 0 && s[pos - 1] == '/') continue;
        add(ChannelKind::Email, it->str(), it->str());
      }
    }
    for (const auto& [kind, re] : impl_->handle_res) {
      for (boost::sregex_iterator it(s.begin(), s.end(), re), end; it != end; ++it) {
        std::string h = (*it)[1].str();
        while (!h.empty() && h.back() == '.') h.pop_back();
        if (h.empty()) continue;
        const std::string raw = kind == ChannelKind::WhatsApp ? h : "@" + h;
        add(kind, raw, raw);
      }
    }
    if (!actor_handle.empty() && !impl_->dm.empty() && boost::regex_search(s, impl_->dm)) {
      add(ChannelKind::TwitterDM, "@" + std::string(actor_handle), actor_handle);
    }
  }

  // Canonical order; on duplicate keys keep the smallest raw so the result
  // does not depend on the order URLs were supplied in.
  std::sort(found.begin(), found.end(), [](const ChannelMatch& a, const ChannelMatch& b) {
    return std::tie(a.kind, a.identifier, a.raw) < std::tie(b.kind, b.identifier, b.raw);
  });
  for (auto& m : found) {
    if (!result.channels.empty() && result.channels.back().kind == m.kind &&
        result.channels.back().identifier == m.identifier) {
      continue;
    }
    result.channels.push_back(std::move(m));
  }
  return result;
}

ExtractionResult extract_channels(const std::optional<std::string>& text,
                                  std::span<const std::string> urls,
                                  const ExtractionRuleSet& rules) {
  return ChannelExtractor(rules).extract(text, urls);
}

std::optional<WalletKind> attribute_wallet(std::string_view identifier,
                                           std::optional<WalletKind> context_wallet,
                                           const ExtractionRuleSet& rules) {
  const std::string id = to_lower(identifier);
  std::optional<WalletKind> best;
  std::size_t best_len = 0;
  std::size_t best_pos = 0;
  for (const auto& [kw, w] : rules.wallet_keywords) {
    const auto pos = id.find(kw);
    if (pos == std::string::npos) continue;
    const bool better = !best || kw.size() > best_len ||
                        (kw.size() == best_len && pos < best_pos) ||
                        (kw.size() == best_len && pos == best_pos && w < *best);
    if (better) {
      best = w;
      best_len = kw.size();
      best_pos = pos;
    }
  }
  return best ? best : context_wallet;
}

ChannelCollection collect_channels(std::span<const Interaction> interactions,
                                   const ChannelExtractor& extractor,
                                   const std::unordered_map<AccountId, std::string>& handles,
                                   const std::unordered_map<TweetId, WalletKind>& tweet_wallets,
                                   unsigned threads) {
  std::vector<ExtractionResult> per(interactions.size());
  parallel_for(interactions.size(), threads, [&](std::size_t i) {
    const auto& x = interactions[i];
    if (!carries_text(x.kind)) return;
    std::string_view handle;
    if (auto it = handles.find(x.actor); it != handles.end()) handle = it->second;
    per[i] = extractor.extract(x.text, x.urls, handle);
  });

  ChannelCollection out;
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    const auto& x = interactions[i];
    for (auto& m : per[i].channels) {
      out.sightings.push_back({m.kind, m.identifier, m.raw, x.actor, x.interaction_id, x.kind,
                               x.target_tweet, x.at});
    }
    for (auto& u : per[i].unmatched_urls) out.unmatched_urls.push_back(std::move(u));
  }
  std::sort(out.unmatched_urls.begin(), out.unmatched_urls.end());
  out.unmatched_urls.erase(std::unique(out.unmatched_urls.begin(), out.unmatched_urls.end()),
                           out.unmatched_urls.end());
  std::sort(out.sightings.begin(), out.sightings.end(),
            [](const ChannelSighting& a, const ChannelSighting& b) {
              return std::tie(a.at, a.interaction_id, a.kind, a.identifier) <
                     std::tie(b.at, b.interaction_id, b.kind, b.identifier);
            });

  std::map<std::pair<ChannelKind, std::string>, std::size_t> index;
  for (const auto& s : out.sightings) {
    auto key = std::make_pair(s.kind, s.identifier);
    auto it = index.find(key);
    if (it == index.end()) {
      // Sightings are time-ordered, so the first one fixes raw and context.
      ContactChannel c;
      c.kind = s.kind;
      c.identifier = s.identifier;
      c.raw = s.raw;
      std::optional<WalletKind> context;
      if (s.tweet_id) {
        if (auto w = tweet_wallets.find(*s.tweet_id); w != tweet_wallets.end()) context = w->second;
      }
      c.wallet_attribution = attribute_wallet(s.identifier, context, extractor.rules());
      c.first_seen = s.at;
      c.last_seen = s.at;
      c.observed_in.insert(s.interaction_id);
      index.emplace(std::move(key), out.channels.size());
      out.channels.push_back(std::move(c));
    } else {
      auto& c = out.channels[it->second];
      c.last_seen = std::max(c.last_seen, s.at);
      c.observed_in.insert(s.interaction_id);
    }
  }
  std::sort(out.channels.begin(), out.channels.end(),
            [](const ContactChannel& a, const ContactChannel& b) {
              return std::tie(a.kind, a.identifier) < std::tie(b.kind, b.identifier);
            });
  return out;
}

std::vector<ChannelSighting> sightings_from(std::span<const ContactChannel> channels,
                                            std::span<const Interaction> interactions) {
  std::unordered_map<InteractionId, const Interaction*> by_id;
  for (const auto& x : interactions) by_id.emplace(x.interaction_id, &x);
  std::vector<ChannelSighting> out;
  for (const auto& c : channels) {
    for (const auto& iid : c.observed_in) {
      auto it = by_id.find(iid);
      if (it == by_id.end()) {
        throw ValidationError(
            fmt::format("channel {} references unknown interaction {}", c.identifier, iid));
      }
      const auto& x = *it->second;
      out.push_back({c.kind, c.identifier, c.raw, x.actor, x.interaction_id, x.kind,
                     x.target_tweet, x.at});
    }
  }
  std::sort(out.begin(), out.end(), [](const ChannelSighting& a, const ChannelSighting& b) {
    return std::tie(a.at, a.interaction_id, a.kind, a.identifier) <
           std::tie(b.at, b.interaction_id, b.kind, b.identifier);
  });
  return out;
}

std::vector<DistributionRow> channel_distribution(std::span<const ContactChannel> honey,
                                                  std::span<const ContactChannel> all) {
  std::array<std::set<std::string>, 6> h;
  std::array<std::set<std::string>, 6> t;
  for (const auto& c : honey) {
    h[static_cast<std::size_t>(c.kind)].insert(c.identifier);
    t[static_cast<std::size_t>(c.kind)].insert(c.identifier);
  }
  for (const auto& c : all) t[static_cast<std::size_t>(c.kind)].insert(c.identifier);
  std::vector<DistributionRow> rows;
  DistributionRow total{"All", 0, 0};
  for (const auto k : kAllChannelKinds) {
    const auto i = static_cast<std::size_t>(k);
    rows.push_back({std::string(to_string(k)), h[i].size(), t[i].size()});
    total.honey_profiles += h[i].size();
    total.total += t[i].size();
  }
  rows.push_back(total);
  return rows;
}

std::vector<WalletBreakdownRow> wallet_breakdown(std::span<const ContactChannel> channels) {
  std::map<int, WalletBreakdownRow> rows;  // wallet index, 10 = unattributed
  WalletBreakdownRow total{"Total", {}, 0};
  std::set<std::pair<ChannelKind, std::string>> seen;
  for (const auto& c : channels) {
    if (!seen.emplace(c.kind, c.identifier).second) continue;
    const int key = c.wallet_attribution ? static_cast<int>(*c.wallet_attribution) : 10;
    auto& row = rows[key];
    if (row.label.empty()) {
      row.label = c.wallet_attribution ? std::string(to_string(*c.wallet_attribution))
                                       : std::string("Unattributed");
    }
    ++row.per_kind[static_cast<std::size_t>(c.kind)];
    ++row.all;
    ++total.per_kind[static_cast<std::size_t>(c.kind)];
    ++total.all;
  }
  std::vector<WalletBreakdownRow> out;
  for (auto& [_, r] : rows) out.push_back(std::move(r));
  if (!out.empty()) out.push_back(total);
  return out;
}

}  // namespace conman
