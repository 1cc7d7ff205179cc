#include "conman/platform_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "conman/crypto.hpp"
#include "conman/error.hpp"
#include "conman/model_json.hpp"
#include "conman/normalize.hpp"
#include "conman/random.hpp"

namespace conman {
namespace {

constexpr std::array<std::string_view, 10> kWalletKeywords{
    "badger", "binance", "bitpay", "coinbase", "exodus",
    "freewallet", "ledger", "metamask", "trezor", "trustwallet"};

constexpr std::array<std::string_view, 12> kHandleWords{
    "recovery", "helpdesk", "assist", "fixer", "restore", "unlock",
    "desk",     "agent",    "guru",   "rescue", "support_team", "wallet_doc"};

constexpr std::array<std::string_view, 8> kOpeners{
    "Sorry to hear about your {wallet} issue.",
    "We can help you sort out your {wallet} wallet.",
    "This {wallet} problem is easy to fix.",
    "Our team handles {wallet} cases like this every day.",
    "Don't worry, your {wallet} funds can be recovered.",
    "Hello, {wallet} support here to assist.",
    "I had the same {wallet} problem and got it fixed.",
    "Reach out and your {wallet} wallet will be restored.",
};

constexpr std::array<std::string_view, 6> kKeyPhrasePitches{
    "Validate your wallet by syncing your recovery phrase with the repair tool.",
    "Import your 12 words into the rectification portal and it resolves instantly.",
    "The fix needs your secret phrase to re-sync the node.",
    "Submit your seed phrase for manual verification and we unlock it.",
    "Enter your key phrase on the validation page to restore access.",
    "Your recovery phrase must be re-verified before the funds show up.",
};

constexpr std::array<std::string_view, 6> kBenignTexts{
    "sorry that happened to you",
    "hope you get it sorted soon!",
    "same problem here last week, it went away after a day",
    "have you tried reinstalling the app?",
    "following for updates",
    "ugh, that sounds stressful. good luck",
};

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

template <typename T, std::size_t N>
const T& pick(SplitMix64& rng, const std::array<T, N>& items) {
  return items[rng.below(N)];
}

std::string random_digits(SplitMix64& rng, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + rng.below(10)));
  return s;
}

std::string random_alnum(SplitMix64& rng, int n) {
  static constexpr std::string_view kChars = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::string s;
  for (int i = 0; i < n; ++i) s.push_back(kChars[rng.below(kChars.size())]);
  return s;
}

crypto::Bytes random_bytes(SplitMix64& rng, std::size_t n) {
  crypto::Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng.below(256));
  return b;
}

std::string random_btc_address(SplitMix64& rng) {
  if (rng.bernoulli(0.5)) {
    auto payload = random_bytes(rng, 21);
    payload[0] = rng.bernoulli(0.7) ? 0x00 : 0x05;
    return crypto::base58check_encode(payload);
  }
  const auto program = random_bytes(rng, 20);
  return crypto::segwit_encode("bc", 0, program);
}

std::string random_eth_address(SplitMix64& rng) {
  return crypto::eip55_checksum(random_bytes(rng, 20));
}

// Posts one raw identifier inside a sentence; adds URL forms to urls.
std::string present(SplitMix64& rng, ChannelKind kind, const std::string& raw,
                    std::vector<std::string>& urls) {
  const bool as_url = rng.bernoulli(0.5);
  switch (kind) {
    case ChannelKind::Email:
      return fmt::format("Email {} now.", raw);
    case ChannelKind::Form:
      urls.push_back(raw);
      return fmt::format("Fill the support form: {}", raw);
    case ChannelKind::Instagram: {
      const std::string h = raw.substr(1);
      if (as_url) {
        urls.push_back("https://www.instagram.com/" + h + "/");
        return "Message the team: https://www.instagram.com/" + h + "/";
      }
      return fmt::format("Message us on Instagram {}.", raw);
    }
    case ChannelKind::Telegram: {
      const std::string h = raw.substr(1);
      if (as_url) {
        urls.push_back("https://t.me/" + h);
        return "Chat with an agent: https://t.me/" + h;
      }
      return fmt::format("Reach an agent on Telegram {} today.", raw);
    }
    case ChannelKind::WhatsApp: {
      std::string digits;
      for (char c : raw) {
        if (c >= '0' && c <= '9') digits.push_back(c);
      }
      if (as_url) {
        urls.push_back("https://wa.me/" + digits);
        return "Text the desk: https://wa.me/" + digits;
      }
      return fmt::format("WhatsApp {} for a quick fix.", raw);
    }
    case ChannelKind::TwitterDM:
      urls.push_back(raw);
      return fmt::format("Open a chat here {}", raw);
  }
  return {};
}

std::string fee_pitch(SplitMix64& rng) {
  const int amount = 150 + 50 * static_cast<int>(rng.below(49));
  switch (rng.below(3)) {
    case 0:
      return fmt::format("A technician fixes this for ${}, pay at paypal.me/{}{}.", amount,
                         pick(rng, kHandleWords), random_digits(rng, 3));
    case 1: {
      // All-lowercase hex keeps the address valid without a checksum.
      std::string addr = to_lower(random_eth_address(rng));
      return fmt::format("Send the ${} unlock fee to {} and it is done.", amount, addr);
    }
    default:
      return fmt::format("Service fee is ${}, payable with an amazon gift card.", amount);
  }
}

struct AccountPlan {
  bool modes[5] = {false, false, false, false, false};
};

InteractionKind mode_at(std::size_t i) { return kAllInteractionKinds[i]; }

Source draw_source(SplitMix64& rng, const std::vector<std::pair<Source, double>>& mix, double total) {
  double u = rng.uniform() * total;
  for (const auto& [s, w] : mix) {
    if (u < w) return s;
    u -= w;
  }
  return mix.back().first;
}

}  // namespace

std::string_view to_string(CampaignCategory c) {
  return c == CampaignCategory::KeyPhraseRequest ? "KeyPhraseRequest" : "FeePayment";
}

std::string_view to_string(AccountRole r) {
  switch (r) {
    case AccountRole::Scammer:
      return "Scammer";
    case AccountRole::Benign:
      return "Benign";
    case AccountRole::Official:
      return "Official";
  }
  return "?";
}

void validate(const SimConfig& c) {
  auto prob = [](double p, std::string_view what) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(fmt::format("{} must be in [0,1], got {}", what, p));
  };
  if (c.n_scammers < 0) throw ConfigError("n_scammers must be >= 0");
  if (c.horizon_days < 1) throw ConfigError("horizon_days must be >= 1");
  for (const auto& [k, w] : c.mode_weights) prob(w, fmt::format("mode weight {}", to_string(k)));
  prob(c.repeat_text_prob, "repeat_text_prob");
  prob(c.suspension_hazard, "suspension_hazard");
  prob(c.deactivation_hazard, "deactivation_hazard");
  prob(c.response_prob, "response_prob");
  if (c.suspension_hazard + c.deactivation_hazard > 1.0) {
    throw ConfigError("suspension_hazard + deactivation_hazard must be <= 1");
  }
  if (!(c.engagement_lambda >= 0.0) || !std::isfinite(c.engagement_lambda)) {
    throw ConfigError("engagement_lambda must be finite and >= 0");
  }
  double mix = 0;
  for (const auto& [s, w] : c.source_mix) {
    if (!(w >= 0.0)) throw ConfigError("source_mix weights must be >= 0");
    mix += w;
  }
  if (mix <= 0) throw ConfigError("source_mix must have positive total weight");
  for (const auto& pc : c.planted_campaigns) {
    if (pc.identifiers.empty()) {
      throw ConfigError(fmt::format("campaign {} has no identifiers", pc.campaign_id));
    }
    for (int m : pc.member_account_indices) {
      if (m < 0 || m >= c.n_scammers) {
        throw ConfigError(fmt::format("campaign {} member {} outside [0,{})", pc.campaign_id, m,
                                      c.n_scammers));
      }
    }
    for (const auto& [kind, raw] : pc.identifiers) {
      try {
        normalize_identifier(raw, kind);
      } catch (const NormalizationError& e) {
        throw ConfigError(fmt::format("campaign {}: {}", pc.campaign_id, e.what()));
      }
    }
  }
}

std::vector<PlantedCampaign> plant_campaigns(int n_campaigns, int n_scammers, std::uint64_t seed) {
  if (n_campaigns < 0) throw ConfigError("campaign count must be >= 0");
  if (n_campaigns > 0 && n_scammers < 2) throw ConfigError("campaigns need at least 2 scammers");
  SplitMix64 rng(derive_seed(seed, fnv1a("campaigns")));
  std::vector<PlantedCampaign> out;
  for (int c = 0; c < n_campaigns; ++c) {
    PlantedCampaign pc;
    pc.campaign_id = fmt::format("camp-{:03}", c);
    const int size = std::min(n_scammers, 2 + static_cast<int>(rng.below(7)));
    if (c > 0 && rng.bernoulli(0.25)) {
      const auto& prev = out[rng.below(out.size())];
      auto it = prev.member_account_indices.begin();
      std::advance(it, static_cast<long>(rng.below(prev.member_account_indices.size())));
      pc.member_account_indices.insert(*it);
    }
    while (static_cast<int>(pc.member_account_indices.size()) < size) {
      pc.member_account_indices.insert(static_cast<int>(rng.below(static_cast<std::uint64_t>(n_scammers))));
    }
    pc.wallet_focus = kAllWallets[rng.below(kAllWallets.size())];
    pc.category = rng.bernoulli(0.5) ? CampaignCategory::KeyPhraseRequest : CampaignCategory::FeePayment;
    const std::string kw(kWalletKeywords[static_cast<std::size_t>(pc.wallet_focus)]);
    const int n_ids = 1 + static_cast<int>(rng.below(3));
    std::set<ChannelKind> kinds;
    while (static_cast<int>(kinds.size()) < n_ids) {
      kinds.insert(kAllChannelKinds[rng.below(kAllChannelKinds.size())]);
    }
    for (const auto kind : kinds) {
      const std::string tag = fmt::format("{:03}{}", c, random_alnum(rng, 3));
      std::string raw;
      switch (kind) {
        case ChannelKind::Email:
          // Mixed case and gmail dots exercise normalization.
          raw = rng.bernoulli(0.5) ? fmt::format("{}.Help{}@gmail.com", kw, tag)
                                   : fmt::format("{}support{}@outlook.com", kw, tag);
          if (!raw.empty()) raw[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(raw[0])));
          break;
        case ChannelKind::Form:
          raw = rng.bernoulli(0.7)
                    ? fmt::format("https://docs.google.com/forms/d/e/1FAIpQL{}{}/viewform?usp=sf_link",
                                  tag, random_alnum(rng, 8))
                    : fmt::format("https://form.jotform.com/2300{}{}", random_digits(rng, 6), c);
          break;
        case ChannelKind::Instagram:
          raw = fmt::format("@{}_{}{}", kw, pick(rng, kHandleWords), tag);
          break;
        case ChannelKind::Telegram:
          raw = fmt::format("@{}_{}{}", pick(rng, kHandleWords), kw, tag);
          break;
        case ChannelKind::WhatsApp:
          raw = fmt::format("+1 {}{:03} {}", random_digits(rng, 3), c, random_digits(rng, 4));
          break;
        case ChannelKind::TwitterDM:
          raw = fmt::format("https://twitter.com/messages/compose?recipient_id={}{:03}",
                            random_digits(rng, 9), c);
          break;
      }
      pc.identifiers.emplace_back(kind, raw);
    }
    out.push_back(std::move(pc));
  }
  return out;
}

void to_json(nlohmann::json& j, const GroundTruthEntry& g) {
  j = {{"kind", g.kind}, {"identifier", g.identifier}, {"campaign_id", g.campaign_id}};
}

void from_json(const nlohmann::json& j, GroundTruthEntry& g) {
  j.at("kind").get_to(g.kind);
  j.at("identifier").get_to(g.identifier);
  j.at("campaign_id").get_to(g.campaign_id);
}

void to_json(nlohmann::json& j, const PlantedCampaign& c) {
  auto ids = nlohmann::json::array();
  for (const auto& [k, raw] : c.identifiers) ids.push_back({{"kind", k}, {"raw", raw}});
  j = {{"campaign_id", c.campaign_id},
       {"members", c.member_account_indices},
       {"identifiers", ids},
       {"wallet_focus", c.wallet_focus},
       {"category", std::string(to_string(c.category))}};
}

void from_json(const nlohmann::json& j, PlantedCampaign& c) {
  j.at("campaign_id").get_to(c.campaign_id);
  c.member_account_indices = j.at("members").get<std::set<int>>();
  c.identifiers.clear();
  for (const auto& e : j.at("identifiers")) {
    c.identifiers.emplace_back(e.at("kind").get<ChannelKind>(), e.at("raw").get<std::string>());
  }
  j.at("wallet_focus").get_to(c.wallet_focus);
  const auto cat = j.at("category").get<std::string>();
  if (cat == "KeyPhraseRequest") {
    c.category = CampaignCategory::KeyPhraseRequest;
  } else if (cat == "FeePayment") {
    c.category = CampaignCategory::FeePayment;
  } else {
    throw ValidationError("unknown campaign category " + cat);
  }
}

SimOutput run_sim(const SimConfig& config, const PostingPlan& plan) {
  validate(config);
  SimOutput out;
  if (config.n_scammers == 0) return out;
  const auto& tweets = plan.entries;
  if (tweets.empty()) throw ConfigError("run_sim needs a non-empty posting plan");

  std::vector<std::pair<Source, double>> mix(config.source_mix.begin(), config.source_mix.end());
  const double mix_total = std::accumulate(mix.begin(), mix.end(), 0.0,
                                           [](double a, const auto& p) { return a + p.second; });
  std::array<double, 5> weight{};
  for (std::size_t m = 0; m < 5; ++m) {
    auto it = config.mode_weights.find(mode_at(m));
    weight[m] = it == config.mode_weights.end() ? 0.0 : it->second;
  }

  std::map<int, std::vector<const PlantedCampaign*>> membership;
  for (const auto& pc : config.planted_campaigns) {
    for (int m : pc.member_account_indices) membership[m].push_back(&pc);
    for (const auto& [kind, raw] : pc.identifiers) {
      out.ground_truth.push_back({kind, normalize_identifier(raw, kind), pc.campaign_id});
    }
  }
  std::sort(out.ground_truth.begin(), out.ground_truth.end(),
            [](const GroundTruthEntry& a, const GroundTruthEntry& b) {
              return std::tie(a.kind, a.identifier, a.campaign_id) <
                     std::tie(b.kind, b.identifier, b.campaign_id);
            });

  const Timestamp plan_start = tweets.front().scheduled_at;
  constexpr Duration kMaxDelay = 15 * kMinute;

  for (int idx = 0; idx < config.n_scammers; ++idx) {
    SplitMix64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(idx)));
    ScamAccount acct;
    acct.account_id = fmt::format("sc-{:05}", idx);
    acct.handle = fmt::format("{}_{}{:05}", pick(rng, kHandleWords),
                              kWalletKeywords[rng.below(kWalletKeywords.size())], idx);
    acct.name = fmt::format("Wallet {} {}", pick(rng, kHandleWords), idx);
    const double loc = rng.uniform();
    acct.location = loc < 0.65 ? "" : loc < 0.75 ? "USA" : loc < 0.85 ? "Cryptoverse" : "UK";
    acct.description = "Crypto wallet recovery and support. DMs open.";
    acct.followers_count = static_cast<std::int64_t>(rng.below(5000));
    acct.following_count = static_cast<std::int64_t>(rng.below(3000));
    acct.created_at = plan_start - static_cast<Duration>(30 + rng.below(2000)) * kDay;
    acct.profile_image_ref = fmt::format("images/{}.jpg", acct.account_id);

    AccountPlan ap;
    for (std::size_t m = 0; m < 5; ++m) ap.modes[m] = rng.bernoulli(weight[m]);
    if (std::none_of(std::begin(ap.modes), std::end(ap.modes), [](bool b) { return b; })) {
      // Every simulated account interacts at least once; fall back to one of
      // the non-reply modes so the reply share stays at its configured value.
      double rest = 0;
      for (std::size_t m = 1; m < 5; ++m) rest += weight[m];
      if (rest > 0) {
        double u = rng.uniform() * rest;
        for (std::size_t m = 1; m < 5; ++m) {
          if (u < weight[m] || m == 4) {
            ap.modes[m] = true;
            break;
          }
          u -= weight[m];
        }
      } else {
        ap.modes[0] = true;
      }
    }
    const auto mem_it = membership.find(idx);
    const bool member = mem_it != membership.end();
    const std::size_t kReply = 0, kQuoted = 2, kFollow = 4;
    if (member && !ap.modes[kReply] && !ap.modes[kQuoted]) ap.modes[kQuoted] = true;

    const bool key_phrase_pitch = rng.bernoulli(0.5);
    const std::size_t arrival = rng.below(tweets.size());
    const Timestamp arrival_at = tweets[arrival].scheduled_at;

    // Terminal status from daily hazards over the horizon.
    std::optional<AccountStatus> terminal;
    for (int d = 0; d < config.horizon_days && !terminal; ++d) {
      const double u = rng.uniform();
      if (u < config.suspension_hazard + config.deactivation_hazard) {
        const Duration offset = d == 0 ? kMaxDelay + kMinute +
                                             static_cast<Duration>(rng.below(kDay - kMaxDelay - kMinute))
                                       : static_cast<Duration>(rng.below(kDay));
        terminal = AccountStatus{u < config.suspension_hazard ? StatusKind::Suspended
                                                             : StatusKind::NotFound,
                                 arrival_at + d * kDay + offset};
      }
    }
    const Timestamp end = terminal ? terminal->observed_at
                                   : arrival_at + static_cast<Duration>(config.horizon_days) * kDay;
    append_status(acct.status_history, {StatusKind::Active, arrival_at});
    if (terminal) append_status(acct.status_history, *terminal);

    // Tweets [arrival, hi) can be engaged and still land before `end`.
    const auto hi_it = std::lower_bound(
        tweets.begin() + static_cast<long>(arrival), tweets.end(), end - kMaxDelay,
        [](const PlanEntry& e, Timestamp t) { return e.scheduled_at < t; });
    const std::size_t hi = static_cast<std::size_t>(hi_it - tweets.begin());
    const std::size_t window = hi > arrival ? hi - arrival : 0;

    std::vector<std::string> texts;
    int seq = 0;
    auto make_text = [&](const PlanEntry& tweet, std::vector<std::string>& urls) -> std::string {
      if (!texts.empty() && rng.bernoulli(config.repeat_text_prob)) {
        const std::string& t = texts[rng.below(texts.size())];
        if (member) {
          // Repeated pitches re-post the same links.
          for (const auto* pc : mem_it->second) {
            for (const auto& [kind, raw] : pc->identifiers) {
              if ((kind == ChannelKind::Form || kind == ChannelKind::TwitterDM) &&
                  t.find(raw) != std::string::npos) {
                urls.push_back(raw);
              }
            }
          }
        }
        return t;
      }
      const std::string wallet = wallet_display_name(tweet.tweet.wallet);
      std::string text = replace_all(std::string(pick(rng, kOpeners)), "{wallet}", wallet);
      if (member) {
        for (const auto* pc : mem_it->second) {
          for (const auto& [kind, raw] : pc->identifiers) {
            text += ' ';
            text += present(rng, kind, raw, urls);
          }
        }
      } else if (key_phrase_pitch) {
        text += ' ';
        text += pick(rng, kKeyPhrasePitches);
      } else {
        text += ' ';
        text += fee_pitch(rng);
      }
      texts.push_back(text);
      return text;
    };

    auto emit = [&](std::size_t mode, std::size_t tweet_idx) {
      const auto& tw = tweets[tweet_idx];
      Interaction x;
      x.interaction_id = fmt::format("ix-{:05}-{:05}", idx, seq++);
      x.kind = mode_at(mode);
      x.actor = acct.account_id;
      if (x.kind == InteractionKind::Follow) {
        x.target_profile = tw.profile_id;
      } else {
        x.target_tweet = tw.tweet.tweet_id;
      }
      if (carries_text(x.kind)) x.text = make_text(tw, x.urls);
      x.source = draw_source(rng, mix, mix_total);
      x.lang = rng.bernoulli(0.02) ? "fr" : "en";
      x.at = tw.scheduled_at + static_cast<Duration>(1 + rng.below(15)) * kMinute;
      out.interactions.push_back(std::move(x));
    };

    // Text modes first so a campaign member's arrival reply lists everything.
    for (std::size_t m : {kReply, kQuoted, std::size_t{1}, std::size_t{3}, kFollow}) {
      if (ap.modes[m]) emit(m, arrival);
    }
    for (std::size_t m = 0; m < 4; ++m) {
      if (!ap.modes[m] || window == 0) continue;
      const auto k = rng.poisson(config.engagement_lambda * static_cast<double>(window));
      std::vector<std::size_t> picks;
      for (std::uint32_t i = 0; i < k; ++i) picks.push_back(arrival + rng.below(window));
      std::sort(picks.begin(), picks.end());
      const auto mode = mode_at(m);
      if (mode == InteractionKind::Like || mode == InteractionKind::Retweet) {
        // At most one like / retweet per tweet.
        picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
        std::erase(picks, arrival);
      }
      for (auto t : picks) emit(m, t);
    }
    out.roles[acct.account_id] = AccountRole::Scammer;
    out.accounts.push_back(std::move(acct));
  }

  std::sort(out.interactions.begin(), out.interactions.end(),
            [](const Interaction& a, const Interaction& b) {
              return std::tie(a.at, a.interaction_id) < std::tie(b.at, b.interaction_id);
            });
  return out;
}

void inject_benign(SimOutput& out, const SimConfig& config, const PostingPlan& plan, double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("benign rate must be in [0,1]");
  if (rate == 0.0 || plan.entries.empty()) return;
  const auto& tweets = plan.entries;
  SplitMix64 rng(derive_seed(config.seed, fnv1a("benign")));
  const int n = static_cast<int>(std::lround(rate * config.n_scammers));
  auto add_reply = [&](const ScamAccount& a, std::size_t tweet, std::string text,
                       std::vector<std::string> urls, int seq) {
    Interaction x;
    x.interaction_id = fmt::format("ix-{}-{:05}", a.account_id, seq);
    x.kind = InteractionKind::Reply;
    x.actor = a.account_id;
    x.target_tweet = tweets[tweet].tweet.tweet_id;
    x.text = std::move(text);
    x.urls = std::move(urls);
    x.source = Source::iPhone;
    x.at = tweets[tweet].scheduled_at + static_cast<Duration>(1 + rng.below(30)) * kMinute;
    out.interactions.push_back(std::move(x));
  };
  const Timestamp start = tweets.front().scheduled_at;

  for (int i = 0; i < n; ++i) {
    ScamAccount a;
    a.account_id = fmt::format("bn-{:05}", i);
    a.handle = fmt::format("just_a_user_{}", i);
    a.name = fmt::format("User {}", i);
    a.followers_count = static_cast<std::int64_t>(rng.below(800));
    a.following_count = static_cast<std::int64_t>(rng.below(800));
    a.created_at = start - static_cast<Duration>(100 + rng.below(3000)) * kDay;
    const std::size_t t = rng.below(tweets.size());
    append_status(a.status_history, {StatusKind::Active, tweets[t].scheduled_at});
    add_reply(a, t, std::string(pick(rng, kBenignTexts)), {}, 0);
    if (rng.bernoulli(0.3)) {
      Interaction like;
      like.interaction_id = fmt::format("ix-{}-{:05}", a.account_id, 1);
      like.kind = InteractionKind::Like;
      like.actor = a.account_id;
      like.target_tweet = tweets[t].tweet.tweet_id;
      like.at = tweets[t].scheduled_at + 2 * kHour;
      out.interactions.push_back(std::move(like));
    }
    out.roles[a.account_id] = AccountRole::Benign;
    out.accounts.push_back(std::move(a));
  }

  struct Official {
    const char* id;
    const char* handle;
    const char* text;
    const char* url;
  };
  static constexpr std::array<Official, 4> kOfficials{{
      {"of-00000", "TrustWallet",
       "Hi! Please only use our official help centre and never share your recovery phrase.",
       "https://support.trustwallet.com/en/support/home"},
      {"of-00001", "MetaMaskSupport",
       "We will never DM you first. Open a ticket at our support site.",
       "https://support.metamask.io"},
      {"of-00002", "BinanceHelpDesk", "Official support for wallet issues is here:",
       "https://www.binance.com/en/support"},
      {"of-00003", "crypto_news_desk",
       "Reminder: never share your seed phrase with anyone who replies to you.", ""},
  }};
  int k = 0;
  for (const auto& o : kOfficials) {
    ScamAccount a;
    a.account_id = o.id;
    a.handle = o.handle;
    a.name = o.handle;
    a.verified = true;
    a.followers_count = 100000 + static_cast<std::int64_t>(rng.below(900000));
    a.created_at = start - 2000 * kDay;
    const std::size_t t = rng.below(tweets.size());
    append_status(a.status_history, {StatusKind::Active, tweets[t].scheduled_at});
    std::vector<std::string> urls;
    std::string text = o.text;
    if (*o.url) {
      urls.emplace_back(o.url);
      text += ' ';
      text += o.url;
    }
    add_reply(a, t, std::move(text), std::move(urls), k++);
    out.roles[a.account_id] = AccountRole::Official;
    out.accounts.push_back(std::move(a));
  }

  std::sort(out.accounts.begin(), out.accounts.end(),
            [](const ScamAccount& a, const ScamAccount& b) { return a.account_id < b.account_id; });
  std::sort(out.interactions.begin(), out.interactions.end(),
            [](const Interaction& a, const Interaction& b) {
              return std::tie(a.at, a.interaction_id) < std::tie(b.at, b.interaction_id);
            });
}

std::optional<ScriptedReply> scripted_response(const SimConfig& config,
                                               const ContactChannel& channel, Timestamp sent_at) {
  const PlantedCampaign* campaign = nullptr;
  for (const auto& pc : config.planted_campaigns) {
    for (const auto& [kind, raw] : pc.identifiers) {
      if (kind == channel.kind && normalize_identifier(raw, kind) == channel.identifier) {
        campaign = &pc;
      }
    }
  }
  if (!campaign) return std::nullopt;
  SplitMix64 rng(derive_seed(config.seed, fnv1a(fmt::format("reply:{}:{}", to_string(channel.kind),
                                                            channel.identifier))));
  if (!rng.bernoulli(config.response_prob)) return std::nullopt;

  ScriptedReply r;
  r.at = sent_at + static_cast<Duration>(1 + rng.below(48)) * kHour;
  const std::string wallet = wallet_display_name(campaign->wallet_focus);
  if (campaign->category == CampaignCategory::KeyPhraseRequest) {
    std::string form;
    for (const auto& [kind, raw] : campaign->identifiers) {
      if (kind == ChannelKind::Form) form = raw;
    }
    if (form.empty()) {
      form = fmt::format("https://docs.google.com/forms/d/e/1FAIpQL{}/viewform", random_alnum(rng, 12));
    }
    r.urls.push_back(form);
    r.text = fmt::format(
        "Thank you for contacting {} support. To restore your wallet fill this form with your "
        "12 words recovery phrase: {}",
        wallet, form);
    return r;
  }
  const int amount = 150 + 50 * static_cast<int>(rng.below(49));
  std::string how;
  switch (rng.below(4)) {
    case 0:
      how = fmt::format("pay through paypal.me/{}{}", pick(rng, kHandleWords), random_digits(rng, 3));
      break;
    case 1:
      how = fmt::format("send it in BTC to {}", random_btc_address(rng));
      break;
    case 2:
      how = fmt::format("send it in ETH to {}", random_eth_address(rng));
      break;
    default:
      how = "buy a gift card on carddelivery and send us the code";
      break;
  }
  r.text = fmt::format("We can fix your {} wallet. Our service fee is ${}, {}.", wallet, amount, how);
  return r;
}

std::vector<ProbeResult> simulate_probes(const SimConfig& config,
                                         std::span<const ContactChannel> channels, Timestamp at) {
  std::vector<ProbeResult> out;
  for (const auto& c : channels) {
    double rate = 0;
    switch (c.kind) {
      case ChannelKind::Email:
        rate = 0.088;
        break;
      case ChannelKind::Form: {
        const auto url = parse_url(c.identifier);
        rate = url && host_matches(url->host, "jotform.com") ? 0.0943 : 0.3807;
        break;
      }
      case ChannelKind::Instagram:
        rate = 0.5755;
        break;
      case ChannelKind::Telegram:
        rate = 0.0;
        break;
      case ChannelKind::WhatsApp:
        rate = 0.3177;
        break;
      case ChannelKind::TwitterDM:
        continue;
    }
    SplitMix64 rng(derive_seed(config.seed, fnv1a(fmt::format("probe:{}:{}", to_string(c.kind),
                                                              c.identifier))));
    out.push_back({c, at, rng.bernoulli(rate) ? ProbeOutcome::Blocked : ProbeOutcome::Alive});
  }
  return out;
}

SyntheticEmbeddings synthetic_embeddings(std::span<const ScamAccount> accounts, std::size_t total,
                                         std::size_t dim, std::uint64_t seed) {
  // Blob shares loosely follow the profile-picture clusters. The small tail
  // blobs fall to noise once min_cluster_size exceeds their count.
  static constexpr std::array<double, 7> kShares{0.22, 0.22, 0.21, 0.12, 0.11, 0.07, 0.03};
  static constexpr double kOutlierShare = 0.02;
  SplitMix64 centre_rng(derive_seed(seed, fnv1a("blob-centres")));
  std::vector<std::vector<double>> centres(kShares.size(), std::vector<double>(dim));
  for (auto& c : centres) {
    for (auto& v : c) v = centre_rng.uniform() * 20.0 - 10.0;
  }

  std::vector<AccountId> ids;
  for (const auto& a : accounts) ids.push_back(a.account_id);
  for (std::size_t i = 0; ids.size() < total; ++i) ids.push_back(fmt::format("ext-{:04}", i));

  SyntheticEmbeddings out;
  for (const auto& id : ids) {
    SplitMix64 rng(derive_seed(seed, fnv1a(id)));
    EmbeddingRecord r;
    r.account_id = id;
    r.vector.resize(dim);
    int blob = -1;
    if (!rng.bernoulli(kOutlierShare)) {
      double u = rng.uniform();
      blob = static_cast<int>(kShares.size()) - 1;
      for (std::size_t b = 0; b < kShares.size(); ++b) {
        if (u < kShares[b]) {
          blob = static_cast<int>(b);
          break;
        }
        u -= kShares[b];
      }
    }
    for (std::size_t k = 0; k < dim; ++k) {
      // Sum of four uniforms: cheap, bounded, roughly gaussian noise.
      const double noise = (rng.uniform() + rng.uniform() + rng.uniform() + rng.uniform() - 2.0) * 0.5;
      r.vector[k] = blob >= 0 ? centres[static_cast<std::size_t>(blob)][k] + noise
                              : rng.uniform() * 60.0 - 30.0;
    }
    out.truth[id] = blob;
    out.records.push_back(std::move(r));
  }
  return out;
}

std::map<int, std::string> name_labels(const ClusterAssignment& assignment,
                                       const std::map<AccountId, int>& truth) {
  std::map<int, std::map<int, std::size_t>> votes;
  for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
    const int label = assignment.labels[i];
    if (label < 0) continue;
    auto it = truth.find(assignment.account_ids[i]);
    ++votes[label][it == truth.end() ? -1 : it->second];
  }
  std::map<int, std::string> names;
  std::map<std::string, int> used;
  for (const auto& [label, counts] : votes) {
    int best = -1;
    std::size_t best_n = 0;
    for (const auto& [blob, n] : counts) {
      if (n > best_n) {
        best = blob;
        best_n = n;
      }
    }
    std::string name = best >= 0 ? std::string(kProfileClusterNames[static_cast<std::size_t>(best)])
                                 : "Miscellaneous";
    if (int dup = used[name]++; dup > 0) name += fmt::format(" ({})", dup + 1);
    names[label] = name;
  }
  return names;
}

}  // namespace conman
