#include "conman/lure.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "conman/error.hpp"
#include "conman/jsonl.hpp"
#include "conman/model_json.hpp"
#include "conman/normalize.hpp"
#include "conman/random.hpp"

namespace conman {
namespace {

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

LureTemplateBank make_default_bank() {
  LureTemplateBank b;
  b.greetings = {
      "Hey there!",     "Hi, Wallet Support!", "Hello everyone!", "Hi all!",
      "Good morning!",  "Hey folks!",          "Hello Twitter!",  "Hi friends!",
      "Evening all!",   "Hey crypto fam!",     "Hello!",          "Hi there!",
  };
  b.problem_patterns = {
      "My {wallet} wallet is stuck and I need help recovering it.",
      "I can't access my {wallet} account, can anyone help?",
      "Need support, my {wallet} wallet shows a zero balance.",
      "My {wallet} transactions keep failing, please help.",
      "Locked out of {wallet} after an update, need support.",
      "{wallet} support is not answering and I need help.",
      "My {wallet} wallet won't sync, any help appreciated.",
      "Lost access to my {wallet} funds, looking for support.",
      "Can someone help me restore my {wallet} wallet?",
      "My {wallet} swap is pending for days, need help.",
      "Who can help with a frozen {wallet} account?",
      "Looking for {wallet} support, my tokens disappeared.",
      "My {wallet} app crashes on login, need help fast.",
      "{wallet} keeps rejecting my withdrawal, I need support.",
      "Help, my {wallet} wallet got disconnected from my device.",
      "Anyone know how to reach real {wallet} support?",
      "My {wallet} NFTs are not showing up, please help.",
      "Need help, {wallet} says my wallet is invalid.",
      "I sent funds to my {wallet} wallet and they never arrived, help.",
      "My {wallet} account got blocked, I need support.",
  };
  b.urgency_patterns = {
      "any references asap please?",   "I am in dire need!",
      "please reply quickly!",         "it's urgent!",
      "I need this fixed today!",      "any advice welcome asap!",
      "please, this is urgent.",       "time sensitive, thanks!",
      "anyone? I'm desperate.",        "quick help would mean a lot!",
      "can't wait much longer!",       "really need a hand right now!",
  };
  b.hashtag_patterns = {
      "#{wallet}support", "#{wallet}help",   "#{wallet}",
      "#{wallet}wallet",  "#crypto{wallet}", "#{wallet}issue",
  };
  return b;
}

}  // namespace

void validate_bank(const LureTemplateBank& bank) {
  if (bank.greetings.empty() || bank.problem_patterns.empty() || bank.urgency_patterns.empty() ||
      bank.hashtag_patterns.empty()) {
    throw ConfigError("lure bank lists must be non-empty");
  }
  for (const auto& p : bank.problem_patterns) {
    const auto lower = to_lower(p);
    if (p.find("{wallet}") == std::string::npos) {
      throw ConfigError(fmt::format("problem pattern lacks {{wallet}}: '{}'", p));
    }
    if (lower.find("help") == std::string::npos && lower.find("support") == std::string::npos) {
      throw ConfigError(fmt::format("problem pattern lacks help/support: '{}'", p));
    }
  }
}

const LureTemplateBank& default_bank() {
  static const LureTemplateBank bank = make_default_bank();
  return bank;
}

void to_json(nlohmann::json& j, const LureTemplateBank& b) {
  j = {{"greetings", b.greetings},
       {"problem_patterns", b.problem_patterns},
       {"urgency_patterns", b.urgency_patterns},
       {"hashtag_patterns", b.hashtag_patterns}};
}

void from_json(const nlohmann::json& j, LureTemplateBank& b) {
  j.at("greetings").get_to(b.greetings);
  j.at("problem_patterns").get_to(b.problem_patterns);
  j.at("urgency_patterns").get_to(b.urgency_patterns);
  j.at("hashtag_patterns").get_to(b.hashtag_patterns);
}

LureTemplateBank load_bank(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open bank " + path.string());
  LureTemplateBank bank;
  try {
    bank = nlohmann::json::parse(in).get<LureTemplateBank>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  validate_bank(bank);
  return bank;
}

std::string wallet_display_name(WalletKind w) {
  switch (w) {
    case WalletKind::TrustWallet:
      return "Trust Wallet";
    case WalletKind::Free:
      return "Free Wallet";
    default:
      return std::string(to_string(w));
  }
}

HoneyTweet generate_lure(const LureTemplateBank& bank, std::optional<WalletKind> wallet,
                         std::uint64_t seed) {
  SplitMix64 rng(seed);
  const WalletKind drawn = kAllWallets[rng.below(kAllWallets.size())];
  const WalletKind w = wallet.value_or(drawn);
  const std::string display = wallet_display_name(w);
  const std::string tag = to_lower(to_string(w));

  HoneyTweet t;
  t.wallet = w;
  t.sentences[0] = bank.greetings[rng.below(bank.greetings.size())];
  t.sentences[1] =
      replace_all(bank.problem_patterns[rng.below(bank.problem_patterns.size())], "{wallet}",
                  display);
  t.sentences[2] = bank.urgency_patterns[rng.below(bank.urgency_patterns.size())];
  t.hashtags.push_back(
      replace_all(bank.hashtag_patterns[rng.below(bank.hashtag_patterns.size())], "{wallet}", tag));
  t.full_text = compose_full_text(t.sentences, t.hashtags);
  return t;
}

std::string_view to_string(LureVerdict v) {
  switch (v) {
    case LureVerdict::Accepted:
      return "Accepted";
    case LureVerdict::Duplicate:
      return "Duplicate";
    case LureVerdict::TooLong:
      return "TooLong";
  }
  return "?";
}

LureVerdict validate_lure(const HoneyTweet& draft,
                          const std::unordered_set<std::string>& history) {
  if (history.contains(draft.full_text)) return LureVerdict::Duplicate;
  if (code_point_length(draft.full_text) > kTweetLimit) return LureVerdict::TooLong;
  return LureVerdict::Accepted;
}

HoneyTweet next_unique_lure(const LureTemplateBank& bank, std::uint64_t& seed,
                            std::unordered_set<std::string>& history) {
  // The bank is finite; give up long after any reasonable bank would be exhausted.
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    auto draft = generate_lure(bank, std::nullopt, seed);
    seed = derive_seed(seed, 1);
    if (validate_lure(draft, history) == LureVerdict::Accepted) {
      history.insert(draft.full_text);
      return draft;
    }
  }
  throw ConfigError("lure bank exhausted: no unique draft found");
}

std::vector<HoneyTweet> PostingPlan::tweets() const {
  std::vector<HoneyTweet> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.tweet);
  return out;
}

PostingPlan schedule_posts(std::span<const HoneyProfile> profiles, int count_per_profile,
                           Timestamp start, Duration interval, const LureTemplateBank& bank,
                           std::uint64_t seed) {
  if (interval <= 0) throw ConfigError("posting interval must be positive");
  if (count_per_profile < 0) throw ConfigError("count_per_profile must be >= 0");
  validate_bank(bank);

  PostingPlan plan;
  plan.interval = interval;
  const auto n = static_cast<Duration>(profiles.size());
  plan.entries.reserve(profiles.size() * static_cast<std::size_t>(count_per_profile));
  for (int k = 0; k < count_per_profile; ++k) {
    for (Duration p = 0; p < n; ++p) {
      PlanEntry e;
      e.profile_id = profiles[static_cast<std::size_t>(p)].profile_id;
      e.scheduled_at = start + p * (interval / n) + k * interval;
      plan.entries.push_back(std::move(e));
    }
  }
  std::stable_sort(plan.entries.begin(), plan.entries.end(),
                   [](const PlanEntry& a, const PlanEntry& b) {
                     return a.scheduled_at < b.scheduled_at;
                   });

  std::unordered_set<std::string> history;
  std::uint64_t cursor = seed;
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    auto& e = plan.entries[i];
    e.tweet = next_unique_lure(bank, cursor, history);
    e.tweet.tweet_id = fmt::format("tw-{:06}", i);
    e.tweet.profile_id = e.profile_id;
    e.tweet.posted_at = e.scheduled_at;
  }
  return plan;
}

double posts_per_hour(const PostingPlan& plan) {
  std::vector<ProfileId> ids;
  for (const auto& e : plan.entries) ids.push_back(e.profile_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return static_cast<double>(ids.size()) * static_cast<double>(kHour) /
         static_cast<double>(plan.interval);
}

std::vector<HoneyProfile> default_profiles(int n, Timestamp start) {
  static constexpr std::array<std::string_view, 4> kPersonas{
      "NFT collector and DeFi tinkerer", "Long-time HODLer, learning web3",
      "Crypto newbie exploring wallets", "Weekend trader and meme coin fan"};
  std::vector<HoneyProfile> out;
  for (int i = 0; i < n; ++i) {
    HoneyProfile p;
    p.profile_id = fmt::format("hp-{}", i + 1);
    p.handle = fmt::format("crypto_enthusiast_{}", i + 1);
    p.persona_description = std::string(kPersonas[static_cast<std::size_t>(i) % kPersonas.size()]);
    p.created_at = start - kDay;
    out.push_back(std::move(p));
  }
  return out;
}

void to_json(nlohmann::json& j, const PlanEntry& e) {
  j = {{"profile_id", e.profile_id}, {"tweet", e.tweet}, {"scheduled_at", e.scheduled_at}};
}

void from_json(const nlohmann::json& j, PlanEntry& e) {
  j.at("profile_id").get_to(e.profile_id);
  j.at("tweet").get_to(e.tweet);
  j.at("scheduled_at").get_to(e.scheduled_at);
}

void write_plan(const std::filesystem::path& path, const PostingPlan& plan) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& e : plan.entries) {
    nlohmann::json j = e;
    j["interval_s"] = plan.interval;
    out << j.dump() << '\n';
  }
}

PostingPlan read_plan(const std::filesystem::path& path) {
  PostingPlan plan;
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      plan.entries.push_back(j.get<PlanEntry>());
      plan.interval = j.value("interval_s", plan.interval);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), lineno, e.what());
    } catch (const Error& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
  }
  return plan;
}

}  // namespace conman
