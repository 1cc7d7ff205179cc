#include "conman/model.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "conman/error.hpp"

namespace conman {
namespace {

constexpr std::array<std::string_view, 10> kWalletNames{
    "Badger", "Binance", "BitPay", "Coinbase", "Exodus",
    "Free",   "Ledger",  "MetaMask", "Trezor", "TrustWallet"};
constexpr std::array<std::string_view, 5> kInteractionNames{"Reply", "Retweet", "QuotedTweet",
                                                            "Like", "Follow"};
constexpr std::array<std::string_view, 5> kSourceNames{"iPhone", "Android", "WebApp", "Deck",
                                                       "iPad"};
constexpr std::array<std::string_view, 3> kStatusNames{"Active", "Suspended", "NotFound"};
constexpr std::array<std::string_view, 6> kChannelNames{"Email",    "Form",      "Instagram",
                                                        "Telegram", "TwitterDM", "WhatsApp"};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::string_view, N>& names,
             std::string_view what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (iequals(s, names[i])) return static_cast<E>(i);
  }
  throw ValidationError(fmt::format("unknown {} '{}'", what, s));
}

}  // namespace

std::string_view to_string(WalletKind w) { return kWalletNames[static_cast<std::size_t>(w)]; }
std::string_view to_string(InteractionKind k) {
  return kInteractionNames[static_cast<std::size_t>(k)];
}
std::string_view to_string(Source s) { return kSourceNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(StatusKind s) { return kStatusNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(ChannelKind k) { return kChannelNames[static_cast<std::size_t>(k)]; }

WalletKind parse_wallet(std::string_view s) {
  return parse_enum<WalletKind>(s, kWalletNames, "wallet");
}
InteractionKind parse_interaction_kind(std::string_view s) {
  return parse_enum<InteractionKind>(s, kInteractionNames, "interaction kind");
}
Source parse_source(std::string_view s) { return parse_enum<Source>(s, kSourceNames, "source"); }
StatusKind parse_status(std::string_view s) {
  return parse_enum<StatusKind>(s, kStatusNames, "status");
}
ChannelKind parse_channel_kind(std::string_view s) {
  return parse_enum<ChannelKind>(s, kChannelNames, "channel kind");
}

std::string compose_full_text(const std::array<std::string, 3>& sentences,
                              const std::vector<std::string>& hashtags) {
  std::string out;
  auto append = [&out](const std::string& part) {
    if (!out.empty()) out.push_back(' ');
    out += part;
  };
  for (const auto& s : sentences) append(s);
  for (const auto& h : hashtags) append(h);
  return out;
}

std::size_t code_point_length(std::string_view utf8) {
  return static_cast<std::size_t>(std::count_if(utf8.begin(), utf8.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

void validate(const Interaction& i) {
  const bool textual = carries_text(i.kind);
  if (textual && !i.text) {
    throw ValidationError(fmt::format("{} {} has no text", to_string(i.kind), i.interaction_id));
  }
  if (!textual && i.text) {
    throw ValidationError(fmt::format("{} {} must not carry text", to_string(i.kind),
                                      i.interaction_id));
  }
  if (i.kind == InteractionKind::Follow) {
    if (!i.target_profile || i.target_tweet) {
      throw ValidationError(fmt::format("follow {} must target a profile", i.interaction_id));
    }
  } else if (!i.target_tweet || i.target_profile) {
    throw ValidationError(fmt::format("{} {} must target a tweet", to_string(i.kind),
                                      i.interaction_id));
  }
}

void append_status(std::vector<AccountStatus>& history, AccountStatus next) {
  if (!history.empty()) {
    const auto& last = history.back();
    if (next.observed_at < last.observed_at) {
      throw ValidationError("status history must be time-ordered");
    }
    if (is_terminal(last.status) && next.status == StatusKind::Active) {
      throw ValidationError("account cannot return to Active after a terminal status");
    }
  }
  history.push_back(next);
}

std::optional<AccountStatus> terminal_status(const std::vector<AccountStatus>& history) {
  for (const auto& s : history) {
    if (is_terminal(s.status)) return s;
  }
  return std::nullopt;
}

std::string_view to_string(ProbeOutcome o) {
  switch (o) {
    case ProbeOutcome::Alive:
      return "Alive";
    case ProbeOutcome::Blocked:
      return "Blocked";
    case ProbeOutcome::Deleted:
      return "Deleted";
    case ProbeOutcome::Unreachable:
      return "Unreachable";
  }
  return "?";
}

ProbeOutcome parse_probe_outcome(std::string_view s) {
  for (auto o : {ProbeOutcome::Alive, ProbeOutcome::Blocked, ProbeOutcome::Deleted,
                 ProbeOutcome::Unreachable}) {
    if (iequals(to_string(o), s)) return o;
  }
  throw ValidationError(fmt::format("unknown probe outcome '{}'", s));
}

}  // namespace conman
