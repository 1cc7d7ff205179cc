#include "conman/model_json.hpp"

#include "conman/error.hpp"

namespace conman {

void to_json(nlohmann::json& j, WalletKind w) { j = std::string(to_string(w)); }
void from_json(const nlohmann::json& j, WalletKind& w) { w = parse_wallet(j.get<std::string>()); }
void to_json(nlohmann::json& j, InteractionKind k) { j = std::string(to_string(k)); }
void from_json(const nlohmann::json& j, InteractionKind& k) {
  k = parse_interaction_kind(j.get<std::string>());
}
void to_json(nlohmann::json& j, Source s) { j = std::string(to_string(s)); }
void from_json(const nlohmann::json& j, Source& s) { s = parse_source(j.get<std::string>()); }
void to_json(nlohmann::json& j, StatusKind s) { j = std::string(to_string(s)); }
void from_json(const nlohmann::json& j, StatusKind& s) { s = parse_status(j.get<std::string>()); }
void to_json(nlohmann::json& j, ChannelKind k) { j = std::string(to_string(k)); }
void from_json(const nlohmann::json& j, ChannelKind& k) {
  k = parse_channel_kind(j.get<std::string>());
}

void to_json(nlohmann::json& j, const HoneyProfile& p) {
  j = {{"profile_id", p.profile_id},
       {"handle", p.handle},
       {"persona_description", p.persona_description},
       {"created_at", p.created_at}};
}

void from_json(const nlohmann::json& j, HoneyProfile& p) {
  j.at("profile_id").get_to(p.profile_id);
  j.at("handle").get_to(p.handle);
  p.persona_description = j.value("persona_description", "");
  j.at("created_at").get_to(p.created_at);
}

void to_json(nlohmann::json& j, const HoneyTweet& t) {
  j = {{"tweet_id", t.tweet_id},   {"profile_id", t.profile_id}, {"wallet", t.wallet},
       {"sentences", t.sentences}, {"full_text", t.full_text},   {"hashtags", t.hashtags},
       {"posted_at", t.posted_at}};
}

void from_json(const nlohmann::json& j, HoneyTweet& t) {
  j.at("tweet_id").get_to(t.tweet_id);
  j.at("profile_id").get_to(t.profile_id);
  j.at("wallet").get_to(t.wallet);
  j.at("sentences").get_to(t.sentences);
  j.at("full_text").get_to(t.full_text);
  t.hashtags = j.value("hashtags", std::vector<std::string>{});
  j.at("posted_at").get_to(t.posted_at);
}

void to_json(nlohmann::json& j, const Interaction& i) {
  j = {{"interaction_id", i.interaction_id},
       {"kind", i.kind},
       {"actor", i.actor},
       {"urls", i.urls},
       {"source", i.source},
       {"lang", i.lang},
       {"at", i.at}};
  put_optional(j, "target_tweet", i.target_tweet);
  put_optional(j, "target_profile", i.target_profile);
  put_optional(j, "text", i.text);
}

void from_json(const nlohmann::json& j, Interaction& i) {
  j.at("interaction_id").get_to(i.interaction_id);
  j.at("kind").get_to(i.kind);
  j.at("actor").get_to(i.actor);
  get_optional(j, "target_tweet", i.target_tweet);
  get_optional(j, "target_profile", i.target_profile);
  get_optional(j, "text", i.text);
  i.urls = j.value("urls", std::vector<std::string>{});
  j.at("source").get_to(i.source);
  i.lang = j.value("lang", "en");
  j.at("at").get_to(i.at);
  validate(i);
}

void to_json(nlohmann::json& j, const AccountStatus& s) {
  j = {{"status", s.status}, {"observed_at", s.observed_at}};
}

void from_json(const nlohmann::json& j, AccountStatus& s) {
  j.at("status").get_to(s.status);
  j.at("observed_at").get_to(s.observed_at);
}

void to_json(nlohmann::json& j, const ScamAccount& a) {
  j = {{"account_id", a.account_id},
       {"handle", a.handle},
       {"created_at", a.created_at},
       {"name", a.name},
       {"location", a.location},
       {"description", a.description},
       {"followers_count", a.followers_count},
       {"following_count", a.following_count},
       {"verified", a.verified},
       {"status_history", a.status_history}};
  put_optional(j, "profile_image_ref", a.profile_image_ref);
}

void from_json(const nlohmann::json& j, ScamAccount& a) {
  j.at("account_id").get_to(a.account_id);
  j.at("handle").get_to(a.handle);
  j.at("created_at").get_to(a.created_at);
  a.name = j.value("name", "");
  a.location = j.value("location", "");
  a.description = j.value("description", "");
  a.followers_count = j.value("followers_count", std::int64_t{0});
  a.following_count = j.value("following_count", std::int64_t{0});
  if (a.followers_count < 0 || a.following_count < 0) {
    throw ValidationError("negative follower counts for " + a.account_id);
  }
  a.verified = j.value("verified", false);
  get_optional(j, "profile_image_ref", a.profile_image_ref);
  a.status_history.clear();
  for (const auto& s : j.value("status_history", nlohmann::json::array())) {
    append_status(a.status_history, s.get<AccountStatus>());
  }
}

void to_json(nlohmann::json& j, const ContactChannel& c) {
  j = {{"kind", c.kind},
       {"identifier", c.identifier},
       {"raw", c.raw},
       {"first_seen", c.first_seen},
       {"last_seen", c.last_seen},
       {"observed_in", c.observed_in}};
  put_optional(j, "wallet_attribution", c.wallet_attribution);
}

void from_json(const nlohmann::json& j, ContactChannel& c) {
  j.at("kind").get_to(c.kind);
  j.at("identifier").get_to(c.identifier);
  c.raw = j.value("raw", c.identifier);
  get_optional(j, "wallet_attribution", c.wallet_attribution);
  j.at("first_seen").get_to(c.first_seen);
  j.at("last_seen").get_to(c.last_seen);
  j.at("observed_in").get_to(c.observed_in);
  if (c.first_seen > c.last_seen) throw ValidationError("first_seen after last_seen");
  if (c.observed_in.empty()) throw ValidationError("channel without observations");
}

void to_json(nlohmann::json& j, ProbeOutcome o) { j = std::string(to_string(o)); }
void from_json(const nlohmann::json& j, ProbeOutcome& o) {
  o = parse_probe_outcome(j.get<std::string>());
}

void to_json(nlohmann::json& j, const ProbeResult& p) {
  j = {{"channel", p.channel}, {"probed_at", p.probed_at}, {"outcome", p.outcome}};
}

void from_json(const nlohmann::json& j, ProbeResult& p) {
  j.at("channel").get_to(p.channel);
  j.at("probed_at").get_to(p.probed_at);
  j.at("outcome").get_to(p.outcome);
}

}  // namespace conman
