#pragma once

#include <nlohmann/json.hpp>

#include "conman/model.hpp"

namespace conman {

void to_json(nlohmann::json& j, WalletKind w);
void from_json(const nlohmann::json& j, WalletKind& w);
void to_json(nlohmann::json& j, InteractionKind k);
void from_json(const nlohmann::json& j, InteractionKind& k);
void to_json(nlohmann::json& j, Source s);
void from_json(const nlohmann::json& j, Source& s);
void to_json(nlohmann::json& j, StatusKind s);
void from_json(const nlohmann::json& j, StatusKind& s);
void to_json(nlohmann::json& j, ChannelKind k);
void from_json(const nlohmann::json& j, ChannelKind& k);

void to_json(nlohmann::json& j, const HoneyProfile& p);
void from_json(const nlohmann::json& j, HoneyProfile& p);
void to_json(nlohmann::json& j, const HoneyTweet& t);
void from_json(const nlohmann::json& j, HoneyTweet& t);
void to_json(nlohmann::json& j, const Interaction& i);
void from_json(const nlohmann::json& j, Interaction& i);
void to_json(nlohmann::json& j, const AccountStatus& s);
void from_json(const nlohmann::json& j, AccountStatus& s);
void to_json(nlohmann::json& j, const ScamAccount& a);
void from_json(const nlohmann::json& j, ScamAccount& a);
void to_json(nlohmann::json& j, const ContactChannel& c);
void from_json(const nlohmann::json& j, ContactChannel& c);
void to_json(nlohmann::json& j, ProbeOutcome o);
void from_json(const nlohmann::json& j, ProbeOutcome& o);
void to_json(nlohmann::json& j, const ProbeResult& p);
void from_json(const nlohmann::json& j, ProbeResult& p);

// Optional-field helpers shared by the module serializers.
template <typename T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void get_optional(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) {
    v = it->template get<T>();
  } else {
    v.reset();
  }
}

}  // namespace conman
