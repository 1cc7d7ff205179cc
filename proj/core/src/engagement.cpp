#include "conman/engagement.hpp"

#include <algorithm>
#include <fstream>

#include <boost/regex.hpp>
#include <fmt/format.h>

#include "conman/crypto.hpp"
#include "conman/error.hpp"
#include "conman/lure.hpp"
#include "conman/model_json.hpp"
#include "conman/normalize.hpp"
#include "conman/random.hpp"

namespace conman {
namespace {

PaymentRules make_default_payment_rules() {
  PaymentRules r;
  r.key_phrase_cues = {"seed phrase", "recovery phrase", "key phrase", "12 words",
                       "secret phrase"};
  r.form_context_cues = {"phrase", "private key", "words", "mnemonic"};
  r.form_hosts = {"docs.google.com/forms", "forms.gle", "jotform.com"};
  r.gift_vendors = {{"carddelivery", GiftVendor::CardDelivery},
                    {"amazon gift", GiftVendor::Amazon},
                    {"gift card", GiftVendor::Other}};
  return r;
}

EmailTemplates make_default_templates() {
  EmailTemplates t;
  t.subjects = {"Need help with my {wallet} wallet", "{wallet} support request",
                "Problem with {wallet}", "Question about my {wallet} account"};
  t.bodies = {
      "Hello,\n\nI saw your reply on Twitter. My {wallet} wallet stopped showing my "
      "balance after an update and I cannot move anything. Can you help me fix it?\n\n"
      "Ref {ref}\nThanks",
      "Hi,\n\nYou replied to my post about {wallet}. My transactions have been pending for "
      "two days and I do not know what to do. What are the next steps?\n\nRef {ref}",
      "Hi there,\n\nI am reaching out about my {wallet} account. It says my wallet is not "
      "synced. Please let me know how you can assist.\n\nRef {ref}\nRegards",
  };
  return t;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

bool contains_ci(const std::string& lower_haystack, std::string_view needle) {
  return lower_haystack.find(to_lower(needle)) != std::string::npos;
}

const boost::regex& paypal_me_re() {
  static const boost::regex re(R"(paypal\.me/([A-Za-z0-9_.-]+))", boost::regex::icase);
  return re;
}
const boost::regex& paypal_email_re() {
  static const boost::regex re(
      R"(paypal\s*[:\-]\s*([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}))",
      boost::regex::icase);
  return re;
}
const boost::regex& base58_re() {
  static const boost::regex re(R"(\b[13][1-9A-HJ-NP-Za-km-z]{25,34}\b)");
  return re;
}
const boost::regex& bech32_re() {
  static const boost::regex re(R"(\b(?:bc1[02-9ac-hj-np-z]{6,87}|BC1[02-9AC-HJ-NP-Z]{6,87})\b)");
  return re;
}
const boost::regex& eth_re() {
  static const boost::regex re(R"(\b0x[0-9a-fA-F]{40}\b)");
  return re;
}
const boost::regex& price_re() {
  static const boost::regex re(R"(\$\s?(\d{1,3}(?:,\d{3})+|\d+)(?:\.(\d{1,2}))?)");
  return re;
}

}  // namespace

std::string_view to_string(Chain c) { return c == Chain::BTC ? "BTC" : "ETH"; }

std::string_view to_string(GiftVendor v) {
  switch (v) {
    case GiftVendor::CardDelivery:
      return "CardDelivery";
    case GiftVendor::Amazon:
      return "Amazon";
    case GiftVendor::Other:
      return "Other";
  }
  return "?";
}

std::string_view to_string(ScammerCategory::Kind k) {
  switch (k) {
    case ScammerCategory::Kind::KeyPhraseRequest:
      return "KeyPhraseRequest";
    case ScammerCategory::Kind::FeePayment:
      return "FeePayment";
    case ScammerCategory::Kind::Unclassified:
      return "Unclassified";
  }
  return "?";
}

PaymentMethod PaymentMethod::paypal(std::string handle) {
  PaymentMethod m;
  m.type = Type::PayPal;
  m.value = to_lower(handle);
  return m;
}

PaymentMethod PaymentMethod::crypto(std::string address, Chain chain) {
  PaymentMethod m;
  m.type = Type::Crypto;
  m.value = std::move(address);
  m.chain = chain;
  return m;
}

PaymentMethod PaymentMethod::gift_card(GiftVendor vendor) {
  PaymentMethod m;
  m.type = Type::GiftCard;
  m.vendor = vendor;
  return m;
}

std::string describe(const PaymentMethod& m) {
  switch (m.type) {
    case PaymentMethod::Type::PayPal:
      return "PayPal(" + m.value + ")";
    case PaymentMethod::Type::Crypto:
      return fmt::format("Crypto({}, {})", m.value, to_string(m.chain));
    case PaymentMethod::Type::GiftCard:
      return fmt::format("GiftCard({})", to_string(m.vendor));
  }
  return "?";
}

const PaymentRules& default_payment_rules() {
  static const PaymentRules r = make_default_payment_rules();
  return r;
}

void to_json(nlohmann::json& j, const PaymentRules& r) {
  auto gifts = nlohmann::json::object();
  for (const auto& [k, v] : r.gift_vendors) gifts[k] = std::string(to_string(v));
  j = {{"key_phrase_cues", r.key_phrase_cues},
       {"form_context_cues", r.form_context_cues},
       {"form_hosts", r.form_hosts},
       {"gift_vendors", gifts}};
}

void from_json(const nlohmann::json& j, PaymentRules& r) {
  const auto& d = default_payment_rules();
  r.key_phrase_cues = j.value("key_phrase_cues", d.key_phrase_cues);
  r.form_context_cues = j.value("form_context_cues", d.form_context_cues);
  r.form_hosts = j.value("form_hosts", d.form_hosts);
  r.gift_vendors.clear();
  if (auto it = j.find("gift_vendors"); it != j.end()) {
    for (const auto& [k, v] : it->items()) {
      const auto name = v.get<std::string>();
      GiftVendor g = GiftVendor::Other;
      if (name == "CardDelivery") {
        g = GiftVendor::CardDelivery;
      } else if (name == "Amazon") {
        g = GiftVendor::Amazon;
      } else if (name != "Other") {
        throw ConfigError("unknown gift vendor " + name);
      }
      r.gift_vendors[to_lower(k)] = g;
    }
  } else {
    r.gift_vendors = d.gift_vendors;
  }
}

PaymentRules load_payment_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open payment rules " + path.string());
  try {
    return nlohmann::json::parse(in).get<PaymentRules>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<PaymentMethod> extract_payment(std::string_view text_view, const PaymentRules& rules) {
  const std::string text(text_view);
  std::vector<std::pair<std::size_t, PaymentMethod>> hits;
  auto scan = [&](const boost::regex& re, auto&& make) {
    for (boost::sregex_iterator it(text.begin(), text.end(), re), end; it != end; ++it) {
      if (auto m = make(*it)) hits.emplace_back(static_cast<std::size_t>(it->position()), *m);
    }
  };
  scan(paypal_me_re(), [](const boost::smatch& m) -> std::optional<PaymentMethod> {
    std::string h = m[1].str();
    while (!h.empty() && (h.back() == '.' || h.back() == '-')) h.pop_back();
    if (h.empty()) return std::nullopt;
    return PaymentMethod::paypal(h);
  });
  scan(paypal_email_re(), [](const boost::smatch& m) -> std::optional<PaymentMethod> {
    return PaymentMethod::paypal(m[1].str());
  });
  scan(base58_re(), [](const boost::smatch& m) -> std::optional<PaymentMethod> {
    if (!crypto::btc_base58_address_valid(m.str())) return std::nullopt;
    return PaymentMethod::crypto(m.str(), Chain::BTC);
  });
  scan(bech32_re(), [](const boost::smatch& m) -> std::optional<PaymentMethod> {
    if (!crypto::btc_bech32_address_valid(m.str())) return std::nullopt;
    return PaymentMethod::crypto(m.str(), Chain::BTC);
  });
  scan(eth_re(), [](const boost::smatch& m) -> std::optional<PaymentMethod> {
    if (!crypto::eth_address_valid(m.str())) return std::nullopt;
    return PaymentMethod::crypto(m.str(), Chain::ETH);
  });

  // Gift cards: the most specific vendor phrase wins per position.
  const std::string lower = to_lower(text);
  std::optional<std::pair<std::size_t, GiftVendor>> gift;
  std::size_t gift_len = 0;
  for (const auto& [phrase, vendor] : rules.gift_vendors) {
    const auto pos = lower.find(phrase);
    if (pos == std::string::npos) continue;
    if (!gift || phrase.size() > gift_len) {
      gift = std::make_pair(pos, vendor);
      gift_len = phrase.size();
    }
  }
  if (gift) hits.emplace_back(gift->first, PaymentMethod::gift_card(gift->second));

  std::stable_sort(hits.begin(), hits.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<PaymentMethod> out;
  for (auto& [_, m] : hits) {
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(std::move(m));
  }
  return out;
}

ScammerCategory classify_response(std::string_view text, std::span<const std::string> urls,
                                  const PaymentRules& rules) {
  const std::string lower = to_lower(text);
  bool key_phrase = std::any_of(rules.key_phrase_cues.begin(), rules.key_phrase_cues.end(),
                                [&](const auto& cue) { return contains_ci(lower, cue); });
  if (!key_phrase) {
    auto is_form = [&](std::string_view u) {
      const std::string lu = to_lower(u);
      return std::any_of(rules.form_hosts.begin(), rules.form_hosts.end(),
                         [&](const auto& h) { return lu.find(h) != std::string::npos; });
    };
    const bool has_form =
        is_form(lower) || std::any_of(urls.begin(), urls.end(), [&](const auto& u) { return is_form(u); });
    const bool asks = std::any_of(rules.form_context_cues.begin(), rules.form_context_cues.end(),
                                  [&](const auto& cue) { return contains_ci(lower, cue); });
    key_phrase = has_form && asks;
  }
  if (key_phrase) return {ScammerCategory::Kind::KeyPhraseRequest, {}};
  auto methods = extract_payment(text, rules);
  if (!methods.empty()) return {ScammerCategory::Kind::FeePayment, std::move(methods)};
  return {};
}

std::vector<double> extract_prices(std::string_view text_view) {
  const std::string text(text_view);
  std::vector<double> out;
  for (boost::sregex_iterator it(text.begin(), text.end(), price_re()), end; it != end; ++it) {
    std::string whole = (*it)[1].str();
    std::erase(whole, ',');
    double v = std::stod(whole);
    if ((*it)[2].matched) {
      const std::string frac = (*it)[2].str();
      v += std::stod(frac) / (frac.size() == 1 ? 10.0 : 100.0);
    }
    if (v > 0) out.push_back(v);
  }
  return out;
}

PriceStats price_stats(std::span<const PriceQuote> quotes) {
  PriceStats s;
  s.count = quotes.size();
  if (quotes.empty()) return s;
  std::vector<double> v;
  v.reserve(quotes.size());
  for (const auto& q : quotes) v.push_back(q.amount_usd);
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  s.median = v[(v.size() + 1) / 2 - 1];
  return s;
}

const EmailTemplates& default_email_templates() {
  static const EmailTemplates t = make_default_templates();
  return t;
}

EmailDraft craft_email(const ContactChannel& channel, const EmailTemplates& templates,
                       std::uint64_t seed) {
  if (channel.kind != ChannelKind::Email) {
    throw ValidationError(fmt::format("craft_email needs an Email channel, got {}",
                                      to_string(channel.kind)));
  }
  if (templates.subjects.empty() || templates.bodies.empty()) {
    throw ConfigError("email templates must be non-empty");
  }
  const std::uint64_t salt = fnv1a(channel.identifier);
  SplitMix64 rng(derive_seed(seed, salt));
  const WalletKind drawn = kAllWallets[rng.below(kAllWallets.size())];
  const WalletKind wallet = channel.wallet_attribution.value_or(drawn);
  const std::string name = wallet_display_name(wallet);
  const std::string ref = fmt::format("{:08X}", static_cast<std::uint32_t>(salt ^ (salt >> 32)));

  EmailDraft d;
  d.to = channel.identifier;
  d.wallet = wallet;
  d.subject = replace_all(templates.subjects[rng.below(templates.subjects.size())], "{wallet}", name);
  d.body = replace_all(templates.bodies[rng.below(templates.bodies.size())], "{wallet}", name);
  d.body = replace_all(std::move(d.body), "{ref}", ref);
  return d;
}

std::string render_eml(const EmailDraft& draft) {
  return fmt::format("To: {}\nSubject: {}\n\n{}\n", draft.to, draft.subject, draft.body);
}

std::string craft_dm(std::string_view handle, WalletKind wallet,
                     std::string_view address_placeholder) {
  if (trim(handle).empty()) throw ValidationError("craft_dm: empty handle");
  std::string h(trim(handle));
  if (!h.starts_with('@')) h.insert(h.begin(), '@');
  return fmt::format(
      "Hello {}, you answered my tweet so I am following up here. I still cannot get into "
      "my {} wallet ({}) and nothing I try works. Could you tell me what to do next? "
      "It is quite urgent, thank you.",
      h, wallet_display_name(wallet), address_placeholder);
}

std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::Drafted:
      return "Drafted";
    case SessionState::Sent:
      return "Sent";
    case SessionState::Responded:
      return "Responded";
    case SessionState::Categorized:
      return "Categorized";
    case SessionState::Dead:
      return "Dead";
  }
  return "?";
}

SessionState parse_session_state(std::string_view s) {
  for (auto st : {SessionState::Drafted, SessionState::Sent, SessionState::Responded,
                  SessionState::Categorized, SessionState::Dead}) {
    if (to_lower(to_string(st)) == to_lower(s)) return st;
  }
  throw ValidationError(fmt::format("unknown session state '{}'", s));
}

void advance(EngagementSession& s, SessionState next) {
  const bool ok = next == SessionState::Dead ? s.state != SessionState::Dead
                                             : s.state != SessionState::Dead && next > s.state;
  if (!ok) {
    throw ValidationError(fmt::format("session {}: illegal transition {} -> {}", s.session_id,
                                      to_string(s.state), to_string(next)));
  }
  s.state = next;
}

void to_json(nlohmann::json& j, const PaymentMethod& m) {
  switch (m.type) {
    case PaymentMethod::Type::PayPal:
      j = {{"type", "PayPal"}, {"handle", m.value}};
      break;
    case PaymentMethod::Type::Crypto:
      j = {{"type", "Crypto"}, {"address", m.value}, {"chain", std::string(to_string(m.chain))}};
      break;
    case PaymentMethod::Type::GiftCard:
      j = {{"type", "GiftCard"}, {"vendor", std::string(to_string(m.vendor))}};
      break;
  }
}

void from_json(const nlohmann::json& j, PaymentMethod& m) {
  const auto type = j.at("type").get<std::string>();
  if (type == "PayPal") {
    m = PaymentMethod::paypal(j.at("handle").get<std::string>());
  } else if (type == "Crypto") {
    m = PaymentMethod::crypto(j.at("address").get<std::string>(),
                              j.at("chain").get<std::string>() == "ETH" ? Chain::ETH : Chain::BTC);
  } else if (type == "GiftCard") {
    const auto v = j.at("vendor").get<std::string>();
    m = PaymentMethod::gift_card(v == "CardDelivery" ? GiftVendor::CardDelivery
                                 : v == "Amazon"     ? GiftVendor::Amazon
                                                     : GiftVendor::Other);
  } else {
    throw ValidationError("unknown payment method type " + type);
  }
}

void to_json(nlohmann::json& j, const ScammerCategory& c) {
  j = {{"kind", std::string(to_string(c.kind))}};
  if (!c.methods.empty()) j["methods"] = c.methods;
}

void from_json(const nlohmann::json& j, ScammerCategory& c) {
  const auto k = j.at("kind").get<std::string>();
  if (k == "KeyPhraseRequest") {
    c.kind = ScammerCategory::Kind::KeyPhraseRequest;
  } else if (k == "FeePayment") {
    c.kind = ScammerCategory::Kind::FeePayment;
  } else if (k == "Unclassified") {
    c.kind = ScammerCategory::Kind::Unclassified;
  } else {
    throw ValidationError("unknown category " + k);
  }
  c.methods = j.value("methods", std::vector<PaymentMethod>{});
  if (c.kind == ScammerCategory::Kind::FeePayment && c.methods.empty()) {
    throw ValidationError("FeePayment without methods");
  }
}

void to_json(nlohmann::json& j, const SessionEvent& e) {
  j = {{"session_id", e.session_id}, {"type", e.type}, {"at", e.at}, {"payload", e.payload}};
}

void from_json(const nlohmann::json& j, SessionEvent& e) {
  j.at("session_id").get_to(e.session_id);
  j.at("type").get_to(e.type);
  j.at("at").get_to(e.at);
  e.payload = j.value("payload", nlohmann::json::object());
}

SessionLog::SessionLog(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    sessions_ = replay(path_);
  } else if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
}

void SessionLog::append(const SessionEvent& e) {
  // Validate against a scratch copy first so a rejected event never reaches disk.
  auto scratch = sessions_.find(e.session_id) != sessions_.end()
                     ? std::map<std::string, EngagementSession>{{e.session_id, sessions_.at(e.session_id)}}
                     : std::map<std::string, EngagementSession>{};
  apply(scratch, e);
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot append to " + path_.string());
  out << nlohmann::json(e).dump() << '\n';
  sessions_[e.session_id] = std::move(scratch.at(e.session_id));
}

EngagementSession& SessionLog::open(std::string session_id, const ContactChannel& channel,
                                    Timestamp at) {
  append({session_id, "open", at, {{"channel", channel}}});
  return sessions_.at(session_id);
}

void SessionLog::message(const std::string& session_id, TranscriptEntry entry) {
  append({session_id, "message", entry.at,
          {{"direction", entry.direction == TranscriptEntry::Direction::Outbound ? "out" : "in"},
           {"text", entry.text}}});
}

void SessionLog::transition(const std::string& session_id, SessionState next, Timestamp at) {
  append({session_id, "state", at, {{"state", std::string(to_string(next))}}});
}

void SessionLog::categorize(const std::string& session_id, ScammerCategory category, Timestamp at) {
  append({session_id, "category", at, {{"category", category}}});
}

void SessionLog::apply(std::map<std::string, EngagementSession>& sessions, const SessionEvent& e) {
  if (e.type == "open") {
    if (sessions.contains(e.session_id)) {
      throw ValidationError("session opened twice: " + e.session_id);
    }
    EngagementSession s;
    s.session_id = e.session_id;
    s.channel = e.payload.at("channel").get<ContactChannel>();
    sessions.emplace(e.session_id, std::move(s));
    return;
  }
  auto it = sessions.find(e.session_id);
  if (it == sessions.end()) throw ValidationError("event for unknown session " + e.session_id);
  auto& s = it->second;
  if (e.type == "message") {
    TranscriptEntry t;
    t.direction = e.payload.at("direction").get<std::string>() == "out"
                      ? TranscriptEntry::Direction::Outbound
                      : TranscriptEntry::Direction::Inbound;
    t.text = e.payload.at("text").get<std::string>();
    t.at = e.at;
    s.transcript.push_back(std::move(t));
  } else if (e.type == "state") {
    advance(s, parse_session_state(e.payload.at("state").get<std::string>()));
  } else if (e.type == "category") {
    s.category = e.payload.at("category").get<ScammerCategory>();
  } else {
    throw ValidationError("unknown session event type " + e.type);
  }
}

std::map<std::string, EngagementSession> SessionLog::replay(const std::filesystem::path& path) {
  std::map<std::string, EngagementSession> sessions;
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      apply(sessions, nlohmann::json::parse(line).get<SessionEvent>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), lineno, e.what());
    } catch (const Error& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
  }
  return sessions;
}

EngagementSummary summarize_sessions(const std::map<std::string, EngagementSession>& sessions) {
  EngagementSummary s;
  for (const auto& [id, sess] : sessions) {
    if (sess.state >= SessionState::Sent ||
        std::any_of(sess.transcript.begin(), sess.transcript.end(), [](const auto& t) {
          return t.direction == TranscriptEntry::Direction::Outbound;
        })) {
      ++s.contacted;
    }
    const bool responded = std::any_of(sess.transcript.begin(), sess.transcript.end(), [](const auto& t) {
      return t.direction == TranscriptEntry::Direction::Inbound;
    });
    if (!responded) continue;
    ++s.responded;
    if (sess.category) {
      if (sess.category->kind == ScammerCategory::Kind::KeyPhraseRequest) ++s.key_phrase;
      if (sess.category->kind == ScammerCategory::Kind::FeePayment) {
        const auto& m = sess.category->methods;
        auto has = [&](PaymentMethod::Type t) {
          return std::any_of(m.begin(), m.end(), [t](const auto& x) { return x.type == t; });
        };
        if (has(PaymentMethod::Type::PayPal)) ++s.fee_paypal;
        if (has(PaymentMethod::Type::Crypto)) ++s.fee_crypto;
        if (has(PaymentMethod::Type::GiftCard)) ++s.fee_gift;
      }
    }
    for (const auto& t : sess.transcript) {
      if (t.direction != TranscriptEntry::Direction::Inbound) continue;
      for (double p : extract_prices(t.text)) s.quotes.push_back({p, id});
    }
  }
  s.prices = price_stats(s.quotes);
  return s;
}

}  // namespace conman
