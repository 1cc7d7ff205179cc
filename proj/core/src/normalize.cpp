#include "conman/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include <fmt/format.h>

#include "conman/error.hpp"

namespace conman {
namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

[[noreturn]] void fail(ChannelKind kind, std::string_view raw, std::string_view why) {
  throw NormalizationError(fmt::format("malformed {} identifier '{}': {}", to_string(kind), raw,
                                       why));
}

bool valid_email(std::string_view s) {
  const auto at = s.find('@');
  if (at == std::string_view::npos || at == 0 || s.find('@', at + 1) != std::string_view::npos) {
    return false;
  }
  const auto local = s.substr(0, at);
  const auto domain = s.substr(at + 1);
  const bool local_ok = std::all_of(local.begin(), local.end(), [](char c) {
    return is_alnum(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-';
  });
  if (!local_ok) return false;
  const auto dot = domain.rfind('.');
  if (dot == std::string_view::npos || dot == 0) return false;
  const auto labels = domain.substr(0, dot);
  const auto tld = domain.substr(dot + 1);
  const bool labels_ok = std::all_of(labels.begin(), labels.end(),
                                     [](char c) { return is_alnum(c) || c == '.' || c == '-'; });
  const bool tld_ok = tld.size() >= 2 && std::all_of(tld.begin(), tld.end(), [](char c) {
                        return std::isalpha(static_cast<unsigned char>(c)) != 0;
                      });
  return labels_ok && tld_ok;
}

std::string normalize_email(std::string_view raw, std::string s, const NormalizeOptions& opts) {
  if (!valid_email(s)) fail(ChannelKind::Email, raw, "not an address");
  const auto at = s.find('@');
  std::string local = s.substr(0, at);
  const std::string domain = s.substr(at + 1);
  if (opts.gmail_canonical && (domain == "gmail.com" || domain == "googlemail.com")) {
    if (auto plus = local.find('+'); plus != std::string::npos) local.resize(plus);
    std::erase(local, '.');
    if (local.empty()) fail(ChannelKind::Email, raw, "empty local part");
  }
  return local + "@" + domain;
}

std::string normalize_form(std::string_view raw, const std::string& s) {
  if (!(s.starts_with("http://") || s.starts_with("https://"))) {
    fail(ChannelKind::Form, raw, "not an http(s) URL");
  }
  auto url = parse_url(s);
  if (!url || url->host.find('.') == std::string::npos) fail(ChannelKind::Form, raw, "no host");
  std::string out = url->scheme + "://" + url->host + url->path;
  while (out.ends_with('/')) out.pop_back();
  return out;
}

std::string query_param(std::string_view query, std::string_view key) {
  std::size_t pos = 0;
  while (pos <= query.size()) {
    auto amp = query.find('&', pos);
    if (amp == std::string_view::npos) amp = query.size();
    const auto pair = query.substr(pos, amp - pos);
    if (pair.size() > key.size() && pair.substr(0, key.size()) == key && pair[key.size()] == '=') {
      return std::string(pair.substr(key.size() + 1));
    }
    pos = amp + 1;
  }
  return {};
}

std::vector<std::string> path_segments(std::string_view path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    auto slash = path.find('/', pos);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > pos) out.emplace_back(path.substr(pos, slash - pos));
    pos = slash + 1;
  }
  return out;
}

// Reduces a profile URL to its handle for the handle-bearing kinds.
std::string handle_from_url(ChannelKind kind, std::string_view raw, const UrlParts& url) {
  const auto segs = path_segments(url.path);
  switch (kind) {
    case ChannelKind::WhatsApp:
      if (auto phone = query_param(url.query, "phone"); !phone.empty()) return phone;
      if (!segs.empty()) return segs.front();
      break;
    case ChannelKind::TwitterDM: {
      if (auto rid = query_param(url.query, "recipient_id"); !rid.empty()) return rid;
      for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
        if (segs[i] == "dm" || segs[i] == "messages") {
          if (segs[i + 1] != "compose") return segs[i + 1];
        }
      }
      if (!segs.empty() && segs.front() != "messages") return segs.front();
      break;
    }
    case ChannelKind::Telegram:
      if (segs.size() >= 2 && (segs[0] == "s" || segs[0] == "joinchat")) return segs[1];
      if (!segs.empty()) return segs.front();
      break;
    case ChannelKind::Instagram:
      if (!segs.empty()) return segs.front();
      break;
    default:
      break;
  }
  fail(kind, raw, "URL carries no handle");
}

std::string normalize_handle(ChannelKind kind, std::string_view raw, std::string s) {
  const bool looks_like_url = s.find("://") != std::string::npos || s.starts_with("www.") ||
                              s.starts_with("t.me/") || s.starts_with("wa.me/") ||
                              s.starts_with("instagram.com/") || s.starts_with("twitter.com/");
  if (looks_like_url) {
    auto url = parse_url(s);
    if (!url) fail(kind, raw, "unparseable URL");
    s = handle_from_url(kind, raw, *url);
  }
  while (!s.empty() && s.front() == '@') s.erase(s.begin());
  if (kind == ChannelKind::WhatsApp) {
    std::string digits;
    for (char c : s) {
      if (is_digit(c)) {
        digits.push_back(c);
      } else if (c != '+' && c != '-' && c != ' ' && c != '(' && c != ')' && c != '.') {
        fail(kind, raw, "phone number contains non-digits");
      }
    }
    if (digits.size() < 6 || digits.size() > 15) fail(kind, raw, "phone number length");
    return digits;
  }
  if (s.empty()) fail(kind, raw, "empty handle");
  const bool ok = std::all_of(s.begin(), s.end(),
                              [](char c) { return is_alnum(c) || c == '_' || c == '.'; });
  if (!ok) fail(kind, raw, "handle contains invalid characters");
  return s;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string normalize_identifier(std::string_view raw, ChannelKind kind,
                                 const NormalizeOptions& opts) {
  std::string s = to_lower(trim(raw));
  if (s.empty()) fail(kind, raw, "empty");
  switch (kind) {
    case ChannelKind::Email:
      return normalize_email(raw, std::move(s), opts);
    case ChannelKind::Form:
      return normalize_form(raw, s);
    case ChannelKind::Instagram:
    case ChannelKind::Telegram:
    case ChannelKind::TwitterDM:
    case ChannelKind::WhatsApp:
      return normalize_handle(kind, raw, std::move(s));
  }
  fail(kind, raw, "unknown kind");
}

std::optional<UrlParts> parse_url(std::string_view url) {
  UrlParts out;
  std::string_view rest = trim(url);
  if (auto p = rest.find("://"); p != std::string_view::npos) {
    out.scheme = to_lower(rest.substr(0, p));
    if (out.scheme.empty() ||
        !std::all_of(out.scheme.begin(), out.scheme.end(), [](char c) { return is_alnum(c); })) {
      return std::nullopt;
    }
    rest.remove_prefix(p + 3);
  }
  auto host_end = rest.find_first_of("/?#");
  if (host_end == std::string_view::npos) host_end = rest.size();
  std::string_view host = rest.substr(0, host_end);
  if (auto at = host.rfind('@'); at != std::string_view::npos) host.remove_prefix(at + 1);
  if (auto colon = host.find(':'); colon != std::string_view::npos) host = host.substr(0, colon);
  if (host.empty()) return std::nullopt;
  out.host = to_lower(host);
  const bool host_ok = std::all_of(out.host.begin(), out.host.end(),
                                   [](char c) { return is_alnum(c) || c == '.' || c == '-'; });
  if (!host_ok) return std::nullopt;
  rest.remove_prefix(host_end);
  if (auto hash = rest.find('#'); hash != std::string_view::npos) {
    out.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  if (auto q = rest.find('?'); q != std::string_view::npos) {
    out.query = std::string(rest.substr(q + 1));
    rest = rest.substr(0, q);
  }
  out.path = std::string(rest);
  return out;
}

std::string second_level_domain(std::string_view host) {
  std::string h = to_lower(host);
  while (h.ends_with('.')) h.pop_back();
  const auto last = h.rfind('.');
  if (last == std::string::npos || last == 0) return h;
  const auto prev = h.rfind('.', last - 1);
  return prev == std::string::npos ? h : h.substr(prev + 1);
}

bool host_matches(std::string_view host, std::string_view suffix) {
  if (host == suffix) return true;
  return host.size() > suffix.size() && host.ends_with(suffix) &&
         host[host.size() - suffix.size() - 1] == '.';
}

}  // namespace conman
