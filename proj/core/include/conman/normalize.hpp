#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "conman/model.hpp"

namespace conman {

struct NormalizeOptions {
  // Strip dots and "+suffix" from the local part of gmail addresses so that
  // trivially varied aliases collapse onto one clustering key.
  bool gmail_canonical = true;
};

// Canonical clustering key for a raw contact identifier.
//
//  * all kinds: surrounding whitespace trimmed, lowercased
//  * Email: gmail/googlemail local part loses dots and "+suffix"
//  * Form: query string, fragment and trailing "/" removed
//  * handle kinds: leading "@" removed; a profile URL (t.me/x, wa.me/123,
//    instagram.com/x, twitter.com/messages/compose?recipient_id=x) reduces
//    to its handle
//
// Throws NormalizationError naming the kind when raw is malformed for it.
std::string normalize_identifier(std::string_view raw, ChannelKind kind,
                                 const NormalizeOptions& opts = {});

struct UrlParts {
  std::string scheme;  // lowercase, may be empty for "www." URLs
  std::string host;    // lowercase, no port
  std::string path;    // starts with "/" or is empty
  std::string query;   // without "?"
  std::string fragment;
};

std::optional<UrlParts> parse_url(std::string_view url);

// Last two labels of a host ("a.b.trustwallet.com" -> "trustwallet.com").
// Public suffixes are not consulted.
std::string second_level_domain(std::string_view host);

// True when host equals suffix or ends with "." + suffix.
bool host_matches(std::string_view host, std::string_view suffix);

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

}  // namespace conman
