// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#include "lupin/url.h"

#include <cctype>

namespace lupin {

namespace {

void SetError(std::string* error, std::string message) {
  if (error)
    *error = std::move(message);
}

bool IsHostChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' ||
         c == '-';
}

std::string AuthorityString(Scheme scheme, const std::string& host,
                            uint16_t port) {
  std::string out(SchemeName(scheme));
  out += "://";
  out += host;
  if (port != DefaultPort(scheme)) {
    out += ':';
    out += std::to_string(port);
  }
  return out;
}

}  // namespace

std::string_view SchemeName(Scheme scheme) {
  return scheme == Scheme::kHttp ? "http" : "https";
}

uint16_t DefaultPort(Scheme scheme) {
  return scheme == Scheme::kHttp ? 80 : 443;
}

std::string Origin::ToString() const {
  return AuthorityString(scheme, host, port);
}

std::string Url::ToString() const {
  std::string out = AuthorityString(scheme, host, port);
  out += path;
  if (!query.empty()) {
    out += '?';
    out += query;
  }
  return out;
}

std::optional<Url> ParseUrl(std::string_view text, std::string* error) {
  for (char c : text) {
    if (static_cast<unsigned char>(c) >= 0x80 || c == '\0') {
      SetError(error, "url: non-ASCII byte in input");
      return std::nullopt;
    }
  }

  size_t scheme_end = text.find("://");
  if (scheme_end == std::string_view::npos) {
    SetError(error, "scheme: missing \"://\" separator");
    return std::nullopt;
  }
  std::string scheme_text(text.substr(0, scheme_end));
  for (char& c : scheme_text)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  Url url;
  if (scheme_text == "http") {
    url.scheme = Scheme::kHttp;
  } else if (scheme_text == "https") {
    url.scheme = Scheme::kHttps;
  } else {
    SetError(error, "scheme: unsupported scheme \"" + scheme_text + "\"");
    return std::nullopt;
  }

  std::string_view rest = text.substr(scheme_end + 3);
  size_t authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  std::string_view tail = authority_end == std::string_view::npos
                              ? std::string_view()
                              : rest.substr(authority_end);

  if (authority.find('@') != std::string_view::npos) {
    SetError(error, "userinfo: credentials in URLs are not accepted");
    return std::nullopt;
  }

  std::string_view host = authority;
  std::string_view port_text;
  if (size_t colon = authority.rfind(':'); colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    port_text = authority.substr(colon + 1);
  }

  if (host.empty()) {
    SetError(error, "host: empty host");
    return std::nullopt;
  }
  url.host.reserve(host.size());
  for (char c : host) {
    char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!IsHostChar(lower)) {
      SetError(error, std::string("host: invalid character '") + c + "'");
      return std::nullopt;
    }
    url.host += lower;
  }

  if (port_text.empty()) {
    url.port = DefaultPort(url.scheme);
  } else {
    uint32_t port = 0;
    for (char c : port_text) {
      if (c < '0' || c > '9') {
        SetError(error, "port: non-digit in port");
        return std::nullopt;
      }
      port = port * 10 + static_cast<uint32_t>(c - '0');
      if (port > 65535) {
        SetError(error, "port: out of range");
        return std::nullopt;
      }
    }
    if (port == 0) {
      SetError(error, "port: out of range");
      return std::nullopt;
    }
    url.port = static_cast<uint16_t>(port);
  }

  // Split the tail into path, query, and a discarded fragment.
  size_t fragment = tail.find('#');
  if (fragment != std::string_view::npos)
    tail = tail.substr(0, fragment);
  size_t question = tail.find('?');
  std::string_view path = tail.substr(0, question);
  if (question != std::string_view::npos)
    url.query.assign(tail.substr(question + 1));

  url.path = path.empty() ? "/" : std::string(path);
  if (url.path[0] != '/') {
    SetError(error, "path: must be absolute");
    return std::nullopt;
  }
  return url;
}

std::optional<Origin> ParseOrigin(std::string_view text, std::string* error) {
  std::optional<Url> url = ParseUrl(text, error);
  if (!url)
    return std::nullopt;
  return OriginOf(*url);
}

Origin OriginOf(const Url& url) {
  return Origin{url.scheme, url.host, url.port};
}

Url HttpsTwin(const Url& url) {
  Url twin = url;
  if (twin.scheme == Scheme::kHttps)
    return twin;
  if (twin.port == DefaultPort(Scheme::kHttp))
    twin.port = DefaultPort(Scheme::kHttps);
  twin.scheme = Scheme::kHttps;
  return twin;
}

Origin HttpsTwin(const Origin& origin) {
  Origin twin = origin;
  if (twin.scheme == Scheme::kHttps)
    return twin;
  if (twin.port == DefaultPort(Scheme::kHttp))
    twin.port = DefaultPort(Scheme::kHttps);
  twin.scheme = Scheme::kHttps;
  return twin;
}

}  // namespace lupin
