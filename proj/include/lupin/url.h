// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#ifndef LUPIN_URL_H_
#define LUPIN_URL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lupin {

enum class Scheme { kHttp, kHttps };

std::string_view SchemeName(Scheme scheme);
uint16_t DefaultPort(Scheme scheme);

// The (scheme, host, port) triple every matching rule keys on.
struct Origin {
  Scheme scheme = Scheme::kHttp;
  std::string host;
  uint16_t port = 80;

  bool operator==(const Origin&) const = default;

  // "http://a.com" form; the default port for the scheme is omitted.
  std::string ToString() const;
};

// A normalized absolute http(s) address. Invariants maintained by ParseUrl:
// host is nonempty lowercase, path begins with "/", default ports are
// normalized (the port field always holds a concrete value), fragments are
// dropped. Equality is componentwise.
struct Url {
  Scheme scheme = Scheme::kHttp;
  std::string host;
  uint16_t port = 80;
  std::string path = "/";
  std::string query;  // opaque, without the leading '?'; empty means none

  bool operator==(const Url&) const = default;

  std::string ToString() const;
};

// Parses an absolute http/https URL. On failure returns nullopt and, when
// |error| is non-null, stores a message naming the offending component.
// Userinfo is rejected; only ASCII input is accepted.
std::optional<Url> ParseUrl(std::string_view text, std::string* error = nullptr);

// Convenience for strings like "https://a.com" or "http://a.com:8080".
std::optional<Origin> ParseOrigin(std::string_view text,
                                  std::string* error = nullptr);

Origin OriginOf(const Url& url);

// The HTTPS counterpart of an address: scheme flipped to https, a default
// port following along, everything else kept.
Url HttpsTwin(const Url& url);
Origin HttpsTwin(const Origin& origin);

}  // namespace lupin

#endif  // LUPIN_URL_H_
