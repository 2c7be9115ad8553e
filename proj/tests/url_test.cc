// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lupin/url.h"
#include "support/generators.h"

namespace lupin {
namespace {

TEST_CASE("parse decomposes a plain http url") {
  auto url = ParseUrl("http://example.com/login");
  REQUIRE(url.has_value());
  CHECK(url->scheme == Scheme::kHttp);
  CHECK(url->host == "example.com");
  CHECK(url->port == 80);
  CHECK(url->path == "/login");
  CHECK(url->query == "");
}

TEST_CASE("parse normalizes case, default ports, and keeps the query") {
  auto url = ParseUrl("HTTP://Example.COM:80/a?q=1");
  REQUIRE(url.has_value());
  CHECK(url->scheme == Scheme::kHttp);
  CHECK(url->host == "example.com");
  CHECK(url->port == 80);
  CHECK(url->path == "/a");
  CHECK(url->query == "q=1");
  CHECK(*url == *ParseUrl("http://example.com/a?q=1"));
}

TEST_CASE("parse supplies the default path and port") {
  auto url = ParseUrl("https://a.com");
  REQUIRE(url.has_value());
  CHECK(url->scheme == Scheme::kHttps);
  CHECK(url->host == "a.com");
  CHECK(url->port == 443);
  CHECK(url->path == "/");
  CHECK(url->query == "");
}

TEST_CASE("fragments are dropped") {
  auto url = ParseUrl("http://a.com/x?q=1#section");
  REQUIRE(url.has_value());
  CHECK(url->path == "/x");
  CHECK(url->query == "q=1");
  CHECK(url->ToString() == "http://a.com/x?q=1");
}

TEST_CASE("parse errors name the offending component") {
  std::string error;
  CHECK(!ParseUrl("ftp://a.com/", &error));
  CHECK(error.find("scheme") == 0);
  CHECK(!ParseUrl("http:///x", &error));
  CHECK(error.find("host") == 0);
  CHECK(!ParseUrl("http://a.com:99999/", &error));
  CHECK(error.find("port") == 0);
  CHECK(!ParseUrl("http://a.com:0/", &error));
  CHECK(error.find("port") == 0);
  CHECK(!ParseUrl("http://user@a.com/", &error));
  CHECK(error.find("userinfo") == 0);
  CHECK(!ParseUrl("no-separator", &error));
  CHECK(error.find("scheme") == 0);
  CHECK(!ParseUrl("http://h\xc3\xa9.com/", &error));
  CHECK(error.find("url") == 0);
  CHECK(!ParseUrl("http://bad_host.com/", &error));
  CHECK(error.find("host") == 0);
}

TEST_CASE("origin_of keeps scheme, host, and port") {
  CHECK(OriginOf(*ParseUrl("http://a.com/x")) ==
        Origin{Scheme::kHttp, "a.com", 80});
  CHECK(OriginOf(*ParseUrl("https://a.com/x")) !=
        OriginOf(*ParseUrl("http://a.com/x")));
  CHECK(OriginOf(*ParseUrl("http://a.com:8080/")) !=
        OriginOf(*ParseUrl("http://a.com/")));
}

TEST_CASE("default port equality after normalization") {
  CHECK(*ParseUrl("http://a.com:80/") == *ParseUrl("http://a.com/"));
  CHECK(*ParseUrl("https://a.com:443/") == *ParseUrl("https://a.com/"));
  CHECK(*ParseUrl("http://a.com:443/") != *ParseUrl("http://a.com/"));
}

TEST_CASE("https twin flips scheme and default port") {
  CHECK(HttpsTwin(*ParseUrl("http://a.com/x?q=1")) ==
        *ParseUrl("https://a.com/x?q=1"));
  CHECK(HttpsTwin(*ParseUrl("http://a.com:8080/x")) ==
        Url{Scheme::kHttps, "a.com", 8080, "/x", ""});
  CHECK(HttpsTwin(*ParseUrl("https://a.com/")) == *ParseUrl("https://a.com/"));
}

TEST_CASE("property: serialize then parse is the identity") {
  testing::Rng rng(20260823);
  for (int i = 0; i < 2000; ++i) {
    Url url = testing::RandomUrl(rng);
    std::string text = url.ToString();
    auto reparsed = ParseUrl(text);
    REQUIRE_MESSAGE(reparsed.has_value(), text);
    CHECK_MESSAGE(*reparsed == url, text);
    // A second round trip is byte-stable.
    CHECK(reparsed->ToString() == text);
  }
}

TEST_CASE("property: origin ignores path and query only") {
  testing::Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    Url a = testing::RandomUrl(rng);
    Url b = a;
    b.path = "/" + rng.Token(0, 8);
    b.query = rng.Chance(1, 2) ? rng.Token(1, 6) : "";
    CHECK(OriginOf(a) == OriginOf(b));

    Url c = a;
    switch (rng.Pick(0, 2)) {
      case 0:
        c.scheme = c.scheme == Scheme::kHttp ? Scheme::kHttps : Scheme::kHttp;
        break;
      case 1:
        c.host += "x";
        break;
      default:
        c.port = static_cast<uint16_t>(c.port == 65535 ? 1 : c.port + 1);
        break;
    }
    CHECK(OriginOf(a) != OriginOf(c));
  }
}

}  // namespace
}  // namespace lupin
