// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "lupin/browser.h"
#include "lupin/event_loop.h"
#include "lupin/net.h"

namespace lupin {
namespace {

// Shared wiring for one victim behind one network.
struct Harness {
  EventLoop loop;
  Network net{&loop, LinkProfile{10, 10}, 2000};
  Browser browser;

  explicit Harness(Browser::Config config)
      : browser(&loop, &net, "victim", std::move(config)) {
    net.AddVictim("victim");
  }
};

Browser::Config ChromeConfig() {
  Browser::Config config;
  config.policy = PolicyForPreset(BrowserPreset::kChrome);
  return config;
}

LoginForm FormFor(const std::string& action) {
  LoginForm form;
  form.action = *ParseUrl(action);
  form.username_field_name = "username";
  form.password_field_name = "password";
  return form;
}

Credential CredentialFor(const std::string& page,
                         const std::string& action) {
  Credential c;
  Url page_url = *ParseUrl(page);
  c.source_origin = OriginOf(page_url);
  c.source_path = page_url.path;
  c.username = "alice";
  c.password = "hunter2";
  c.saved_destination_origin = OriginOf(*ParseUrl(action));
  c.saved_username_field = "username";
  c.saved_password_field = "password";
  c.saved_at = 1;
  return c;
}

PageSpec LoginPage(const std::string& page, const std::string& action) {
  PageSpec spec;
  spec.url = *ParseUrl(page);
  spec.forms.push_back(FormFor(action));
  return spec;
}

ScriptBehavior ReadScript(int64_t poll_delay,
                          const std::string& collector =
                              "http://collector.test/c") {
  ScriptBehavior script;
  script.kind = ScriptBehavior::Kind::kReadFormsAndExfiltrate;
  script.poll_delay_ms = poll_delay;
  script.collector = *ParseUrl(collector);
  return script;
}

TEST_CASE("a loaded form is filled after the fill latency") {
  Harness h(ChromeConfig());
  h.net.AddServer("site.test", {[](const HttpMessage&) {
                                  return LoginPage("http://site.test/",
                                                   "https://site.test/login");
                                },
                                true, false});
  h.browser.set_store(CredentialStore{
      {CredentialFor("http://site.test/", "https://site.test/login")}});

  Tab* tab = h.browser.CreateTab("tab");
  h.browser.LoadFrame(tab->root(), *ParseUrl("http://site.test/"));
  h.loop.RunUntilIdle();

  REQUIRE(tab->root().forms.size() == 1);
  const FormState& form = tab->root().forms[0];
  CHECK(form.username_value == "alice");
  CHECK(form.password_value == "hunter2");
  // Install at 20 (two link hops), fill 10ms later.
  CHECK(form.visible_at == 30);
  REQUIRE(form.decision.has_value());
  CHECK(form.decision->filled());
}

TEST_CASE("no-fill decisions are recorded per form") {
  Harness h(ChromeConfig());
  h.net.AddServer("site.test", {[](const HttpMessage&) {
                                  return LoginPage("http://site.test/",
                                                   "https://site.test/login");
                                },
                                true, false});
  Tab* tab = h.browser.CreateTab("tab");
  h.browser.LoadFrame(tab->root(), *ParseUrl("http://site.test/"));
  h.loop.RunUntilIdle();

  REQUIRE(tab->root().forms.size() == 1);
  const FormState& form = tab->root().forms[0];
  CHECK(form.password_value.empty());
  CHECK(form.visible_at == -1);
  REQUIRE(form.decision.has_value());
  CHECK(*form.decision->reason == NoFillReason::kNoCredential);
}

TEST_CASE("a read script only sees values filled strictly earlier") {
  auto run = [](int64_t fill_latency, int64_t poll_delay) {
    Browser::Config config = ChromeConfig();
    config.fill_latency_ms = fill_latency;
    Harness h(config);
    PageSpec page = LoginPage("http://site.test/", "https://site.test/login");
    page.scripts.push_back(ReadScript(poll_delay));
    h.net.AddServer("site.test",
                    {[page](const HttpMessage&) { return page; }, true, false});
    h.browser.set_store(CredentialStore{
        {CredentialFor("http://site.test/", "https://site.test/login")}});

    size_t harvested = 0;
    h.browser.set_form_read_handler(
        [&](FrameNode&, const std::vector<ExfilRecord>& records) {
          harvested = records.size();
          return true;
        });
    Tab* tab = h.browser.CreateTab("tab");
    h.browser.LoadFrame(tab->root(), *ParseUrl("http://site.test/"));
    h.loop.RunUntilIdle();
    return harvested;
  };

  CHECK(run(10, 100) == 1);
  CHECK(run(99, 100) == 1);
  CHECK(run(100, 100) == 0);  // ties read the pristine document
  CHECK(run(150, 100) == 0);
}

TEST_CASE("without a read handler records travel to the collector") {
  Harness h(ChromeConfig());
  PageSpec page = LoginPage("http://site.test/", "https://site.test/login");
  page.scripts.push_back(ReadScript(100));
  h.net.AddServer("site.test",
                  {[page](const HttpMessage&) { return page; }, true, false});
  h.net.AddServer("collector.test",
                  {[](const HttpMessage& request) {
                     PageSpec blank;
                     blank.url = request.url;
                     return blank;
                   },
                   true, false});
  h.browser.set_store(CredentialStore{
      {CredentialFor("http://site.test/", "https://site.test/login")}});

  // The gateway position observes the plaintext exfiltration in flight.
  std::vector<ExfilRecord> seen;
  h.net.BecomeGateway("victim");
  h.net.SetRequestHook([&](const MessageView& view) {
    if (view.host == "collector.test") {
      const auto& bundle = std::get<ExfilBundle>(view.message->body);
      seen.insert(seen.end(), bundle.records.begin(), bundle.records.end());
    }
    return HookDecision::Pass();
  });

  Tab* tab = h.browser.CreateTab("tab");
  h.browser.LoadFrame(tab->root(), *ParseUrl("http://site.test/"));
  h.loop.RunUntilIdle();

  REQUIRE(seen.size() == 1);
  CHECK(seen[0].site_origin == Origin{Scheme::kHttp, "site.test", 80});
  CHECK(seen[0].username == "alice");
  CHECK(seen[0].password == "hunter2");
  CHECK(seen[0].observed_at == 120);  // install 20, poll 100
}

TEST_CASE("empty reads stay off the wire") {
  Harness h(ChromeConfig());
  PageSpec page = LoginPage("http://site.test/", "https://site.test/login");
  page.scripts.push_back(ReadScript(100));
  h.net.AddServer("site.test",
                  {[page](const HttpMessage&) { return page; }, true, false});

  Tab* tab = h.browser.CreateTab("tab");
  h.browser.LoadFrame(tab->root(), *ParseUrl("http://site.test/"));
  h.loop.RunUntilIdle();

  for (const TraceRecord& record : h.net.trace())
    CHECK(record.host != "collector.test");
}

TEST_CASE("inline children install without requests or refresh events") {
  Harness h(ChromeConfig());
  PageSpec outer;
  outer.url = *ParseUrl("http://benign.test/");
  PageSpec inner = LoginPage("http://benign.test/inner", "https://x.test/");
  inner.visual = PageSpec::Visual::kHidden1px;
  outer.inline_children.push_back(inner);
  h.net.AddServer("benign.test",
                  {[outer](const HttpMessage&) { return outer; }, true, false});

  Tab* tab = h.browser.CreateTab("tab");
  h.browser.FocusTab(tab);
  h.browser.LoadFrame(tab->root(), *ParseUrl("http://benign.test/"));
  h.loop.RunUntilIdle();

  REQUIRE(tab->root().children.size() == 1);
  const FrameNode& child = *tab->root().children[0];
  REQUIRE(child.page.has_value());
  CHECK(child.page->visual == PageSpec::Visual::kHidden1px);
  CHECK(!child.is_top_level());
  CHECK(child.path == "tab.0");

  // Only the user's own navigation spun the indicator.
  REQUIRE(h.browser.refresh_events().size() == 1);
  CHECK(h.browser.refresh_events()[0].frame_path == "tab");
  CHECK(h.browser.refresh_events()[0].tab_focused);
  CHECK(h.net.accounting().requests == 1);
}

TEST_CASE("fetched subframes load over the network") {
  Harness h(ChromeConfig());
  PageSpec outer;
  outer.url = *ParseUrl("http://outer.test/");
  outer.child_frames.push_back(*ParseUrl("http://innerhost.test/"));
  h.net.AddServer("outer.test",
                  {[outer](const HttpMessage&) { return outer; }, true, false});
  h.net.AddServer("innerhost.test", {[](const HttpMessage&) {
                                       return LoginPage(
                                           "http://innerhost.test/",
                                           "https://innerhost.test/login");
                                     },
                                     true, false});

  Tab* tab = h.browser.CreateTab("tab");
  h.browser.LoadFrame(tab->root(), *ParseUrl("http://outer.test/"));
  h.loop.RunUntilIdle();

  REQUIRE(tab->root().children.size() == 1);
  const FrameNode& child = *tab->root().children[0];
  REQUIRE(child.page.has_value());
  CHECK(child.page->url.host == "innerhost.test");
  CHECK(h.net.accounting().requests == 2);
  CHECK(h.browser.refresh_events().size() == 2);
}

TEST_CASE("subframes are not top level for the fill policy") {
  Browser::Config config;
  config.policy = PolicyForPreset(BrowserPreset::kSafari);
  Harness h(config);
  PageSpec outer;
  outer.url = *ParseUrl("http://site.test/");
  outer.inline_children.push_back(
      LoginPage("http://site.test/frame", "https://site.test/login"));
  h.net.AddServer("site.test",
                  {[outer](const HttpMessage&) { return outer; }, true, false});
  Credential c = CredentialFor("http://site.test/frame",
                               "https://site.test/login");
  h.browser.set_store(CredentialStore{{c}});

  Tab* tab = h.browser.CreateTab("tab");
  h.browser.LoadFrame(tab->root(), *ParseUrl("http://site.test/"));
  h.loop.RunUntilIdle();

  const FrameNode& child = *tab->root().children[0];
  REQUIRE(child.forms.size() == 1);
  REQUIRE(child.forms[0].decision.has_value());
  CHECK(*child.forms[0].decision->reason == NoFillReason::kNotTopLevel);
  CHECK(child.forms[0].password_value.empty());
}

TEST_CASE("focus moves between tabs and reaches the observer") {
  Harness h(ChromeConfig());
  Tab* a = h.browser.CreateTab("a");
  Tab* b = h.browser.CreateTab("b");
  std::vector<std::string> log;
  h.browser.set_focus_observer([&](Tab* tab, bool focused) {
    log.push_back(tab->id() + (focused ? "+" : "-"));
  });

  CHECK(h.browser.focused_tab() == nullptr);
  h.browser.FocusTab(a);
  h.browser.FocusTab(b);
  h.browser.FocusTab(nullptr);
  h.browser.FocusTab(nullptr);  // no-op
  CHECK(log == std::vector<std::string>{"a+", "a-", "b+", "b-"});
  CHECK(!a->focused());
  CHECK(!b->focused());
}

TEST_CASE("refresh events carry the focus state at navigation time") {
  Harness h(ChromeConfig());
  h.net.AddServer("site.test", {[](const HttpMessage&) {
                                  PageSpec p;
                                  p.url = *ParseUrl("http://site.test/");
                                  return p;
                                },
                                true, false});
  Tab* tab = h.browser.CreateTab("tab");
  FrameNode& child = h.browser.CreateChildFrame(tab->root());

  h.browser.FocusTab(tab);
  h.browser.LoadFrame(child, *ParseUrl("http://site.test/a"));
  h.browser.FocusTab(nullptr);
  h.browser.LoadFrame(child, *ParseUrl("http://site.test/b"));
  h.loop.RunUntilIdle();

  REQUIRE(h.browser.refresh_events().size() == 2);
  CHECK(h.browser.refresh_events()[0].tab_focused);
  CHECK(!h.browser.refresh_events()[1].tab_focused);
}

TEST_CASE("renavigation cancels the previous document's poll") {
  Harness h(ChromeConfig());
  PageSpec with_script = LoginPage("http://site.test/a",
                                   "https://site.test/login");
  with_script.scripts.push_back(ReadScript(100));
  PageSpec plain;
  plain.url = *ParseUrl("http://site.test/b");
  h.net.AddServer("site.test", {[with_script, plain](const HttpMessage& request) {
                                  return request.url.path == "/a"
                                             ? with_script
                                             : plain;
                                },
                                true, false});
  h.browser.set_store(CredentialStore{
      {CredentialFor("http://site.test/a", "https://site.test/login")}});

  int reads = 0;
  h.browser.set_form_read_handler(
      [&](FrameNode&, const std::vector<ExfilRecord>&) {
        ++reads;
        return true;
      });

  Tab* tab = h.browser.CreateTab("tab");
  h.browser.LoadFrame(tab->root(), *ParseUrl("http://site.test/a"));
  // Install lands at 20, the poll would fire at 120; renavigate first.
  h.loop.ScheduleAt(50, [&] {
    h.browser.LoadFrame(tab->root(), *ParseUrl("http://site.test/b"));
  });
  h.loop.RunUntilIdle();

  CHECK(reads == 0);
  REQUIRE(tab->root().page.has_value());
  CHECK(tab->root().page->url.path == "/b");
}

TEST_CASE("a load with no listener reports failure after the timeout") {
  Harness h(ChromeConfig());
  bool ok = true;
  int64_t failed_at = -1;
  h.browser.set_load_observer([&](FrameNode&, bool loaded) {
    ok = loaded;
    failed_at = h.loop.now();
  });
  Tab* tab = h.browser.CreateTab("tab");
  h.browser.LoadFrame(tab->root(), *ParseUrl("http://gone.test/"));
  h.loop.RunUntilIdle();
  CHECK(!ok);
  CHECK(failed_at == 2000);
}

TEST_CASE("submit stores through the manager with the network probe") {
  Browser::Config config = ChromeConfig();
  config.policy.defenses.Insert(Defense::kHstsUpgrade);
  Harness h(config);
  h.net.AddServer("site.test",
                  {[](const HttpMessage& request) {
                     return LoginPage("http://site.test" + request.url.path,
                                      "https://site.test/login");
                   },
                   true, true});

  Tab* tab = h.browser.CreateTab("tab");
  h.browser.LoadFrame(tab->root(), *ParseUrl("http://site.test/login"));
  h.loop.RunUntilIdle();

  REQUIRE(tab->root().forms.size() == 1);
  CHECK(h.browser.SubmitForm(tab->root(), 0, "bob", "pw"));
  REQUIRE(h.browser.store().entries.size() == 1);
  // The https twin answers, so the credential binds to it.
  CHECK(h.browser.store().entries[0].source_origin ==
        Origin{Scheme::kHttps, "site.test", 443});
}

TEST_CASE("the upgrade defense renavigates to the https twin and fills") {
  Browser::Config config = ChromeConfig();
  config.policy.defenses.Insert(Defense::kHstsUpgrade);
  Harness h(config);
  h.net.AddServer("site.test",
                  {[](const HttpMessage& request) {
                     std::string scheme =
                         request.url.scheme == Scheme::kHttps ? "https" : "http";
                     return LoginPage(scheme + "://site.test/",
                                      "https://site.test/login");
                   },
                   true, true});

  Credential c = CredentialFor("https://site.test/",
                               "https://site.test/login");
  h.browser.set_store(CredentialStore{{c}});

  Tab* tab = h.browser.CreateTab("tab");
  h.browser.LoadFrame(tab->root(), *ParseUrl("http://site.test/"));
  h.loop.RunUntilIdle();

  REQUIRE(tab->root().page.has_value());
  CHECK(tab->root().page->url.scheme == Scheme::kHttps);
  REQUIRE(tab->root().forms.size() == 1);
  CHECK(tab->root().forms[0].password_value == "hunter2");
  // Two navigations: the user's and the manager's redirect.
  CHECK(h.browser.refresh_events().size() == 2);
}

}  // namespace
}  // namespace lupin
