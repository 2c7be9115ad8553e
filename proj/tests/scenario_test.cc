// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lupin/scenario.h"

namespace lupin {
namespace {

namespace fs = std::filesystem;

const char* const kFixtureDir = LUPIN_FIXTURE_DIR;

std::string FixturePath(const char* name) {
  return (fs::path(kFixtureDir) / name).string();
}

// A throwaway directory per test case; removed on destruction so failed
// runs do not pile up under /tmp.
struct TempDir {
  fs::path path;

  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("lupin_scenario_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }

  std::string Write(const std::string& name, const std::string& content) {
    fs::path file = path / name;
    std::ofstream out(file, std::ios::binary);
    out << content;
    return file.string();
  }
};

// Smallest parseable scenario: one target, everything else defaulted.
std::string MinimalBody() { return "targets = t.tsv\n"; }

std::string WriteMinimalTargets(TempDir& dir) {
  return dir.Write("t.tsv", "http://a.test/\n");
}

ScenarioError LoadExpectingError(const std::string& path) {
  ScenarioError error;
  auto scenario = LoadScenario(path, &error);
  REQUIRE_FALSE(scenario.has_value());
  return error;
}

std::set<std::pair<std::string, std::string>> HarvestSet(
    const ScenarioRun& run) {
  std::set<std::pair<std::string, std::string>> out;
  for (const HarvestRecord& record : run.outcome.harvest)
    out.insert({record.site_origin.ToString(), record.username});
  return out;
}

TEST_CASE("the standard fixture parses with every knob populated") {
  ScenarioError error;
  auto scenario = LoadScenario(FixturePath("standard.scn"), &error);
  REQUIRE_MESSAGE(scenario.has_value(), error.ToString());

  CHECK(scenario->preset == BrowserPreset::kChrome);
  CHECK(scenario->seed == 1);
  CHECK(scenario->store.entries.size() == 20);
  CHECK(scenario->targets.sites.size() == 50);
  CHECK(scenario->targets.known_forms.size() == 50);
  CHECK(scenario->fanout == 4);
  CHECK(scenario->request_latency_ms == 15);
  CHECK(scenario->response_latency_ms == 30);
  CHECK(scenario->fill_latency_ms == 10);
  CHECK(scenario->poll_delay_ms == 100);
  CHECK(scenario->timeout_ms == 2000);
  CHECK(scenario->benign_url.ToString() == "http://home.test/news");
  CHECK(scenario->collector.ToString() == "http://drop.test/c");
  REQUIRE(scenario->focus.size() == 2);
  CHECK(scenario->focus[0] == std::pair<int64_t, bool>{0, true});
  CHECK(scenario->focus[1] == std::pair<int64_t, bool>{200, false});
  CHECK(scenario->https_mode == Scenario::HttpsReachability::kAll);
  CHECK_FALSE(scenario->stream_exfil);
  CHECK(scenario->refresh_count == 0);
}

TEST_CASE("omitted keys fall back to documented defaults") {
  TempDir dir;
  WriteMinimalTargets(dir);
  std::string path = dir.Write("min.scn", MinimalBody());

  ScenarioError error;
  auto scenario = LoadScenario(path, &error);
  REQUIRE_MESSAGE(scenario.has_value(), error.ToString());

  CHECK(scenario->seed == 1);
  CHECK(scenario->preset == BrowserPreset::kChrome);
  CHECK(scenario->store.entries.empty());
  CHECK(scenario->targets.sites.size() == 1);
  CHECK(scenario->fanout == 4);
  CHECK(scenario->request_latency_ms == 10);
  CHECK(scenario->response_latency_ms == 10);
  CHECK(scenario->fill_latency_ms == 10);
  CHECK(scenario->poll_delay_ms == 100);
  CHECK(scenario->timeout_ms == 2000);
  CHECK(scenario->benign_url.ToString() == "http://news.example.test/front");
  CHECK(scenario->collector.ToString() == "http://collect.invalid.test/drop");
  CHECK(scenario->focus.empty());
  CHECK(scenario->https_mode == Scenario::HttpsReachability::kAll);
  CHECK_FALSE(scenario->stream_exfil);
}

TEST_CASE("defense toggles layer onto the preset in any key order") {
  TempDir dir;
  WriteMinimalTargets(dir);

  SUBCASE("defenses before browser still stick") {
    std::string path = dir.Write(
        "a.scn", "defenses = no_fill_on_http_page\nbrowser = chrome\n" +
                     MinimalBody());
    auto scenario = LoadScenario(path);
    REQUIRE(scenario.has_value());
    CHECK(scenario->policy.defenses.Contains(Defense::kNoFillOnHttpPage));
  }

  SUBCASE("explicit trigger rewrites the user action requirement") {
    std::string path = dir.Write(
        "b.scn", "browser = chrome\ndefenses = explicit_trigger\n" +
                     MinimalBody());
    auto scenario = LoadScenario(path);
    REQUIRE(scenario.has_value());
    CHECK(scenario->policy.user_action ==
          UserActionRequirement::kExplicitTrigger);
  }

  SUBCASE("a comma list applies every named defense") {
    std::string path = dir.Write(
        "c.scn",
        "defenses = no_fill_https_destination, hsts_upgrade\n" +
            MinimalBody());
    auto scenario = LoadScenario(path);
    REQUIRE(scenario.has_value());
    CHECK(scenario->policy.defenses.Contains(
        Defense::kNoFillHttpsDestination));
    CHECK(scenario->policy.defenses.Contains(Defense::kHstsUpgrade));
  }

  SUBCASE("none is accepted and changes nothing") {
    std::string path = dir.Write("d.scn", "defenses = none\n" + MinimalBody());
    auto scenario = LoadScenario(path);
    REQUIRE(scenario.has_value());
    CHECK(scenario->policy.defenses.Empty());
  }
}

TEST_CASE("reachability and exfil keys parse into their modes") {
  TempDir dir;
  WriteMinimalTargets(dir);

  std::string path = dir.Write(
      "r.scn",
      "https_reachable = a.test, b.test\nstream_exfil = true\n"
      "refresh_interval_ms = 500\nrefresh_count = 2\n" +
          MinimalBody());
  auto scenario = LoadScenario(path);
  REQUIRE(scenario.has_value());
  CHECK(scenario->https_mode == Scenario::HttpsReachability::kListed);
  CHECK(scenario->https_hosts ==
        std::set<std::string>{"a.test", "b.test"});
  CHECK(scenario->stream_exfil);
  CHECK(scenario->refresh_interval_ms == 500);
  CHECK(scenario->refresh_count == 2);

  std::string none = dir.Write("n.scn",
                               "https_reachable = none\n" + MinimalBody());
  auto none_scenario = LoadScenario(none);
  REQUIRE(none_scenario.has_value());
  CHECK(none_scenario->https_mode == Scenario::HttpsReachability::kNone);
}

TEST_CASE("parse failures name the file, line, and field") {
  TempDir dir;
  WriteMinimalTargets(dir);
  ScenarioError error;

  SUBCASE("a missing scenario file is reported as such") {
    error = LoadExpectingError((dir.path / "absent.scn").string());
    CHECK(error.field == "scenario");
    CHECK(error.message.find("cannot open") != std::string::npos);
  }

  SUBCASE("the targets key is required") {
    error = LoadExpectingError(dir.Write("e.scn", "seed = 3\n"));
    CHECK(error.field == "targets");
    CHECK(error.message == "required key missing");
    CHECK(error.line == 0);
  }

  SUBCASE("an unknown key is rejected with its line number") {
    error = LoadExpectingError(
        dir.Write("e.scn", MinimalBody() + "\n# comment\nbogus_key = 1\n"));
    CHECK(error.field == "bogus_key");
    CHECK(error.message == "unknown key");
    CHECK(error.line == 4);
  }

  SUBCASE("a line without an equals sign is malformed") {
    error = LoadExpectingError(dir.Write("e.scn", "just some words\n"));
    CHECK(error.message == "expected key = value");
    CHECK(error.line == 1);
  }

  SUBCASE("an empty value is rejected") {
    error = LoadExpectingError(dir.Write("e.scn", "seed =\n"));
    CHECK(error.field == "seed");
    CHECK(error.message == "empty value");
  }

  SUBCASE("a non-integer where a number belongs") {
    error = LoadExpectingError(
        dir.Write("e.scn", "fanout = lots\n" + MinimalBody()));
    CHECK(error.field == "fanout");
    CHECK(error.message.find("expected an integer") != std::string::npos);
  }

  SUBCASE("fanout below one is out of range") {
    error = LoadExpectingError(
        dir.Write("e.scn", "fanout = 0\n" + MinimalBody()));
    CHECK(error.field == "fanout");
    CHECK(error.message == "must be at least 1");
  }

  SUBCASE("an unknown browser name") {
    error = LoadExpectingError(
        dir.Write("e.scn", "browser = netscape\n" + MinimalBody()));
    CHECK(error.field == "browser");
    CHECK(error.message.find("netscape") != std::string::npos);
  }

  SUBCASE("an unknown defense name") {
    error = LoadExpectingError(
        dir.Write("e.scn", "defenses = prayer\n" + MinimalBody()));
    CHECK(error.field == "defenses");
    CHECK(error.message.find("prayer") != std::string::npos);
  }

  SUBCASE("a malformed focus entry") {
    error = LoadExpectingError(
        dir.Write("e.scn", "focus = 100\n" + MinimalBody()));
    CHECK(error.field == "focus");
    CHECK(error.message.find("time:state") != std::string::npos);
  }

  SUBCASE("a focus state that is neither attack nor away") {
    error = LoadExpectingError(
        dir.Write("e.scn", "focus = 100:asleep\n" + MinimalBody()));
    CHECK(error.field == "focus");
    CHECK(error.message.find("asleep") != std::string::npos);
  }

  SUBCASE("an https benign page cannot be tampered with") {
    error = LoadExpectingError(dir.Write(
        "e.scn", "benign = https://home.test/news\n" + MinimalBody()));
    CHECK(error.field == "benign");
    CHECK(error.message.find("plain http") != std::string::npos);
  }

  SUBCASE("a store file that does not exist") {
    error = LoadExpectingError(
        dir.Write("e.scn", "store = nowhere.tsv\n" + MinimalBody()));
    CHECK(error.field == "store");
    CHECK(error.message.find("nowhere.tsv") != std::string::npos);
  }

  SUBCASE("a broken store line carries the inner diagnostic") {
    dir.Write("bad_store.tsv", "only\ttwo\n");
    error = LoadExpectingError(
        dir.Write("e.scn", "store = bad_store.tsv\n" + MinimalBody()));
    CHECK(error.field == "store");
    CHECK(error.message.find("bad_store.tsv") != std::string::npos);
    CHECK(error.message.find("line 1") != std::string::npos);
  }

  SUBCASE("a target list with an https entry is rejected") {
    dir.Write("https_targets.tsv", "https://locked.test/\n");
    error = LoadExpectingError(
        dir.Write("e.scn", "targets = https_targets.tsv\n"));
    CHECK(error.field == "targets");
    CHECK(error.message.find("not plain http") != std::string::npos);
  }

  SUBCASE("a refresh count without an interval") {
    error = LoadExpectingError(
        dir.Write("e.scn", "refresh_count = 2\n" + MinimalBody()));
    CHECK(error.field == "refresh_interval_ms");
    CHECK(error.message == "required when refresh_count is positive");
  }

  SUBCASE("ToString renders one line with file, line, and field") {
    error = LoadExpectingError(
        dir.Write("e.scn", MinimalBody() + "bogus = 1\n"));
    std::string rendered = error.ToString();
    CHECK(rendered.find("e.scn:2: field 'bogus': unknown key") !=
          std::string::npos);
    CHECK(rendered.find('\n') == std::string::npos);
  }
}

TEST_CASE("the standard scenario harvests every matching stored credential") {
  auto scenario = LoadScenario(FixturePath("standard.scn"));
  REQUIRE(scenario.has_value());
  ScenarioRun run = RunScenario(*scenario);

  CHECK(run.outcome.metrics.pages_explored == 50);
  CHECK(run.outcome.metrics.pages_failed == 0);
  CHECK(run.outcome.metrics.credentials_harvested == 12);

  // Four workers share fifty sites, so the longest queue holds thirteen.
  // Each visit costs the forged response leg plus the read poll.
  const int64_t cycle =
      scenario->response_latency_ms + scenario->poll_delay_ms;
  CHECK(run.outcome.metrics.elapsed_ms == 13 * cycle);
  CHECK(run.outcome.metrics.websites_per_minute ==
        doctest::Approx(50.0 * 60000.0 / (13.0 * cycle)));

  std::set<std::pair<std::string, std::string>> expected;
  for (int i = 1; i <= 12; ++i) {
    char origin[32];
    char user[16];
    std::snprintf(origin, sizeof(origin), "http://site%02d.test", i);
    std::snprintf(user, sizeof(user), "user%02d", i);
    expected.insert({origin, user});
  }
  CHECK(HarvestSet(run) == expected);
}

TEST_CASE("safari rules keep the crawl empty handed") {
  auto scenario = LoadScenario(FixturePath("safari_any.scn"));
  REQUIRE(scenario.has_value());
  CHECK(scenario->preset == BrowserPreset::kSafari);

  ScenarioRun run = RunScenario(*scenario);
  CHECK(run.outcome.metrics.pages_explored == 50);
  CHECK(run.outcome.metrics.pages_failed == 0);
  CHECK(run.outcome.harvest.empty());
}

TEST_CASE("an upgrading manager with reachable twins starves the crawl") {
  auto scenario = LoadScenario(FixturePath("standard.scn"));
  REQUIRE(scenario.has_value());
  scenario->policy.defenses.Insert(Defense::kHstsUpgrade);

  SUBCASE("reachable twins bounce every forged page") {
    ScenarioRun run = RunScenario(*scenario);
    CHECK(run.outcome.metrics.pages_explored == 50);
    CHECK(run.outcome.harvest.empty());
  }

  SUBCASE("with the twins dark the upgrade never engages") {
    scenario->https_mode = Scenario::HttpsReachability::kNone;
    ScenarioRun run = RunScenario(*scenario);
    CHECK(run.outcome.metrics.credentials_harvested == 12);
  }
}

TEST_CASE("the same scenario replays byte for byte") {
  auto scenario = LoadScenario(FixturePath("standard.scn"));
  REQUIRE(scenario.has_value());

  ScenarioRun first = RunScenario(*scenario);
  ScenarioRun second = RunScenario(*scenario);

  CHECK(first.trace == second.trace);
  CHECK(first.trace_hash == second.trace_hash);
  CHECK(SerializeHarvest(first.outcome.harvest, first.outcome.metrics) ==
        SerializeHarvest(second.outcome.harvest, second.outcome.metrics));
}

TEST_CASE("the seed permutes visit order without changing the take") {
  auto scenario = LoadScenario(FixturePath("standard.scn"));
  REQUIRE(scenario.has_value());

  Scenario reseeded = *scenario;
  reseeded.seed = 2;

  ScenarioRun base = RunScenario(*scenario);
  ScenarioRun other = RunScenario(reseeded);

  CHECK(base.trace_hash != other.trace_hash);
  CHECK(base.trace != other.trace);
  CHECK(HarvestSet(base) == HarvestSet(other));
  CHECK(base.outcome.metrics.pages_explored ==
        other.outcome.metrics.pages_explored);
  CHECK(base.outcome.metrics.elapsed_ms == other.outcome.metrics.elapsed_ms);
}

TEST_CASE("atomic writes replace the target and leave no droppings") {
  TempDir dir;
  std::string path = (dir.path / "out.txt").string();

  REQUIRE(WriteFileAtomic(path, "first\n"));
  REQUIRE(WriteFileAtomic(path, "second\n"));

  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == "second\n");
  CHECK_FALSE(fs::exists(path + ".tmp"));

  std::string error;
  CHECK_FALSE(WriteFileAtomic((dir.path / "no" / "dir.txt").string(),
                              "x", &error));
  CHECK_FALSE(error.empty());
}

}  // namespace
}  // namespace lupin
