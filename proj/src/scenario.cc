// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#include "lupin/scenario.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lupin/browser.h"
#include "lupin/event_loop.h"
#include "lupin/net.h"

namespace lupin {
namespace {

std::string Trim(std::string_view text) {
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && (text[begin] == ' ' || text[begin] == '\t')) ++begin;
  while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t' ||
                         text[end - 1] == '\r')) {
    --end;
  }
  return std::string(text.substr(begin, end - begin));
}

std::vector<std::string> SplitCommas(std::string_view text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    out.push_back(Trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool ReadFile(const std::filesystem::path& path, std::string* out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  *out = std::move(buffer).str();
  return true;
}

// Carries the parse position so every failure can say where it happened.
// Defense names are collected and applied after the whole file is read,
// so "browser" and "defenses" keys may appear in any order.
struct ParseState {
  Scenario scenario;
  std::vector<std::string> defense_names;
  std::filesystem::path base;
  std::string file;
  int line = 0;
  ScenarioError* error = nullptr;

  bool Fail(const std::string& field, const std::string& message) {
    if (error) *error = ScenarioError{file, line, field, message};
    return false;
  }
};

bool ParseInt64(ParseState& state, const std::string& key,
                const std::string& value, int64_t min, int64_t* out) {
  int64_t parsed = 0;
  auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    return state.Fail(key, "expected an integer, got '" + value + "'");
  }
  if (parsed < min) {
    return state.Fail(key, "must be at least " + std::to_string(min));
  }
  *out = parsed;
  return true;
}

bool ParseBool(ParseState& state, const std::string& key,
               const std::string& value, bool* out) {
  if (value == "true" || value == "yes" || value == "1") {
    *out = true;
    return true;
  }
  if (value == "false" || value == "no" || value == "0") {
    *out = false;
    return true;
  }
  return state.Fail(key, "expected true or false, got '" + value + "'");
}

bool ParseFocus(ParseState& state, const std::string& value) {
  for (const std::string& token : SplitCommas(value)) {
    size_t colon = token.find(':');
    if (colon == std::string::npos) {
      return state.Fail("focus", "expected time:state, got '" + token + "'");
    }
    int64_t time_ms = 0;
    if (!ParseInt64(state, "focus", Trim(token.substr(0, colon)), 0,
                    &time_ms)) {
      return false;
    }
    std::string which = Trim(token.substr(colon + 1));
    bool focused;
    if (which == "attack") {
      focused = true;
    } else if (which == "away") {
      focused = false;
    } else {
      return state.Fail("focus", "state must be attack or away, got '" +
                                     which + "'");
    }
    state.scenario.focus.emplace_back(time_ms, focused);
  }
  return true;
}

bool ParseUrlKey(ParseState& state, const std::string& key,
                 const std::string& value, Url* out) {
  std::string message;
  std::optional<Url> url = ParseUrl(value, &message);
  if (!url) return state.Fail(key, message);
  *out = *url;
  return true;
}

bool HandleKey(ParseState& state, const std::string& key,
               const std::string& value) {
  Scenario& scenario = state.scenario;
  if (key == "seed") {
    int64_t seed = 0;
    if (!ParseInt64(state, key, value, 0, &seed)) return false;
    scenario.seed = static_cast<uint64_t>(seed);
    return true;
  }
  if (key == "browser") {
    std::optional<BrowserPreset> preset = PresetFromName(value);
    if (!preset) return state.Fail(key, "unknown browser '" + value + "'");
    scenario.preset = *preset;
    return true;
  }
  if (key == "defenses") {
    for (const std::string& name : SplitCommas(value)) {
      AutofillPolicy probe;
      if (!ApplyDefenseByName(probe, name)) {
        return state.Fail(key, "unknown defense '" + name + "'");
      }
      state.defense_names.push_back(name);
    }
    return true;
  }
  if (key == "store") {
    std::string text;
    if (!ReadFile(state.base / value, &text)) {
      return state.Fail(key, "cannot read file '" + value + "'");
    }
    std::string message;
    std::optional<CredentialStore> store = ParseStore(text, &message);
    if (!store) return state.Fail(key, value + ": " + message);
    scenario.store = std::move(*store);
    return true;
  }
  if (key == "targets") {
    std::string text;
    if (!ReadFile(state.base / value, &text)) {
      return state.Fail(key, "cannot read file '" + value + "'");
    }
    std::string message;
    std::optional<TargetList> targets = ParseTargets(text, &message);
    if (!targets) return state.Fail(key, value + ": " + message);
    scenario.targets.sites = std::move(targets->sites);
    return true;
  }
  if (key == "forms") {
    std::string text;
    if (!ReadFile(state.base / value, &text)) {
      return state.Fail(key, "cannot read file '" + value + "'");
    }
    std::string message;
    if (!ParseKnownFormsInto(scenario.targets, text, &message)) {
      return state.Fail(key, value + ": " + message);
    }
    return true;
  }
  if (key == "fanout") {
    int64_t fanout = 0;
    if (!ParseInt64(state, key, value, 1, &fanout)) return false;
    scenario.fanout = static_cast<int>(fanout);
    return true;
  }
  if (key == "request_latency_ms") {
    return ParseInt64(state, key, value, 0, &scenario.request_latency_ms);
  }
  if (key == "response_latency_ms") {
    return ParseInt64(state, key, value, 0, &scenario.response_latency_ms);
  }
  if (key == "fill_latency_ms") {
    return ParseInt64(state, key, value, 0, &scenario.fill_latency_ms);
  }
  if (key == "poll_delay_ms") {
    return ParseInt64(state, key, value, 1, &scenario.poll_delay_ms);
  }
  if (key == "timeout_ms") {
    return ParseInt64(state, key, value, 1, &scenario.timeout_ms);
  }
  if (key == "benign") {
    if (!ParseUrlKey(state, key, value, &scenario.benign_url)) return false;
    if (scenario.benign_url.scheme != Scheme::kHttp) {
      return state.Fail(key, "must be plain http; encrypted responses "
                             "cannot be tampered with");
    }
    return true;
  }
  if (key == "collector") {
    return ParseUrlKey(state, key, value, &scenario.collector);
  }
  if (key == "focus") {
    return ParseFocus(state, value);
  }
  if (key == "refresh_interval_ms") {
    return ParseInt64(state, key, value, 1, &scenario.refresh_interval_ms);
  }
  if (key == "refresh_count") {
    int64_t count = 0;
    if (!ParseInt64(state, key, value, 0, &count)) return false;
    scenario.refresh_count = static_cast<int>(count);
    return true;
  }
  if (key == "https_reachable") {
    if (value == "all") {
      scenario.https_mode = Scenario::HttpsReachability::kAll;
    } else if (value == "none") {
      scenario.https_mode = Scenario::HttpsReachability::kNone;
    } else {
      scenario.https_mode = Scenario::HttpsReachability::kListed;
      for (const std::string& host : SplitCommas(value)) {
        if (!host.empty()) scenario.https_hosts.insert(host);
      }
    }
    return true;
  }
  if (key == "stream_exfil") {
    return ParseBool(state, key, value, &scenario.stream_exfil);
  }
  return state.Fail(key, "unknown key");
}

}  // namespace

std::string ScenarioError::ToString() const {
  std::ostringstream out;
  out << file << ":" << line << ": field '" << field << "': " << message;
  return out.str();
}

bool ApplyDefenseByName(AutofillPolicy& policy, const std::string& name) {
  if (name == "none") return true;
  if (name == "no_fill_https_destination") {
    policy.defenses.Insert(Defense::kNoFillHttpsDestination);
    return true;
  }
  if (name == "no_fill_on_http_page") {
    policy.defenses.Insert(Defense::kNoFillOnHttpPage);
    return true;
  }
  if (name == "hsts_upgrade") {
    policy.defenses.Insert(Defense::kHstsUpgrade);
    return true;
  }
  if (name == "explicit_trigger") {
    policy.user_action = UserActionRequirement::kExplicitTrigger;
    return true;
  }
  return false;
}

std::optional<Scenario> LoadScenario(const std::string& path,
                                     ScenarioError* error) {
  ParseState state;
  state.file = path;
  state.base = std::filesystem::path(path).parent_path();
  state.error = error;
  state.scenario.policy = PolicyForPreset(state.scenario.preset);
  state.scenario.benign_url = *ParseUrl("http://news.example.test/front");
  state.scenario.collector = *ParseUrl("http://collect.invalid.test/drop");

  std::ifstream in(path);
  if (!in) {
    state.Fail("scenario", "cannot open '" + path + "'");
    return std::nullopt;
  }

  std::string line;
  bool saw_targets = false;
  while (std::getline(in, line)) {
    ++state.line;
    std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    size_t equals = trimmed.find('=');
    if (equals == std::string::npos) {
      state.Fail(Trim(trimmed.substr(0, 16)), "expected key = value");
      return std::nullopt;
    }
    std::string key = Trim(trimmed.substr(0, equals));
    std::string value = Trim(trimmed.substr(equals + 1));
    if (key.empty()) {
      state.Fail("", "expected key = value");
      return std::nullopt;
    }
    if (value.empty()) {
      state.Fail(key, "empty value");
      return std::nullopt;
    }
    if (!HandleKey(state, key, value)) return std::nullopt;
    if (key == "targets") saw_targets = true;
  }

  state.line = 0;
  state.scenario.policy = PolicyForPreset(state.scenario.preset);
  for (const std::string& name : state.defense_names) {
    ApplyDefenseByName(state.scenario.policy, name);
  }
  if (!saw_targets) {
    state.Fail("targets", "required key missing");
    return std::nullopt;
  }
  if (state.scenario.refresh_count > 0 &&
      state.scenario.refresh_interval_ms <= 0) {
    state.Fail("refresh_interval_ms",
               "required when refresh_count is positive");
    return std::nullopt;
  }
  try {
    ValidateTargetList(state.scenario.targets);
  } catch (const std::invalid_argument& bad) {
    state.Fail("targets", bad.what());
    return std::nullopt;
  }
  return std::move(state.scenario);
}

ScenarioRun RunScenario(const Scenario& scenario) {
  EventLoop loop;
  Network net(&loop,
              LinkProfile{scenario.request_latency_ms,
                          scenario.response_latency_ms},
              scenario.timeout_ms);
  net.AddVictim("victim");

  auto echo_page = [](const HttpMessage& message) {
    PageSpec page;
    page.url = message.url;
    return page;
  };
  net.AddServer(scenario.benign_url.host, {echo_page, true, false});

  for (const Url& site : scenario.targets.sites) {
    bool https = false;
    switch (scenario.https_mode) {
      case Scenario::HttpsReachability::kAll:
        https = true;
        break;
      case Scenario::HttpsReachability::kNone:
        https = false;
        break;
      case Scenario::HttpsReachability::kListed:
        https = scenario.https_hosts.count(site.host) > 0;
        break;
    }
    net.AddServer(site.host, {echo_page, true, https});
  }

  Browser browser(&loop, &net, "victim",
                  Browser::Config{scenario.policy, scenario.fill_latency_ms,
                                  UserAction::kNone});
  // Servers first, then the store: upgrade migration probes reachability.
  browser.set_store(scenario.store);

  TargetList targets = scenario.targets;
  // The seed only permutes visit order; results are order-independent,
  // schedules are not, so distinct seeds give distinct traces.
  std::mt19937_64 engine(scenario.seed);
  for (size_t i = targets.sites.size(); i > 1; --i) {
    std::swap(targets.sites[i - 1], targets.sites[engine() % i]);
  }

  AttackConfig config;
  config.benign_url = scenario.benign_url;
  config.collector = scenario.collector;
  config.fanout = scenario.fanout;
  config.poll_delay_ms = scenario.poll_delay_ms;
  config.stream_exfil = scenario.stream_exfil;

  VictimPlan plan;
  plan.changes = scenario.focus;
  plan.refresh_interval_ms = scenario.refresh_interval_ms;
  plan.refresh_count = scenario.refresh_count;

  ScenarioRun run;
  run.outcome = RunAttack(&loop, &net, &browser, std::move(targets),
                          std::move(config), plan);
  run.trace = SerializeTrace(net.trace());
  run.trace_hash = TraceHash(net.trace());
  return run;
}

bool WriteFileAtomic(const std::string& path, std::string_view content,
                     std::string* error) {
  std::filesystem::path target(path);
  std::filesystem::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      if (error) *error = "cannot write " + temp.string();
      return false;
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, target, ec);
  if (ec) {
    if (error) *error = "cannot rename " + temp.string() + ": " + ec.message();
    return false;
  }
  return true;
}

}  // namespace lupin
