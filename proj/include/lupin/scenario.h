// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#ifndef LUPIN_SCENARIO_H_
#define LUPIN_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lupin/attack.h"
#include "lupin/autofill.h"
#include "lupin/url.h"

namespace lupin {

// A complete run description, parsed from a flat "key = value" file with
// '#' comments. Referenced files (store, targets, forms) are loaded at
// parse time, resolved against the scenario file's directory, so a
// returned Scenario is always runnable.
//
// Keys: seed, browser, defenses, store, targets, forms, fanout,
// request_latency_ms, response_latency_ms, fill_latency_ms,
// poll_delay_ms, timeout_ms, benign, collector, focus,
// refresh_interval_ms, refresh_count, https_reachable, stream_exfil.
struct Scenario {
  uint64_t seed = 1;
  BrowserPreset preset = BrowserPreset::kChrome;
  AutofillPolicy policy;  // preset policy with defense toggles applied

  CredentialStore store;
  TargetList targets;

  int fanout = 4;
  int64_t request_latency_ms = 10;
  int64_t response_latency_ms = 10;
  int64_t fill_latency_ms = 10;
  int64_t poll_delay_ms = 100;
  int64_t timeout_ms = 2000;

  Url benign_url;
  Url collector;

  // (time_ms, attack tab focused); "focus = 0:attack,200:away" means the
  // victim looks at the carrying tab first and leaves it at 200 ms.
  std::vector<std::pair<int64_t, bool>> focus;
  int64_t refresh_interval_ms = 0;
  int refresh_count = 0;

  // Which https twins answer. kAll and kNone ignore |https_hosts|.
  enum class HttpsReachability { kAll, kNone, kListed };
  HttpsReachability https_mode = HttpsReachability::kAll;
  std::set<std::string> https_hosts;

  bool stream_exfil = false;
};

// One-line diagnostics: "file:line: field 'x': message"; line 0 means the
// problem is not tied to a line (a missing required key, say).
struct ScenarioError {
  std::string file;
  int line = 0;
  std::string field;
  std::string message;

  std::string ToString() const;
};

std::optional<Scenario> LoadScenario(const std::string& path,
                                     ScenarioError* error = nullptr);

// Applies one named toggle from a scenario's "defenses" list to |policy|:
// none, no_fill_https_destination, no_fill_on_http_page, hsts_upgrade, or
// explicit_trigger. Returns false for a name it does not know.
bool ApplyDefenseByName(AutofillPolicy& policy, const std::string& name);

struct ScenarioRun {
  AttackOutcome outcome;
  std::string trace;  // serialized network trace
  uint64_t trace_hash = 0;
};

// Builds the world the scenario describes (victim, benign site, target
// hosts with https twins per reachability, store attached after servers
// exist so upgrade migration sees them) and runs the attack to
// completion. The seed shuffles target visit order; everything else is
// deterministic by construction.
ScenarioRun RunScenario(const Scenario& scenario);

// Write-temp-then-rename so a reader never sees a half-written file.
bool WriteFileAtomic(const std::string& path, std::string_view content,
                     std::string* error = nullptr);

}  // namespace lupin

#endif  // LUPIN_SCENARIO_H_
