// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#ifndef LUPIN_ATTACK_H_
#define LUPIN_ATTACK_H_

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lupin/browser.h"
#include "lupin/event_loop.h"
#include "lupin/net.h"
#include "lupin/url.h"
#include "lupin/web.h"

namespace lupin {

// The crawl worklist: plain-HTTP sites to impersonate, with optional
// previously observed login-form metadata per host.
struct TargetList {
  std::vector<Url> sites;
  std::map<std::string, LoginForm> known_forms;  // keyed by host
};

// Throws std::invalid_argument when the list is empty or contains a site
// that is not plain HTTP; only unencrypted pages can be impersonated.
void ValidateTargetList(const TargetList& targets);

// One target URL per line; blank lines and '#' comments are skipped.
std::optional<TargetList> ParseTargets(std::string_view text,
                                       std::string* error = nullptr);

// Form metadata lines: host, action_url, username_field, password_field,
// tab separated. Adds onto |targets|.
bool ParseKnownFormsInto(TargetList& targets, std::string_view text,
                         std::string* error = nullptr);

struct AttackConfig {
  Url benign_url;  // the page the victim is expected to visit
  Url collector;   // where captured credentials get reported
  int fanout = 4;  // concurrent crawler subframes
  int64_t poll_delay_ms = 100;
  bool stream_exfil = false;  // one report per page instead of one batch
};

// The hidden frame that rides along on the tampered benign response. It
// carries the crawl worklist; it costs no extra request.
struct InjectionPayload {
  PageSpec attack_frame;
};

using HarvestRecord = ExfilRecord;

struct RunMetrics {
  uint64_t pages_explored = 0;  // visits that completed
  uint64_t pages_failed = 0;    // visits that timed out or failed to load
  uint64_t credentials_harvested = 0;
  // First crawl navigation to last settled visit; zero when the crawl
  // never got to start.
  int64_t elapsed_ms = 0;
  double websites_per_minute = 0.0;
};

InjectionPayload BuildInjection(const TargetList& targets,
                                const AttackConfig& config);

// Returns |response| with the payload frame appended to its document.
// Throws CapabilityViolation for encrypted responses.
HttpMessage InjectIntoResponse(const HttpMessage& response,
                               const InjectionPayload& payload);

// The page served in a target's name: its own address, a login form built
// from known metadata (or a guess at the common shape), and the capture
// script.
PageSpec ForgeLoginPage(const Url& request_url, const TargetList& targets,
                        const AttackConfig& config);

// Default form guess used when no metadata is known for a host.
inline constexpr const char kGuessUsernameField[] = "username";
inline constexpr const char kGuessPasswordField[] = "password";
inline constexpr const char kGuessActionPath[] = "/login";

// Runs the extraction from the network gateway position: injects the
// payload into the victim's benign page, impersonates every target in
// hidden subframes, and collects whatever the password manager volunteers.
// Crawling pauses whenever the carrying tab has focus.
class LupinAttack {
 public:
  LupinAttack(EventLoop* loop, Network* net, Browser* browser,
              TargetList targets, AttackConfig config);

  LupinAttack(const LupinAttack&) = delete;
  LupinAttack& operator=(const LupinAttack&) = delete;

  // Takes the gateway position and installs hooks, the collector service,
  // and the browser delegates. Call once, before the loop runs.
  void Arm();

  bool injected() const { return injected_; }
  const std::vector<HarvestRecord>& harvest() const { return harvest_; }
  RunMetrics metrics() const;

 private:
  struct Worker {
    FrameNode* frame = nullptr;
    std::deque<Url> queue;
    bool busy = false;
  };

  HookDecision OnRequest(const MessageView& view);
  HookDecision OnResponse(const MessageView& view);
  void OnControllerScript(FrameNode& frame, const ScriptBehavior& script);
  bool OnFormsRead(FrameNode& frame,
                   const std::vector<ExfilRecord>& records);
  void OnFrameLoad(FrameNode& frame, bool ok);
  void OnFocusChange(Tab* tab, bool focused);

  Worker* FindWorker(const FrameNode& frame);
  void Pump(Worker& worker);
  void PumpAll();
  void Settle(Worker& worker, bool explored);
  void MaybeFinish();
  void SendBundle(std::vector<ExfilRecord> records);

  EventLoop* loop_;
  Network* net_;
  Browser* browser_;
  TargetList targets_;
  AttackConfig config_;
  InjectionPayload payload_;
  std::set<std::string> target_hosts_;

  bool injected_ = false;
  FrameNode* controller_frame_ = nullptr;
  Tab* attack_tab_ = nullptr;
  std::vector<Worker> workers_;
  size_t total_targets_ = 0;
  uint64_t explored_ = 0;
  uint64_t failed_ = 0;
  int64_t first_navigation_ms_ = -1;
  int64_t last_settled_ms_ = -1;
  bool finished_ = false;
  std::vector<ExfilRecord> bundle_;
  std::vector<HarvestRecord> harvest_;
};

// What the victim does during the run. Focus changes park and resume the
// crawl; each entry flips whether the carrying tab is the focused one.
// Reloads model the victim's refresh habit: every reload replaces the
// document, which destroys the injected frame and anything it had in
// flight. Injection happens once per run, so the crawl must finish before
// the first reload or it loses its unsent findings.
struct VictimPlan {
  std::vector<std::pair<int64_t, bool>> changes;  // (time_ms, tab focused)
  int64_t refresh_interval_ms = 0;
  int refresh_count = 0;  // reloads at interval, 2*interval, ...
};

struct AttackOutcome {
  std::vector<HarvestRecord> harvest;
  RunMetrics metrics;
};

// Convenience driver: the victim opens |config.benign_url| at time zero,
// then behaves per |plan|, and the loop runs dry. The browser's store and
// policy must be set up beforehand.
AttackOutcome RunAttack(EventLoop* loop, Network* net, Browser* browser,
                        TargetList targets, AttackConfig config,
                        const VictimPlan& plan);

// Report formats: the harvest is one '#'-prefixed metrics summary line
// followed by one record per line (site origin, username, password,
// observed_at, tab separated).
std::string SerializeHarvest(const std::vector<HarvestRecord>& harvest,
                             const RunMetrics& metrics);
std::string SerializeMetrics(const RunMetrics& metrics);

}  // namespace lupin

#endif  // LUPIN_ATTACK_H_
