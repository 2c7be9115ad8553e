// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#ifndef LUPIN_NET_H_
#define LUPIN_NET_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lupin/event_loop.h"
#include "lupin/url.h"
#include "lupin/web.h"

namespace lupin {

// One credential captured by a payload script.
struct ExfilRecord {
  Origin site_origin;
  std::string username;
  std::string password;
  int64_t observed_at = 0;

  bool operator==(const ExfilRecord&) const = default;
};

struct ExfilBundle {
  std::vector<ExfilRecord> records;

  bool operator==(const ExfilBundle&) const = default;
};

using MessageBody = std::variant<std::monostate, PageSpec, ExfilBundle>;

struct HttpMessage {
  enum class Kind { kRequest, kResponse };

  Kind kind = Kind::kRequest;
  Url url;
  MessageBody body;
  bool encrypted = false;  // mirrors url.scheme; maintained by the transport
  uint64_t request_id = 0;

  bool operator==(const HttpMessage&) const = default;
};

// Raised when a gateway hook tries to touch traffic it cannot: any attempt
// to alter an encrypted message. Not recoverable; the run aborts.
class CapabilityViolation : public std::runtime_error {
 public:
  explicit CapabilityViolation(const std::string& what)
      : std::runtime_error(what) {}
};

// What a gateway hook gets to see. For encrypted traffic only the host and
// the clock are visible and |message| is null.
struct MessageView {
  bool encrypted = false;
  std::string host;
  int64_t time = 0;
  const HttpMessage* message = nullptr;  // null iff encrypted
};

struct HookDecision {
  enum class Action { kPass, kModify, kForge };

  Action action = Action::kPass;
  std::optional<HttpMessage> replacement;

  static HookDecision Pass() { return {}; }
  static HookDecision Modify(HttpMessage m);
  static HookDecision Forge(HttpMessage response);
};

using GatewayHook = std::function<HookDecision(const MessageView&)>;

struct TraceRecord {
  int64_t time_ms = 0;
  std::string node;
  std::string direction;  // "request" | "response"
  Scheme scheme = Scheme::kHttp;
  std::string host;
  std::string path;
  std::string action;  // "pass" | "modify" | "forge" | "deliver"

  std::string ToTsvLine() const;
  bool operator==(const TraceRecord&) const = default;
};

std::string SerializeTrace(const std::vector<TraceRecord>& trace);
uint64_t TraceHash(const std::vector<TraceRecord>& trace);

struct LinkProfile {
  int64_t request_latency_ms = 10;
  int64_t response_latency_ms = 10;
};

// The wire between victims, origin servers, and the attacker's gateway
// position. Strictly driven by the owning EventLoop; every request ends in
// exactly one delivered response or one recorded timeout.
class Network {
 public:
  using PageHandler =
      std::function<std::optional<PageSpec>(const HttpMessage&)>;
  using ResponseCallback = std::function<void(std::optional<HttpMessage>)>;

  struct ServerConfig {
    PageHandler handler;
    bool serves_http = true;
    bool serves_https = false;
  };

  struct Accounting {
    uint64_t requests = 0;
    uint64_t responses = 0;
    uint64_t timeouts = 0;
  };

  Network(EventLoop* loop, LinkProfile link, int64_t timeout_ms = 2000);

  void AddVictim(const std::string& node_id);
  void AddServer(const std::string& host, ServerConfig config);

  // Routes all of |victim_id|'s traffic through the gateway hooks.
  // Throws std::invalid_argument for an unknown victim.
  void BecomeGateway(const std::string& victim_id);
  bool IsGatewayFor(const std::string& victim_id) const;

  void SetRequestHook(GatewayHook hook) { request_hook_ = std::move(hook); }
  void SetResponseHook(GatewayHook hook) { response_hook_ = std::move(hook); }

  // Sends |request| from |victim_id|; |callback| fires exactly once, with
  // the response or with nullopt on timeout.
  void SendRequest(const std::string& victim_id, HttpMessage request,
                   ResponseCallback callback);

  // Origin-availability oracle used by upgrade-on-save.
  bool HttpsReachable(const Origin& origin) const;

  const std::vector<TraceRecord>& trace() const { return trace_; }
  const Accounting& accounting() const { return accounting_; }
  int64_t timeout_ms() const { return timeout_ms_; }

 private:
  struct PendingRequest {
    bool settled = false;
    bool timed_out = false;
    EventLoop::TaskId timeout_task = 0;
  };

  HookDecision ConsultHook(const GatewayHook& hook, const HttpMessage& message,
                           const char* direction);
  void Deliver(const std::string& victim_id, HttpMessage response,
               ResponseCallback callback, uint64_t request_id);
  void RecordTrace(const std::string& node, const char* direction,
                   const Url& url, const char* action);

  EventLoop* loop_;
  LinkProfile link_;
  int64_t timeout_ms_;
  std::set<std::string> victims_;
  std::set<std::string> gatewayed_;
  std::map<std::string, ServerConfig> servers_;
  GatewayHook request_hook_;
  GatewayHook response_hook_;
  std::vector<TraceRecord> trace_;
  Accounting accounting_;
  std::map<uint64_t, PendingRequest> pending_;
  uint64_t next_request_id_ = 1;
};

}  // namespace lupin

#endif  // LUPIN_NET_H_
