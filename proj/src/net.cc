// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#include "lupin/net.h"

#include <sstream>
#include <utility>

namespace lupin {

namespace {

// FNV-1a, stable across platforms; used to compare whole traces cheaply.
uint64_t Fnv1a(std::string_view text, uint64_t hash) {
  for (char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace

HookDecision HookDecision::Modify(HttpMessage m) {
  HookDecision d;
  d.action = Action::kModify;
  d.replacement = std::move(m);
  return d;
}

HookDecision HookDecision::Forge(HttpMessage response) {
  HookDecision d;
  d.action = Action::kForge;
  d.replacement = std::move(response);
  return d;
}

std::string TraceRecord::ToTsvLine() const {
  std::ostringstream out;
  out << time_ms << '\t' << node << '\t' << direction << '\t'
      << SchemeName(scheme) << '\t' << host << '\t' << path << '\t' << action;
  return out.str();
}

std::string SerializeTrace(const std::vector<TraceRecord>& trace) {
  std::string out;
  for (const TraceRecord& record : trace) {
    out += record.ToTsvLine();
    out += '\n';
  }
  return out;
}

uint64_t TraceHash(const std::vector<TraceRecord>& trace) {
  uint64_t hash = 1469598103934665603ull;
  for (const TraceRecord& record : trace) {
    hash = Fnv1a(record.ToTsvLine(), hash);
    hash = Fnv1a("\n", hash);
  }
  return hash;
}

Network::Network(EventLoop* loop, LinkProfile link, int64_t timeout_ms)
    : loop_(loop), link_(link), timeout_ms_(timeout_ms) {}

void Network::AddVictim(const std::string& node_id) {
  victims_.insert(node_id);
}

void Network::AddServer(const std::string& host, ServerConfig config) {
  servers_[host] = std::move(config);
}

void Network::BecomeGateway(const std::string& victim_id) {
  if (!victims_.count(victim_id))
    throw std::invalid_argument("unknown victim id: " + victim_id);
  gatewayed_.insert(victim_id);
}

bool Network::IsGatewayFor(const std::string& victim_id) const {
  return gatewayed_.count(victim_id) > 0;
}

bool Network::HttpsReachable(const Origin& origin) const {
  if (origin.scheme != Scheme::kHttps ||
      origin.port != DefaultPort(Scheme::kHttps))
    return false;
  auto it = servers_.find(origin.host);
  return it != servers_.end() && it->second.serves_https;
}

void Network::RecordTrace(const std::string& node, const char* direction,
                          const Url& url, const char* action) {
  trace_.push_back(TraceRecord{loop_->now(), node, direction, url.scheme,
                               url.host, url.path, action});
}

HookDecision Network::ConsultHook(const GatewayHook& hook,
                                  const HttpMessage& message,
                                  const char* direction) {
  MessageView view;
  view.encrypted = message.encrypted;
  view.host = message.url.host;
  view.time = loop_->now();
  view.message = message.encrypted ? nullptr : &message;

  HookDecision decision = hook(view);
  if (message.encrypted &&
      (decision.action != HookDecision::Action::kPass ||
       decision.replacement.has_value())) {
    throw CapabilityViolation(
        std::string("gateway hook attempted to alter encrypted ") + direction +
        " for host " + message.url.host);
  }
  return decision;
}

void Network::Deliver(const std::string& victim_id, HttpMessage response,
                      ResponseCallback callback, uint64_t request_id) {
  auto pending = pending_.find(request_id);
  if (pending == pending_.end())
    throw std::logic_error("delivery for unknown request");
  if (pending->second.settled) {
    if (pending->second.timed_out)
      return;  // response lost the race against the timeout; drop it
    throw std::logic_error("duplicate delivery for request");
  }
  pending->second.settled = true;
  loop_->Cancel(pending->second.timeout_task);
  ++accounting_.responses;
  RecordTrace(victim_id, "response", response.url, "deliver");
  callback(std::move(response));
}

void Network::SendRequest(const std::string& victim_id, HttpMessage request,
                          ResponseCallback callback) {
  if (!victims_.count(victim_id))
    throw std::invalid_argument("unknown victim id: " + victim_id);

  request.kind = HttpMessage::Kind::kRequest;
  request.encrypted = request.url.scheme == Scheme::kHttps;
  const uint64_t request_id = next_request_id_++;
  request.request_id = request_id;
  ++accounting_.requests;

  PendingRequest& pending = pending_[request_id];
  pending.timeout_task = loop_->ScheduleAfter(
      timeout_ms_, [this, request_id, callback] {
        auto it = pending_.find(request_id);
        if (it == pending_.end() || it->second.settled)
          return;
        it->second.settled = true;
        it->second.timed_out = true;
        ++accounting_.timeouts;
        callback(std::nullopt);
      });

  const bool gatewayed = IsGatewayFor(victim_id);
  if (gatewayed && request_hook_) {
    HookDecision decision = ConsultHook(request_hook_, request, "request");
    switch (decision.action) {
      case HookDecision::Action::kPass:
        RecordTrace("gateway", "request", request.url, "pass");
        break;
      case HookDecision::Action::kModify:
        RecordTrace("gateway", "request", request.url, "modify");
        request = std::move(*decision.replacement);
        request.kind = HttpMessage::Kind::kRequest;
        request.encrypted = request.url.scheme == Scheme::kHttps;
        request.request_id = request_id;
        break;
      case HookDecision::Action::kForge: {
        // The gateway answers without contacting the origin server, so only
        // the response leg of the link applies.
        RecordTrace("gateway", "request", request.url, "forge");
        HttpMessage forged = std::move(*decision.replacement);
        forged.kind = HttpMessage::Kind::kResponse;
        forged.encrypted = forged.url.scheme == Scheme::kHttps;
        forged.request_id = request_id;
        loop_->ScheduleAfter(
            link_.response_latency_ms,
            [this, victim_id, forged = std::move(forged), callback,
             request_id]() mutable {
              Deliver(victim_id, std::move(forged), std::move(callback),
                      request_id);
            });
        return;
      }
    }
  }

  auto server = servers_.find(request.url.host);
  const bool reachable =
      server != servers_.end() &&
      (request.url.scheme == Scheme::kHttp ? server->second.serves_http
                                           : server->second.serves_https);
  if (!reachable)
    return;  // no listener: the timeout fires

  loop_->ScheduleAfter(
      link_.request_latency_ms,
      [this, victim_id, request = std::move(request), callback, request_id,
       gatewayed]() mutable {
        RecordTrace("server", "request", request.url, "deliver");
        auto it = servers_.find(request.url.host);
        std::optional<PageSpec> page;
        if (it != servers_.end() && it->second.handler)
          page = it->second.handler(request);
        if (!page)
          return;  // server declined: the timeout fires

        HttpMessage response;
        response.kind = HttpMessage::Kind::kResponse;
        response.url = request.url;
        response.body = std::move(*page);
        response.encrypted = response.url.scheme == Scheme::kHttps;
        response.request_id = request_id;

        if (gatewayed && response_hook_) {
          HookDecision decision =
              ConsultHook(response_hook_, response, "response");
          switch (decision.action) {
            case HookDecision::Action::kPass:
              RecordTrace("gateway", "response", response.url, "pass");
              break;
            case HookDecision::Action::kModify:
            case HookDecision::Action::kForge:
              // A hook answering a response can only rewrite it in place.
              RecordTrace("gateway", "response", response.url, "modify");
              response = std::move(*decision.replacement);
              response.kind = HttpMessage::Kind::kResponse;
              response.encrypted = response.url.scheme == Scheme::kHttps;
              response.request_id = request_id;
              break;
          }
        }

        loop_->ScheduleAfter(
            link_.response_latency_ms,
            [this, victim_id, response = std::move(response), callback,
             request_id]() mutable {
              Deliver(victim_id, std::move(response), std::move(callback),
                      request_id);
            });
      });
}

}  // namespace lupin
