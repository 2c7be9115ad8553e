// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#include "lupin/browser.h"

#include <utility>

namespace lupin {

Tab::Tab(Browser* browser, std::string id)
    : browser_(browser), id_(std::move(id)) {
  root_.tab = this;
  root_.path = id_;
}

Browser::Browser(EventLoop* loop, Network* net, std::string victim_id,
                 Config config)
    : loop_(loop),
      net_(net),
      victim_id_(std::move(victim_id)),
      config_(std::move(config)) {}

void Browser::set_store(CredentialStore store) {
  if (config_.policy.defenses.Contains(Defense::kHstsUpgrade)) {
    store = MigrateStore(store, config_.policy, [this](const Origin& origin) {
      return net_->HttpsReachable(origin);
    });
  }
  store_ = std::move(store);
}

Tab* Browser::CreateTab(const std::string& id) {
  tabs_.push_back(std::make_unique<Tab>(this, id));
  Tab* tab = tabs_.back().get();
  live_.insert(&tab->root_);
  return tab;
}

void Browser::FocusTab(Tab* tab) {
  if (focused_tab_ == tab)
    return;
  Tab* previous = focused_tab_;
  focused_tab_ = tab;
  if (previous) {
    previous->focused_ = false;
    if (focus_observer_)
      focus_observer_(previous, false);
  }
  if (tab) {
    tab->focused_ = true;
    if (focus_observer_)
      focus_observer_(tab, true);
  }
}

FrameNode& Browser::CreateChildFrame(FrameNode& parent) {
  auto child = std::make_unique<FrameNode>();
  child->tab = parent.tab;
  child->parent = &parent;
  child->path = parent.path + "." + std::to_string(parent.children.size());
  parent.children.push_back(std::move(child));
  FrameNode* raw = parent.children.back().get();
  live_.insert(raw);
  return *raw;
}

void Browser::ForgetSubtree(FrameNode& frame) {
  for (auto& child : frame.children) {
    ForgetSubtree(*child);
    live_.erase(child.get());
  }
}

void Browser::DestroyChildren(FrameNode& frame) {
  ForgetSubtree(frame);
  frame.children.clear();
}

void Browser::LoadFrame(FrameNode& frame, const Url& url) {
  ++frame.generation;
  frame.loading = true;
  refresh_events_.push_back(RefreshEvent{loop_->now(), frame.tab->id(),
                                         frame.path, frame.tab->focused()});

  HttpMessage request;
  request.kind = HttpMessage::Kind::kRequest;
  request.url = url;

  FrameNode* target = &frame;
  const uint64_t generation = frame.generation;
  net_->SendRequest(
      victim_id_, std::move(request),
      [this, target, generation](std::optional<HttpMessage> response) {
        if (!Alive(target) || target->generation != generation)
          return;  // the document this fetch was for is gone
        target->loading = false;
        if (!response || !std::holds_alternative<PageSpec>(response->body)) {
          if (load_observer_)
            load_observer_(*target, false);
          return;
        }
        InstallPage(*target, std::get<PageSpec>(std::move(response->body)));
        if (load_observer_)
          load_observer_(*target, true);
      });
}

void Browser::InstallInline(FrameNode& frame, PageSpec page) {
  ++frame.generation;
  frame.loading = false;
  InstallPage(frame, std::move(page));
}

FormContext Browser::ContextFor(const FrameNode& frame,
                                const LoginForm& form) const {
  FormContext ctx;
  ctx.page_url = frame.page->url;
  ctx.form = form;
  ctx.is_top_level_frame = frame.is_top_level();
  ctx.user_action = config_.user_action;
  return ctx;
}

void Browser::InstallPage(FrameNode& frame, PageSpec page) {
  DestroyChildren(frame);
  frame.page = std::move(page);
  frame.forms.clear();
  for (const LoginForm& form : frame.page->forms)
    frame.forms.push_back(FormState{form, "", "", -1, std::nullopt});

  DecideFills(frame);
  for (const ScriptBehavior& script : frame.page->scripts)
    RunScript(frame, script);
  for (const Url& child_url : frame.page->child_frames)
    LoadFrame(CreateChildFrame(frame), child_url);
  for (const PageSpec& inline_page : frame.page->inline_children)
    InstallInline(CreateChildFrame(frame), inline_page);
}

void Browser::DecideFills(FrameNode& frame) {
  FrameNode* target = &frame;
  const uint64_t generation = frame.generation;
  for (size_t i = 0; i < frame.forms.size(); ++i) {
    FormState& state = frame.forms[i];
    FillDecision decision =
        DecideAutofill(config_.policy, store_, ContextFor(frame, state.form));
    state.decision = decision;

    if (decision.filled()) {
      const Credential credential = *decision.credential;
      loop_->ScheduleAfter(
          config_.fill_latency_ms, [this, target, generation, i, credential] {
            if (!Alive(target) || target->generation != generation)
              return;
            FormState& form = target->forms[i];
            form.username_value = credential.username;
            form.password_value = credential.password;
            form.visible_at = loop_->now();
          });
    } else if (decision.upgrade_redirect) {
      // The manager steers the frame to the secure twin instead of filling.
      const Url redirect = *decision.upgrade_redirect;
      loop_->ScheduleAfter(0, [this, target, generation, redirect] {
        if (!Alive(target) || target->generation != generation)
          return;
        LoadFrame(*target, redirect);
      });
      return;  // the document is being replaced; skip remaining forms
    }
  }
}

void Browser::RunScript(FrameNode& frame, const ScriptBehavior& script) {
  switch (script.kind) {
    case ScriptBehavior::Kind::kNone:
      return;
    case ScriptBehavior::Kind::kReadFormsAndExfiltrate: {
      FrameNode* target = &frame;
      const uint64_t generation = frame.generation;
      const Url collector = script.collector;
      loop_->ScheduleAfter(
          script.poll_delay_ms, [this, target, generation, collector] {
            if (!Alive(target) || target->generation != generation)
              return;
            std::vector<ExfilRecord> records;
            for (const FormState& form : target->forms) {
              if (!form.ReadableAt(loop_->now()) ||
                  form.password_value.empty())
                continue;
              records.push_back(ExfilRecord{OriginOf(target->page->url),
                                            form.username_value,
                                            form.password_value,
                                            loop_->now()});
            }
            if (form_read_handler_ && form_read_handler_(*target, records))
              return;
            if (!records.empty())
              SendExfil(collector, std::move(records));
          });
      return;
    }
    case ScriptBehavior::Kind::kNavigateChildren:
      // Crawling logic lives with whoever planted the script; without a
      // delegate the behavior is inert.
      if (navigate_children_delegate_)
        navigate_children_delegate_(frame, script);
      return;
  }
}

void Browser::SendExfil(const Url& collector,
                        std::vector<ExfilRecord> records) {
  HttpMessage message;
  message.kind = HttpMessage::Kind::kRequest;
  message.url = collector;
  message.body = ExfilBundle{std::move(records)};
  net_->SendRequest(victim_id_, std::move(message),
                    [](std::optional<HttpMessage>) {});
}

bool Browser::SubmitForm(FrameNode& frame, size_t form_index,
                         std::string_view username,
                         std::string_view password) {
  FormState& state = frame.forms.at(form_index);
  state.username_value = std::string(username);
  state.password_value = std::string(password);
  state.visible_at = loop_->now();

  SaveResult result = SaveCredential(
      std::move(store_), ContextFor(frame, state.form), username, password,
      [this](const Origin& origin) { return net_->HttpsReachable(origin); },
      config_.policy, loop_->now());
  store_ = std::move(result.store);
  return result.saved;
}

}  // namespace lupin
