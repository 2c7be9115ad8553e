// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#ifndef LUPIN_BROWSER_H_
#define LUPIN_BROWSER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lupin/autofill.h"
#include "lupin/event_loop.h"
#include "lupin/net.h"
#include "lupin/url.h"
#include "lupin/web.h"

namespace lupin {

class Browser;
class Tab;

// One form instance inside a loaded document, with its current values.
struct FormState {
  LoginForm form;
  std::string username_value;
  std::string password_value;
  // When the values became readable by scripts; -1 while untouched. A fill
  // scheduled with some latency is observable only by reads that happen
  // strictly later.
  int64_t visible_at = -1;
  std::optional<FillDecision> decision;

  bool ReadableAt(int64_t time_ms) const {
    return visible_at >= 0 && visible_at < time_ms;
  }
};

// A node in a tab's frame tree. Nodes stay at a stable address for their
// lifetime; a renavigation of an ancestor destroys the whole subtree.
struct FrameNode {
  Tab* tab = nullptr;
  FrameNode* parent = nullptr;  // null for the root frame
  std::string path;             // root is the tab id; children append ".N"
  std::optional<PageSpec> page;
  std::vector<FormState> forms;
  std::vector<std::unique_ptr<FrameNode>> children;
  // Bumped on every navigation so tasks belonging to a replaced document
  // can tell they are stale.
  uint64_t generation = 0;
  bool loading = false;

  bool is_top_level() const { return parent == nullptr; }
};

// The user-visible loading indicator: any frame navigation spins it. What
// matters for stealth is whether the tab was focused at that moment.
struct RefreshEvent {
  int64_t time_ms = 0;
  std::string tab_id;
  std::string frame_path;
  bool tab_focused = false;

  bool operator==(const RefreshEvent&) const = default;
};

class Tab {
 public:
  Tab(Browser* browser, std::string id);

  Tab(const Tab&) = delete;
  Tab& operator=(const Tab&) = delete;

  const std::string& id() const { return id_; }
  bool focused() const { return focused_; }
  FrameNode& root() { return root_; }
  const FrameNode& root() const { return root_; }

 private:
  friend class Browser;

  Browser* browser_;
  std::string id_;
  bool focused_ = false;
  FrameNode root_;
};

// One simulated browser on one victim machine: a frame-tree engine wired to
// the network, with the password manager's policy engine attached to every
// document install. Everything runs on the shared event loop.
class Browser {
 public:
  struct Config {
    AutofillPolicy policy;
    // Delay between a document install and its form values being set.
    int64_t fill_latency_ms = 10;
    // The gesture the simulated user supplies on every form, for policies
    // that require one. The crawling victim supplies none.
    UserAction user_action = UserAction::kNone;
  };

  using LoadObserver = std::function<void(FrameNode&, bool ok)>;
  // Offered what a read script observed; returns true to consume the
  // records. Unconsumed records go to the script's collector URL.
  using FormReadHandler =
      std::function<bool(FrameNode&, const std::vector<ExfilRecord>&)>;
  using FocusObserver = std::function<void(Tab*, bool focused)>;
  // Runs scripts the engine does not interpret natively.
  using ScriptDelegate =
      std::function<void(FrameNode&, const ScriptBehavior&)>;

  Browser(EventLoop* loop, Network* net, std::string victim_id,
          Config config);

  Tab* CreateTab(const std::string& id);
  // Gives |tab| the focus; null means no tab is focused (user away).
  void FocusTab(Tab* tab);
  Tab* focused_tab() const { return focused_tab_; }

  // Starts fetching |url| into |frame|, replacing its document on arrival.
  // Records a RefreshEvent immediately.
  void LoadFrame(FrameNode& frame, const Url& url);
  // Installs a document that arrived embedded in its parent's response.
  // No request is made and no RefreshEvent is recorded.
  void InstallInline(FrameNode& frame, PageSpec page);
  // Adds an empty subframe to |parent| and returns it.
  FrameNode& CreateChildFrame(FrameNode& parent);
  // Executes one scripted behavior in |frame|'s document.
  void RunScript(FrameNode& frame, const ScriptBehavior& script);

  // The user types values and submits; the password manager may record
  // them. Returns whether a credential was saved.
  bool SubmitForm(FrameNode& frame, size_t form_index,
                  std::string_view username, std::string_view password);

  void set_load_observer(LoadObserver observer) {
    load_observer_ = std::move(observer);
  }
  void set_form_read_handler(FormReadHandler handler) {
    form_read_handler_ = std::move(handler);
  }
  void set_focus_observer(FocusObserver observer) {
    focus_observer_ = std::move(observer);
  }
  void set_navigate_children_delegate(ScriptDelegate delegate) {
    navigate_children_delegate_ = std::move(delegate);
  }

  const CredentialStore& store() const { return store_; }
  // Hands the manager its stored credentials. Under the upgrade defense
  // the entries are replayed through the save path first, so plain-HTTP
  // entries re-bind to an HTTPS twin that is reachable right now.
  void set_store(CredentialStore store);
  const AutofillPolicy& policy() const { return config_.policy; }
  const Config& config() const { return config_; }
  const std::string& victim_id() const { return victim_id_; }
  const std::vector<RefreshEvent>& refresh_events() const {
    return refresh_events_;
  }

 private:
  void InstallPage(FrameNode& frame, PageSpec page);
  void DecideFills(FrameNode& frame);
  void DestroyChildren(FrameNode& frame);
  void ForgetSubtree(FrameNode& frame);
  bool Alive(const FrameNode* frame) const { return live_.count(frame) > 0; }
  FormContext ContextFor(const FrameNode& frame, const LoginForm& form) const;
  void SendExfil(const Url& collector, std::vector<ExfilRecord> records);

  EventLoop* loop_;
  Network* net_;
  std::string victim_id_;
  Config config_;
  CredentialStore store_;
  std::vector<std::unique_ptr<Tab>> tabs_;
  Tab* focused_tab_ = nullptr;
  std::set<const FrameNode*> live_;
  std::vector<RefreshEvent> refresh_events_;
  LoadObserver load_observer_;
  FormReadHandler form_read_handler_;
  FocusObserver focus_observer_;
  ScriptDelegate navigate_children_delegate_;
};

}  // namespace lupin

#endif  // LUPIN_BROWSER_H_
