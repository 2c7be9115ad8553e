// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#ifndef LUPIN_WEB_H_
#define LUPIN_WEB_H_

#include <cstdint>
#include <string>
#include <vector>

#include "lupin/url.h"

namespace lupin {

// A POST login form. Field names are nonempty; there is exactly one
// password field per form.
struct LoginForm {
  Url action;
  std::string username_field_name;
  std::string password_field_name;
  bool autocomplete_off = false;

  bool operator==(const LoginForm&) const = default;
};

// Declarative in-page behavior. Scripts may only touch forms in their own
// frame's document.
struct ScriptBehavior {
  enum class Kind { kNone, kReadFormsAndExfiltrate, kNavigateChildren };

  Kind kind = Kind::kNone;
  int64_t poll_delay_ms = 100;
  Url collector;                  // kReadFormsAndExfiltrate only
  std::vector<Url> next_targets;  // kNavigateChildren only

  bool operator==(const ScriptBehavior&) const = default;
};

// A document: its forms, scripted behaviors, and child frames. Children
// listed in |child_frames| are fetched over the network; |inline_children|
// arrive with the document itself and need no request (this is how injected
// payload frames ride along on a tampered response).
struct PageSpec {
  enum class Visual { kNormal, kHidden1px, kTransparent };

  Url url;
  std::vector<LoginForm> forms;
  std::vector<ScriptBehavior> scripts;
  std::vector<Url> child_frames;
  std::vector<PageSpec> inline_children;
  Visual visual = Visual::kNormal;

  bool operator==(const PageSpec&) const = default;
};

// A stored (origin, username, password) record. |source_path| is kept for
// the origin-and-path URL rule.
struct Credential {
  Origin source_origin;
  std::string source_path = "/";
  std::string username;
  std::string password;
  Origin saved_destination_origin;
  std::string saved_username_field;
  std::string saved_password_field;
  int64_t saved_at = 0;

  bool operator==(const Credential&) const = default;
};

}  // namespace lupin

#endif  // LUPIN_WEB_H_
