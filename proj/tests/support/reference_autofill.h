// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#ifndef LUPIN_TESTS_SUPPORT_REFERENCE_AUTOFILL_H_
#define LUPIN_TESTS_SUPPORT_REFERENCE_AUTOFILL_H_

#include <optional>
#include <vector>

#include "lupin/autofill.h"
#include "lupin/url.h"
#include "lupin/web.h"

namespace lupin::testing {

// Test-only brute-force evaluation of the fill rules: every rule is checked
// for every stored credential as an independent predicate, with no early
// exits and no code shared with the production decision path. Only the
// fill-versus-no-fill outcome and the chosen credential are meaningful.
struct ReferenceOutcome {
  std::optional<Credential> credential;  // set iff the form would be filled

  bool filled() const { return credential.has_value(); }
};

inline ReferenceOutcome ReferenceDecide(const AutofillPolicy& policy,
                                        const CredentialStore& store,
                                        const FormContext& ctx) {
  const bool autocomplete_ok =
      !(policy.respect_autocomplete_off && ctx.form.autocomplete_off);

  bool action_ok = true;
  if (policy.user_action == UserActionRequirement::kFirstCharacterOfUsername)
    action_ok = ctx.user_action == UserAction::kTypedFirstCharacter;
  if (policy.user_action == UserActionRequirement::kExplicitTrigger)
    action_ok = ctx.user_action == UserAction::kExplicitTrigger;

  const bool top_ok =
      !policy.dom_rules.Contains(DomRule::kTopLevelFrameOnly) ||
      ctx.is_top_level_frame;

  const bool https_dest_block =
      policy.defenses.Contains(Defense::kNoFillHttpsDestination) &&
      ctx.form.action.scheme == Scheme::kHttps;
  const bool http_page_block =
      policy.defenses.Contains(Defense::kNoFillOnHttpPage) &&
      ctx.page_url.scheme == Scheme::kHttp;

  std::vector<const Credential*> eligible;
  for (const Credential& c : store.entries) {
    bool url_ok = c.source_origin.scheme == ctx.page_url.scheme &&
                  c.source_origin.host == ctx.page_url.host &&
                  c.source_origin.port == ctx.page_url.port;
    if (policy.url_rule == UrlRule::kOriginAndPathMatch)
      url_ok = url_ok && c.source_path == ctx.page_url.path;

    bool dest_ok = true;
    if (policy.dom_rules.Contains(DomRule::kDestinationOriginMatch)) {
      dest_ok = c.saved_destination_origin.scheme == ctx.form.action.scheme &&
                c.saved_destination_origin.host == ctx.form.action.host &&
                c.saved_destination_origin.port == ctx.form.action.port;
    }

    bool names_ok = true;
    if (policy.dom_rules.Contains(DomRule::kFieldNamesMatch)) {
      names_ok = c.saved_username_field == ctx.form.username_field_name &&
                 c.saved_password_field == ctx.form.password_field_name;
    }

    if (autocomplete_ok && url_ok && action_ok && top_ok && dest_ok &&
        names_ok && !https_dest_block && !http_page_block) {
      eligible.push_back(&c);
    }
  }

  ReferenceOutcome out;
  for (const Credential* c : eligible) {
    if (!out.credential || c->saved_at >= out.credential->saved_at)
      out.credential = *c;
  }
  return out;
}

}  // namespace lupin::testing

#endif  // LUPIN_TESTS_SUPPORT_REFERENCE_AUTOFILL_H_
