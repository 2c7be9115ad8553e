// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#include "lupin/autofill.h"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace lupin {

namespace {

void SetError(std::string* error, std::string message) {
  if (error)
    *error = std::move(message);
}

bool UserActionSatisfies(UserActionRequirement required, UserAction provided) {
  switch (required) {
    case UserActionRequirement::kNotRequired:
      return true;
    case UserActionRequirement::kFirstCharacterOfUsername:
      return provided == UserAction::kTypedFirstCharacter;
    case UserActionRequirement::kExplicitTrigger:
      return provided == UserAction::kExplicitTrigger;
  }
  return false;
}

bool SourceMatches(const Credential& c, const Origin& wanted,
                   const Url& page_url, UrlRule rule) {
  if (c.source_origin != wanted)
    return false;
  if (rule == UrlRule::kOriginAndPathMatch && c.source_path != page_url.path)
    return false;
  return true;
}

// Latest saved_at wins; among equal timestamps the most recently inserted
// entry wins.
const Credential* PickLatest(const std::vector<const Credential*>& matches) {
  const Credential* best = nullptr;
  for (const Credential* c : matches) {
    if (!best || c->saved_at >= best->saved_at)
      best = c;
  }
  return best;
}

}  // namespace

AutofillPolicy PolicyForPreset(BrowserPreset preset) {
  AutofillPolicy policy;
  switch (preset) {
    case BrowserPreset::kIe:
      policy.url_rule = UrlRule::kOriginAndPathMatch;
      policy.user_action = UserActionRequirement::kFirstCharacterOfUsername;
      break;
    case BrowserPreset::kOpera:
      policy.user_action = UserActionRequirement::kExplicitTrigger;
      policy.dom_rules = {DomRule::kDestinationOriginMatch,
                          DomRule::kFieldNamesMatch};
      break;
    case BrowserPreset::kSafari:
      policy.dom_rules = {DomRule::kTopLevelFrameOnly};
      break;
    case BrowserPreset::kFirefox:
    case BrowserPreset::kChrome:
      policy.dom_rules = {DomRule::kDestinationOriginMatch};
      break;
  }
  return policy;
}

std::string_view PresetName(BrowserPreset preset) {
  switch (preset) {
    case BrowserPreset::kIe:
      return "ie";
    case BrowserPreset::kOpera:
      return "opera";
    case BrowserPreset::kSafari:
      return "safari";
    case BrowserPreset::kFirefox:
      return "firefox";
    case BrowserPreset::kChrome:
      return "chrome";
  }
  return "?";
}

std::optional<BrowserPreset> PresetFromName(std::string_view name) {
  for (BrowserPreset preset : kAllPresets) {
    if (name == PresetName(preset))
      return preset;
  }
  return std::nullopt;
}

std::string_view NoFillReasonName(NoFillReason reason) {
  switch (reason) {
    case NoFillReason::kNoCredential:
      return "no_credential";
    case NoFillReason::kUrlMismatch:
      return "url_mismatch";
    case NoFillReason::kUserActionMissing:
      return "user_action_missing";
    case NoFillReason::kDestinationMismatch:
      return "destination_mismatch";
    case NoFillReason::kFieldNameMismatch:
      return "field_name_mismatch";
    case NoFillReason::kNotTopLevel:
      return "not_top_level";
    case NoFillReason::kAutocompleteOff:
      return "autocomplete_off";
    case NoFillReason::kDefenseHttpsDestination:
      return "defense_https_destination";
    case NoFillReason::kDefenseHttpPage:
      return "defense_http_page";
    case NoFillReason::kDefenseUpgradeRedirect:
      return "defense_upgrade_redirect";
  }
  return "?";
}

FillDecision FillDecision::Fill(Credential c) {
  FillDecision d;
  d.credential = std::move(c);
  return d;
}

FillDecision FillDecision::NoFill(NoFillReason reason) {
  FillDecision d;
  d.reason = reason;
  return d;
}

FillDecision FillDecision::UpgradeRedirect(Url https_twin) {
  FillDecision d;
  d.reason = NoFillReason::kDefenseUpgradeRedirect;
  d.upgrade_redirect = std::move(https_twin);
  return d;
}

FillDecision DecideAutofill(const AutofillPolicy& policy,
                            const CredentialStore& store,
                            const FormContext& ctx) {
  if (policy.respect_autocomplete_off && ctx.form.autocomplete_off)
    return FillDecision::NoFill(NoFillReason::kAutocompleteOff);
  if (store.entries.empty())
    return FillDecision::NoFill(NoFillReason::kNoCredential);

  // URL rule. With the upgrade defense on, credentials associated with the
  // page's HTTPS twin stay in play as redirect candidates.
  const Origin page_origin = OriginOf(ctx.page_url);
  std::vector<const Credential*> direct;
  std::vector<const Credential*> upgrade;
  const bool upgrade_active =
      policy.defenses.Contains(Defense::kHstsUpgrade) &&
      ctx.page_url.scheme == Scheme::kHttp;
  const Origin twin_origin = HttpsTwin(page_origin);
  for (const Credential& c : store.entries) {
    if (SourceMatches(c, page_origin, ctx.page_url, policy.url_rule))
      direct.push_back(&c);
    else if (upgrade_active &&
             SourceMatches(c, twin_origin, ctx.page_url, policy.url_rule))
      upgrade.push_back(&c);
  }
  if (direct.empty() && upgrade.empty())
    return FillDecision::NoFill(NoFillReason::kUrlMismatch);

  if (!UserActionSatisfies(policy.user_action, ctx.user_action))
    return FillDecision::NoFill(NoFillReason::kUserActionMissing);

  if (policy.dom_rules.Contains(DomRule::kTopLevelFrameOnly) &&
      !ctx.is_top_level_frame)
    return FillDecision::NoFill(NoFillReason::kNotTopLevel);

  if (policy.dom_rules.Contains(DomRule::kDestinationOriginMatch)) {
    const Origin action_origin = OriginOf(ctx.form.action);
    auto mismatched = [&](const Credential* c) {
      return c->saved_destination_origin != action_origin;
    };
    std::erase_if(direct, mismatched);
    std::erase_if(upgrade, mismatched);
    if (direct.empty() && upgrade.empty())
      return FillDecision::NoFill(NoFillReason::kDestinationMismatch);
  }

  if (policy.dom_rules.Contains(DomRule::kFieldNamesMatch)) {
    auto mismatched = [&](const Credential* c) {
      return c->saved_username_field != ctx.form.username_field_name ||
             c->saved_password_field != ctx.form.password_field_name;
    };
    std::erase_if(direct, mismatched);
    std::erase_if(upgrade, mismatched);
    if (direct.empty() && upgrade.empty())
      return FillDecision::NoFill(NoFillReason::kFieldNameMismatch);
  }

  if (policy.defenses.Contains(Defense::kNoFillHttpsDestination) &&
      ctx.form.action.scheme == Scheme::kHttps)
    return FillDecision::NoFill(NoFillReason::kDefenseHttpsDestination);
  if (policy.defenses.Contains(Defense::kNoFillOnHttpPage) &&
      ctx.page_url.scheme == Scheme::kHttp)
    return FillDecision::NoFill(NoFillReason::kDefenseHttpPage);

  if (!direct.empty())
    return FillDecision::Fill(*PickLatest(direct));
  return FillDecision::UpgradeRedirect(HttpsTwin(ctx.page_url));
}

SaveResult SaveCredential(CredentialStore store, const FormContext& ctx,
                          std::string_view username, std::string_view password,
                          const HttpsProbe& https_probe,
                          const AutofillPolicy& policy, int64_t saved_at) {
  if (policy.respect_autocomplete_off && ctx.form.autocomplete_off)
    return SaveResult{std::move(store), false};

  Credential entry;
  entry.source_origin = OriginOf(ctx.page_url);
  entry.source_path = ctx.page_url.path;
  entry.username.assign(username);
  entry.password.assign(password);
  entry.saved_destination_origin = OriginOf(ctx.form.action);
  entry.saved_username_field = ctx.form.username_field_name;
  entry.saved_password_field = ctx.form.password_field_name;
  entry.saved_at = saved_at;

  if (policy.defenses.Contains(Defense::kHstsUpgrade) &&
      ctx.page_url.scheme == Scheme::kHttp) {
    Origin twin = HttpsTwin(entry.source_origin);
    if (https_probe && https_probe(twin))
      entry.source_origin = twin;
  }

  for (Credential& existing : store.entries) {
    if (existing.source_origin == entry.source_origin &&
        existing.username == entry.username) {
      existing = std::move(entry);
      return SaveResult{std::move(store), true};
    }
  }
  store.entries.push_back(std::move(entry));
  return SaveResult{std::move(store), true};
}

CredentialStore MigrateStore(const CredentialStore& store,
                             const AutofillPolicy& policy,
                             const HttpsProbe& probe) {
  CredentialStore out;
  for (const Credential& c : store.entries) {
    FormContext ctx;
    ctx.page_url = Url{c.source_origin.scheme, c.source_origin.host,
                       c.source_origin.port, c.source_path, ""};
    ctx.form.action =
        Url{c.saved_destination_origin.scheme, c.saved_destination_origin.host,
            c.saved_destination_origin.port, "/", ""};
    ctx.form.username_field_name = c.saved_username_field;
    ctx.form.password_field_name = c.saved_password_field;
    SaveResult result = SaveCredential(std::move(out), ctx, c.username,
                                       c.password, probe, policy, c.saved_at);
    out = std::move(result.store);
  }
  return out;
}

std::string SerializeStore(const CredentialStore& store) {
  std::ostringstream out;
  for (const Credential& c : store.entries) {
    out << c.source_origin.ToString() << '\t' << c.source_path << '\t'
        << c.username << '\t' << c.password << '\t'
        << c.saved_destination_origin.ToString() << '\t'
        << c.saved_username_field << '\t' << c.saved_password_field << '\t'
        << c.saved_at << '\n';
  }
  return out.str();
}

std::optional<CredentialStore> ParseStore(std::string_view text,
                                          std::string* error) {
  CredentialStore store;
  size_t line_number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos
                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_number;
    if (line.empty() || line[0] == '#')
      continue;

    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      fields.push_back(line.substr(
          start, tab == std::string_view::npos ? std::string_view::npos
                                               : tab - start));
      if (tab == std::string_view::npos)
        break;
      start = tab + 1;
    }
    if (fields.size() != 8) {
      SetError(error, "line " + std::to_string(line_number) +
                          ": expected 8 tab-separated fields, got " +
                          std::to_string(fields.size()));
      return std::nullopt;
    }

    Credential c;
    std::string origin_error;
    std::optional<Origin> source = ParseOrigin(fields[0], &origin_error);
    if (!source) {
      SetError(error, "line " + std::to_string(line_number) +
                          ": source_origin: " + origin_error);
      return std::nullopt;
    }
    std::optional<Origin> destination = ParseOrigin(fields[4], &origin_error);
    if (!destination) {
      SetError(error, "line " + std::to_string(line_number) +
                          ": destination_origin: " + origin_error);
      return std::nullopt;
    }
    c.source_origin = *source;
    c.source_path.assign(fields[1]);
    c.username.assign(fields[2]);
    c.password.assign(fields[3]);
    c.saved_destination_origin = *destination;
    c.saved_username_field.assign(fields[5]);
    c.saved_password_field.assign(fields[6]);
    auto [ptr, ec] = std::from_chars(fields[7].data(),
                                     fields[7].data() + fields[7].size(),
                                     c.saved_at);
    if (ec != std::errc() || ptr != fields[7].data() + fields[7].size()) {
      SetError(error, "line " + std::to_string(line_number) +
                          ": saved_at: not an integer");
      return std::nullopt;
    }
    if (c.source_path.empty() || c.source_path[0] != '/') {
      SetError(error, "line " + std::to_string(line_number) +
                          ": source_path: must begin with '/'");
      return std::nullopt;
    }
    if (c.password.empty()) {
      SetError(error, "line " + std::to_string(line_number) +
                          ": password: must be nonempty");
      return std::nullopt;
    }
    store.entries.push_back(std::move(c));
  }
  return store;
}

}  // namespace lupin
