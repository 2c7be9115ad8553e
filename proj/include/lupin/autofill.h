// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#ifndef LUPIN_AUTOFILL_H_
#define LUPIN_AUTOFILL_H_

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lupin/url.h"
#include "lupin/web.h"

namespace lupin {

enum class UrlRule { kOriginMatch, kOriginAndPathMatch };

enum class UserActionRequirement {
  kNotRequired,
  kFirstCharacterOfUsername,
  kExplicitTrigger,
};

enum class DomRule {
  kDestinationOriginMatch,
  kFieldNamesMatch,
  kTopLevelFrameOnly,
};

enum class Defense {
  kNoFillHttpsDestination,
  kNoFillOnHttpPage,
  kHstsUpgrade,
};

// Small bitmask set over a dense enum.
template <typename E>
class FlagSet {
 public:
  constexpr FlagSet() = default;
  constexpr FlagSet(std::initializer_list<E> flags) {
    for (E f : flags)
      Insert(f);
  }

  constexpr void Insert(E flag) { bits_ |= Bit(flag); }
  constexpr void Remove(E flag) { bits_ &= ~Bit(flag); }
  constexpr bool Contains(E flag) const { return bits_ & Bit(flag); }
  constexpr bool Empty() const { return bits_ == 0; }
  constexpr bool operator==(const FlagSet&) const = default;

 private:
  static constexpr uint32_t Bit(E flag) {
    return 1u << static_cast<uint32_t>(flag);
  }
  uint32_t bits_ = 0;
};

using DomRuleSet = FlagSet<DomRule>;
using DefenseSet = FlagSet<Defense>;

// One browser's fill rules plus optional defense variants.
struct AutofillPolicy {
  UrlRule url_rule = UrlRule::kOriginMatch;
  UserActionRequirement user_action = UserActionRequirement::kNotRequired;
  DomRuleSet dom_rules;
  bool respect_autocomplete_off = true;
  DefenseSet defenses;

  bool operator==(const AutofillPolicy&) const = default;
};

enum class BrowserPreset { kIe, kOpera, kSafari, kFirefox, kChrome };

inline constexpr BrowserPreset kAllPresets[] = {
    BrowserPreset::kIe, BrowserPreset::kOpera, BrowserPreset::kSafari,
    BrowserPreset::kFirefox, BrowserPreset::kChrome};

AutofillPolicy PolicyForPreset(BrowserPreset preset);
std::string_view PresetName(BrowserPreset preset);
std::optional<BrowserPreset> PresetFromName(std::string_view name);

// Ordered credential list; insertion order is save order. At most one entry
// per (source_origin, username) pair, a re-save replaces in place.
struct CredentialStore {
  std::vector<Credential> entries;

  bool operator==(const CredentialStore&) const = default;
};

enum class UserAction { kNone, kTypedFirstCharacter, kExplicitTrigger };

// The document-side facts the policy engine decides on.
struct FormContext {
  Url page_url;  // the source address: where the form is embedded
  LoginForm form;
  bool is_top_level_frame = true;
  UserAction user_action = UserAction::kNone;
};

enum class NoFillReason {
  kNoCredential,
  kUrlMismatch,
  kUserActionMissing,
  kDestinationMismatch,
  kFieldNameMismatch,
  kNotTopLevel,
  kAutocompleteOff,
  kDefenseHttpsDestination,
  kDefenseHttpPage,
  kDefenseUpgradeRedirect,
};

std::string_view NoFillReasonName(NoFillReason reason);

struct FillDecision {
  std::optional<Credential> credential;      // set iff filled
  std::optional<NoFillReason> reason;        // set iff not filled
  std::optional<Url> upgrade_redirect;       // set iff kDefenseUpgradeRedirect

  bool filled() const { return credential.has_value(); }

  static FillDecision Fill(Credential c);
  static FillDecision NoFill(NoFillReason reason);
  static FillDecision UpgradeRedirect(Url https_twin);
};

// Decides whether |ctx|'s form gets auto-filled from |store| under |policy|.
// Rules run in a fixed order and the first failing rule is reported:
// autocomplete, URL rule, user action, top-level-frame, destination origin,
// field names, then defenses. Ties between matching credentials go to the
// most recently saved one (latest saved_at, then latest store position).
FillDecision DecideAutofill(const AutofillPolicy& policy,
                            const CredentialStore& store,
                            const FormContext& ctx);

// Answers whether an origin's HTTPS twin is reachable, for upgrade-on-save.
using HttpsProbe = std::function<bool(const Origin&)>;

struct SaveResult {
  CredentialStore store;
  bool saved = false;
};

// Records a submitted credential. With the upgrade defense active and the
// page served over plain HTTP, a reachable HTTPS twin becomes the stored
// source origin. Honoring autocomplete=off turns the save into a no-op.
SaveResult SaveCredential(CredentialStore store, const FormContext& ctx,
                          std::string_view username, std::string_view password,
                          const HttpsProbe& https_probe,
                          const AutofillPolicy& policy, int64_t saved_at);

// Replays every stored credential through SaveCredential under |policy|,
// preserving order and timestamps. With the upgrade defense this rebinds
// plain-HTTP entries whose HTTPS twin answers |probe|; otherwise the store
// comes back unchanged.
CredentialStore MigrateStore(const CredentialStore& store,
                             const AutofillPolicy& policy,
                             const HttpsProbe& probe);

// Line-oriented store exchange format: one record per line, tab-separated
// (source_origin, source_path, username, password, destination_origin,
// username_field, password_field, saved_at). Fields must not contain tabs
// or newlines.
std::string SerializeStore(const CredentialStore& store);
std::optional<CredentialStore> ParseStore(std::string_view text,
                                          std::string* error = nullptr);

}  // namespace lupin

#endif  // LUPIN_AUTOFILL_H_
