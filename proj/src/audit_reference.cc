// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

// A second, structurally different route to the same verdict: one forward
// pass over the bytes with explicit tag states, no shared scanning code
// with the tag-level extractor. Used to cross-check the extractor and as
// the serial baseline in benchmarks. Keep the two implementations from
// sharing helpers; agreement between them is only evidence if they stay
// independent.

#include <optional>
#include <string>
#include <string_view>

#include "lupin/audit.h"
#include "lupin/url.h"

namespace lupin {
namespace {

bool Space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

char Lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string LowerString(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) out.push_back(Lower(c));
  return out;
}

bool EqualsCi(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (Lower(a[i]) != Lower(b[i])) return false;
  }
  return true;
}

std::string_view Strip(std::string_view text) {
  while (!text.empty() && Space(text.front())) text.remove_prefix(1);
  while (!text.empty() && Space(text.back())) text.remove_suffix(1);
  return text;
}

// Comments become runs of spaces so offsets and tag adjacency are
// untouched.
std::string EraseComments(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  size_t i = 0;
  while (i < in.size()) {
    if (in.compare(i, 4, "<!--") == 0) {
      size_t end = in.find("-->", i + 4);
      size_t stop = end == std::string_view::npos ? in.size() : end + 3;
      out.append(stop - i, ' ');
      i = stop;
    } else {
      out.push_back(in[i++]);
    }
  }
  return out;
}

size_t FindCi(std::string_view hay, std::string_view needle_lower,
              size_t from) {
  if (needle_lower.empty() || hay.size() < needle_lower.size()) {
    return std::string_view::npos;
  }
  for (size_t i = from; i + needle_lower.size() <= hay.size(); ++i) {
    size_t j = 0;
    while (j < needle_lower.size() && Lower(hay[i + j]) == needle_lower[j]) ++j;
    if (j == needle_lower.size()) return i;
  }
  return std::string_view::npos;
}

// First occurrence of attribute |want| inside a tag body; a valueless
// attribute yields an empty string, absence yields nullopt.
std::optional<std::string> TagAttr(std::string_view body,
                                   std::string_view want) {
  size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && (Space(body[i]) || body[i] == '/')) ++i;
    size_t name_start = i;
    while (i < body.size() && !Space(body[i]) && body[i] != '=' &&
           body[i] != '/') {
      ++i;
    }
    if (i == name_start) {
      ++i;
      continue;
    }
    bool match = EqualsCi(body.substr(name_start, i - name_start), want);
    while (i < body.size() && Space(body[i])) ++i;
    std::string value;
    if (i < body.size() && body[i] == '=') {
      ++i;
      while (i < body.size() && Space(body[i])) ++i;
      if (i < body.size() && (body[i] == '"' || body[i] == '\'')) {
        char quote = body[i++];
        size_t value_start = i;
        while (i < body.size() && body[i] != quote) ++i;
        value.assign(body.substr(value_start, i - value_start));
        if (i < body.size()) ++i;
      } else {
        size_t value_start = i;
        while (i < body.size() && !Space(body[i])) ++i;
        value.assign(body.substr(value_start, i - value_start));
      }
    }
    if (match) return value;
  }
  return std::nullopt;
}

bool OffValue(const std::optional<std::string>& value) {
  return value && EqualsCi(Strip(*value), "off");
}

bool ScriptBuildsForm(std::string_view body, const DynamicJsMarkers& markers) {
  std::string lowered = LowerString(body);
  for (const std::string& needle : markers.single) {
    if (lowered.find(needle) != std::string::npos) return true;
  }
  for (const auto& [first, second] : markers.paired) {
    if (lowered.find(first) != std::string::npos &&
        lowered.find(second) != std::string::npos) {
      return true;
    }
  }
  return false;
}

// Only the scheme of the action matters for the verdict. On an http page
// every relative form inherits http, so the answer is https exactly when
// the action is a parseable absolute https URL.
bool ActionIsHttps(std::string_view raw_value, const Url& page_url) {
  std::string raw(Strip(raw_value));
  size_t hash = raw.find('#');
  if (hash != std::string::npos) raw.resize(hash);
  if (LowerString(std::string_view(raw).substr(0, 8)).rfind("https://", 0) !=
      0) {
    return page_url.scheme == Scheme::kHttps;
  }
  std::optional<Url> parsed = ParseUrl(raw);
  return parsed ? parsed->scheme == Scheme::kHttps
                : page_url.scheme == Scheme::kHttps;
}

}  // namespace

AuditVerdict ReferenceClassify(const SiteSnapshot& snapshot,
                               const DynamicJsMarkers& markers) {
  if (snapshot.url.scheme == Scheme::kHttps) {
    return AuditVerdict::kServedOverHttps;
  }

  const std::string html = EraseComments(snapshot.html);

  struct OpenForm {
    bool open = false;
    bool has_password = false;
    bool off = false;  // form attribute or first password input
    std::string action;
  };
  OpenForm form;
  bool any_login_form = false;
  bool dynamic_js = false;
  std::optional<AuditVerdict> first_fillable;

  auto finish_form = [&] {
    if (form.open && form.has_password) {
      any_login_form = true;
      if (!form.off && !first_fillable) {
        first_fillable = ActionIsHttps(form.action, snapshot.url)
                             ? AuditVerdict::kVulnerableHttpsPost
                             : AuditVerdict::kVulnerableHttpPost;
      }
    }
    form = OpenForm();
  };

  size_t i = 0;
  while (i < html.size()) {
    if (html[i] != '<') {
      ++i;
      continue;
    }
    bool closing = i + 1 < html.size() && html[i + 1] == '/';
    size_t name_start = i + (closing ? 2 : 1);
    size_t name_end = name_start;
    while (name_end < html.size() &&
           ((Lower(html[name_end]) >= 'a' && Lower(html[name_end]) <= 'z') ||
            (html[name_end] >= '0' && html[name_end] <= '9'))) {
      ++name_end;
    }
    if (name_end == name_start) {
      ++i;
      continue;
    }
    std::string name = LowerString(
        std::string_view(html).substr(name_start, name_end - name_start));
    size_t tag_end = html.find('>', i);
    if (tag_end == std::string::npos) break;
    std::string_view body =
        std::string_view(html).substr(name_end, tag_end - name_end);

    if (name == "script" && !closing) {
      size_t close = FindCi(html, "</script", tag_end + 1);
      size_t body_end = close == std::string::npos ? html.size() : close;
      if (ScriptBuildsForm(
              std::string_view(html).substr(tag_end + 1, body_end - tag_end - 1),
              markers)) {
        dynamic_js = true;
      }
      i = body_end;
      continue;
    }
    if (name == "form") {
      if (closing) {
        finish_form();
      } else if (!form.open) {
        // A nested open tag is markup noise; the outer form owns the
        // region until its close tag, matching the extractor.
        form.open = true;
        form.action = TagAttr(body, "action").value_or("");
        form.off = OffValue(TagAttr(body, "autocomplete"));
      }
    } else if (name == "input" && !closing && form.open && !form.has_password) {
      std::optional<std::string> type = TagAttr(body, "type");
      if (type && EqualsCi(Strip(*type), "password")) {
        form.has_password = true;
        if (OffValue(TagAttr(body, "autocomplete"))) form.off = true;
      }
    }
    i = tag_end + 1;
  }
  finish_form();

  if (first_fillable) return *first_fillable;
  if (any_login_form) return AuditVerdict::kAutocompleteOff;
  return dynamic_js ? AuditVerdict::kDynamicJs : AuditVerdict::kNoLoginForm;
}

}  // namespace lupin
