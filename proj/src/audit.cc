// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#include "lupin/audit.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

namespace lupin {
namespace {

bool IsHtmlSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

char AsciiLower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string LowerCopy(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), AsciiLower);
  return out;
}

std::string TrimCopy(std::string_view text) {
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && IsHtmlSpace(text[begin])) ++begin;
  while (end > begin && IsHtmlSpace(text[end - 1])) --end;
  return std::string(text.substr(begin, end - begin));
}

// Blanks "<!-- -->" regions so commented-out markup never parses. An
// unterminated comment swallows the rest of the document, as in browsers.
void BlankComments(std::string& text) {
  size_t pos = 0;
  while ((pos = text.find("<!--", pos)) != std::string::npos) {
    size_t end = text.find("-->", pos + 4);
    size_t stop = end == std::string::npos ? text.size() : end + 3;
    std::fill(text.begin() + pos, text.begin() + stop, ' ');
    pos = stop;
  }
}

// True when |text| begins a tag of |name| at |pos| (already matched) and
// the next character ends the tag name.
bool TagBoundary(std::string_view text, size_t after_name) {
  if (after_name >= text.size()) return true;
  char c = text[after_name];
  return IsHtmlSpace(c) || c == '>' || c == '/';
}

using AttributeList = std::vector<std::pair<std::string, std::string>>;

// Lenient attribute scan over the inside of a tag: names lowercased,
// values unquoted, single or double quoted, case preserved.
AttributeList ParseAttributes(std::string_view body) {
  AttributeList out;
  size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && (IsHtmlSpace(body[i]) || body[i] == '/')) ++i;
    size_t name_start = i;
    while (i < body.size() && !IsHtmlSpace(body[i]) && body[i] != '=' &&
           body[i] != '/') {
      ++i;
    }
    if (i == name_start) {
      ++i;
      continue;
    }
    std::string name = LowerCopy(body.substr(name_start, i - name_start));
    while (i < body.size() && IsHtmlSpace(body[i])) ++i;
    std::string value;
    if (i < body.size() && body[i] == '=') {
      ++i;
      while (i < body.size() && IsHtmlSpace(body[i])) ++i;
      if (i < body.size() && (body[i] == '"' || body[i] == '\'')) {
        char quote = body[i++];
        size_t value_start = i;
        while (i < body.size() && body[i] != quote) ++i;
        value = std::string(body.substr(value_start, i - value_start));
        if (i < body.size()) ++i;
      } else {
        size_t value_start = i;
        while (i < body.size() && !IsHtmlSpace(body[i])) ++i;
        value = std::string(body.substr(value_start, i - value_start));
      }
    }
    out.emplace_back(std::move(name), std::move(value));
  }
  return out;
}

std::optional<std::string> FindAttribute(const AttributeList& attributes,
                                         std::string_view name) {
  for (const auto& [attr_name, value] : attributes) {
    if (attr_name == name) return value;
  }
  return std::nullopt;
}

bool AutocompleteOffValue(const std::optional<std::string>& value) {
  return value && LowerCopy(TrimCopy(*value)) == "off";
}

bool HasDynamicMarkers(std::string_view body_lower,
                       const DynamicJsMarkers& markers) {
  for (const std::string& needle : markers.single) {
    if (body_lower.find(needle) != std::string_view::npos) return true;
  }
  for (const auto& [first, second] : markers.paired) {
    if (body_lower.find(first) != std::string_view::npos &&
        body_lower.find(second) != std::string_view::npos) {
      return true;
    }
  }
  return false;
}

// Resolves a form action the way a browser would, minus the exotica:
// absolute, scheme-relative, root-relative, and directory-relative forms.
// Anything unparseable falls back to the page itself.
Url ResolveAction(std::string_view raw_value, const Url& page_url) {
  std::string raw = TrimCopy(raw_value);
  if (raw.empty()) return page_url;

  size_t hash = raw.find('#');
  if (hash != std::string::npos) raw.resize(hash);
  if (raw.empty()) return page_url;

  std::string candidate;
  std::string lowered_head = LowerCopy(raw.substr(0, 8));
  if (lowered_head.rfind("http://", 0) == 0 ||
      lowered_head.rfind("https://", 0) == 0) {
    candidate = raw;
  } else if (raw.size() >= 2 && raw[0] == '/' && raw[1] == '/') {
    candidate = std::string(SchemeName(page_url.scheme)) + ":" + raw;
  } else if (raw[0] == '/') {
    candidate = OriginOf(page_url).ToString() + raw;
  } else {
    std::string directory = page_url.path.substr(0, page_url.path.rfind('/') + 1);
    candidate = OriginOf(page_url).ToString() + directory + raw;
  }
  std::optional<Url> resolved = ParseUrl(candidate);
  return resolved ? *resolved : page_url;
}

struct RawInput {
  std::string name;
  std::string type;  // lowercased; empty means unspecified
  bool autocomplete_off = false;
};

bool IsUsernameCandidate(const RawInput& input) {
  return !input.name.empty() &&
         (input.type.empty() || input.type == "text" || input.type == "email" ||
          input.type == "tel");
}

// Picks the username field for the password input at |password_index|:
// nearest text-like input before it, else the first one after, else a
// conventional guess.
std::string PickUsernameField(const std::vector<RawInput>& inputs,
                              size_t password_index) {
  for (size_t i = password_index; i-- > 0;) {
    if (IsUsernameCandidate(inputs[i])) return inputs[i].name;
  }
  for (size_t i = password_index + 1; i < inputs.size(); ++i) {
    if (IsUsernameCandidate(inputs[i])) return inputs[i].name;
  }
  return "username";
}

size_t VerdictIndex(AuditVerdict verdict) {
  return static_cast<size_t>(verdict);
}

}  // namespace

bool IsVulnerable(AuditVerdict verdict) {
  return verdict == AuditVerdict::kVulnerableHttpPost ||
         verdict == AuditVerdict::kVulnerableHttpsPost;
}

std::string_view VerdictReasonName(AuditVerdict verdict) {
  switch (verdict) {
    case AuditVerdict::kVulnerableHttpPost:
      return "http_post";
    case AuditVerdict::kVulnerableHttpsPost:
      return "https_post";
    case AuditVerdict::kServedOverHttps:
      return "served_over_https";
    case AuditVerdict::kNoLoginForm:
      return "no_login_form";
    case AuditVerdict::kAutocompleteOff:
      return "autocomplete_off";
    case AuditVerdict::kDynamicJs:
      return "dynamic_js";
  }
  return "unknown";
}

std::string_view LabelForVerdict(AuditVerdict verdict) {
  switch (verdict) {
    case AuditVerdict::kVulnerableHttpPost:
      return "vulnerable_http_post";
    case AuditVerdict::kVulnerableHttpsPost:
      return "vulnerable_https_post";
    default:
      return "not_vulnerable";
  }
}

ExtractionResult ExtractLoginForms(std::string_view html, const Url& page_url,
                                   const DynamicJsMarkers& markers) {
  ExtractionResult result;

  std::string clean(html);
  BlankComments(clean);
  std::string lower = LowerCopy(clean);

  // Lift script bodies out before looking for forms: markup inside a
  // string literal is not a static form, but it is exactly what the
  // dynamic-construction markers look for.
  size_t pos = 0;
  while ((pos = lower.find("<script", pos)) != std::string::npos) {
    if (!TagBoundary(lower, pos + 7)) {
      pos += 7;
      continue;
    }
    size_t tag_end = lower.find('>', pos);
    if (tag_end == std::string::npos) break;
    size_t body_start = tag_end + 1;
    size_t close = lower.find("</script", body_start);
    size_t body_end = close == std::string::npos ? lower.size() : close;
    if (HasDynamicMarkers(
            std::string_view(lower).substr(body_start, body_end - body_start),
            markers)) {
      result.dynamic_js_suspected = true;
    }
    std::fill(lower.begin() + body_start, lower.begin() + body_end, ' ');
    std::fill(clean.begin() + body_start, clean.begin() + body_end, ' ');
    pos = body_end;
  }

  pos = 0;
  while ((pos = lower.find("<form", pos)) != std::string::npos) {
    if (!TagBoundary(lower, pos + 5)) {
      pos += 5;
      continue;
    }
    size_t tag_end = lower.find('>', pos);
    if (tag_end == std::string::npos) break;
    AttributeList form_attributes = ParseAttributes(
        std::string_view(clean).substr(pos + 5, tag_end - pos - 5));
    size_t region_start = tag_end + 1;
    size_t close = lower.find("</form", region_start);
    size_t region_end = close == std::string::npos ? lower.size() : close;

    std::vector<RawInput> inputs;
    size_t input_pos = region_start;
    while (input_pos < region_end) {
      input_pos = lower.find("<input", input_pos);
      if (input_pos == std::string::npos || input_pos >= region_end) break;
      if (!TagBoundary(lower, input_pos + 6)) {
        input_pos += 6;
        continue;
      }
      size_t input_end = lower.find('>', input_pos);
      if (input_end == std::string::npos || input_end > region_end) break;
      AttributeList attributes = ParseAttributes(std::string_view(clean).substr(
          input_pos + 6, input_end - input_pos - 6));
      RawInput input;
      if (auto name = FindAttribute(attributes, "name")) input.name = *name;
      if (auto type = FindAttribute(attributes, "type")) {
        input.type = LowerCopy(TrimCopy(*type));
      }
      input.autocomplete_off =
          AutocompleteOffValue(FindAttribute(attributes, "autocomplete"));
      inputs.push_back(std::move(input));
      input_pos = input_end + 1;
    }

    size_t password_index = inputs.size();
    for (size_t i = 0; i < inputs.size(); ++i) {
      if (inputs[i].type == "password") {
        password_index = i;
        break;
      }
    }
    if (password_index < inputs.size()) {
      LoginForm form;
      std::optional<std::string> action = FindAttribute(form_attributes, "action");
      form.action = ResolveAction(action.value_or(""), page_url);
      form.username_field_name = PickUsernameField(inputs, password_index);
      form.password_field_name = inputs[password_index].name.empty()
                                     ? "password"
                                     : inputs[password_index].name;
      form.autocomplete_off =
          AutocompleteOffValue(FindAttribute(form_attributes, "autocomplete")) ||
          inputs[password_index].autocomplete_off;
      result.forms.push_back(std::move(form));
    }
    pos = region_end;
  }
  return result;
}

AuditVerdict Classify(const SiteSnapshot& snapshot,
                      const DynamicJsMarkers& markers) {
  if (snapshot.url.scheme == Scheme::kHttps) {
    return AuditVerdict::kServedOverHttps;
  }
  ExtractionResult extraction =
      ExtractLoginForms(snapshot.html, snapshot.url, markers);
  if (extraction.forms.empty()) {
    return extraction.dynamic_js_suspected ? AuditVerdict::kDynamicJs
                                           : AuditVerdict::kNoLoginForm;
  }
  for (const LoginForm& form : extraction.forms) {
    if (!form.autocomplete_off) {
      return form.action.scheme == Scheme::kHttps
                 ? AuditVerdict::kVulnerableHttpsPost
                 : AuditVerdict::kVulnerableHttpPost;
    }
  }
  return AuditVerdict::kAutocompleteOff;
}

AuditResult AuditSite(const SiteSnapshot& snapshot,
                      const DynamicJsMarkers& markers) {
  AuditResult result;
  result.url = snapshot.url;
  result.verdict = Classify(snapshot, markers);

  ExtractionResult extraction =
      ExtractLoginForms(snapshot.html, snapshot.url, markers);
  bool any_https_action = false;
  for (const LoginForm& form : extraction.forms) {
    if (form.action.scheme == Scheme::kHttps) any_https_action = true;
  }
  result.exposes_https_url =
      snapshot.url.scheme == Scheme::kHttps || any_https_action ||
      LowerCopy(snapshot.html).find("https://") != std::string::npos;
  result.http_page_with_https_form =
      snapshot.url.scheme == Scheme::kHttp && any_https_action;
  return result;
}

std::vector<AuditResult> AuditCorpus(const std::vector<CorpusSite>& sites,
                                     const DynamicJsMarkers& markers,
                                     bool parallel) {
  const int64_t count = static_cast<int64_t>(sites.size());
  std::vector<AuditResult> results(sites.size());
  auto audit_one = [&](int64_t i) {
    results[i] = AuditSite(sites[i].snapshot, markers);
    results[i].label = sites[i].label;
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (int64_t i = 0; i < count; ++i) audit_one(i);
  } else {
    for (int64_t i = 0; i < count; ++i) audit_one(i);
  }
  return results;
}

int RoundedPercent(uint64_t count, uint64_t total) {
  if (total == 0) return 0;
  return static_cast<int>((200 * count + total) / (2 * total));
}

CorpusReport Aggregate(const std::vector<AuditResult>& results,
                       uint64_t skipped_invalid) {
  CorpusReport report;
  report.total = results.size();
  report.skipped_invalid = skipped_invalid;
  for (const AuditResult& result : results) {
    ++report.verdict_counts[VerdictIndex(result.verdict)];
    if (result.exposes_https_url) ++report.ssl_implementers;
    if (result.http_page_with_https_form) ++report.https_sites_with_http_login;
  }
  report.vulnerable_http_post =
      report.verdict_counts[VerdictIndex(AuditVerdict::kVulnerableHttpPost)];
  report.vulnerable_https_post =
      report.verdict_counts[VerdictIndex(AuditVerdict::kVulnerableHttpsPost)];
  report.not_vulnerable =
      report.total - report.vulnerable_http_post - report.vulnerable_https_post;
  report.pct_vulnerable_http_post =
      RoundedPercent(report.vulnerable_http_post, report.total);
  report.pct_vulnerable_https_post =
      RoundedPercent(report.vulnerable_https_post, report.total);
  report.pct_not_vulnerable = RoundedPercent(report.not_vulnerable, report.total);
  return report;
}

AccuracyReport CheckAgainstLabels(const std::vector<AuditResult>& results) {
  AccuracyReport report;
  for (const AuditResult& result : results) {
    if (result.label.empty()) continue;
    ++report.labeled;
    std::string_view got = LabelForVerdict(result.verdict);
    if (got == result.label) {
      ++report.matched;
    } else {
      report.mismatches.push_back(result.url.ToString() + ": got " +
                                  std::string(got) + ", labeled " +
                                  result.label);
    }
  }
  return report;
}

std::optional<LoadedCorpus> LoadCorpus(const std::string& manifest_path,
                                       std::string* error) {
  auto fail = [&](const std::string& message) -> std::optional<LoadedCorpus> {
    if (error) *error = message;
    return std::nullopt;
  };
  std::ifstream manifest(manifest_path);
  if (!manifest) return fail("cannot open manifest: " + manifest_path);
  std::filesystem::path base =
      std::filesystem::path(manifest_path).parent_path();

  LoadedCorpus corpus;
  std::string line;
  int line_number = 0;
  while (std::getline(manifest, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 2 && fields.size() != 3) {
      return fail("manifest line " + std::to_string(line_number) +
                  ": expected 2 or 3 tab-separated fields");
    }
    std::optional<Url> url = ParseUrl(fields[0]);
    if (!url) {
      // A bad serving URL skips the row; the count surfaces in the report.
      ++corpus.skipped_invalid;
      continue;
    }
    std::filesystem::path html_path = base / fields[1];
    std::ifstream html_file(html_path, std::ios::binary);
    if (!html_file) {
      return fail("manifest line " + std::to_string(line_number) +
                  ": cannot read " + html_path.string());
    }
    std::ostringstream html;
    html << html_file.rdbuf();

    CorpusSite site;
    site.snapshot.url = *url;
    site.snapshot.html = std::move(html).str();
    site.snapshot.fetched_via = SiteSnapshot::FetchedVia::kCorpusFile;
    if (fields.size() == 3) site.label = fields[2];
    corpus.sites.push_back(std::move(site));
  }
  return corpus;
}

std::string SerializeReport(const CorpusReport& report) {
  std::ostringstream out;
  out << "# login form exposure survey\n";
  out << "# ssl_implementers counts sites that serve https, reference an "
         "https:// url, or post a form to one\n";
  out << "total\t" << report.total << "\n";
  out << "skipped_invalid_url\t" << report.skipped_invalid << "\n";

  auto bucket = [&](std::string_view name, uint64_t count, int pct) {
    out << name << "\t" << count;
    if (report.total > 0) out << "\t" << pct << "%";
    out << "\n";
  };
  bucket("vulnerable_http_post", report.vulnerable_http_post,
         report.pct_vulnerable_http_post);
  bucket("vulnerable_https_post", report.vulnerable_https_post,
         report.pct_vulnerable_https_post);
  bucket("not_vulnerable", report.not_vulnerable, report.pct_not_vulnerable);

  for (AuditVerdict verdict :
       {AuditVerdict::kServedOverHttps, AuditVerdict::kNoLoginForm,
        AuditVerdict::kAutocompleteOff, AuditVerdict::kDynamicJs}) {
    out << "not_vulnerable." << VerdictReasonName(verdict) << "\t"
        << report.verdict_counts[VerdictIndex(verdict)] << "\n";
  }
  out << "ssl_implementers\t" << report.ssl_implementers << "\n";
  out << "https_sites_with_http_login\t" << report.https_sites_with_http_login
      << "\n";
  return std::move(out).str();
}

std::string SerializeVerdicts(const std::vector<AuditResult>& results) {
  std::ostringstream out;
  for (const AuditResult& result : results) {
    out << result.url.ToString() << "\t"
        << (IsVulnerable(result.verdict) ? "vulnerable" : "not_vulnerable")
        << "\t" << VerdictReasonName(result.verdict) << "\n";
  }
  return std::move(out).str();
}

}  // namespace lupin
