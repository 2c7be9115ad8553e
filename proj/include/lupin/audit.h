// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#ifndef LUPIN_AUDIT_H_
#define LUPIN_AUDIT_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lupin/url.h"
#include "lupin/web.h"

namespace lupin {

// One page as the survey crawler saw it. The html is arbitrary bytes;
// scanning must tolerate anything.
struct SiteSnapshot {
  enum class FetchedVia { kCorpusFile, kLiveFetch };

  Url url;
  std::string html;
  FetchedVia fetched_via = FetchedVia::kCorpusFile;
};

// How exposed a site's login flow is to an in-path tamperer. A site is
// only exploitable when its login form arrives over plain HTTP and the
// manager is allowed to fill it.
enum class AuditVerdict {
  kVulnerableHttpPost,
  kVulnerableHttpsPost,
  kServedOverHttps,
  kNoLoginForm,
  kAutocompleteOff,
  kDynamicJs,
};

inline constexpr AuditVerdict kAllVerdicts[] = {
    AuditVerdict::kVulnerableHttpPost,  AuditVerdict::kVulnerableHttpsPost,
    AuditVerdict::kServedOverHttps,     AuditVerdict::kNoLoginForm,
    AuditVerdict::kAutocompleteOff,     AuditVerdict::kDynamicJs,
};

bool IsVulnerable(AuditVerdict verdict);
std::string_view VerdictReasonName(AuditVerdict verdict);
// Three-way bucket label: vulnerable_http_post, vulnerable_https_post, or
// not_vulnerable. Also the ground-truth vocabulary of corpus manifests.
std::string_view LabelForVerdict(AuditVerdict verdict);

// Substrings that mark a script as building its form at runtime; such
// pages cannot be judged from static HTML. All matching is done on
// lowercased script bodies.
struct DynamicJsMarkers {
  std::vector<std::string> single = {"createelement('form'",
                                     "createelement(\"form\""};
  std::vector<std::pair<std::string, std::string>> paired = {
      {"document.write", "<form"}, {"innerhtml", "<form"}};
};

struct ExtractionResult {
  std::vector<LoginForm> forms;  // static forms with a password input
  bool dynamic_js_suspected = false;
};

// Tolerant tag-level scan: comments stripped, script bodies excluded from
// form discovery but checked for the markers, tag and attribute names
// case-insensitive, quoting optional. A login form is any form element
// with at least one password-type input; its action resolves against
// |page_url|, with the page itself as the fallback.
ExtractionResult ExtractLoginForms(std::string_view html, const Url& page_url,
                                   const DynamicJsMarkers& markers = {});

// Decision order: https page, dynamic-only forms, no form, autocomplete
// off everywhere, else vulnerable by the first fillable form's action
// scheme.
AuditVerdict Classify(const SiteSnapshot& snapshot,
                      const DynamicJsMarkers& markers = {});

// Same decision, computed by an independent single forward pass over the
// raw bytes with no shared scanning code. Kept as a cross-check for the
// tag-level scanner and as the serial baseline for benchmarks.
AuditVerdict ReferenceClassify(const SiteSnapshot& snapshot,
                               const DynamicJsMarkers& markers = {});

struct AuditResult {
  Url url;
  AuditVerdict verdict = AuditVerdict::kNoLoginForm;
  // SSL exposure facts used by the aggregate counts.
  bool exposes_https_url = false;
  bool http_page_with_https_form = false;
  std::string label;  // ground truth when the manifest provides one
};

AuditResult AuditSite(const SiteSnapshot& snapshot,
                      const DynamicJsMarkers& markers = {});

struct CorpusSite {
  SiteSnapshot snapshot;
  std::string label;
};

// Classifies every site; with OpenMP available the corpus is processed in
// parallel, which is safe because each verdict is a pure function of one
// snapshot. Results keep corpus order either way.
std::vector<AuditResult> AuditCorpus(const std::vector<CorpusSite>& sites,
                                     const DynamicJsMarkers& markers = {},
                                     bool parallel = true);

struct CorpusReport {
  uint64_t total = 0;
  uint64_t skipped_invalid = 0;  // manifest rows with unparseable URLs
  std::array<uint64_t, 6> verdict_counts{};  // indexed like kAllVerdicts

  uint64_t vulnerable_http_post = 0;
  uint64_t vulnerable_https_post = 0;
  uint64_t not_vulnerable = 0;
  // Rounded half-up to whole percents; all zero for an empty corpus.
  int pct_vulnerable_http_post = 0;
  int pct_vulnerable_https_post = 0;
  int pct_not_vulnerable = 0;

  // A site implements SSL when it serves HTTPS, references an https://
  // URL, or posts a form to one.
  uint64_t ssl_implementers = 0;
  // SSL-implementing sites that still expose a secure-destination login
  // form on a plain HTTP page.
  uint64_t https_sites_with_http_login = 0;
};

CorpusReport Aggregate(const std::vector<AuditResult>& results,
                       uint64_t skipped_invalid = 0);

// Integer percent with exact round-half-up; zero when |total| is zero.
int RoundedPercent(uint64_t count, uint64_t total);

struct AccuracyReport {
  uint64_t labeled = 0;
  uint64_t matched = 0;
  std::vector<std::string> mismatches;  // "url: got X, labeled Y"

  bool perfect() const { return labeled == matched; }
};

AccuracyReport CheckAgainstLabels(const std::vector<AuditResult>& results);

// Manifest rows are (serving_url, html_path, optional label), tab
// separated; html paths resolve against the manifest's directory. Rows
// with unparseable URLs are skipped and counted, any other problem fails
// the load.
struct LoadedCorpus {
  std::vector<CorpusSite> sites;
  uint64_t skipped_invalid = 0;
};

std::optional<LoadedCorpus> LoadCorpus(const std::string& manifest_path,
                                       std::string* error = nullptr);

// The summary table with a header stating the SSL-exposure definition,
// then the per-site verdict lines (url, bucket, reason).
std::string SerializeReport(const CorpusReport& report);
std::string SerializeVerdicts(const std::vector<AuditResult>& results);

}  // namespace lupin

#endif  // LUPIN_AUDIT_H_
