// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#ifndef LUPIN_CORPUS_GEN_H_
#define LUPIN_CORPUS_GEN_H_

#include <cstdint>
#include <string>
#include <vector>

namespace lupin {

struct GeneratedSite {
  std::string url;
  std::string html;
  std::string label;  // the intended verdict bucket, kept as ground truth
};

// Synthesizes a survey corpus with the observed exposure mix: 25% of
// sites post login forms over plain HTTP, 3% post to HTTPS from an HTTP
// page, the rest are not exploitable for one of four reasons. Counts are
// exact for totals divisible by 100; every page varies in markup (tag
// case, quoting, relative actions, decoy forms, comments, scripts) while
// staying classifiable. The same (total, seed) yields identical bytes.
std::vector<GeneratedSite> GenerateCorpus(int total, uint64_t seed);

// Writes one html file per site plus manifest.tsv into |directory|,
// creating it if needed. Manifest rows carry the ground-truth label.
bool WriteCorpus(const std::vector<GeneratedSite>& sites,
                 const std::string& directory, std::string* error = nullptr);

}  // namespace lupin

#endif  // LUPIN_CORPUS_GEN_H_
