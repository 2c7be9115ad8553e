// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

// Command line front end: run crawl scenarios, audit page corpora for
// exposed login forms, generate labeled corpora, and compare browser
// policies side by side.

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lupin/audit.h"
#include "lupin/autofill.h"
#include "lupin/corpus_gen.h"
#include "lupin/net.h"
#include "lupin/scenario.h"

namespace lupin {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> SplitCommaList(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    std::string token = text.substr(start, comma - start);
    size_t begin = token.find_first_not_of(" \t");
    size_t end = token.find_last_not_of(" \t");
    out.push_back(begin == std::string::npos
                      ? std::string()
                      : token.substr(begin, end - begin + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool WriteOutput(const fs::path& dir, const char* name,
                 const std::string& content) {
  std::string error;
  if (WriteFileAtomic((dir / name).string(), content, &error)) return true;
  std::cerr << error << '\n';
  return false;
}

int CmdSimulate(const std::string& scenario_path, const std::string& out_dir,
                const std::optional<uint64_t>& seed_override,
                bool stream_exfil) {
  ScenarioError error;
  std::optional<Scenario> scenario = LoadScenario(scenario_path, &error);
  if (!scenario) {
    std::cerr << error.ToString() << '\n';
    return 2;
  }
  if (seed_override) scenario->seed = *seed_override;
  if (stream_exfil) scenario->stream_exfil = true;

  ScenarioRun run;
  try {
    run = RunScenario(*scenario);
  } catch (const CapabilityViolation& bad) {
    std::cerr << "capability violation: " << bad.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& bad) {
    std::cerr << scenario_path << ": " << bad.what() << '\n';
    return 2;
  }

  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!WriteOutput(dir, "harvest.tsv",
                   SerializeHarvest(run.outcome.harvest,
                                    run.outcome.metrics)) ||
      !WriteOutput(dir, "metrics.txt",
                   SerializeMetrics(run.outcome.metrics)) ||
      !WriteOutput(dir, "trace.tsv", run.trace)) {
    return 1;
  }

  std::cout << SerializeMetrics(run.outcome.metrics);
  std::cout << "trace_hash=" << std::hex << std::setw(16)
            << std::setfill('0') << run.trace_hash << std::dec << '\n';
  return 0;
}

int CmdAudit(const std::string& manifest_path, const std::string& out_dir,
             bool strict_oracle) {
  std::string error;
  std::optional<LoadedCorpus> corpus = LoadCorpus(manifest_path, &error);
  if (!corpus) {
    std::cerr << error << '\n';
    return 2;
  }

  std::vector<AuditResult> results = AuditCorpus(corpus->sites);
  CorpusReport report = Aggregate(results, corpus->skipped_invalid);

  std::string text = SerializeReport(report);
  text += '\n';
  text += SerializeVerdicts(results);

  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!WriteOutput(dir, "report.txt", text)) return 1;

  std::cout << SerializeReport(report);
  AccuracyReport accuracy = CheckAgainstLabels(results);
  if (accuracy.labeled > 0) {
    std::cout << "label_accuracy: " << accuracy.matched << "/"
              << accuracy.labeled << '\n';
  }

  if (!strict_oracle) return 0;

  int problems = 0;
  for (const std::string& mismatch : accuracy.mismatches) {
    std::cerr << "label mismatch: " << mismatch << '\n';
    problems = 1;
  }
  // The tag-level scanner and the single-pass reference must agree on
  // every page; a split verdict means one of them is wrong.
  for (size_t i = 0; i < corpus->sites.size(); ++i) {
    if (ReferenceClassify(corpus->sites[i].snapshot) != results[i].verdict) {
      std::cerr << "classifier disagreement: "
                << results[i].url.ToString() << '\n';
      problems = 1;
    }
  }
  return problems;
}

int CmdMatrix(const std::string& scenario_path,
              const std::string& defense_csv) {
  ScenarioError error;
  std::optional<Scenario> scenario = LoadScenario(scenario_path, &error);
  if (!scenario) {
    std::cerr << error.ToString() << '\n';
    return 2;
  }

  std::vector<std::string> defense_names = SplitCommaList(defense_csv);
  for (const std::string& name : defense_names) {
    AutofillPolicy probe;
    if (!ApplyDefenseByName(probe, name)) {
      std::cerr << "unknown defense '" << name << "'\n";
      return 2;
    }
  }

  size_t name_width = sizeof("defense") - 1;
  for (const std::string& name : defense_names)
    name_width = std::max(name_width, name.size());

  std::cout << std::left << std::setw(static_cast<int>(name_width) + 2)
            << "defense";
  for (BrowserPreset preset : kAllPresets)
    std::cout << std::right << std::setw(9) << PresetName(preset);
  std::cout << '\n';

  for (const std::string& name : defense_names) {
    std::cout << std::left << std::setw(static_cast<int>(name_width) + 2)
              << name;
    for (BrowserPreset preset : kAllPresets) {
      Scenario cell = *scenario;
      cell.preset = preset;
      cell.policy = PolicyForPreset(preset);
      ApplyDefenseByName(cell.policy, name);
      ScenarioRun run;
      try {
        run = RunScenario(cell);
      } catch (const CapabilityViolation& bad) {
        std::cerr << "capability violation: " << bad.what() << '\n';
        return 3;
      }
      std::cout << std::right << std::setw(9)
                << run.outcome.metrics.credentials_harvested;
    }
    std::cout << '\n';
  }
  return 0;
}

int CmdGenCorpus(const std::string& out_dir, int total, uint64_t seed) {
  std::vector<GeneratedSite> sites = GenerateCorpus(total, seed);
  std::string error;
  if (!WriteCorpus(sites, out_dir, &error)) {
    std::cerr << error << '\n';
    return 1;
  }
  std::cout << "wrote " << sites.size() << " pages and manifest.tsv to "
            << out_dir << '\n';
  return 0;
}

int RunMain(int argc, char** argv) {
  CLI::App app{"deterministic crawl and survey simulator for login "
               "autofill exposure"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string sim_out = ".";
  std::optional<uint64_t> seed_override;
  bool stream_exfil = false;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run one scenario; writes harvest.tsv, metrics.txt, "
                  "and trace.tsv");
  simulate->add_option("scenario", scenario_path, "scenario file")
      ->required();
  simulate->add_option("-o,--out", sim_out, "output directory");
  simulate->add_option("--seed", seed_override,
                       "override the scenario's seed");
  simulate->add_flag("--stream-exfil", stream_exfil,
                     "send each page's capture as soon as it is read");

  std::string manifest_path;
  std::string audit_out = ".";
  bool strict_oracle = false;
  CLI::App* audit = app.add_subcommand(
      "audit", "classify a page corpus; writes report.txt");
  audit->add_option("manifest", manifest_path, "corpus manifest file")
      ->required();
  audit->add_option("-o,--out", audit_out, "output directory");
  audit->add_flag("--strict-oracle", strict_oracle,
                  "fail on label mismatches or classifier disagreement");

  std::string matrix_path;
  std::string defense_csv =
      "none,no_fill_https_destination,no_fill_on_http_page,hsts_upgrade,"
      "explicit_trigger";
  CLI::App* matrix = app.add_subcommand(
      "matrix", "harvest counts for every browser preset under each "
                "defense");
  matrix->add_option("scenario", matrix_path, "scenario file")->required();
  matrix->add_option("--defenses", defense_csv,
                     "comma separated defense list");

  std::string corpus_out;
  int corpus_total = 1000;
  uint64_t corpus_seed = 1;
  CLI::App* gen = app.add_subcommand(
      "gen-corpus", "generate a labeled corpus of login pages");
  gen->add_option("directory", corpus_out, "output directory")->required();
  gen->add_option("--total", corpus_total, "number of pages")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", corpus_seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& bad) {
    std::cerr << bad.what() << '\n';
    return 2;
  }

  if (simulate->parsed())
    return CmdSimulate(scenario_path, sim_out, seed_override, stream_exfil);
  if (audit->parsed()) return CmdAudit(manifest_path, audit_out, strict_oracle);
  if (matrix->parsed()) return CmdMatrix(matrix_path, defense_csv);
  return CmdGenCorpus(corpus_out, corpus_total, corpus_seed);
}

}  // namespace
}  // namespace lupin

int main(int argc, char** argv) { return lupin::RunMain(argc, argv); }
