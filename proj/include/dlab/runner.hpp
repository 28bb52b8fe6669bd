#pragma once

#include <string>
#include <vector>

#include "dlab/suites.hpp"

namespace dlab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInvalid = 2;

struct RunOutcome {
  int exit_code = kExitInvalid;
  std::string message;  // parse error, or failing digests and checks
  std::vector<std::string> failing_digests;
  std::vector<std::string> failing_checks;
};

/// Parses and validates a suite config. `kind` may be empty when the config
/// names its suite. Errors are Error(parse) with "line L: ..." messages.
struct SuiteConfig {
  std::string kind;
  Json document;
};
SuiteConfig parse_suite_config(const std::string& kind, const std::string& text);

/// Runs a parsed config and returns the suite result.
SuiteResult run_suite(const SuiteConfig& config);

/// Writes the artifact tree into out_dir: instances/<digest>.json,
/// summary.csv, report.json, plots/*.svg and timings.csv. Everything is
/// written to a sibling temporary directory first and renamed at the end;
/// an existing out_dir is replaced only if it holds an earlier run.
void write_artifacts(const SuiteResult& result, const std::string& config_digest, const std::string& out_dir);

/// Parse, run, write. Exit 0 when every instance and check passes, 1 on a
/// failed certificate, 2 on invalid configuration or I/O failure.
RunOutcome run_verify(const std::string& kind, const std::string& config_text, const std::string& out_dir);

}  // namespace dlab
