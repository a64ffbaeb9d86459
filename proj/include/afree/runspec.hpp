#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace afree {

/// Validated run specification. The JSON contract is published in
/// docs/runspec.schema.json; unknown keys are rejected anywhere in the
/// document.
struct RunSpec {
  nlohmann::json doc;
  std::string command;
  std::string out_dir = "out";
  unsigned long long seed = 12345;
  bool quiet = false;
  std::string canonical_text; // canonical dump used for the report hash
};

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parse + validate a run-spec document; `overrides` are dot-path KEY=VALUE
/// pairs applied before validation (values parsed as JSON when possible).
RunSpec load_runspec(const std::string& json_text,
                     const std::vector<std::string>& overrides = {});

/// Execute the spec; writes report.json, rows.csv, summary.txt (and optional
/// field files) under spec.out_dir. Returns the process exit status:
/// 0 pass, 1 error, 2 property violation.
int run(const RunSpec& spec);

} // namespace afree
