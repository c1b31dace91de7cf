#pragma once

#include <string>
#include <vector>

#include "qdiv/types.hpp"

namespace qdiv {

// Property-suite runner behind the CLI `suite` subcommand. Each suite maps to
// one invariant family; rerunning with the same master seed reproduces the
// same report (wall time aside).

struct SuiteFailure {
  Seed seed = 0;
  std::string fingerprint;  // compact description of the failing instance
  double slack = 0.0;
};

struct SuiteReport {
  std::string name;
  int cases = 0;
  std::vector<SuiteFailure> failures;
  double wall_ms = 0.0;

  bool passed() const { return failures.empty(); }
  bool same_results(const SuiteReport& other) const;
};

const std::vector<std::string>& suite_names();

/// size <= 0 selects each suite's default instance count.
SuiteReport run_suite(const std::string& name, Seed master_seed, int size = 0);

std::string report_to_json_string(const SuiteReport& r);
std::string report_to_csv_string(const SuiteReport& r);
void emit_report(const SuiteReport& r, const std::string& format, const std::string& path);

}  // namespace qdiv
