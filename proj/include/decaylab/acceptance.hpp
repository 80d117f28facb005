#pragma once

#include <string>
#include <vector>

namespace decaylab::acceptance {

// One measured quantity against its pinned tolerance.
struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string relation;  // "<=", ">=", ">" or "=="
  bool passed = false;
};

struct CriterionResult {
  int id = 0;
  std::string suite;
  std::string title;
  std::vector<Check> checks;
  double runtime_s = 0.0;
  double runtime_limit_s = 0.0;
  std::string error;  // set when the criterion threw

  bool passed() const;
};

struct SuiteInfo {
  int id;
  std::string name;
  std::string title;
  double runtime_limit_s;
};

const std::vector<SuiteInfo>& suites();
bool has_suite(const std::string& name);

CriterionResult run_criterion(int id);
// Runs one named suite, or every suite for "all".
std::vector<CriterionResult> run_suite(const std::string& name);

}  // namespace decaylab::acceptance
