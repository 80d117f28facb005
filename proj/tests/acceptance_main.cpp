// Runs acceptance criteria 1-14 and prints one line per criterion.
// Usage: acceptance [id ...]

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "decaylab/acceptance.hpp"

int main(int argc, char** argv) {
  namespace acc = decaylab::acceptance;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (const auto& s : acc::suites()) ids.push_back(s.id);

  int failed = 0;
  for (int id : ids) {
    const acc::CriterionResult r = acc::run_criterion(id);
    std::printf("%s  %2d %-22s %7.3fs / %.0fs\n", r.passed() ? "PASS" : "FAIL", r.id, r.suite.c_str(),
                r.runtime_s, r.runtime_limit_s);
    for (const acc::Check& c : r.checks)
      std::printf("        %s %s: %.6g %s %.6g\n", c.passed ? "ok  " : "FAIL", c.name.c_str(),
                  c.measured, c.relation.c_str(), c.tolerance);
    if (!r.error.empty()) std::printf("        error: %s\n", r.error.c_str());
    if (!r.passed()) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
  std::fflush(stdout);
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
