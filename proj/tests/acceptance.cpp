// Acceptance battery: runs every property suite against its independent
// oracle and prints one verdict line per criterion. Exit status counts the
// failed criteria, so a clean run exits zero.

#include <cstdio>
#include <vector>

#include "gateaux/selftest.hpp"

int main() {
  gateaux::SelftestOptions opt;
  opt.seed = 1;
  opt.count = -1;  // each suite runs its specified instance count
#ifdef GATEAUX_CLI_PATH
  opt.cli_path = GATEAUX_CLI_PATH;
#endif
  std::vector<gateaux::SuiteResult> suites = gateaux::run_selftest(opt);
  int failures = 0;
  for (size_t i = 0; i < suites.size(); ++i) {
    const gateaux::SuiteResult& s = suites[i];
    std::printf("criterion %2zu %s %s (checked %d, failed %d) %s\n", i + 1,
                s.pass ? "PASS" : "FAIL", s.name.c_str(), s.checked, s.failed,
                s.detail.c_str());
    if (!s.pass) ++failures;
  }
  return failures;
}
