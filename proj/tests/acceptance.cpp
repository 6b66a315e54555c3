// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance               runs all criteria
//   acceptance --criterion N runs one criterion

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "geodet/report.hpp"

namespace {

bool report(const geodet::CriterionResult& result) {
  std::printf("criterion %2d: %s  %s  (%.0f ms)\n", result.id, result.passed() ? "PASS" : "FAIL",
              result.title.c_str(), result.runtime_ms);
  for (const auto& r : result.records) {
    if (r.passed) continue;
    std::printf("    failed %s: expected %s %.12g, computed %.12g, tolerance %.3g\n", r.check_name.c_str(),
                geodet::comparison_name(r.comparison), r.expected, r.computed, r.tolerance);
  }
  std::fflush(stdout);
  return result.passed();
}

}  // namespace

int main(int argc, char** argv) {
  geodet::install_report_determinism_probe();
  std::vector<int> ids;
  for (int a = 1; a < argc; ++a) {
    if (std::strcmp(argv[a], "--criterion") == 0 && a + 1 < argc) {
      ids.push_back(std::atoi(argv[++a]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]...\n");
      return 2;
    }
  }
  if (ids.empty())
    for (int id = 1; id <= geodet::kCriterionCount; ++id) ids.push_back(id);

  int failed = 0;
  for (const int id : ids) {
    if (id < 1 || id > geodet::kCriterionCount) {
      std::fprintf(stderr, "no criterion %d\n", id);
      return 2;
    }
    if (!report(geodet::run_criterion(id))) ++failed;
  }
  std::printf("%zu criteria, %d failed\n", ids.size(), failed);
  return failed == 0 ? 0 : 1;
}
