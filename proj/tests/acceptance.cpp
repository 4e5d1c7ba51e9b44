#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "modsig/acceptance.hpp"
#include "modsig/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria at full scale"};
  std::vector<int> ids;
  unsigned workers = modsig::default_workers();
  app.add_option("--criterion,-c", ids, "criterion number (repeatable); all when omitted")
      ->check(CLI::Range(1, modsig::kCriterionCount));
  app.add_option("--workers", workers, "worker threads");
  CLI11_PARSE(app, argc, argv);
  if (ids.empty())
    for (int i = 1; i <= modsig::kCriterionCount; ++i) ids.push_back(i);

  int failed = 0;
  for (int id : ids) {
    auto r = modsig::run_criterion(id, workers);
    std::printf("criterion %2d %-32s %s  %s  [%.1fs]\n", r.id, r.title.c_str(), r.pass ? "PASS" : "FAIL",
                r.summary.c_str(), r.seconds);
    std::fflush(stdout);
    failed += !r.pass;
  }
  std::printf("%zu criteria, %d failed\n", ids.size(), failed);
  return failed ? 1 : 0;
}
