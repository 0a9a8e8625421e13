// Structural-property suite over the catalog observables: one line per
// criterion, nonzero exit on any failure.

#include "povmlab/acceptance.hpp"

#include <cstdio>

int main() {
  auto results = povmlab::run_acceptance_criteria();
  int failures = 0;
  for (const auto& r : results) {
    if (!r.pass) ++failures;
    std::printf("%s  #%-2d %s — %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  return failures == 0 ? 0 : 1;
}
