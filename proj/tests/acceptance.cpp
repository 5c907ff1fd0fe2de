// Runs every acceptance criterion and prints one line per criterion.
#include <cstdio>

#include "ssqt/battery.hpp"

int main() {
  int failures = 0;
  ssqt::run_acceptance(ssqt::kBatterySeed, [&](const ssqt::CriterionResult& r) {
    if (!r.pass) ++failures;
    std::printf("[%s] %2d %s (%.1fs): %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.detail.c_str());
    std::fflush(stdout);
  });
  std::printf("%d of %d criteria passed\n", ssqt::kCriterionCount - failures, ssqt::kCriterionCount);
  return failures == 0 ? 0 : 1;
}
