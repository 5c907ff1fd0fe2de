#pragma once

// The acceptance battery: seventeen numbered checks of the headline numbers and the
// randomized property suites, shared by the acceptance test and `demo paper-numbers`.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ssqt {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // measured values against their targets
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 17;
inline constexpr std::uint64_t kBatterySeed = 20240611;

// Runs criterion id (1-based). Exceptions inside a criterion are reported as failures.
CriterionResult run_criterion(int id, std::uint64_t seed = kBatterySeed);

std::vector<CriterionResult> run_acceptance(std::uint64_t seed = kBatterySeed,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace ssqt
