#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "ssqt/battery.hpp"
#include "ssqt/cli.hpp"
#include "ssqt/thermo.hpp"

namespace ssqt::cli {

Report demo_paper_numbers(std::uint64_t seed) {
  Report r;
  r.command = "demo paper-numbers";
  std::string failing;
  for (const CriterionResult& c : run_acceptance(seed)) {
    r.results.push_back({"criterion " + std::to_string(c.id) + ": " + c.name, c.pass ? 1.0 : 0.0, "bool", c.detail,
                         std::nullopt, std::nullopt});
    if (!c.pass) failing += (failing.empty() ? "" : ", ") + std::to_string(c.id);
  }
  if (!failing.empty()) r.warnings.push_back("failing criteria: " + failing);
  return r;
}

Report demo_toy_gas(int n_spins) {
  if (n_spins < 4) throw InputError("toy gas demo: N must be at least 4");
  Report r;
  r.command = "demo toy-gas";
  PotentialTable table = toy_gas_table(n_spins, "nats");
  std::set<int> energies;
  for (int k = 1; k <= 9; ++k) energies.insert(std::clamp(static_cast<int>(std::lround(k * n_spins / 10.0)), 1, n_spins - 1));
  for (int e : energies) {
    const std::string at = "(E=" + std::to_string(e) + ")";
    r.results.push_back({"dLambda/dE" + at, chemical_potential(table, {static_cast<double>(e)}, 0, 1.0), "nats",
                         "central difference", std::nullopt, std::nullopt});
    r.results.push_back({"-beta" + at, 0.0 - matching_beta(n_spins, e), "nats", "canonical match", std::nullopt,
                         std::nullopt});
  }
  return r;
}

}  // namespace ssqt::cli
