#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ssqt/linalg.hpp"

namespace ssqt {

// Seeded generator for random test and demo instances.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  int integer(int lo, int hi);  // inclusive
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

CMat random_ginibre(int rows, int cols, Rng& rng);
CMat random_unitary(int d, Rng& rng);
CMat random_hermitian(int d, Rng& rng);
// Random state of the given rank (rank <= 0 means full rank), unit trace.
CMat random_state(int d, Rng& rng, int rank = 0);
// Random PSD with eigenvalues in [lo, hi].
CMat random_psd(int d, Rng& rng, double lo = 0.2, double hi = 2.0);
CVec random_pure(int d, Rng& rng);
RVec random_probability(int d, Rng& rng);
// Kraus operators of a random CPTP map from a Stiefel isometry. Needs dout * count >= din.
std::vector<CMat> random_kraus(int din, int dout, int count, Rng& rng);

}  // namespace ssqt
