#pragma once

// Thermodynamic states as commuting projections of a Gamma operator, the natural
// potential Lambda = -log2 tr(P Gamma), finite-difference chemical potentials and
// the toy models (spin gas, repetition code, flat spectra).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssqt/gamma.hpp"
#include "ssqt/linalg.hpp"

namespace ssqt {

class ThermoState {
 public:
  ThermoState() = default;
  // Throws InputError unless p is a projection commuting with gamma (defect <= 1e-10
  // relative to ||gamma||) and tr(P gamma) > 0.
  ThermoState(const CMat& p, GammaOperator gamma, std::vector<double> labels = {});

  const CMat& projector() const { return p_; }
  const GammaOperator& gamma() const { return gamma_; }
  const SubnormalizedState& state() const { return state_; }  // P Gamma P / tr(P Gamma)
  const std::vector<double>& labels() const { return labels_; }
  double omega() const { return omega_; }  // tr(P Gamma)
  double commutation_defect() const { return defect_; }

 private:
  CMat p_;
  GammaOperator gamma_;
  SubnormalizedState state_;
  std::vector<double> labels_;
  double omega_ = 0.0;
  double defect_ = 0.0;
};

// -log2 tr(P Gamma).
double natural_potential(const ThermoState& ts);
double bits_to_nats(double bits);

struct TransitionValue {
  double value = 0.0;               // Lambda(from) - Lambda(to)
  std::optional<double> sdp_value;  // coherent relative entropy of the supplied correlations
};

// correlations: a process matrix on X' (x) R with tr_R = to.state and tr_X' = from.state^T.
// Throws InputError on a marginal mismatch and std::logic_error when the SDP disagrees
// with the potential difference by more than 1e-5.
TransitionValue transition_value(const ThermoState& from, const ThermoState& to,
                                 const std::optional<SubnormalizedState>& correlations = std::nullopt,
                                 const Tolerances& tol = Tolerances::defaults());

struct PotentialTable {
  std::vector<std::vector<double>> points;
  std::vector<double> omega;
  std::vector<double> lambda;  // in `units`
  std::string units = "bits";

  void add(std::vector<double> z, double omega_value);
  // For counts beyond double range; omega is stored as exp2 and may be inf.
  void add_log2(std::vector<double> z, double log2_omega);
  // Index of z, or -1. Coordinates compare within 1e-9.
  int find(const std::vector<double>& z) const;
};

// Central difference (Lambda(z + h e_j) - Lambda(z - h e_j)) / 2h. Throws InputError if a
// neighbour is missing.
double chemical_potential(const PotentialTable& table, const std::vector<double>& z, int variable, double step);

struct ChemicalPotential {
  std::vector<double> point;
  double mu = 0.0;
};
// At every point whose two neighbours are present.
std::vector<ChemicalPotential> chemical_potentials(const PotentialTable& table, int variable, double step);

struct MicrocanonicalToy {
  std::uint64_t omega = 0;  // C(N, E)
  double lambda = 0.0;      // -log2 omega
  double entropy_nats = 0.0;  // S / k = ln omega
  std::optional<ThermoState> state;  // built for N <= kDenseSpins
};
inline constexpr int kDenseSpins = 9;

// N noninteracting two-level systems with Gamma = 1 and E excitations.
MicrocanonicalToy microcanonical_toy(int n_spins, int excitations);
// Lambda(E) for E = 0..N, in the requested units ("bits" or "nats").
PotentialTable toy_gas_table(int n_spins, const std::string& units = "bits");
// beta with E/N = 1/(1 + e^beta), the canonical temperature matching the sector.
double matching_beta(int n_spins, int excitations);

struct RepetitionCode {
  double lambda = 0.0;  // -n(m-1)
  std::uint64_t z = 0;  // 2^{n(m-1)}
  std::uint64_t preimages_per_block = 0;  // enumerated majority preimages of one logical bit
  std::optional<ThermoState> state;  // built for n*m <= kDenseSpins
};

// n logical bits, each encoded in m (odd) physical bits, logical string x.
RepetitionCode repetition_code(int n, int m, const std::vector<int>& x);

// (1/r) U P_r U^dagger with Gamma = 1.
ThermoState flat_spectrum_state(int rank, const CMat& u, int d);

}  // namespace ssqt
