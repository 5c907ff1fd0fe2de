#include "ssqt/thermo.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ssqt/coherent.hpp"

namespace ssqt {

ThermoState::ThermoState(const CMat& p, GammaOperator gamma, std::vector<double> labels)
    : p_(p), gamma_(std::move(gamma)), labels_(std::move(labels)) {
  const CMat& g = gamma_.mat();
  if (p.rows() != g.rows() || p.cols() != g.cols()) throw InputError("thermo state: projector dimension mismatch");
  if ((p - p.adjoint()).cwiseAbs().maxCoeff() > 1e-10 || (p * p - p).cwiseAbs().maxCoeff() > 1e-10)
    throw InputError("thermo state: P is not a projection");
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  defect_ = (p * g - g * p).cwiseAbs().maxCoeff() / scale;
  if (defect_ > 1e-10) {
    std::ostringstream os;
    os << "thermo state: [P, Gamma] = " << defect_ << " exceeds 1e-10";
    throw InputError(os.str());
  }
  omega_ = (p * g).trace().real();
  if (!(omega_ > 0.0)) throw InputError("thermo state: tr(P Gamma) must be positive");
  Tolerances loose;
  loose.trace_tol = 1e-8;
  state_ = SubnormalizedState(HermitianOperator(herm(p * g * p / omega_), gamma_.dims()), loose);
}

double natural_potential(const ThermoState& ts) { return -std::log2(ts.omega()); }

double bits_to_nats(double bits) { return bits * std::log(2.0); }

TransitionValue transition_value(const ThermoState& from, const ThermoState& to,
                                 const std::optional<SubnormalizedState>& correlations, const Tolerances& tol) {
  TransitionValue tv;
  tv.value = natural_potential(from) - natural_potential(to);
  if (!correlations) return tv;
  const int dx = from.gamma().dim(), dxp = to.gamma().dim();
  const CMat& rho = correlations->mat();
  if (rho.rows() != dx * dxp) throw InputError("transition_value: correlations have the wrong dimension");
  double mism = std::max((ptrace(rho, {dxp, dx}, {0}) - from.state().mat().transpose()).cwiseAbs().maxCoeff(),
                         (ptrace(rho, {dxp, dx}, {1}) - to.state().mat()).cwiseAbs().maxCoeff());
  if (mism > 1e-8) {
    std::ostringstream os;
    os << "transition_value: marginals of the correlations differ from the thermodynamic states by " << mism;
    throw InputError(os.str());
  }
  GammaOperator gamma_r(HermitianOperator(from.gamma().mat().transpose(), from.gamma().dims()), "R", tol);
  CoherentInstance inst(*correlations, gamma_r, to.gamma(), tol);
  tv.sdp_value = coherent_rel_entropy(inst, tol).value;
  if (std::abs(*tv.sdp_value - tv.value) > 1e-5) {
    std::ostringstream os;
    os << "transition_value: coherent relative entropy " << *tv.sdp_value << " differs from the potential difference "
       << tv.value;
    throw std::logic_error(os.str());
  }
  return tv;
}

void PotentialTable::add(std::vector<double> z, double omega_value) {
  if (!(omega_value > 0.0)) throw InputError("potential table: Omega must be positive");
  points.push_back(std::move(z));
  omega.push_back(omega_value);
  lambda.push_back(units == "nats" ? -std::log(omega_value) : -std::log2(omega_value));
}

void PotentialTable::add_log2(std::vector<double> z, double log2_omega) {
  points.push_back(std::move(z));
  omega.push_back(std::exp2(log2_omega));
  lambda.push_back(units == "nats" ? -log2_omega * std::log(2.0) : -log2_omega);
}

int PotentialTable::find(const std::vector<double>& z) const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != z.size()) continue;
    bool same = true;
    for (std::size_t k = 0; k < z.size() && same; ++k) same = std::abs(points[i][k] - z[k]) <= 1e-9;
    if (same) return static_cast<int>(i);
  }
  return -1;
}

double chemical_potential(const PotentialTable& table, const std::vector<double>& z, int variable, double step) {
  if (variable < 0 || variable >= static_cast<int>(z.size())) throw InputError("chemical_potential: bad variable index");
  if (!(step > 0.0)) throw InputError("chemical_potential: step must be positive");
  std::vector<double> up = z, down = z;
  up[variable] += step;
  down[variable] -= step;
  int iu = table.find(up), id = table.find(down);
  if (iu < 0 || id < 0) throw InputError("chemical_potential: neighbouring grid point missing");
  return (table.lambda[iu] - table.lambda[id]) / (2.0 * step);
}

std::vector<ChemicalPotential> chemical_potentials(const PotentialTable& table, int variable, double step) {
  std::vector<ChemicalPotential> out;
  for (const auto& z : table.points) {
    try {
      out.push_back({z, chemical_potential(table, z, variable, step)});
    } catch (const InputError&) {
    }
  }
  return out;
}

namespace {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i)
    c = static_cast<std::uint64_t>(static_cast<unsigned __int128>(c) * static_cast<unsigned>(n - k + i) / i);
  return c;
}

double log2_binomial(int n, int k) {
  return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / std::log(2.0);
}

int popcount(unsigned v) { return __builtin_popcount(v); }

}  // namespace

MicrocanonicalToy microcanonical_toy(int n_spins, int excitations) {
  if (n_spins < 1 || n_spins > 62) throw InputError("microcanonical_toy: N must lie in [1, 62]");
  if (excitations < 0 || excitations > n_spins) throw InputError("microcanonical_toy: need 0 <= E <= N");
  MicrocanonicalToy t;
  t.omega = binomial(n_spins, excitations);
  t.lambda = -std::log2(static_cast<double>(t.omega));
  t.entropy_nats = std::log(static_cast<double>(t.omega));
  if (n_spins <= kDenseSpins) {
    const int d = 1 << n_spins;
    CMat p = CMat::Zero(d, d);
    for (int s = 0; s < d; ++s)
      if (popcount(static_cast<unsigned>(s)) == excitations) p(s, s) = 1.0;
    t.state = ThermoState(p, identity_gamma(Dims(n_spins, 2)), {static_cast<double>(excitations)});
  }
  return t;
}

PotentialTable toy_gas_table(int n_spins, const std::string& units) {
  if (units != "bits" && units != "nats") throw InputError("toy_gas_table: units must be bits or nats");
  PotentialTable t;
  t.units = units;
  if (n_spins < 1) throw InputError("toy_gas_table: N must be positive");
  for (int e = 0; e <= n_spins; ++e) t.add_log2({static_cast<double>(e)}, log2_binomial(n_spins, e));
  return t;
}

double matching_beta(int n_spins, int excitations) {
  if (excitations <= 0 || excitations >= n_spins) throw InputError("matching_beta: need 0 < E < N");
  return std::log(static_cast<double>(n_spins - excitations) / excitations);
}

RepetitionCode repetition_code(int n, int m, const std::vector<int>& x) {
  if (n < 1) throw InputError("repetition_code: n must be at least 1");
  if (m < 1 || m % 2 == 0) throw InputError("repetition_code: m must be odd");
  if (static_cast<int>(x.size()) != n) throw InputError("repetition_code: x must have n bits");
  if (n * (m - 1) > 62) throw InputError("repetition_code: n(m-1) too large");
  for (int b : x)
    if (b != 0 && b != 1) throw InputError("repetition_code: x must be a bit string");
  // Majority preimages of each logical value within one block.
  std::vector<std::vector<int>> pre(2);
  for (int s = 0; s < (1 << m); ++s) pre[2 * popcount(static_cast<unsigned>(s)) > m ? 1 : 0].push_back(s);
  RepetitionCode rc;
  rc.preimages_per_block = pre[x[0]].size();
  rc.z = 1;
  for (int k = 0; k < n; ++k) rc.z *= pre[x[k]].size();
  rc.lambda = -std::log2(static_cast<double>(rc.z));
  if (n * m <= kDenseSpins) {
    const int bits = n * m;
    const int d = 1 << bits;
    CMat p = CMat::Zero(d, d);
    for (int s = 0; s < d; ++s) {
      bool ok = true;
      for (int k = 0; k < n && ok; ++k) {
        unsigned block = (static_cast<unsigned>(s) >> ((n - 1 - k) * m)) & ((1u << m) - 1u);
        ok = (2 * popcount(block) > m ? 1 : 0) == x[k];
      }
      if (ok) p(s, s) = 1.0;
    }
    std::vector<double> labels(x.begin(), x.end());
    rc.state = ThermoState(p, identity_gamma(Dims(bits, 2)), labels);
  }
  return rc;
}

ThermoState flat_spectrum_state(int rank, const CMat& u, int d) {
  if (rank < 1 || rank > d) throw InputError("flat_spectrum_state: need 1 <= r <= d");
  if (u.rows() != d || u.cols() != d) throw InputError("flat_spectrum_state: U has the wrong dimension");
  if ((u.adjoint() * u - CMat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw InputError("flat_spectrum_state: U is not unitary");
  CMat pr = CMat::Zero(d, d);
  for (int i = 0; i < rank; ++i) pr(i, i) = 1.0;
  return ThermoState(herm(u * pr * u.adjoint()), identity_gamma({d}), {static_cast<double>(rank)});
}

}  // namespace ssqt
