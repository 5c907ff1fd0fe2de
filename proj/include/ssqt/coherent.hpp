#pragma once

// Coherent relative entropy D(rho_X'R || Gamma_R, Gamma_X') = -log2 alpha, where alpha is
// the smallest factor with tr_R[T Gamma_R] <= alpha Gamma_X' over Choi matrices T >= 0 of
// trace-nonincreasing maps (tr_X' T <= 1) reproducing the process matrix
// (rho_R^{1/2} T rho_R^{1/2} = rho_X'R). Factor order is always X' then R.

#include <optional>
#include <string>
#include <vector>

#include "ssqt/channel.hpp"
#include "ssqt/gamma.hpp"
#include "ssqt/linalg.hpp"

namespace ssqt {

class CoherentInstance {
 public:
  CoherentInstance() = default;
  // Throws InputError on dimension mismatch or if rho is not inside supp(Gamma_X') (x) supp(Gamma_R).
  CoherentInstance(SubnormalizedState rho, GammaOperator gamma_r, GammaOperator gamma_xp,
                   const Tolerances& tol = Tolerances::defaults());

  // Process matrix of e on sigma, with Gamma_R = Gamma_X^T.
  static CoherentInstance from_channel(const ChoiChannel& e, const CMat& sigma, const GammaOperator& gamma_x,
                                       const GammaOperator& gamma_xp, const Tolerances& tol = Tolerances::defaults());

  const SubnormalizedState& rho() const { return rho_; }
  const GammaOperator& gamma_r() const { return gamma_r_; }
  const GammaOperator& gamma_xp() const { return gamma_xp_; }
  int d_out() const { return gamma_xp_.dim(); }
  int d_ref() const { return gamma_r_.dim(); }
  CMat rho_r() const;
  CMat rho_out() const;
  // rho, Gamma_R and Gamma_X' all diagonal.
  bool classical(double tol = 1e-12) const;

 private:
  SubnormalizedState rho_;
  GammaOperator gamma_r_, gamma_xp_;
};

struct CoherentDual {
  CMat z;      // on X' (x) R
  CMat omega;  // on X', PSD with tr(omega Gamma_X') <= 1
  CMat x;      // on R, PSD
  double value = 0.0;   // tr(Z rho) - tr X, a lower bound on alpha
  double defect = 0.0;  // lambda_min(omega (x) Gamma_R + 1 (x) X - rho_R^{1/2} Z rho_R^{1/2}), >= 0 when feasible
};

struct CoherentResult {
  double value = 0.0;  // bits
  double alpha = 0.0;
  std::optional<ChoiChannel> primal_channel;  // T as a map X -> X' (R identified with X by transposition)
  std::optional<CoherentDual> dual;
  double gap = 0.0;  // alpha - dual value
  int iters = 0;
  std::string note;
  // Smooth variant only: value of the unrestricted definition is >= value here, and
  // `unsmoothed` is the epsilon = 0 value.
  bool restricted = false;
  double epsilon = 0.0;
  double unsmoothed = 0.0;
};

CoherentResult coherent_rel_entropy(const CoherentInstance& inst, const Tolerances& tol = Tolerances::defaults());

// Smoothing over process matrices with the same input marginal (a restriction of the
// purified-distance ball). Classical instances are solved on diagonal variables, which is
// exact by invariance under diagonal phase twirls.
CoherentResult smooth_coherent(const CoherentInstance& inst, double epsilon,
                               const Tolerances& tol = Tolerances::defaults());

struct AnalyticCase {
  enum class Kind { eigenspace, gamma_states, commuting_projections, trivial_gamma };
  Kind kind = Kind::trivial_gamma;
  double g = 1.0, g_prime = 1.0;  // eigenspace
  CMat p, p_prime;                // commuting_projections: P on R, P' on X'

  static AnalyticCase eigenspace(double g, double g_prime);
  static AnalyticCase gamma_states();
  static AnalyticCase commuting_projections(const CMat& p, const CMat& p_prime);
  static AnalyticCase trivial_gamma();
};

// Closed forms. Throws InputError when the structural precondition of the case fails.
double analytic_value(const CoherentInstance& inst, const AnalyticCase& c,
                      const Tolerances& tol = Tolerances::defaults());

// -log2 || tr_R rho_R^{-1/2} rho rho_R^{-1/2} ||_inf, i.e. -H_max,0(E|X') of a purification.
double neg_hmax0_of_process(const CoherentInstance& inst, const Tolerances& tol = Tolerances::defaults());

enum class BoundSide { lower, upper };

struct BoundEntry {
  std::string name;
  double value = 0.0;
  BoundSide side = BoundSide::lower;
  bool smooth = false;  // bound on the smooth quantity
};

// Bounds from the marginals: trivial (both sides), product-state (only for product rho),
// D_max difference, relative-entropy difference, Rob lower bound and, for epsilon > 0,
// the smooth lower bound with eps' = eps'' = 0 and eps''' = eps^2/8.
std::vector<BoundEntry> bounds(const CoherentInstance& inst, std::optional<double> epsilon = std::nullopt,
                               const Tolerances& tol = Tolerances::defaults());

struct ChainInstances {
  CoherentInstance step1;  // rho_X'R
  CoherentInstance step2;  // tau_X''RE with Gamma_RE
  CoherentInstance total;  // tau_X''R
  // || tr_E Gamma_RE - Gamma_R ||_inf
  double compatibility_defect = 0.0;
};

// first: X -> X' applied to sigma_X, second: X' -> X''. RE is identified with X' through the
// Schmidt basis of the purification of rho_X'R, and Gamma_RE is Gamma_X'^T carried along.
// With require_compatible, throws InputError when tr_E Gamma_RE differs from Gamma_R.
ChainInstances compose(const ChoiChannel& first, const CMat& sigma, const ChoiChannel& second,
                       const GammaOperator& gamma_x, const GammaOperator& gamma_xp, const GammaOperator& gamma_xpp,
                       bool require_compatible = false, const Tolerances& tol = Tolerances::defaults());

}  // namespace ssqt
