#pragma once

// Resource theory of Gamma-sub-preserving maps: Gibbs operators, admissibility,
// state transitions under Gibbs-preserving (optionally time-covariant) channels,
// thermo-majorization, Gibbs rescaling and the explicit constructions built on
// top of admissible maps (dilation, battery lifts, reverse process).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssqt/channel.hpp"
#include "ssqt/linalg.hpp"

namespace ssqt {

class GammaOperator {
 public:
  GammaOperator() = default;
  // Throws InputError if not PSD within psd_tol or if zero.
  explicit GammaOperator(HermitianOperator op, std::string label = "",
                         const Tolerances& tol = Tolerances::defaults());

  const HermitianOperator& op() const { return op_; }
  const CMat& mat() const { return op_.mat(); }
  const Dims& dims() const { return op_.dims(); }
  int dim() const { return op_.dim(); }
  const std::string& label() const { return label_; }
  double partition_function() const { return op_.trace(); }
  CMat normalized() const { return op_.mat() / op_.trace(); }

 private:
  HermitianOperator op_;
  std::string label_;
};

GammaOperator identity_gamma(Dims dims, std::string label = "");
GammaOperator tensor_product(const GammaOperator& a, const GammaOperator& b);

// exp(-sum_j mu_j Z_j), e.g. {(H, beta)} for the Gibbs operator. For non-commuting
// observables this is the exponential of the sum.
GammaOperator gibbs_operator(const std::vector<std::pair<HermitianOperator, double>>& observables,
                             std::string label = "");

struct AdmissibilityReport {
  bool is_cp = false;
  bool is_tni = false;
  double gamma_defect = 0.0;  // lambda_min(Gamma_out - Phi(Gamma_in))
  double cp_defect = 0.0;
  double tni_excess = 0.0;
  double tp_defect = 0.0;
  double gamma_error = 0.0;  // ||Phi(Gamma_in) - Gamma_out||_inf
  bool verdict = false;

  // Trace- and Gamma-preserving (not only sub-preserving) at the given tolerance.
  bool preserving(double tol) const { return verdict && tp_defect <= tol && gamma_error <= tol; }
};

AdmissibilityReport is_gamma_subpreserving(const ChoiChannel& phi, const GammaOperator& gamma_in,
                                           const GammaOperator& gamma_out,
                                           const Tolerances& tol = Tolerances::defaults());

struct TransitionResult {
  bool feasible = false;
  double slack = 0.0;        // optimal t in -t <= Phi(rho) - sigma <= t
  double certificate = 0.0;  // dual objective, a lower bound on the slack
  std::optional<ChoiChannel> witness;
  std::string note;
};

// Threshold on the optimal slack below which the transition is declared feasible.
inline constexpr double kFeasibleSlack = 1e-7;

// CPTP channel with Phi(gamma) = gamma and Phi(rho) = sigma, optionally commuting
// with the time evolution generated by covariant_under.
TransitionResult transition_feasible(const SubnormalizedState& rho, const SubnormalizedState& sigma,
                                     const GammaOperator& gamma,
                                     const std::optional<HermitianOperator>& covariant_under = std::nullopt,
                                     const Tolerances& tol = Tolerances::defaults());

struct ThermoMajorization {
  bool lp = false;       // stochastic matrix with D g = g and D p = q exists
  bool lorentz = false;  // rescaled Lorentz curve comparison
  double lp_slack = 0.0;
  std::vector<std::vector<double>> stochastic;  // D from the LP, row i column j
};

// Both verdicts accept a deviation up to slack (LP residual, Lorentz curve height).
ThermoMajorization thermo_majorization(const RVec& p, const RVec& q, const RVec& gibbs,
                                       const Tolerances& tol = Tolerances::defaults(), double slack = kFeasibleSlack);
bool thermo_majorizes(const RVec& p, const RVec& q, const RVec& gibbs,
                      const Tolerances& tol = Tolerances::defaults());
bool lorentz_majorizes(const RVec& p, const RVec& q, const RVec& gibbs, double slack = 1e-12);
bool majorizes(const RVec& p, const RVec& q, double slack = 1e-12);

// Block i of dimension exp(-beta E_i), constant entries p_i exp(beta E_i).
RVec gibbs_rescale(const RVec& p, const RVec& energies, double beta);

// Gibbs-preserving channel sending |n><n| to rho_target:
//   Phi(X) = <n|X|n> rho_target + tr((1 - |n><n|) X) sigma,  sigma = (gamma - p_n rho)/(1 - p_n).
// |n> is the computational basis vector top_level_index and must be an eigenvector of Gamma
// with the smallest eigenvalue.
struct Counterexample {
  ChoiChannel channel;
  CMat sigma;
};
Counterexample counterexample_map(const SubnormalizedState& rho_target, const GammaOperator& gamma,
                                  int top_level_index, const Tolerances& tol = Tolerances::defaults());

// Gamma-preserving trace-preserving map on K (x) L (x) Q (factor order K, L, Q) whose
// restriction to input |l>_L |i>_Q and post-selection on <k|_K <f|_Q is phi_tilde.
// Q has basis {|i>, |f>} = {|0>, |1>} and g_l g_i = g_k g_f.
struct Dilation {
  ChoiChannel phi;
  GammaOperator gamma_q;
  GammaOperator gamma_total;
  int k_index = 0, l_index = 0;
  double post_selection_error = 0.0;  // Choi distance between the restriction and phi_tilde
  AdmissibilityReport report;
};
Dilation dilate_subpreserving(const ChoiChannel& phi_tilde, const GammaOperator& gamma_k,
                              const GammaOperator& gamma_l, int k_index, int l_index,
                              const Tolerances& tol = Tolerances::defaults());
// <k f| phi(x (x) |l i><l i|) |k f>, an operator on L.
CMat post_select(const Dilation& d, const CMat& x);

struct Battery {
  enum class Kind { information, wit, projector_pair };
  Kind kind = Kind::wit;
  double lambda1 = 0, lambda2 = 0;  // information: 2^lambda1, 2^lambda2 integral
  double g1 = 1, g2 = 1;            // wit: Gamma_Q = diag(g1, g2), start |0>, finish |1>
  CMat gamma_w, p_in, p_out;        // projector_pair: [P, Gamma_W] = 0 = [P', Gamma_W]

  static Battery information(double lambda1, double lambda2);
  static Battery wit(double g1, double g2);
  static Battery projector_pair(const CMat& gamma_w, const CMat& p_in, const CMat& p_out);
};

// Joint map on (battery, X) -> (battery, X'):
//   Phi(.) = sigma_out (x) E[tr_W(P_in .)],  sigma = P Gamma_W P / tr(P Gamma_W).
struct BatteryLift {
  ChoiChannel map;
  GammaOperator gamma_in, gamma_out;
  CMat battery_start, battery_end;
  AdmissibilityReport report;
};
BatteryLift battery_lift(const ChoiChannel& e, const GammaOperator& gamma_x, const GammaOperator& gamma_xp, double y,
                         const Battery& battery, const Tolerances& tol = Tolerances::defaults());

// R(Y) = 2^y Gamma_X^{1/2} E^dagger(Gamma_X'^{-1/2} Y Gamma_X'^{-1/2}) Gamma_X^{1/2}.
// Requires E(Gamma_X) <= 2^-y Gamma_X'.
ChoiChannel reverse_process(const ChoiChannel& e, const GammaOperator& gamma_x, const GammaOperator& gamma_xp,
                            double y, const Tolerances& tol = Tolerances::defaults());

// lambda_min(2^-y Gamma_X' - E(Gamma_X)); nonnegative when the yield y is allowed.
double yield_margin(const ChoiChannel& e, const GammaOperator& gamma_x, const GammaOperator& gamma_xp, double y);

}  // namespace ssqt
