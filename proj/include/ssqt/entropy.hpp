#pragma once

// Entropy measures in bits: von Neumann, conditional (vn, min, max0, max),
// relative (vn, min0, min, max, rob), hypothesis testing and the smoothed
// variants. Smoothing uses the purified distance.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssqt/linalg.hpp"
#include "ssqt/sdp_problem.hpp"

namespace ssqt {

struct EntropyResult {
  double value = 0.0;
  std::optional<sdp::SdpSolution> certificate;
  std::optional<SubnormalizedState> smoothing_state;
  // Set when the value is a proxy or a one-sided bound rather than the exact quantity.
  bool proxy = false;
  bool lower_bound = false;
  std::vector<std::pair<std::string, double>> extras;
  std::string note;
};

double von_neumann(const SubnormalizedState& rho);
double shannon(const RVec& p);
double binary_entropy(double p);

enum class CondKind { vn, min, max0, max };

// Conditional entropy H(X|M) where M is made of the factors listed in cond_factors and X of all the others.
EntropyResult conditional_entropy(const SubnormalizedState& rho, const std::vector<int>& cond_factors, CondKind kind,
                                  const Tolerances& tol = Tolerances::defaults());
EntropyResult conditional_entropy(const SubnormalizedState& rho, int cond_factor, CondKind kind,
                                  const Tolerances& tol = Tolerances::defaults());

enum class RelKind { vn, min0, min, max, rob };

// Throws InputError if rho is not supported inside supp(gamma).
EntropyResult relative_entropy(const SubnormalizedState& rho, const HermitianOperator& gamma, RelKind kind,
                               const Tolerances& tol = Tolerances::defaults());
double relative_entropy_value(const CMat& rho, const CMat& gamma, RelKind kind,
                              const Tolerances& tol = Tolerances::defaults());

// -(1/eta) log min { tr(Q gamma) : 0 <= Q <= 1, tr(Q rho) >= eta }.
EntropyResult hypothesis_testing(const SubnormalizedState& rho, const HermitianOperator& gamma, double eta,
                                 const Tolerances& tol = Tolerances::defaults());

enum class SmoothMeasure { h_min, h_max, d_max, d_min0_proxy, d_rob };

struct SmoothArgs {
  SubnormalizedState rho;
  std::vector<int> cond_factors;  // h_min / h_max
  HermitianOperator gamma;        // relative measures
};

EntropyResult smooth(SmoothMeasure measure, const SmoothArgs& args, double epsilon,
                     const Tolerances& tol = Tolerances::defaults());

EntropyResult smooth_h_min(const SubnormalizedState& rho, const std::vector<int>& cond_factors, double epsilon,
                           const Tolerances& tol = Tolerances::defaults());
EntropyResult smooth_h_max(const SubnormalizedState& rho, const std::vector<int>& cond_factors, double epsilon,
                           const Tolerances& tol = Tolerances::defaults());
EntropyResult smooth_d_max(const SubnormalizedState& rho, const HermitianOperator& gamma, double epsilon,
                           const Tolerances& tol = Tolerances::defaults());
// D_H at eta = 1 - eps' with eps' = eps^2/(2+eps^2); flagged as a proxy.
EntropyResult smooth_d_min0_proxy(const SubnormalizedState& rho, const HermitianOperator& gamma, double epsilon,
                                  const Tolerances& tol = Tolerances::defaults());
// max(D_r, D_min0 + log eps'), a lower bound on the smooth Rob entropy.
EntropyResult smooth_d_rob(const SubnormalizedState& rho, const HermitianOperator& gamma, double epsilon,
                           const Tolerances& tol = Tolerances::defaults());

// eps log(rank - 1) + h(eps) + eps ||log gamma||_inf, with the first term absent for rank 1.
double continuity_bound(double epsilon, const HermitianOperator& gamma, const Tolerances& tol = Tolerances::defaults());

// Pure state on (all factors of rho, C) with C of dimension rank(rho); tr_C gives rho.
Ket purification(const SubnormalizedState& rho, const Tolerances& tol = Tolerances::defaults());

}  // namespace ssqt
