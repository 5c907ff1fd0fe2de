#pragma once

// Semidefinite programs in the standard form
//
//   primal: minimize tr(A X)  s.t.  Phi(X) >= B,  X >= 0,  tr(E_j X) = e_j
//   dual:   maximize tr(B Y) + sum_j w_j e_j  s.t.  Phi^dagger(Y) + sum_j w_j E_j <= A,  Y >= 0
//
// with Phi(X) = sum_k L_k X R_k^dagger.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssqt/cone.hpp"
#include "ssqt/linalg.hpp"

namespace ssqt::sdp {

struct MapTerm {
  CMat left;
  CMat right;
};

struct SdpProblem {
  HermitianOperator objective;  // A
  HermitianOperator rhs;        // B (ignored when the map is empty)
  std::vector<MapTerm> map;     // Phi
  std::vector<std::pair<HermitianOperator, double>> equalities;
};

struct SdpSolution {
  HermitianOperator primal_X;
  HermitianOperator dual_Y;
  std::vector<double> eq_multipliers;
  double primal_value = 0, dual_value = 0, gap = 0;
  double pres = 0, dres = 0;
  int iters = 0;
  Status status = Status::max_iters;
};

CMat apply_map(const std::vector<MapTerm>& map, const CMat& x);
// Y -> sum_k R_k^dagger Y L_k, so tr(Y Phi(X)) = tr(Phi^dagger(Y) X).
std::vector<MapTerm> adjoint_map(const std::vector<MapTerm>& map);
// Largest Hermiticity defect of Phi over a Hermitian basis.
double hermiticity_defect(const std::vector<MapTerm>& map, int dim);

// Gap and feasibility targets from tol; SSQT_SDP_MAX_ITERS, when set, caps the iterations.
ConeOptions options_from(const Tolerances& tol);

struct ModelSolution;
// Throws SolverError unless optimal. A max_iters run with residuals and relative gap
// at most 1e-6 is accepted, and a note is written when note is non-null.
void require_solved(const ModelSolution& ms, const std::string& what, std::string* note);
SdpSolution to_certificate(const ModelSolution& ms, const CMat& primal, const CMat& dual);

// Throws InputError for inconsistent dimensions or a map that is not Hermiticity-preserving.
SdpSolution solve(const SdpProblem& p, const Tolerances& tol = Tolerances::defaults(),
                  const ConeOptions* override_opts = nullptr);

// The dual written again as a primal problem: minimize tr(-B Y) s.t. -Phi^dagger(Y) >= -A.
// Only valid without equality constraints.
SdpProblem dual_problem(const SdpProblem& p);

enum class NormSdp { infinity, one, trace_distance };

// Infinity needs PSD input; trace_distance needs the second operand.
double norm_via_sdp(const HermitianOperator& a, NormSdp kind, const HermitianOperator* second = nullptr,
                    const Tolerances& tol = Tolerances::defaults(), SdpSolution* certificate = nullptr);

}  // namespace ssqt::sdp
