#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ssqt {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Dims = std::vector<int>;

// Invalid input or violated precondition. The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solver did not reach the requested accuracy. The CLI maps this to exit code 2.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double herm_tol = 1e-10;
  double psd_tol = 1e-9;
  double trace_tol = 1e-8;
  double rank_rel_tol = 1e-10;
  double sdp_gap = 1e-8;

  // Defaults, with sdp_gap overridden by SSQT_SDP_GAP when set.
  static Tolerances defaults();
  void validate() const;
};

int dims_product(const Dims& dims);

class HermitianOperator {
 public:
  HermitianOperator() = default;
  // Stores (m + m^dagger)/2 and records the defect. Empty dims means a single factor.
  explicit HermitianOperator(const CMat& m, Dims dims = {});

  // As above but rejects a Hermiticity defect above tol.herm_tol.
  static HermitianOperator checked(const CMat& m, Dims dims, const Tolerances& tol);

  const CMat& mat() const { return m_; }
  const Dims& dims() const { return dims_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double herm_defect() const { return defect_; }
  double trace() const { return m_.trace().real(); }

 private:
  CMat m_;
  Dims dims_;
  double defect_ = 0.0;
};

class SubnormalizedState {
 public:
  SubnormalizedState() = default;
  // Throws InputError if not PSD within psd_tol or if the trace exceeds 1 + trace_tol.
  explicit SubnormalizedState(HermitianOperator op, const Tolerances& tol = Tolerances::defaults());
  SubnormalizedState(const CMat& m, Dims dims, const Tolerances& tol = Tolerances::defaults());

  const HermitianOperator& op() const { return op_; }
  const CMat& mat() const { return op_.mat(); }
  const Dims& dims() const { return op_.dims(); }
  int dim() const { return op_.dim(); }
  double trace() const { return trace_; }
  bool is_normalized(const Tolerances& tol = Tolerances::defaults()) const;

 private:
  HermitianOperator op_;
  double trace_ = 0.0;
};

struct Ket {
  CVec amps;
  Dims dims;

  CMat projector() const { return amps * amps.adjoint(); }
};

struct Eigh {
  RVec values;  // ascending
  CMat vectors;
};

// Eigendecomposition of the Hermitian part of m.
Eigh eigh(const CMat& m);

// Eigenvalues below rank_rel_tol * max|lambda| are set to zero.
RVec cut_small(const RVec& values, double rank_rel_tol);

CMat kron(const CMat& a, const CMat& b);
CMat kron_all(const std::vector<CMat>& factors);
HermitianOperator tensor_product(const HermitianOperator& a, const HermitianOperator& b);

CMat ptrace(const CMat& m, const Dims& dims, const std::vector<int>& traced);
HermitianOperator partial_trace(const HermitianOperator& a, const std::vector<int>& traced);

CMat ptranspose(const CMat& m, const Dims& dims, int factor);
HermitianOperator partial_transpose(const HermitianOperator& a, int factor, int target_dim);

// Reorders tensor factors: factor k of the result is factor perm[k] of the input.
CMat permute_factors(const CMat& m, const Dims& dims, const std::vector<int>& perm);
CVec permute_factors(const CVec& v, const Dims& dims, const std::vector<int>& perm);

enum class MatFn { sqrt, log2, pinv, abs, inv_sqrt };

CMat mfun(const CMat& m, MatFn kind, const Tolerances& tol = Tolerances::defaults());
HermitianOperator matrix_function(const HermitianOperator& a, MatFn kind,
                                  const Tolerances& tol = Tolerances::defaults());

struct Support {
  CMat projector;
  int rank = 0;
};
Support support(const CMat& m, const Tolerances& tol = Tolerances::defaults());
std::pair<HermitianOperator, int> support_projector(const HermitianOperator& a,
                                                    const Tolerances& tol = Tolerances::defaults());

Ket purify(const SubnormalizedState& rho, const Tolerances& tol = Tolerances::defaults());
// tr_traced |psi><psi| without forming the full projector.
CMat reduced_state(const Ket& psi, const std::vector<int>& traced);

struct Schmidt {
  RVec coeffs;  // descending, strictly positive
  CMat left;    // columns are the left kets
  CMat right;
};
// left_factors lists the tensor factors forming the first party.
Schmidt schmidt_decompose(const Ket& psi, const std::vector<int>& left_factors,
                          const Tolerances& tol = Tolerances::defaults());

enum class NormKind { trace, infinity };
double norm(const CMat& m, NormKind kind);
double operator_norm(const HermitianOperator& a, NormKind kind);

enum class DistanceKind { trace, fidelity, purified };
// Generalized fidelity sqrt-overlap plus sqrt((1-tr rho)(1-tr sigma)).
double generalized_fidelity(const CMat& rho, const CMat& sigma);
double distance(const SubnormalizedState& rho, const SubnormalizedState& sigma, DistanceKind kind);
double distance(const CMat& rho, const CMat& sigma, DistanceKind kind);

// C with A = C B C and 0 <= C <= 1 on supp(B).
HermitianOperator geometric_mean_contraction(const HermitianOperator& a, const HermitianOperator& b,
                                             const Tolerances& tol = Tolerances::defaults());

Ket maximally_entangled_ket(int d);

double min_eig(const CMat& m);
double max_eig(const CMat& m);
CMat herm(const CMat& m);
CMat basis_op(int d, int i, int j);  // |i><j|

}  // namespace ssqt
