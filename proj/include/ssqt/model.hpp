#pragma once

// Modelling layer over the cone solver: real scalar variables, Hermitian
// matrix variables parameterized in an orthonormal Hermitian basis, affine
// Hermitian expressions, PSD / nonnegativity / equality constraints.

#include <functional>
#include <vector>

#include "ssqt/cone.hpp"
#include "ssqt/linalg.hpp"

namespace ssqt::sdp {

// Affine scalar: constant + sum coeff * x[var].
struct SExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;

  SExpr() = default;
  SExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)

  SExpr& operator+=(const SExpr& o);
  SExpr& operator-=(const SExpr& o);
  SExpr& operator*=(double a);
};
SExpr operator+(SExpr a, const SExpr& b);
SExpr operator-(SExpr a, const SExpr& b);
SExpr operator*(double a, SExpr e);
SExpr operator-(SExpr e);

// Affine Hermitian: constant + sum x[var] * coeff (coefficients Hermitian).
struct HExpr {
  CMat constant;
  std::vector<std::pair<int, CMat>> terms;

  HExpr() = default;
  explicit HExpr(const CMat& c) : constant(c) {}

  int dim() const { return static_cast<int>(constant.rows()); }
  HExpr& operator+=(const HExpr& o);
  HExpr& operator-=(const HExpr& o);
  HExpr& operator*=(double a);
};
HExpr operator+(HExpr a, const HExpr& b);
HExpr operator-(HExpr a, const HExpr& b);
HExpr operator*(double a, HExpr e);
HExpr operator-(HExpr e);
// x[var] * M for a scalar expression.
HExpr operator*(const SExpr& s, const CMat& m);

// Applies a linear map to the constant and every coefficient.
HExpr map(const HExpr& e, const std::function<CMat(const CMat&)>& f);
HExpr ptrace(const HExpr& e, const Dims& dims, const std::vector<int>& traced);
HExpr congruence(const CMat& left, const HExpr& e);  // L e L^dagger
HExpr kron(const CMat& a, const HExpr& e);
HExpr kron(const HExpr& e, const CMat& a);
SExpr trace(const HExpr& e);
SExpr inner(const CMat& m, const HExpr& e);  // Re tr(m e)
// Block-diagonal direct sum with arbitrary off-diagonal block expression.
HExpr block2(const HExpr& tl, const HExpr& off, const HExpr& br);

// Orthonormal Hermitian basis of d x d matrices (diagonal, symmetric, antisymmetric parts).
std::vector<CMat> hermitian_basis(int d, bool diagonal_only = false, bool real_only = false);

enum class ConeKind { lp, real_psd, complex_psd };

struct ModelSolution {
  Status status = Status::max_iters;
  double primal = 0, dual = 0;
  double gap = 0, pres = 0, dres = 0;
  int iters = 0;
  RVec x;
  std::vector<CMat> psd_duals;      // per PSD constraint, Hermitian
  std::vector<double> nonneg_duals;
  std::vector<double> eq_duals;     // per scalar equality
  std::vector<CMat> heq_duals;      // per Hermitian equality, Hermitian multiplier
  ConeSolution raw;

  double value(const SExpr& e) const;
  CMat value(const HExpr& e) const;
};

class Model {
 public:
  int add_scalar();
  SExpr scalar_var();
  // Fresh Hermitian matrix variable.
  HExpr hermitian(int d, bool diagonal_only = false, bool real_only = false);
  // Fresh complex (not necessarily Hermitian) d1 x d2 matrix, returned as the
  // off-diagonal block used by block2: the expression [[0, X],[X^dagger, 0]] in (d1+d2) dims.
  HExpr offdiag_block(int d1, int d2, bool real_only = false);

  int psd(const HExpr& e);
  int nonneg(const SExpr& e);
  int equal(const SExpr& e);
  int equal(const HExpr& e);
  void minimize(const SExpr& objective);

  int num_vars() const { return nvars_; }
  ConeProblem compile() const;
  ModelSolution solve(const ConeOptions& opt = {}) const;

 private:
  struct PsdCon {
    HExpr expr;
    ConeKind kind;
  };
  int nvars_ = 0;
  std::vector<PsdCon> psd_;
  std::vector<SExpr> nonneg_;
  std::vector<SExpr> eq_;
  std::vector<HExpr> heq_;
  SExpr objective_;

  mutable std::vector<int> heq_row_start_;
  mutable std::vector<std::vector<CMat>> heq_basis_;
};

ConeKind classify(const HExpr& e);

// Bottom-left identity W with Re tr(W [[0,Y],[Y^dagger,0]]) = Re tr Y.
CMat fidelity_functional(int k);

struct Compressed {
  CMat iso;   // n x r, orthonormal columns spanning the support
  CMat diag;  // r x r eigenvalues on the support
};
Compressed compress(const CMat& target, const Tolerances& tol = Tolerances::defaults());

// Adds F(hat, target) >= f for a fixed target (generalized fidelity, padded by one
// dimension when the target is subnormalized).
void add_fidelity(Model& m, const HExpr& hat, const CMat& target, double f,
                  const Tolerances& tol = Tolerances::defaults());

}  // namespace ssqt::sdp
