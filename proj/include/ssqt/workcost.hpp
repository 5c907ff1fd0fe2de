#pragma once

// Work cost of logical processes: process matrices, Stinespring dilations, the
// one-shot cost of a channel on a given input, classical gates, erasure with a
// quantum memory and quantum measurements. Work is reported in bits; multiply by
// kT ln 2 for energy units.

#include <string>
#include <vector>

#include "ssqt/channel.hpp"
#include "ssqt/linalg.hpp"

namespace ssqt {

// rho_X'R = (E (x) id)(|sigma><sigma|), factor order X', R. The reference R carries sigma^T.
class ProcessMatrix {
 public:
  ProcessMatrix() = default;
  ProcessMatrix(SubnormalizedState rho, Dims out_dims, Dims in_dims);

  const SubnormalizedState& rho() const { return rho_; }
  const Dims& out_dims() const { return out_; }
  const Dims& in_dims() const { return in_; }
  int dout() const { return dims_product(out_); }
  int din() const { return dims_product(in_); }
  // Input state sigma_X = (rho_R)^T.
  CMat sigma() const;

 private:
  SubnormalizedState rho_;
  Dims out_, in_;
};

ProcessMatrix process_matrix(const ChoiChannel& e, const SubnormalizedState& sigma,
                             const Tolerances& tol = Tolerances::defaults());

// Agrees with the original channel on supp(sigma) and, outside of it, discards the
// input and prepares the maximally mixed state, so the result is trace preserving.
ChoiChannel recover_channel(const ProcessMatrix& pm, const Tolerances& tol = Tolerances::defaults());

// V : X -> X' (x) E with tr_E(V x V^dagger) = E(x), E of dimension Choi rank.
struct Stinespring {
  CMat v;
  int env_dim = 1;
};
Stinespring stinespring(const ChoiChannel& e, const Tolerances& tol = Tolerances::defaults());

enum class WorkMethod { exact, smooth, classical, coherent_sdp };
std::string to_string(WorkMethod m);

struct WorkReport {
  double bits = 0.0;
  double kt_ln2_units = 0.0;  // same number, in units of kT ln 2
  double epsilon = 0.0;
  double epsilon_tilde = 0.0;  // smoothing actually applied to the entropy (sqrt(2 eps) for channels)
  WorkMethod method = WorkMethod::exact;
  double cross_check = 0.0;  // second evaluation of the same quantity by an independent formula
  std::string note;
};

// eps = 0: log2 ||E(Pi^sigma)||_inf, cross-checked against H_max,0(E|X') of the Stinespring
// purification. eps > 0: H_max^{eps~}(E|X') = -H_min^{eps~}(E|R) with eps~ = sqrt(2 eps).
WorkReport work_cost(const ChoiChannel& e, const SubnormalizedState& sigma, double epsilon,
                     const Tolerances& tol = Tolerances::defaults());

// -(coherent relative entropy) of the process matrix with trivial Gamma operators.
WorkReport work_cost_coherent(const ChoiChannel& e, const SubnormalizedState& sigma,
                              const Tolerances& tol = Tolerances::defaults());

// p_cond(x', x) = p(x'|x). Only inputs with support[x] contribute.
WorkReport work_cost_classical(const RMat& p_cond, const std::vector<bool>& support);

// Deterministic gate tables on two input bits (x = 2 a + b) with one output bit:
// and, or, xor, nand, nor. Throws InputError for an unknown name.
RMat gate_table(const std::string& name);
ChoiChannel classical_channel(const RMat& p_cond);

// |0><0|_S (x) tr_S(sigma), factor order S, M.
ChoiChannel erasure_map(int ds, int dm);

// eps = 0: H_max,0(S|M), cross-checked against the work cost of the erasure map.
// eps > 0: smooth H_max^eps(S|M).
WorkReport erasure_with_memory(const SubnormalizedState& sigma_sm, double epsilon,
                               const Tolerances& tol = Tolerances::defaults());

struct MeasurementInstrument {
  std::vector<ChoiChannel> collapse;  // E^(k) : S -> S'
  std::vector<std::string> labels;

  // Throws InputError unless the maps share dimensions, are CP and sum to a trace-preserving map.
  void validate(const Tolerances& tol = Tolerances::defaults()) const;
  std::vector<CMat> povm() const;  // Q_k = E^(k)dagger(1)
  int outcomes() const { return static_cast<int>(collapse.size()); }

  static MeasurementInstrument projective(const std::vector<CMat>& projectors);
  // Q_k = p_k 1 with the post-measurement state left untouched.
  static MeasurementInstrument trivial(const RVec& probabilities, int d);
};

struct MeasurementReport {
  WorkReport measurement;       // H_max^eps(E|CS')
  WorkReport reset_given_sout;  // H_max^eps(C|S')
  WorkReport reset_given_ref;   // H_max^eps(C|R)
  bool subunital = false;
  bool single_kraus = false;
  // Single Kraus operator per outcome: |W_meas + W_reset|R - (H_max^eps(C|R) - H_min^eps(C|R))|.
  double identity_defect = 0.0;
  Ket state;  // |rho>_ECS'R
};

MeasurementReport measurement_analysis(const MeasurementInstrument& inst, const SubnormalizedState& sigma,
                                       double epsilon, const Tolerances& tol = Tolerances::defaults());

}  // namespace ssqt
