#pragma once

// Completely positive maps stored by their Choi matrix with the output factor first:
//   J = sum_ij E(|i><j|) (x) |i><j|,   E(X)_ab = sum_ij J_(a,i),(b,j) X_ij.

#include <functional>
#include <vector>

#include "ssqt/linalg.hpp"

namespace ssqt {

class ChoiChannel {
 public:
  ChoiChannel() = default;
  // Throws InputError if the Choi matrix is not PSD within psd_tol (relative to its norm).
  ChoiChannel(const CMat& choi, Dims out_dims, Dims in_dims, const Tolerances& tol = Tolerances::defaults());

  const HermitianOperator& choi() const { return choi_; }
  const CMat& mat() const { return choi_.mat(); }
  const Dims& in_dims() const { return in_; }
  const Dims& out_dims() const { return out_; }
  int din() const { return dims_product(in_); }
  int dout() const { return dims_product(out_); }

  // ||tr_out J - 1_in||_inf
  double tp_defect() const;
  // lambda_max(tr_out J) - 1
  double tni_excess() const;
  double cp_defect() const;  // max(0, -lambda_min(J))
  bool is_tp(const Tolerances& tol = Tolerances::defaults()) const;
  bool is_tni(const Tolerances& tol = Tolerances::defaults()) const;

  CMat apply(const CMat& x) const;
  // Adjoint map: E^dagger(Y)_ij = sum_ab conj(J_(a,i),(b,j)) Y_ab.
  CMat adjoint(const CMat& y) const;
  // Channel of the adjoint map, out = in of this one.
  ChoiChannel adjoint_channel(const Tolerances& tol = Tolerances::defaults()) const;

 private:
  HermitianOperator choi_;
  Dims out_, in_;
};

// Choi matrix of an arbitrary linear map given on matrix units.
CMat choi_of_map(const std::function<CMat(const CMat&)>& f, int din);

ChoiChannel channel_from_map(const std::function<CMat(const CMat&)>& f, Dims out_dims, Dims in_dims,
                             const Tolerances& tol = Tolerances::defaults());
ChoiChannel choi_from_kraus(const std::vector<CMat>& kraus, Dims out_dims, Dims in_dims,
                            const Tolerances& tol = Tolerances::defaults());
// Minimal Kraus decomposition (count = Choi rank).
std::vector<CMat> kraus_from_choi(const ChoiChannel& ch, const Tolerances& tol = Tolerances::defaults());

ChoiChannel identity_channel(Dims dims);
ChoiChannel unitary_channel(const CMat& u, Dims dims = {});
// X -> tr(X) * state.
ChoiChannel replacement_channel(const CMat& state, Dims out_dims, Dims in_dims);
ChoiChannel partial_trace_channel(const Dims& dims, const std::vector<int>& traced);
ChoiChannel scaled(const ChoiChannel& ch, double factor);

// second after first.
ChoiChannel compose(const ChoiChannel& second, const ChoiChannel& first,
                    const Tolerances& tol = Tolerances::defaults());
ChoiChannel tensor(const ChoiChannel& a, const ChoiChannel& b);

// (E (x) id_R)(|sigma><sigma|) on X' (x) R with |sigma> = (sigma^{1/2} (x) 1)|Phi>,
// i.e. (1 (x) sigma^{T/2}) J (1 (x) sigma^{T/2}); its R marginal is sigma^T.
CMat process_matrix(const ChoiChannel& e, const CMat& sigma, const Tolerances& tol = Tolerances::defaults());

double choi_distance(const ChoiChannel& a, const ChoiChannel& b);

}  // namespace ssqt
