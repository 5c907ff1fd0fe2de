#include "ssqt/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssqt/kernels.hpp"

namespace ssqt {

static Dims concat(const Dims& a, const Dims& b) {
  Dims out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

ChoiChannel::ChoiChannel(const CMat& choi, Dims out_dims, Dims in_dims, const Tolerances& tol)
    : out_(std::move(out_dims)), in_(std::move(in_dims)) {
  if (out_.empty() || in_.empty()) throw InputError("channel: empty input or output dims");
  if (choi.rows() != static_cast<Eigen::Index>(dout()) * din())
    throw InputError("channel: Choi side does not match dims");
  choi_ = HermitianOperator(choi, concat(out_, in_));
  double scale = std::max(1.0, norm(choi_.mat(), NormKind::infinity));
  if (choi_.herm_defect() > tol.herm_tol * scale) {
    std::ostringstream os;
    os << "channel: Choi matrix not Hermitian, defect " << choi_.herm_defect();
    throw InputError(os.str());
  }
  double lmin = min_eig(choi_.mat());
  if (lmin < -tol.psd_tol * scale) {
    std::ostringstream os;
    os << "channel: Choi matrix not PSD, minimum eigenvalue " << lmin;
    throw InputError(os.str());
  }
}

double ChoiChannel::tp_defect() const {
  CMat t = ptrace(mat(), {dout(), din()}, {0});
  return (t - CMat::Identity(din(), din())).cwiseAbs().maxCoeff();
}

double ChoiChannel::tni_excess() const { return max_eig(ptrace(mat(), {dout(), din()}, {0})) - 1.0; }

double ChoiChannel::cp_defect() const { return std::max(0.0, -min_eig(mat())); }

bool ChoiChannel::is_tp(const Tolerances& tol) const { return tp_defect() <= tol.trace_tol; }

bool ChoiChannel::is_tni(const Tolerances& tol) const { return tni_excess() <= tol.psd_tol; }

CMat ChoiChannel::apply(const CMat& x) const {
  if (x.rows() != din() || x.cols() != din()) throw InputError("channel: input dimension mismatch");
  return kernels::parallel::apply_choi(mat(), dout(), din(), x);
}

CMat ChoiChannel::adjoint(const CMat& y) const {
  if (y.rows() != dout() || y.cols() != dout()) throw InputError("channel adjoint: dimension mismatch");
  const int di = din(), dout_n = dout();
  CMat out = CMat::Zero(di, di);
  for (int a = 0; a < dout_n; ++a)
    for (int b = 0; b < dout_n; ++b) {
      if (y(a, b) == Cplx(0, 0)) continue;
      out += mat().block(static_cast<Eigen::Index>(a) * di, static_cast<Eigen::Index>(b) * di, di, di).conjugate() *
             y(a, b);
    }
  return out;
}

ChoiChannel ChoiChannel::adjoint_channel(const Tolerances& tol) const {
  return channel_from_map([this](const CMat& y) { return adjoint(y); }, in_, out_, tol);
}

CMat choi_of_map(const std::function<CMat(const CMat&)>& f, int din) {
  CMat j;
  for (int i = 0; i < din; ++i)
    for (int k = 0; k < din; ++k) {
      CMat img = f(basis_op(din, i, k));
      if (j.size() == 0) j = CMat::Zero(img.rows() * din, img.rows() * din);
      j += kron(img, basis_op(din, i, k));
    }
  return j;
}

ChoiChannel channel_from_map(const std::function<CMat(const CMat&)>& f, Dims out_dims, Dims in_dims,
                             const Tolerances& tol) {
  CMat choi = choi_of_map(f, dims_product(in_dims));
  return ChoiChannel(choi, std::move(out_dims), std::move(in_dims), tol);
}

ChoiChannel choi_from_kraus(const std::vector<CMat>& kraus, Dims out_dims, Dims in_dims, const Tolerances& tol) {
  const int din = dims_product(in_dims), dout = dims_product(out_dims);
  CMat j = CMat::Zero(static_cast<Eigen::Index>(dout) * din, static_cast<Eigen::Index>(dout) * din);
  // |K>> = sum_i K|i> (x) |i>
  for (const auto& k : kraus) {
    if (k.rows() != dout || k.cols() != din) throw InputError("choi_from_kraus: Kraus operator has wrong shape");
    CVec v(static_cast<Eigen::Index>(dout) * din);
    for (int a = 0; a < dout; ++a)
      for (int i = 0; i < din; ++i) v(static_cast<Eigen::Index>(a) * din + i) = k(a, i);
    j += v * v.adjoint();
  }
  return ChoiChannel(j, std::move(out_dims), std::move(in_dims), tol);
}

std::vector<CMat> kraus_from_choi(const ChoiChannel& ch, const Tolerances& tol) {
  Eigh e = eigh(ch.mat());
  RVec lam = cut_small(e.values, tol.rank_rel_tol);
  const int din = ch.din(), dout = ch.dout();
  std::vector<CMat> out;
  for (Eigen::Index q = lam.size() - 1; q >= 0; --q) {
    if (lam(q) <= 0.0) continue;
    CMat k(dout, din);
    for (int a = 0; a < dout; ++a)
      for (int i = 0; i < din; ++i) k(a, i) = std::sqrt(lam(q)) * e.vectors(static_cast<Eigen::Index>(a) * din + i, q);
    out.push_back(k);
  }
  return out;
}

ChoiChannel identity_channel(Dims dims) {
  const int d = dims_product(dims);
  return choi_from_kraus({CMat::Identity(d, d)}, dims, dims);
}

ChoiChannel unitary_channel(const CMat& u, Dims dims) {
  if (dims.empty()) dims = {static_cast<int>(u.rows())};
  return choi_from_kraus({u}, dims, dims);
}

ChoiChannel replacement_channel(const CMat& state, Dims out_dims, Dims in_dims) {
  const int din = dims_product(in_dims);
  CMat choi = kron(state, CMat::Identity(din, din));
  return ChoiChannel(choi, std::move(out_dims), std::move(in_dims));
}

ChoiChannel partial_trace_channel(const Dims& dims, const std::vector<int>& traced) {
  Dims kept;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k)
    if (std::find(traced.begin(), traced.end(), k) == traced.end()) kept.push_back(dims[k]);
  if (kept.empty()) kept = {1};
  return channel_from_map([&](const CMat& x) { return ptrace(x, dims, traced); }, kept, dims);
}

ChoiChannel scaled(const ChoiChannel& ch, double factor) {
  if (factor < 0.0) throw InputError("scaled: negative factor breaks complete positivity");
  return ChoiChannel(factor * ch.mat(), ch.out_dims(), ch.in_dims());
}

ChoiChannel compose(const ChoiChannel& second, const ChoiChannel& first, const Tolerances& tol) {
  if (second.din() != first.dout()) throw InputError("compose: intermediate dimensions differ");
  return channel_from_map([&](const CMat& x) { return second.apply(first.apply(x)); }, second.out_dims(),
                          first.in_dims(), tol);
}

ChoiChannel tensor(const ChoiChannel& a, const ChoiChannel& b) {
  CMat j = kron(a.mat(), b.mat());
  j = permute_factors(j, {a.dout(), a.din(), b.dout(), b.din()}, {0, 2, 1, 3});
  return ChoiChannel(j, concat(a.out_dims(), b.out_dims()), concat(a.in_dims(), b.in_dims()));
}

CMat process_matrix(const ChoiChannel& e, const CMat& sigma, const Tolerances& tol) {
  if (sigma.rows() != e.din() || sigma.cols() != e.din()) throw InputError("process_matrix: input state dimension mismatch");
  CMat half = mfun(sigma.transpose(), MatFn::sqrt, tol);
  CMat lift = kron(CMat::Identity(e.dout(), e.dout()), half);
  return lift * e.mat() * lift;
}

double choi_distance(const ChoiChannel& a, const ChoiChannel& b) {
  if (a.mat().rows() != b.mat().rows()) throw InputError("choi_distance: dimension mismatch");
  return (a.mat() - b.mat()).cwiseAbs().maxCoeff();
}

}  // namespace ssqt
