#include "ssqt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "ssqt/kernels.hpp"

namespace ssqt {

Tolerances Tolerances::defaults() {
  Tolerances t;
  if (const char* env = std::getenv("SSQT_SDP_GAP")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0.0 && std::isfinite(v)) t.sdp_gap = v;
  }
  return t;
}

void Tolerances::validate() const {
  for (double v : {herm_tol, psd_tol, trace_tol, rank_rel_tol, sdp_gap})
    if (!(v > 0.0)) throw InputError("tolerances must be strictly positive");
}

int dims_product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
}

static Dims fix_dims(Dims dims, Eigen::Index side) {
  if (dims.empty()) return {static_cast<int>(side)};
  if (dims_product(dims) != side) {
    std::ostringstream os;
    os << "dims product " << dims_product(dims) << " does not match side " << side;
    throw InputError(os.str());
  }
  return dims;
}

HermitianOperator::HermitianOperator(const CMat& m, Dims dims) {
  if (m.rows() != m.cols()) throw InputError("Hermitian operator must be square");
  if (!m.allFinite()) throw InputError("matrix has non-finite entries");
  dims_ = fix_dims(std::move(dims), m.rows());
  CMat d = m - m.adjoint();
  defect_ = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::checked(const CMat& m, Dims dims, const Tolerances& tol) {
  HermitianOperator h(m, std::move(dims));
  if (h.defect_ > tol.herm_tol) {
    std::ostringstream os;
    os << "Hermiticity defect " << h.defect_ << " exceeds herm_tol " << tol.herm_tol;
    throw InputError(os.str());
  }
  return h;
}

SubnormalizedState::SubnormalizedState(HermitianOperator op, const Tolerances& tol) : op_(std::move(op)) {
  double lmin = min_eig(op_.mat());
  if (lmin < -tol.psd_tol) {
    std::ostringstream os;
    os << "state not PSD: minimum eigenvalue " << lmin;
    throw InputError(os.str());
  }
  trace_ = op_.trace();
  if (trace_ > 1.0 + tol.trace_tol) {
    std::ostringstream os;
    os << "state trace " << trace_ << " exceeds 1";
    throw InputError(os.str());
  }
}

SubnormalizedState::SubnormalizedState(const CMat& m, Dims dims, const Tolerances& tol)
    : SubnormalizedState(HermitianOperator(m, std::move(dims)), tol) {}

bool SubnormalizedState::is_normalized(const Tolerances& tol) const {
  return std::abs(trace_ - 1.0) <= tol.trace_tol;
}

CMat herm(const CMat& m) { return 0.5 * (m + m.adjoint()); }

Eigh eigh(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(herm(m));
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eig(const CMat& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<CMat>(herm(m), Eigen::EigenvaluesOnly).eigenvalues()(0);
}

double max_eig(const CMat& m) {
  if (m.size() == 0) return 0.0;
  auto ev = Eigen::SelfAdjointEigenSolver<CMat>(herm(m), Eigen::EigenvaluesOnly).eigenvalues();
  return ev(ev.size() - 1);
}

RVec cut_small(const RVec& values, double rank_rel_tol) {
  RVec out = values;
  double scale = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (std::abs(out(i)) <= rank_rel_tol * scale) out(i) = 0.0;
  return out;
}

CMat basis_op(int d, int i, int j) {
  CMat m = CMat::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMat kron_all(const std::vector<CMat>& factors) {
  CMat out = CMat::Ones(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

HermitianOperator tensor_product(const HermitianOperator& a, const HermitianOperator& b) {
  Dims d = a.dims();
  d.insert(d.end(), b.dims().begin(), b.dims().end());
  return HermitianOperator(kron(a.mat(), b.mat()), d);
}

CMat ptrace(const CMat& m, const Dims& dims, const std::vector<int>& traced) {
  if (dims_product(dims) != m.rows()) throw InputError("ptrace: dims do not match matrix");
  auto idx = kernels::trace_index(dims, traced);
  return kernels::parallel::partial_trace(m, idx);
}

static Dims kept_dims(const Dims& dims, const std::vector<int>& traced) {
  Dims out;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k)
    if (std::find(traced.begin(), traced.end(), k) == traced.end()) out.push_back(dims[k]);
  if (out.empty()) out.push_back(1);
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& a, const std::vector<int>& traced) {
  for (int t : traced)
    if (t < 0 || t >= static_cast<int>(a.dims().size())) throw InputError("partial_trace: index out of range");
  return HermitianOperator(ptrace(a.mat(), a.dims(), traced), kept_dims(a.dims(), traced));
}

CMat ptranspose(const CMat& m, const Dims& dims, int factor) {
  if (factor < 0 || factor >= static_cast<int>(dims.size())) throw InputError("ptranspose: index out of range");
  const int n = static_cast<int>(m.rows());
  long inner = 1;
  for (std::size_t k = factor + 1; k < dims.size(); ++k) inner *= dims[k];
  const int df = dims[factor];
  CMat out(n, n);
  for (int r = 0; r < n; ++r) {
    int rf = static_cast<int>((r / inner) % df);
    for (int c = 0; c < n; ++c) {
      int cf = static_cast<int>((c / inner) % df);
      int r2 = r + static_cast<int>((cf - rf) * inner);
      int c2 = c + static_cast<int>((rf - cf) * inner);
      out(r2, c2) = m(r, c);
    }
  }
  return out;
}

HermitianOperator partial_transpose(const HermitianOperator& a, int factor, int target_dim) {
  if (factor < 0 || factor >= static_cast<int>(a.dims().size())) throw InputError("partial_transpose: bad factor");
  if (a.dims()[factor] != target_dim) throw InputError("partial_transpose: target dimension mismatch");
  return HermitianOperator(ptranspose(a.mat(), a.dims(), factor), a.dims());
}

CMat permute_factors(const CMat& m, const Dims& dims, const std::vector<int>& perm) {
  if (perm.size() != dims.size() || dims_product(dims) != m.rows()) throw InputError("permute_factors: bad shape");
  auto off = kernels::permutation_index(dims, perm);
  const auto n = static_cast<Eigen::Index>(off.size());
  CMat out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = m(off[i], off[j]);
  return out;
}

CVec permute_factors(const CVec& v, const Dims& dims, const std::vector<int>& perm) {
  if (perm.size() != dims.size() || dims_product(dims) != v.size()) throw InputError("permute_factors: bad shape");
  auto off = kernels::permutation_index(dims, perm);
  CVec out(v.size());
  for (std::size_t i = 0; i < off.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(off[i]);
  return out;
}

CMat reduced_state(const Ket& psi, const std::vector<int>& traced) {
  const int nf = static_cast<int>(psi.dims.size());
  if (dims_product(psi.dims) != psi.amps.size()) throw InputError("reduced_state: dims do not match ket");
  std::vector<int> perm;
  long dt = 1;
  for (int k = 0; k < nf; ++k)
    if (std::find(traced.begin(), traced.end(), k) == traced.end()) perm.push_back(k);
  for (int t : traced) {
    if (t < 0 || t >= nf || std::count(traced.begin(), traced.end(), t) > 1)
      throw InputError("reduced_state: bad traced index");
    perm.push_back(t);
    dt *= psi.dims[t];
  }
  CVec v = permute_factors(psi.amps, psi.dims, perm);
  const Eigen::Index dk = v.size() / dt;
  Eigen::Map<const CMat> a(v.data(), dt, dk);  // a(t, k) = v[k dt + t]
  return herm(a.transpose() * a.conjugate());
}

CMat mfun(const CMat& m, MatFn kind, const Tolerances& tol) {
  Eigh e = eigh(m);
  RVec lam = cut_small(e.values, tol.rank_rel_tol);
  RVec f(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    double x = lam(i);
    switch (kind) {
      case MatFn::sqrt:
      case MatFn::inv_sqrt:
      case MatFn::log2:
        if (x < -tol.psd_tol) {
          std::ostringstream os;
          os << "matrix function needs PSD input, eigenvalue " << x;
          throw InputError(os.str());
        }
        if (x <= 0.0) {
          f(i) = 0.0;
        } else if (kind == MatFn::sqrt) {
          f(i) = std::sqrt(x);
        } else if (kind == MatFn::inv_sqrt) {
          f(i) = 1.0 / std::sqrt(x);
        } else {
          f(i) = std::log2(x);
        }
        break;
      case MatFn::pinv:
        f(i) = x == 0.0 ? 0.0 : 1.0 / x;
        break;
      case MatFn::abs:
        f(i) = std::abs(x);
        break;
    }
  }
  return e.vectors * f.asDiagonal() * e.vectors.adjoint();
}

HermitianOperator matrix_function(const HermitianOperator& a, MatFn kind, const Tolerances& tol) {
  return HermitianOperator(mfun(a.mat(), kind, tol), a.dims());
}

Support support(const CMat& m, const Tolerances& tol) {
  Eigh e = eigh(m);
  double top = e.values.size() ? e.values.cwiseAbs().maxCoeff() : 0.0;
  if (e.values.size() && e.values(0) < -tol.psd_tol * std::max(1.0, top)) {
    std::ostringstream os;
    os << "support projector needs PSD input, eigenvalue " << e.values(0);
    throw InputError(os.str());
  }
  Support s;
  s.projector = CMat::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (e.values(i) > tol.rank_rel_tol * top) {
      s.projector += e.vectors.col(i) * e.vectors.col(i).adjoint();
      ++s.rank;
    }
  return s;
}

std::pair<HermitianOperator, int> support_projector(const HermitianOperator& a, const Tolerances& tol) {
  Support s = support(a.mat(), tol);
  return {HermitianOperator(s.projector, a.dims()), s.rank};
}

Ket maximally_entangled_ket(int d) {
  if (d < 1) throw InputError("maximally_entangled_ket: d must be positive");
  Ket k;
  k.amps = CVec::Zero(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) k.amps(static_cast<Eigen::Index>(i) * d + i) = 1.0;
  k.dims = {d, d};
  return k;
}

Ket purify(const SubnormalizedState& rho, const Tolerances& tol) {
  const int d = rho.dim();
  CMat root = mfun(rho.mat(), MatFn::sqrt, tol);
  Ket phi = maximally_entangled_ket(d);
  Ket out;
  out.amps = kron(root, CMat::Identity(d, d)) * phi.amps;
  out.dims = {d, d};
  return out;
}

Schmidt schmidt_decompose(const Ket& psi, const std::vector<int>& left_factors, const Tolerances& tol) {
  const Dims& dims = psi.dims.empty() ? Dims{static_cast<int>(psi.amps.size())} : psi.dims;
  if (dims_product(dims) != psi.amps.size()) throw InputError("schmidt_decompose: dims mismatch");
  std::vector<int> perm = left_factors, right;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k)
    if (std::find(left_factors.begin(), left_factors.end(), k) == left_factors.end()) right.push_back(k);
  perm.insert(perm.end(), right.begin(), right.end());
  CVec v = permute_factors(psi.amps, dims, perm);
  int dl = 1;
  for (int f : left_factors) dl *= dims[f];
  const int dr = static_cast<int>(v.size()) / dl;
  // Row-major reshape: v[i*dr + j] = M(i, j).
  CMat mm(dl, dr);
  for (int i = 0; i < dl; ++i)
    for (int j = 0; j < dr; ++j) mm(i, j) = v(static_cast<Eigen::Index>(i) * dr + j);
  Eigen::JacobiSVD<CMat> svd(mm, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RVec s = svd.singularValues();
  double top = s.size() ? s(0) : 0.0;
  int r = 0;
  while (r < s.size() && s(r) > std::sqrt(tol.rank_rel_tol) * top) ++r;
  Schmidt out;
  out.coeffs = s.head(r);
  out.left = svd.matrixU().leftCols(r);
  out.right = svd.matrixV().leftCols(r).conjugate();
  return out;
}

double norm(const CMat& m, NormKind kind) {
  if (m.size() == 0) return 0.0;
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    RVec ev = eigh(m).values;
    return kind == NormKind::trace ? ev.cwiseAbs().sum() : ev.cwiseAbs().maxCoeff();
  }
  RVec sv = Eigen::JacobiSVD<CMat>(m).singularValues();
  return kind == NormKind::trace ? sv.sum() : sv(0);
}

double operator_norm(const HermitianOperator& a, NormKind kind) { return norm(a.mat(), kind); }

double generalized_fidelity(const CMat& rho, const CMat& sigma) {
  CMat a = mfun(rho, MatFn::sqrt);
  CMat b = mfun(sigma, MatFn::sqrt);
  double f = Eigen::JacobiSVD<CMat>(a * b).singularValues().sum();
  double tr = std::max(0.0, 1.0 - rho.trace().real());
  double ts = std::max(0.0, 1.0 - sigma.trace().real());
  return f + std::sqrt(tr * ts);
}

double distance(const CMat& rho, const CMat& sigma, DistanceKind kind) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) throw InputError("distance: dimension mismatch");
  switch (kind) {
    case DistanceKind::trace:
      return 0.5 * norm(herm(rho - sigma), NormKind::trace) +
             0.5 * std::abs(rho.trace().real() - sigma.trace().real());
    case DistanceKind::fidelity:
      return std::min(1.0, generalized_fidelity(rho, sigma));
    case DistanceKind::purified: {
      double f = std::min(1.0, generalized_fidelity(rho, sigma));
      return std::sqrt(std::max(0.0, 1.0 - f * f));
    }
  }
  return 0.0;
}

double distance(const SubnormalizedState& rho, const SubnormalizedState& sigma, DistanceKind kind) {
  return distance(rho.mat(), sigma.mat(), kind);
}

HermitianOperator geometric_mean_contraction(const HermitianOperator& a, const HermitianOperator& b,
                                             const Tolerances& tol) {
  if (a.dim() != b.dim()) throw InputError("geometric_mean_contraction: dimension mismatch");
  const double scale = std::max(1.0, norm(b.mat(), NormKind::infinity));
  if (min_eig(a.mat()) < -tol.psd_tol * scale) throw InputError("geometric_mean_contraction: A not PSD");
  double gap = min_eig(b.mat() - a.mat());
  if (gap < -tol.psd_tol * scale) {
    std::ostringstream os;
    os << "geometric_mean_contraction: A is not below B (lambda_min(B - A) = " << gap << ")";
    throw InputError(os.str());
  }
  CMat bh = mfun(b.mat(), MatFn::sqrt, tol);
  CMat bih = mfun(b.mat(), MatFn::inv_sqrt, tol);
  CMat mid = mfun(herm(bh * a.mat() * bh), MatFn::sqrt, tol);
  return HermitianOperator(bih * mid * bih, a.dims());
}

}  // namespace ssqt
