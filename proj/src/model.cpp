#include "ssqt/model.hpp"

#include <cmath>
#include <stdexcept>

namespace ssqt::sdp {

SExpr& SExpr::operator+=(const SExpr& o) {
  constant += o.constant;
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

SExpr& SExpr::operator-=(const SExpr& o) {
  constant -= o.constant;
  for (const auto& [v, c] : o.terms) terms.emplace_back(v, -c);
  return *this;
}

SExpr& SExpr::operator*=(double a) {
  constant *= a;
  for (auto& t : terms) t.second *= a;
  return *this;
}

SExpr operator+(SExpr a, const SExpr& b) { return a += b; }
SExpr operator-(SExpr a, const SExpr& b) { return a -= b; }
SExpr operator*(double a, SExpr e) { return e *= a; }
SExpr operator-(SExpr e) { return e *= -1.0; }

static void check_same_dim(const HExpr& a, const HExpr& b) {
  if (a.constant.rows() != b.constant.rows()) throw std::invalid_argument("HExpr dimension mismatch");
}

HExpr& HExpr::operator+=(const HExpr& o) {
  check_same_dim(*this, o);
  constant += o.constant;
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

HExpr& HExpr::operator-=(const HExpr& o) {
  check_same_dim(*this, o);
  constant -= o.constant;
  for (const auto& [v, m] : o.terms) terms.emplace_back(v, -m);
  return *this;
}

HExpr& HExpr::operator*=(double a) {
  constant *= a;
  for (auto& t : terms) t.second *= a;
  return *this;
}

HExpr operator+(HExpr a, const HExpr& b) { return a += b; }
HExpr operator-(HExpr a, const HExpr& b) { return a -= b; }
HExpr operator*(double a, HExpr e) { return e *= a; }
HExpr operator-(HExpr e) { return e *= -1.0; }

HExpr operator*(const SExpr& s, const CMat& m) {
  HExpr e(m * s.constant);
  for (const auto& [v, c] : s.terms) e.terms.emplace_back(v, m * c);
  return e;
}

HExpr map(const HExpr& e, const std::function<CMat(const CMat&)>& f) {
  HExpr out(f(e.constant));
  out.terms.reserve(e.terms.size());
  for (const auto& [v, m] : e.terms) out.terms.emplace_back(v, f(m));
  return out;
}

HExpr ptrace(const HExpr& e, const Dims& dims, const std::vector<int>& traced) {
  return map(e, [&](const CMat& m) { return ssqt::ptrace(m, dims, traced); });
}

HExpr congruence(const CMat& left, const HExpr& e) {
  return map(e, [&](const CMat& m) { return CMat(left * m * left.adjoint()); });
}

HExpr kron(const CMat& a, const HExpr& e) {
  return map(e, [&](const CMat& m) { return ssqt::kron(a, m); });
}

HExpr kron(const HExpr& e, const CMat& a) {
  return map(e, [&](const CMat& m) { return ssqt::kron(m, a); });
}

SExpr trace(const HExpr& e) {
  SExpr s(e.constant.trace().real());
  for (const auto& [v, m] : e.terms) s.terms.emplace_back(v, m.trace().real());
  return s;
}

SExpr inner(const CMat& w, const HExpr& e) {
  auto ip = [&](const CMat& m) { return (w.cwiseProduct(m.transpose())).sum().real(); };
  SExpr s(ip(e.constant));
  for (const auto& [v, m] : e.terms) s.terms.emplace_back(v, ip(m));
  return s;
}

HExpr block2(const HExpr& tl, const HExpr& off, const HExpr& br) {
  const int d1 = tl.dim(), d2 = br.dim();
  if (off.dim() != d1 + d2) throw std::invalid_argument("block2: off-diagonal part has wrong dimension");
  auto embed_tl = [&](const CMat& m) {
    CMat o = CMat::Zero(d1 + d2, d1 + d2);
    o.topLeftCorner(d1, d1) = m;
    return o;
  };
  auto embed_br = [&](const CMat& m) {
    CMat o = CMat::Zero(d1 + d2, d1 + d2);
    o.bottomRightCorner(d2, d2) = m;
    return o;
  };
  HExpr out = map(tl, embed_tl);
  out += map(br, embed_br);
  out += off;
  return out;
}

std::vector<CMat> hermitian_basis(int d, bool diagonal_only, bool real_only) {
  std::vector<CMat> out;
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) out.push_back(basis_op(d, i, i));
  if (diagonal_only) return out;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      CMat m = CMat::Zero(d, d);
      m(i, j) = r;
      m(j, i) = r;
      out.push_back(m);
    }
  if (real_only) return out;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      CMat m = CMat::Zero(d, d);
      m(i, j) = Cplx(0, r);
      m(j, i) = Cplx(0, -r);
      out.push_back(m);
    }
  return out;
}

int Model::add_scalar() { return nvars_++; }

SExpr Model::scalar_var() {
  SExpr s;
  s.terms.emplace_back(add_scalar(), 1.0);
  return s;
}

HExpr Model::hermitian(int d, bool diagonal_only, bool real_only) {
  HExpr e(CMat::Zero(d, d));
  for (auto& b : hermitian_basis(d, diagonal_only, real_only)) e.terms.emplace_back(add_scalar(), b);
  return e;
}

HExpr Model::offdiag_block(int d1, int d2, bool real_only) {
  const int n = d1 + d2;
  HExpr e(CMat::Zero(n, n));
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j) {
      CMat m = CMat::Zero(n, n);
      m(i, d1 + j) = 1.0;
      m(d1 + j, i) = 1.0;
      e.terms.emplace_back(add_scalar(), m);
      if (real_only) continue;
      CMat a = CMat::Zero(n, n);
      a(i, d1 + j) = Cplx(0, 1);
      a(d1 + j, i) = Cplx(0, -1);
      e.terms.emplace_back(add_scalar(), a);
    }
  return e;
}

static bool is_diag(const CMat& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != Cplx(0, 0)) return false;
  return true;
}

static bool is_real(const CMat& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

ConeKind classify(const HExpr& e) {
  bool diag = is_diag(e.constant), real = e.constant.size() == 0 || is_real(e.constant);
  for (const auto& t : e.terms) {
    diag = diag && is_diag(t.second);
    real = real && is_real(t.second);
  }
  if (diag) return ConeKind::lp;
  return real ? ConeKind::real_psd : ConeKind::complex_psd;
}

int Model::psd(const HExpr& e) {
  if (e.dim() == 0) throw std::invalid_argument("psd: empty expression");
  psd_.push_back({e, classify(e)});
  return static_cast<int>(psd_.size()) - 1;
}

int Model::nonneg(const SExpr& e) {
  nonneg_.push_back(e);
  return static_cast<int>(nonneg_.size()) - 1;
}

int Model::equal(const SExpr& e) {
  eq_.push_back(e);
  return static_cast<int>(eq_.size()) - 1;
}

int Model::equal(const HExpr& e) {
  heq_.push_back(e);
  return static_cast<int>(heq_.size()) - 1;
}

void Model::minimize(const SExpr& objective) { objective_ = objective; }

namespace {

RMat embed(const CMat& m) {
  const auto k = m.rows();
  RMat o(2 * k, 2 * k);
  o.topLeftCorner(k, k) = m.real();
  o.topRightCorner(k, k) = -m.imag();
  o.bottomLeftCorner(k, k) = m.imag();
  o.bottomRightCorner(k, k) = m.real();
  return o;
}

int side(const HExpr& e, ConeKind kind) { return kind == ConeKind::complex_psd ? 2 * e.dim() : e.dim(); }

}  // namespace

ConeProblem Model::compile() const {
  ConeProblem p;
  const int n = nvars_;
  // Orthant rows: scalar nonnegativity, then diagonal PSD constraints.
  int lp = static_cast<int>(nonneg_.size());
  for (const auto& c : psd_)
    if (c.kind == ConeKind::lp) lp += c.expr.dim();
  p.dims.lp = lp;
  for (const auto& c : psd_)
    if (c.kind != ConeKind::lp) p.dims.psd.push_back(side(c.expr, c.kind));
  const Eigen::Index m = p.dims.rows();
  p.G = RMat::Zero(m, n);
  p.h = RVec::Zero(m);
  p.c = RVec::Zero(n);

  Eigen::Index row = 0;
  for (const auto& e : nonneg_) {
    p.h(row) = e.constant;
    for (const auto& [v, c] : e.terms) p.G(row, v) -= c;
    ++row;
  }
  for (const auto& c : psd_) {
    if (c.kind != ConeKind::lp) continue;
    const int k = c.expr.dim();
    p.h.segment(row, k) = c.expr.constant.diagonal().real();
    for (const auto& [v, mm] : c.expr.terms) p.G.col(v).segment(row, k) -= mm.diagonal().real();
    row += k;
  }
  for (const auto& c : psd_) {
    if (c.kind == ConeKind::lp) continue;
    const int k = side(c.expr, c.kind);
    const Eigen::Index len = static_cast<Eigen::Index>(k) * k;
    auto flat = [&](const CMat& mm) -> RMat {
      return c.kind == ConeKind::complex_psd ? embed(mm) : RMat(mm.real());
    };
    RMat h0 = flat(c.expr.constant);
    p.h.segment(row, len) = Eigen::Map<const RVec>(h0.data(), len);
    for (const auto& [v, mm] : c.expr.terms) {
      RMat g = flat(mm);
      p.G.col(v).segment(row, len) -= Eigen::Map<const RVec>(g.data(), len);
    }
    row += len;
  }

  for (const auto& [v, c] : objective_.terms) p.c(v) += c;

  // Equalities: scalar ones, then Hermitian ones expanded in an orthonormal basis.
  std::vector<RVec> rows;
  std::vector<double> rhs;
  for (const auto& e : eq_) {
    RVec r = RVec::Zero(n);
    for (const auto& [v, c] : e.terms) r(v) += c;
    rows.push_back(r);
    rhs.push_back(-e.constant);
  }
  heq_row_start_.clear();
  heq_basis_.clear();
  for (const auto& e : heq_) {
    heq_row_start_.push_back(static_cast<int>(rows.size()));
    bool real = is_real(e.constant);
    for (const auto& t : e.terms) real = real && is_real(t.second);
    auto basis = hermitian_basis(e.dim(), false, real);
    for (const auto& b : basis) {
      RVec r = RVec::Zero(n);
      for (const auto& [v, mm] : e.terms) r(v) += (b.cwiseProduct(mm.transpose())).sum().real();
      rows.push_back(r);
      rhs.push_back(-(b.cwiseProduct(e.constant.transpose())).sum().real());
    }
    heq_basis_.push_back(std::move(basis));
  }
  p.A = RMat::Zero(static_cast<Eigen::Index>(rows.size()), n);
  p.b = RVec::Zero(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    p.A.row(static_cast<Eigen::Index>(i)) = rows[i];
    p.b(static_cast<Eigen::Index>(i)) = rhs[i];
  }
  return p;
}

double ModelSolution::value(const SExpr& e) const {
  double v = e.constant;
  for (const auto& [i, c] : e.terms) v += c * x(i);
  return v;
}

CMat ModelSolution::value(const HExpr& e) const {
  CMat v = e.constant;
  for (const auto& [i, m] : e.terms) v += m * x(i);
  return v;
}

ModelSolution Model::solve(const ConeOptions& opt) const {
  ConeProblem p = compile();
  ModelSolution out;
  out.raw = solve_cone(p, opt);
  const ConeSolution& s = out.raw;
  out.status = s.status;
  out.iters = s.iters;
  out.gap = s.gap;
  out.pres = s.pres;
  out.dres = s.dres;
  out.primal = s.pcost + objective_.constant;
  out.dual = s.dcost + objective_.constant;
  out.x = s.x.size() ? s.x : RVec::Zero(nvars_);

  const RVec z = s.z.size() ? s.z : RVec::Zero(p.dims.rows());
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < nonneg_.size(); ++i) out.nonneg_duals.push_back(z(row++));
  out.psd_duals.resize(psd_.size());
  for (std::size_t i = 0; i < psd_.size(); ++i) {
    if (psd_[i].kind != ConeKind::lp) continue;
    const int k = psd_[i].expr.dim();
    out.psd_duals[i] = CMat(z.segment(row, k).asDiagonal());
    row += k;
  }
  for (std::size_t i = 0; i < psd_.size(); ++i) {
    if (psd_[i].kind == ConeKind::lp) continue;
    const int k = side(psd_[i].expr, psd_[i].kind);
    RMat zz = Eigen::Map<const RMat>(z.data() + row, k, k);
    zz = 0.5 * (zz + zz.transpose());
    if (psd_[i].kind == ConeKind::complex_psd) {
      const int d = k / 2;
      RMat re = zz.topLeftCorner(d, d) + zz.bottomRightCorner(d, d);
      RMat im = zz.bottomLeftCorner(d, d) - zz.topRightCorner(d, d);
      CMat y(d, d);
      y.real() = re;
      y.imag() = im;
      out.psd_duals[i] = herm(y);
    } else {
      out.psd_duals[i] = zz.cast<Cplx>();
    }
    row += static_cast<Eigen::Index>(k) * k;
  }

  const RVec y = s.y.size() ? s.y : RVec::Zero(p.A.rows());
  for (std::size_t i = 0; i < eq_.size(); ++i) out.eq_duals.push_back(y(static_cast<Eigen::Index>(i)));
  for (std::size_t i = 0; i < heq_.size(); ++i) {
    CMat w = CMat::Zero(heq_[i].dim(), heq_[i].dim());
    for (std::size_t q = 0; q < heq_basis_[i].size(); ++q)
      w += heq_basis_[i][q] * y(heq_row_start_[i] + static_cast<Eigen::Index>(q));
    out.heq_duals.push_back(w);
  }
  return out;
}

// Bottom-left identity W with Re tr(W [[0,Y],[Y^dagger,0]]) = Re tr Y.
CMat fidelity_functional(int k) {
  CMat w = CMat::Zero(2 * k, 2 * k);
  w.bottomLeftCorner(k, k) = CMat::Identity(k, k);
  return w;
}

Compressed compress(const CMat& target, const Tolerances& tol) {
  Eigh e = eigh(target);
  RVec lam = cut_small(e.values, tol.rank_rel_tol);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (lam(i) > 0.0) keep.push_back(i);
  Compressed c;
  c.iso = CMat(target.rows(), static_cast<Eigen::Index>(keep.size()));
  c.diag = CMat::Zero(c.iso.cols(), c.iso.cols());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    c.iso.col(static_cast<Eigen::Index>(k)) = e.vectors.col(keep[k]);
    c.diag(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = lam(keep[k]);
  }
  return c;
}

// F(hat, target) = F(V^dagger hat V, D) for target = V D V^dagger restricted to its support,
// which keeps the fidelity block strictly feasible for rank-deficient targets.
void add_fidelity(Model& m, const HExpr& hat, const CMat& target, double f, const Tolerances& tol) {
  const int n = hat.dim();
  const double tt = target.trace().real();
  HExpr a = hat;
  CMat b = target;
  if (tt < 1.0 - 1e-12) {
    a = map(hat, [n](const CMat& x) {
      CMat o = CMat::Zero(n + 1, n + 1);
      o.topLeftCorner(n, n) = x;
      o(n, n) = -x.trace().real();
      return o;
    });
    a.constant(n, n) += 1.0;
    b = CMat::Zero(n + 1, n + 1);
    b.topLeftCorner(n, n) = target;
    b(n, n) = 1.0 - tt;
  }
  Compressed c = compress(b, tol);
  const int k = static_cast<int>(c.iso.cols());
  HExpr y = m.offdiag_block(k, k);
  m.psd(block2(congruence(c.iso.adjoint(), a), y, HExpr(c.diag)));
  m.nonneg(inner(fidelity_functional(k), y) - SExpr(f));
}


}  // namespace ssqt::sdp
