#include "ssqt/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ssqt/entropy.hpp"
#include "ssqt/model.hpp"
#include "ssqt/sdp_problem.hpp"

namespace ssqt {

using sdp::HExpr;
using sdp::Model;
using sdp::ModelSolution;
using sdp::SExpr;

namespace {

double safe_log2(double x) { return x > 0.0 ? std::log2(x) : -std::numeric_limits<double>::infinity(); }

CMat clip_psd(const CMat& m) {
  Eigh e = eigh(m);
  RVec v = e.values.cwiseMax(0.0);
  return e.vectors * v.cast<Cplx>().asDiagonal() * e.vectors.adjoint();
}

double max_offdiag(const CMat& m) {
  double out = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j) out = std::max(out, std::abs(m(i, j)));
  return out;
}

// Eigenvectors split by the relative rank cutoff.
struct Split {
  CMat on;   // columns spanning the support
  RVec vals;  // matching eigenvalues
  CMat off;  // orthonormal complement
};

Split split(const CMat& m, const Tolerances& tol) {
  Eigh e = eigh(m);
  const int d = static_cast<int>(m.rows());
  const double cut = tol.rank_rel_tol * std::max(std::abs(e.values.maxCoeff()), 1e-300);
  std::vector<int> on, off;
  for (int i = d - 1; i >= 0; --i) (e.values(i) > cut ? on : off).push_back(i);
  Split s;
  s.on.resize(d, static_cast<int>(on.size()));
  s.vals.resize(static_cast<int>(on.size()));
  s.off.resize(d, static_cast<int>(off.size()));
  for (size_t k = 0; k < on.size(); ++k) {
    s.on.col(static_cast<int>(k)) = e.vectors.col(on[k]);
    s.vals(static_cast<int>(k)) = e.values(on[k]);
  }
  for (size_t k = 0; k < off.size(); ++k) s.off.col(static_cast<int>(k)) = e.vectors.col(off[k]);
  return s;
}

double inverse_norm(const CMat& gamma, const Tolerances& tol) { return 1.0 / split(gamma, tol).vals.minCoeff(); }

// Geometry shared by the unsmoothed and smooth solvers. X' is compressed to supp(Gamma_X')
// and R is rotated so that supp(rho_R) comes first. Block coordinates put X' (x) S first,
// index a*r + s, then X' (x) S-perp at d_o*r + a*q + t.
struct Geometry {
  int d_xp = 0, d_o = 0, d_r = 0, r = 0, q = 0;
  CMat q_out;      // d_xp x d_o
  CMat rot;        // d_r x d_r
  RVec lambda;     // rho_R on its support
  CMat gamma_out;  // compressed Gamma_X'
  CMat gamma_r_half;
  CMat l_base;     // block coordinates -> X'_c (x) R
  CMat rho_ss;     // rho on X'_c (x) S in block coordinates

  int ss() const { return d_o * r; }
  int perp() const { return d_o * q; }

  CMat embed(const CMat& t_c) const {
    CMat lift = kron(q_out, CMat::Identity(d_r, d_r));
    return lift * t_c * lift.adjoint();
  }
  CMat inv_half_s() const {
    return kron(CMat::Identity(d_o, d_o), lambda.cwiseSqrt().cwiseInverse().cast<Cplx>().asDiagonal().toDenseMatrix());
  }
  CMat half_s() const {
    return kron(CMat::Identity(d_o, d_o), lambda.cwiseSqrt().cast<Cplx>().asDiagonal().toDenseMatrix());
  }
  // G with Re tr(G B) picking Re of (tr_X' B)_{s,t} for B mapping S-perp block to S block.
  CMat pick(int s, int t) const {
    CMat g = CMat::Zero(perp(), ss());
    for (int a = 0; a < d_o; ++a) g(a * q + t, a * r + s) = 1.0;
    return g;
  }
};

Geometry geometry(const CoherentInstance& inst, const Tolerances& tol) {
  Geometry g;
  g.d_xp = inst.d_out();
  g.d_r = inst.d_ref();
  Split out = split(inst.gamma_xp().mat(), tol);
  g.q_out = out.on;
  g.d_o = static_cast<int>(out.on.cols());
  g.gamma_out = g.q_out.adjoint() * inst.gamma_xp().mat() * g.q_out;
  g.gamma_r_half = mfun(inst.gamma_r().mat(), MatFn::sqrt, tol);

  CMat lift = kron(g.q_out, CMat::Identity(g.d_r, g.d_r));
  CMat rho_c = lift.adjoint() * inst.rho().mat() * lift;
  Split ref = split(ptrace(rho_c, {g.d_o, g.d_r}, {0}), tol);
  g.r = static_cast<int>(ref.on.cols());
  g.q = g.d_r - g.r;
  g.lambda = ref.vals;
  g.rot.resize(g.d_r, g.d_r);
  g.rot << ref.on, ref.off;

  const int n = g.d_o * g.d_r;
  CMat perm = CMat::Zero(n, n);
  for (int a = 0; a < g.d_o; ++a) {
    for (int s = 0; s < g.r; ++s) perm(a * g.d_r + s, a * g.r + s) = 1.0;
    for (int t = 0; t < g.q; ++t) perm(a * g.d_r + g.r + t, g.ss() + a * g.q + t) = 1.0;
  }
  g.l_base = kron(CMat::Identity(g.d_o, g.d_o), g.rot) * perm;
  CMat rho_blk = g.l_base.adjoint() * rho_c * g.l_base;
  g.rho_ss = rho_blk.topLeftCorner(g.ss(), g.ss());
  return g;
}

CMat direct_sum(const CMat& a, const CMat& b) {
  CMat o = CMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  o.topLeftCorner(a.rows(), a.cols()) = a;
  o.bottomRightCorner(b.rows(), b.cols()) = b;
  return o;
}

// Scalar equalities tr_X'(lift * B) = 0 on the S / S-perp block, B the off-diagonal variable.
void pin_offblock(Model& m, const Geometry& g, const HExpr& off, int d1, const CMat& lift,
                  std::vector<int>* rows) {
  const int n = d1 + g.perp();
  for (int s = 0; s < g.r; ++s)
    for (int t = 0; t < g.q; ++t) {
      CMat w = CMat::Zero(n, n);
      w.bottomLeftCorner(g.perp(), d1) = g.pick(s, t) * lift;
      int re = m.equal(sdp::inner(w, off));
      int im = m.equal(sdp::inner(CMat(Cplx(0, -1) * w), off));
      if (rows) {
        rows->push_back(re);
        rows->push_back(im);
      }
    }
}

ChoiChannel as_channel(const CoherentInstance& inst, const CMat& t) {
  Dims out = inst.gamma_xp().dims(), in = inst.gamma_r().dims();
  return ChoiChannel(clip_psd(herm(t)), out.empty() ? Dims{inst.d_out()} : out, in.empty() ? Dims{inst.d_ref()} : in);
}

// Dual certificate from the reduced problem's multipliers.
CoherentDual reconstruct_dual(const CoherentInstance& inst, const Geometry& g, const CMat& omega_c, const CMat& x_perp,
                              const CMat& x_cross, const Tolerances& tol) {
  const int dr = g.d_r, r = g.r, q = g.q;
  CMat omega = clip_psd(omega_c);
  CMat gamma_rot = g.rot.adjoint() * inst.gamma_r().mat() * g.rot;
  CMat xq = q > 0 ? clip_psd(x_perp) : CMat(0, 0);

  // M restricted to X' (x) S-perp, before the regularizing shift.
  auto perp_part = [&](const CMat& xqq) {
    CMat out = CMat::Zero(g.perp(), g.perp());
    if (q == 0) return out;
    out = kron(omega, CMat(gamma_rot.bottomRightCorner(q, q))) + kron(CMat::Identity(g.d_o, g.d_o), xqq);
    return out;
  };
  double eta = 0.0;
  if (q > 0) {
    CMat mpp = perp_part(xq);
    double scale = std::max(1.0, mpp.cwiseAbs().maxCoeff());
    eta = std::max(0.0, -min_eig(mpp)) + 1e-10 * scale;
    xq += eta * CMat::Identity(q, q);
  }
  CMat x_rot = CMat::Zero(dr, dr);
  if (q > 0) {
    x_rot.topRightCorner(r, q) = x_cross;
    x_rot.bottomLeftCorner(q, r) = x_cross.adjoint();
    x_rot.bottomRightCorner(q, q) = xq;
    x_rot.topLeftCorner(r, r) = herm(x_cross * xq.inverse() * x_cross.adjoint());
  }

  CMat m_full = kron(omega, gamma_rot) + kron(CMat::Identity(g.d_o, g.d_o), x_rot);
  CMat perm = kron(CMat::Identity(g.d_o, g.d_o), g.rot).adjoint() * g.l_base;
  CMat m_blk = perm.adjoint() * m_full * perm;
  CMat m_ss = m_blk.topLeftCorner(g.ss(), g.ss());
  if (q > 0) {
    CMat m_sp = m_blk.topRightCorner(g.ss(), g.perp());
    CMat m_pp = m_blk.bottomRightCorner(g.perp(), g.perp());
    m_ss -= m_sp * m_pp.ldlt().solve(CMat(m_sp.adjoint()));
  }
  CMat z_ss = g.inv_half_s() * herm(m_ss) * g.inv_half_s();
  CMat z_blk = CMat::Zero(g.d_o * dr, g.d_o * dr);
  z_blk.topLeftCorner(g.ss(), g.ss()) = z_ss;
  CMat z_c = g.l_base * z_blk * g.l_base.adjoint();

  CoherentDual d;
  d.z = g.embed(z_c);
  d.omega = g.q_out * omega * g.q_out.adjoint();
  d.x = g.rot * x_rot * g.rot.adjoint();
  const double s = std::max(1.0, (d.omega * inst.gamma_xp().mat()).trace().real());
  d.z /= s;
  d.omega /= s;
  d.x /= s;
  d.value = (d.z * inst.rho().mat()).trace().real() - d.x.trace().real();
  CMat rho_half = kron(CMat::Identity(g.d_xp, g.d_xp), mfun(inst.rho_r(), MatFn::sqrt, tol));
  CMat slack = kron(d.omega, inst.gamma_r().mat()) + kron(CMat::Identity(g.d_xp, g.d_xp), d.x) -
               rho_half * d.z * rho_half;
  d.defect = min_eig(slack);
  return d;
}

void check_epsilon(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InputError("smoothing parameter must lie in [0, 1)");
}

CoherentResult smooth_classical(const CoherentInstance& inst, double f, const Tolerances& tol) {
  const int dxp = inst.d_out(), dr = inst.d_ref();
  RVec rho = inst.rho().mat().diagonal().real();
  RVec gr = inst.gamma_r().mat().diagonal().real();
  RVec go = inst.gamma_xp().mat().diagonal().real();
  RVec rho_r = RVec::Zero(dr);
  for (int a = 0; a < dxp; ++a)
    for (int j = 0; j < dr; ++j) rho_r(j) += rho(a * dr + j);
  const double cut_r = tol.rank_rel_tol * rho_r.maxCoeff();
  const double cut_o = tol.rank_rel_tol * go.maxCoeff();

  Model m;
  SExpr alpha = m.scalar_var();
  std::vector<SExpr> t(dxp * dr);
  std::vector<bool> active(dxp, false);
  for (int a = 0; a < dxp; ++a) {
    active[a] = go(a) > cut_o;
    for (int j = 0; j < dr; ++j)
      if (active[a]) {
        t[a * dr + j] = m.scalar_var();
        m.nonneg(t[a * dr + j]);
      }
  }
  SExpr overlap(1.0 - rho.sum());
  CMat e00 = basis_op(2, 0, 0), e11 = basis_op(2, 1, 1), e01 = basis_op(2, 0, 1) + basis_op(2, 1, 0);
  for (int j = 0; j < dr; ++j) {
    SExpr col;
    for (int a = 0; a < dxp; ++a)
      if (active[a]) col += t[a * dr + j];
    if (rho_r(j) > cut_r) {
      m.equal(col - SExpr(1.0));
      for (int a = 0; a < dxp; ++a) {
        const double p = rho(a * dr + j);
        if (!active[a] || p <= 0.0) continue;
        SExpr y = m.scalar_var();
        HExpr block = (rho_r(j) * t[a * dr + j]) * e00 + SExpr(p) * e11 + y * e01;
        m.psd(block);
        overlap += y;
      }
    } else {
      m.nonneg(SExpr(1.0) - col);
    }
  }
  m.nonneg(overlap - SExpr(f));
  for (int a = 0; a < dxp; ++a) {
    if (!active[a]) continue;
    SExpr budget = go(a) * alpha;
    for (int j = 0; j < dr; ++j) budget -= gr(j) * t[a * dr + j];
    m.nonneg(budget);
  }
  m.minimize(alpha);
  ModelSolution ms = m.solve(sdp::options_from(tol));
  CoherentResult res;
  sdp::require_solved(ms, "smooth coherent relative entropy", &res.note);
  res.alpha = ms.value(alpha);
  res.value = -safe_log2(res.alpha);
  res.iters = ms.iters;
  res.gap = ms.gap;
  CMat tm = CMat::Zero(dxp * dr, dxp * dr);
  for (int a = 0; a < dxp; ++a)
    if (active[a])
      for (int j = 0; j < dr; ++j) tm(a * dr + j, a * dr + j) = std::max(0.0, ms.value(t[a * dr + j]));
  res.primal_channel = as_channel(inst, tm);
  return res;
}

CoherentResult smooth_generic(const CoherentInstance& inst, double f, const Tolerances& tol) {
  Geometry g = geometry(inst, tol);
  Model m;
  SExpr alpha = m.scalar_var();
  HExpr tss = m.hermitian(g.ss());
  HExpr e = tss;
  if (g.perp() > 0) {
    HExpr off = m.offdiag_block(g.ss(), g.perp());
    HExpr c = m.hermitian(g.perp());
    e = sdp::block2(tss, off, c);
    pin_offblock(m, g, off, g.ss(), CMat::Identity(g.ss(), g.ss()), nullptr);
    m.psd(HExpr(CMat::Identity(g.q, g.q)) - sdp::ptrace(c, {g.d_o, g.q}, {0}));
  }
  m.psd(e);
  m.equal(sdp::ptrace(tss, {g.d_o, g.r}, {0}) - HExpr(CMat::Identity(g.r, g.r)));
  sdp::add_fidelity(m, sdp::congruence(g.half_s(), tss), g.rho_ss, f, tol);
  CMat left = kron(CMat::Identity(g.d_o, g.d_o), g.gamma_r_half) * g.l_base;
  m.psd(alpha * g.gamma_out - sdp::ptrace(sdp::congruence(left, e), {g.d_o, g.d_r}, {1}));
  m.minimize(alpha);
  ModelSolution ms = m.solve(sdp::options_from(tol));
  CoherentResult res;
  sdp::require_solved(ms, "smooth coherent relative entropy", &res.note);
  res.alpha = ms.value(alpha);
  res.value = -safe_log2(res.alpha);
  res.iters = ms.iters;
  res.gap = ms.gap;
  res.primal_channel = as_channel(inst, g.embed(g.l_base * ms.value(e) * g.l_base.adjoint()));
  return res;
}

bool commutes(const CMat& a, const CMat& b, double tol) { return (a * b - b * a).cwiseAbs().maxCoeff() <= tol; }

bool is_projection(const CMat& p, double tol) {
  return (p - p.adjoint()).cwiseAbs().maxCoeff() <= tol && (p * p - p).cwiseAbs().maxCoeff() <= tol;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError("analytic case precondition violated: " + what);
}

}  // namespace

CoherentInstance::CoherentInstance(SubnormalizedState rho, GammaOperator gamma_r, GammaOperator gamma_xp,
                                   const Tolerances& tol)
    : rho_(std::move(rho)), gamma_r_(std::move(gamma_r)), gamma_xp_(std::move(gamma_xp)) {
  const int dxp = gamma_xp_.dim(), dr = gamma_r_.dim();
  if (rho_.dim() != dxp * dr) {
    std::ostringstream os;
    os << "coherent instance: process matrix has dimension " << rho_.dim() << ", expected " << dxp << " x " << dr;
    throw InputError(os.str());
  }
  if (rho_.trace() <= tol.trace_tol) throw InputError("coherent instance: process matrix has zero trace");
  CMat p = kron(support(gamma_xp_.mat(), tol).projector, support(gamma_r_.mat(), tol).projector);
  double outside = ((CMat::Identity(dxp * dr, dxp * dr) - p) * rho_.mat()).trace().real();
  if (outside > tol.psd_tol * std::max(1.0, static_cast<double>(dxp * dr))) {
    std::ostringstream os;
    os << "coherent instance: process matrix not supported inside supp(Gamma_X') (x) supp(Gamma_R), weight outside "
       << outside;
    throw InputError(os.str());
  }
}

CoherentInstance CoherentInstance::from_channel(const ChoiChannel& e, const CMat& sigma, const GammaOperator& gamma_x,
                                                const GammaOperator& gamma_xp, const Tolerances& tol) {
  if (gamma_x.dim() != e.din() || gamma_xp.dim() != e.dout())
    throw InputError("coherent instance: Gamma dimensions do not match the channel");
  Dims dims = e.out_dims();
  dims.insert(dims.end(), e.in_dims().begin(), e.in_dims().end());
  SubnormalizedState rho(process_matrix(e, sigma, tol), dims, tol);
  GammaOperator gamma_r(HermitianOperator(gamma_x.mat().transpose(), gamma_x.dims()), gamma_x.label(), tol);
  return CoherentInstance(std::move(rho), std::move(gamma_r), gamma_xp, tol);
}

CMat CoherentInstance::rho_r() const { return ptrace(rho_.mat(), {d_out(), d_ref()}, {0}); }
CMat CoherentInstance::rho_out() const { return ptrace(rho_.mat(), {d_out(), d_ref()}, {1}); }

bool CoherentInstance::classical(double tol) const {
  return max_offdiag(rho_.mat()) <= tol && max_offdiag(gamma_r_.mat()) <= tol && max_offdiag(gamma_xp_.mat()) <= tol;
}

CoherentResult coherent_rel_entropy(const CoherentInstance& inst, const Tolerances& tol) {
  Geometry g = geometry(inst, tol);
  CMat t0 = g.inv_half_s() * g.rho_ss * g.inv_half_s();
  Split range = split(t0, tol);
  const CMat& uw = range.on;
  const int w = static_cast<int>(uw.cols());
  CMat a_r = uw.adjoint() * t0 * uw;

  // When Gamma_R does not couple supp(rho_R) to its complement, the free blocks only add
  // positive terms to tr_R[T Gamma_R], so T = T0 is optimal and alpha is an eigenvalue.
  CMat gamma_rot = g.rot.adjoint() * inst.gamma_r().mat() * g.rot;
  const double coupling = g.q > 0 && g.r > 0 ? gamma_rot.topRightCorner(g.r, g.q).cwiseAbs().maxCoeff() : 0.0;
  if (g.q == 0 || coupling <= 1e-12 * std::max(1.0, gamma_rot.cwiseAbs().maxCoeff())) {
    CMat t_blk = CMat::Zero(g.d_o * g.d_r, g.d_o * g.d_r);
    t_blk.topLeftCorner(g.ss(), g.ss()) = t0;
    CMat t_c = g.l_base * t_blk * g.l_base.adjoint();
    CMat load = ptrace(kron(CMat::Identity(g.d_o, g.d_o), g.gamma_r_half) * t_c *
                           kron(CMat::Identity(g.d_o, g.d_o), g.gamma_r_half),
                       {g.d_o, g.d_r}, {1});
    CMat go_inv_half = mfun(g.gamma_out, MatFn::inv_sqrt, tol);
    Eigh top = eigh(go_inv_half * load * go_inv_half);
    CoherentResult res;
    res.alpha = top.values(top.values.size() - 1);
    res.value = -safe_log2(res.alpha);
    res.primal_channel = as_channel(inst, g.embed(t_c));
    CVec v = go_inv_half * top.vectors.col(top.vectors.cols() - 1);
    res.dual = reconstruct_dual(inst, g, v * v.adjoint(), CMat::Zero(g.q, g.q), CMat::Zero(g.r, g.q), tol);
    res.gap = res.alpha - res.dual->value;
    res.note = "closed form: Gamma_R block-diagonal on supp(rho_R)";
    return res;
  }

  Model m;
  SExpr alpha = m.scalar_var();
  HExpr e(a_r);
  int con_c = -1;
  std::vector<int> cross_rows;
  if (g.perp() > 0) {
    HExpr off = m.offdiag_block(w, g.perp());
    HExpr c = m.hermitian(g.perp());
    e = sdp::block2(HExpr(a_r), off, c);
    m.psd(e);
    pin_offblock(m, g, off, w, uw, &cross_rows);
    con_c = m.psd(HExpr(CMat::Identity(g.q, g.q)) - sdp::ptrace(c, {g.d_o, g.q}, {0}));
  }
  CMat l_full = g.l_base * direct_sum(uw, CMat::Identity(g.perp(), g.perp()));
  CMat left = kron(CMat::Identity(g.d_o, g.d_o), g.gamma_r_half) * l_full;
  int con_g = m.psd(alpha * g.gamma_out - sdp::ptrace(sdp::congruence(left, e), {g.d_o, g.d_r}, {1}));
  m.minimize(alpha);
  ModelSolution ms = m.solve(sdp::options_from(tol));

  CoherentResult res;
  sdp::require_solved(ms, "coherent relative entropy", &res.note);
  res.alpha = ms.value(alpha);
  res.value = -safe_log2(res.alpha);
  res.iters = ms.iters;
  CMat t = g.embed(l_full * ms.value(e) * l_full.adjoint());
  res.primal_channel = as_channel(inst, t);

  CMat x_perp, x_cross;
  if (g.perp() > 0) {
    x_perp = ms.psd_duals[con_c];
    x_cross = CMat::Zero(g.r, g.q);
    int k = 0;
    for (int s = 0; s < g.r; ++s)
      for (int tt = 0; tt < g.q; ++tt, k += 2)
        x_cross(s, tt) = 0.5 * Cplx(ms.eq_duals[cross_rows[k]], ms.eq_duals[cross_rows[k + 1]]);
  }
  res.dual = reconstruct_dual(inst, g, ms.psd_duals[con_g], x_perp, x_cross, tol);
  res.gap = res.alpha - res.dual->value;
  return res;
}

CoherentResult smooth_coherent(const CoherentInstance& inst, double epsilon, const Tolerances& tol) {
  check_epsilon(epsilon);
  CoherentResult base = coherent_rel_entropy(inst, tol);
  if (epsilon == 0.0) {
    base.restricted = true;
    base.unsmoothed = base.value;
    return base;
  }
  const double f = std::sqrt(1.0 - epsilon * epsilon);
  CoherentResult res = inst.classical() ? smooth_classical(inst, f, tol) : smooth_generic(inst, f, tol);
  res.restricted = true;
  res.epsilon = epsilon;
  res.unsmoothed = base.value;
  if (inst.classical()) res.note += (res.note.empty() ? "" : "; ") + std::string("diagonal formulation");
  return res;
}

AnalyticCase AnalyticCase::eigenspace(double g, double g_prime) {
  if (!(g > 0.0 && g_prime > 0.0)) throw InputError("eigenspace case: eigenvalues must be positive");
  AnalyticCase c;
  c.kind = Kind::eigenspace;
  c.g = g;
  c.g_prime = g_prime;
  return c;
}

AnalyticCase AnalyticCase::gamma_states() {
  AnalyticCase c;
  c.kind = Kind::gamma_states;
  return c;
}

AnalyticCase AnalyticCase::commuting_projections(const CMat& p, const CMat& p_prime) {
  AnalyticCase c;
  c.kind = Kind::commuting_projections;
  c.p = p;
  c.p_prime = p_prime;
  return c;
}

AnalyticCase AnalyticCase::trivial_gamma() { return AnalyticCase{}; }

double neg_hmax0_of_process(const CoherentInstance& inst, const Tolerances& tol) {
  CMat half = kron(CMat::Identity(inst.d_out(), inst.d_out()), mfun(inst.rho_r(), MatFn::inv_sqrt, tol));
  CMat t0 = half * inst.rho().mat() * half;
  return -safe_log2(max_eig(ptrace(t0, {inst.d_out(), inst.d_ref()}, {1})));
}

double analytic_value(const CoherentInstance& inst, const AnalyticCase& c, const Tolerances& tol) {
  const double ctol = 1e-10 * std::max(1.0, std::max(inst.gamma_r().mat().cwiseAbs().maxCoeff(),
                                                       inst.gamma_xp().mat().cwiseAbs().maxCoeff()));
  const CMat& gr = inst.gamma_r().mat();
  const CMat& go = inst.gamma_xp().mat();
  const double tr = inst.rho().trace();
  CMat rho_r = inst.rho_r() / tr, rho_o = inst.rho_out() / tr;
  switch (c.kind) {
    case AnalyticCase::Kind::trivial_gamma: {
      require((gr - CMat::Identity(gr.rows(), gr.cols())).cwiseAbs().maxCoeff() <= ctol, "Gamma_R is not the identity");
      require((go - CMat::Identity(go.rows(), go.cols())).cwiseAbs().maxCoeff() <= ctol, "Gamma_X' is not the identity");
      return neg_hmax0_of_process(inst, tol);
    }
    case AnalyticCase::Kind::eigenspace: {
      CMat ps = support(rho_r, tol).projector, po = support(rho_o, tol).projector;
      require((gr * ps - c.g * ps).cwiseAbs().maxCoeff() <= ctol, "supp(rho_R) is not in the g-eigenspace of Gamma_R");
      require((go * po - c.g_prime * po).cwiseAbs().maxCoeff() <= ctol,
              "supp(rho_X') is not in the g'-eigenspace of Gamma_X'");
      return std::log2(c.g_prime) - std::log2(c.g) + neg_hmax0_of_process(inst, tol);
    }
    case AnalyticCase::Kind::gamma_states: {
      require((rho_r - inst.gamma_r().normalized()).cwiseAbs().maxCoeff() <= 1e-9, "rho_R differs from Gamma_R / tr");
      require((rho_o - inst.gamma_xp().normalized()).cwiseAbs().maxCoeff() <= 1e-9,
              "rho_X' differs from Gamma_X' / tr");
      return std::log2(inst.gamma_xp().partition_function()) - std::log2(inst.gamma_r().partition_function());
    }
    case AnalyticCase::Kind::commuting_projections: {
      const CMat& p = c.p;
      const CMat& pp = c.p_prime;
      require(p.rows() == gr.rows() && pp.rows() == go.rows(), "projection dimensions");
      require(is_projection(p, 1e-10) && is_projection(pp, 1e-10), "P and P' must be projections");
      require(commutes(p, gr, ctol) && commutes(pp, go, ctol), "projections must commute with the Gamma operators");
      const double zr = (p * gr).trace().real(), zo = (pp * go).trace().real();
      require(zr > 0.0 && zo > 0.0, "projections must overlap the Gamma operators");
      require((rho_r - p * gr * p / zr).cwiseAbs().maxCoeff() <= 1e-9, "rho_R differs from P Gamma_R P / tr");
      require((rho_o - pp * go * pp / zo).cwiseAbs().maxCoeff() <= 1e-9, "rho_X' differs from P' Gamma_X' P' / tr");
      return std::log2(zo) - std::log2(zr);
    }
  }
  return 0.0;
}

std::vector<BoundEntry> bounds(const CoherentInstance& inst, std::optional<double> epsilon, const Tolerances& tol) {
  const CMat& gr = inst.gamma_r().mat();
  const CMat& go = inst.gamma_xp().mat();
  const double tr = inst.rho().trace();
  CMat rho_r = inst.rho_r() / tr, rho_o = inst.rho_out() / tr;
  const double dmin0_r = relative_entropy_value(rho_r, gr, RelKind::min0, tol);
  const double dmax_r = relative_entropy_value(rho_r, gr, RelKind::max, tol);
  const double dmax_o = relative_entropy_value(rho_o, go, RelKind::max, tol);

  std::vector<BoundEntry> out;
  out.push_back({"trivial_lower", -std::log2(inst.gamma_r().partition_function()) - std::log2(inverse_norm(go, tol)),
                 BoundSide::lower, false});
  out.push_back({"trivial_upper", std::log2(inverse_norm(gr, tol)) + std::log2(inst.gamma_xp().partition_function()),
                 BoundSide::upper, false});
  if ((inst.rho().mat() / tr - kron(rho_o, rho_r)).cwiseAbs().maxCoeff() <= 1e-9)
    out.push_back({"product_state", dmin0_r - dmax_o, BoundSide::lower, false});
  out.push_back({"dmax_difference", dmax_r - dmax_o, BoundSide::upper, false});
  out.push_back({"relative_entropy_difference",
                 relative_entropy_value(rho_r, gr, RelKind::vn, tol) - relative_entropy_value(rho_o, go, RelKind::vn, tol),
                 BoundSide::upper, false});
  out.push_back({"rob_lower", relative_entropy_value(rho_r, gr, RelKind::rob, tol) - dmax_o, BoundSide::lower, false});
  if (epsilon && *epsilon > 0.0) {
    check_epsilon(*epsilon);
    const double e3 = *epsilon * *epsilon / 8.0;
    out.push_back({"smooth_lower", dmin0_r - dmax_o + std::log2(e3 * e3 / (2.0 + e3 * e3)), BoundSide::lower, true});
  }
  return out;
}

namespace {

// (E (x) id_K)(x) for x on X (x) K.
CMat apply_first(const ChoiChannel& e, const CMat& x, int dk) {
  const int din = e.din(), dout = e.dout();
  CMat out = CMat::Zero(dout * dk, dout * dk);
  for (int k = 0; k < dk; ++k)
    for (int l = 0; l < dk; ++l) {
      CMat blk(din, din);
      for (int i = 0; i < din; ++i)
        for (int j = 0; j < din; ++j) blk(i, j) = x(i * dk + k, j * dk + l);
      CMat img = e.apply(blk);
      for (int a = 0; a < dout; ++a)
        for (int b = 0; b < dout; ++b) out(a * dk + k, b * dk + l) = img(a, b);
    }
  return out;
}

// Orthonormal columns completing `basis` (orthonormal columns) to a basis of the first
// `needed` extra directions.
CMat complete(const CMat& basis, int needed) {
  const int n = static_cast<int>(basis.rows());
  CMat proj = CMat::Identity(n, n) - basis * basis.adjoint();
  Eigh e = eigh(proj);
  return e.vectors.rightCols(needed);
}

}  // namespace

ChainInstances compose(const ChoiChannel& first, const CMat& sigma, const ChoiChannel& second,
                       const GammaOperator& gamma_x, const GammaOperator& gamma_xp, const GammaOperator& gamma_xpp,
                       bool require_compatible, const Tolerances& tol) {
  if (second.din() != first.dout()) throw InputError("compose: second channel input does not match first output");
  if (gamma_xpp.dim() != second.dout()) throw InputError("compose: Gamma_X'' dimension mismatch");
  ChainInstances ch;
  ch.step1 = CoherentInstance::from_channel(first, sigma, gamma_x, gamma_xp, tol);
  const int dxp = first.dout(), dr = first.din(), dxpp = second.dout();
  const CMat& rho = ch.step1.rho().mat();

  // Purification on X' (x) R (x) E.
  Split pr = split(rho, tol);
  int de = std::max(1, static_cast<int>(pr.on.cols()));
  while (dr * de < dxp) ++de;
  CVec psi = CVec::Zero(dxp * dr * de);
  for (int k = 0; k < pr.on.cols(); ++k)
    for (int i = 0; i < dxp * dr; ++i) psi(i * de + k) = std::sqrt(pr.vals(k)) * pr.on(i, k);

  // Schmidt correspondence X~' -> RE.
  CMat psi_mat = Eigen::Map<CMat>(psi.data(), dr * de, dxp).transpose();  // rows X', cols RE
  CMat rho_o = psi_mat * psi_mat.adjoint();
  Split so = split(rho_o, tol);
  const int k_on = static_cast<int>(so.on.cols());
  CMat v = CMat::Zero(dr * de, dxp);
  CMat r_kets(dr * de, k_on);
  // psi = sum_k sqrt(q_k) |x_k> |r_k> with |r_k> = (<x_k| (x) 1) psi / sqrt(q_k).
  for (int k = 0; k < k_on; ++k) {
    CVec rk = (so.on.col(k).adjoint() * psi_mat).transpose() / std::sqrt(so.vals(k));
    r_kets.col(k) = rk;
  }
  CMat rest = complete(r_kets, dxp - k_on);
  for (int k = 0; k < k_on; ++k) v += r_kets.col(k) * so.on.col(k).transpose();
  for (int k = 0; k < dxp - k_on; ++k) v += rest.col(k) * so.off.col(k).transpose();

  CMat tau = apply_first(second, psi * psi.adjoint(), dr * de);
  CMat gamma_re = v * gamma_xp.mat().transpose() * v.adjoint();
  CMat gamma_r_back = ptrace(gamma_re, {dr, de}, {1});
  ch.compatibility_defect = (gamma_r_back - gamma_x.mat().transpose()).cwiseAbs().maxCoeff();
  if (require_compatible && ch.compatibility_defect > 1e-8) {
    std::ostringstream os;
    os << "compose: tr_E Gamma_RE differs from Gamma_R by " << ch.compatibility_defect;
    throw InputError(os.str());
  }
  Tolerances loose = tol;
  loose.psd_tol = std::max(tol.psd_tol, 1e-8);
  ch.step2 = CoherentInstance(SubnormalizedState(herm(tau), {dxpp, dr, de}, loose),
                              GammaOperator(HermitianOperator(herm(gamma_re), {dr, de}), "RE", loose), gamma_xpp, loose);
  CMat total = ptrace(tau, {dxpp, dr, de}, {2});
  ch.total = CoherentInstance(SubnormalizedState(herm(total), {dxpp, dr}, loose), ch.step1.gamma_r(), gamma_xpp, loose);
  return ch;
}

}  // namespace ssqt
