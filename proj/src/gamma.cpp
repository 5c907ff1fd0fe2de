#include "ssqt/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ssqt/kernels.hpp"
#include "ssqt/model.hpp"
#include "ssqt/sdp_problem.hpp"

namespace ssqt {

using sdp::HExpr;
using sdp::Model;
using sdp::ModelSolution;
using sdp::SExpr;

namespace {

// Tolerance for the checks run on every constructed map.
constexpr double kConstructionTol = 1e-8;

double scale_of(const CMat& m) { return std::max(1.0, norm(m, NormKind::infinity)); }

void ensure(bool ok, const std::string& what) {
  if (!ok) throw std::logic_error("internal check failed: " + what);
}

CMat clip_psd(const CMat& m) {
  Eigh e = eigh(m);
  RVec lam = e.values.cwiseMax(0.0);
  return e.vectors * lam.asDiagonal() * e.vectors.adjoint();
}

Dims concat(const Dims& a, const Dims& b) {
  Dims out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void check_probability(const RVec& p, const char* what) {
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (!(p(i) >= -1e-12)) throw InputError(std::string(what) + ": negative entry");
}

bool is_eigenvector(const CMat& g, int index, double tol, double* value) {
  const int d = static_cast<int>(g.rows());
  if (index < 0 || index >= d) throw InputError("eigenvector index out of range");
  CVec col = g.col(index);
  *value = col(index).real();
  col(index) = 0.0;
  return col.cwiseAbs().maxCoeff() <= tol * scale_of(g);
}

}  // namespace

GammaOperator::GammaOperator(HermitianOperator op, std::string label, const Tolerances& tol)
    : op_(std::move(op)), label_(std::move(label)) {
  if (op_.dim() == 0) throw InputError("Gamma operator: empty matrix");
  if (op_.herm_defect() > tol.herm_tol * scale_of(op_.mat()))
    throw InputError("Gamma operator: not Hermitian");
  const double lmin = min_eig(op_.mat());
  if (lmin < -tol.psd_tol * scale_of(op_.mat())) {
    std::ostringstream os;
    os << "Gamma operator: not PSD, minimum eigenvalue " << lmin;
    throw InputError(os.str());
  }
  if (op_.mat().cwiseAbs().maxCoeff() == 0.0) throw InputError("Gamma operator: zero operator");
}

GammaOperator identity_gamma(Dims dims, std::string label) {
  const int d = dims_product(dims);
  return GammaOperator(HermitianOperator(CMat::Identity(d, d), std::move(dims)), std::move(label));
}

GammaOperator tensor_product(const GammaOperator& a, const GammaOperator& b) {
  std::string label = a.label().empty() || b.label().empty() ? a.label() + b.label() : a.label() + "," + b.label();
  return GammaOperator(tensor_product(a.op(), b.op()), label);
}

GammaOperator gibbs_operator(const std::vector<std::pair<HermitianOperator, double>>& observables, std::string label) {
  if (observables.empty()) throw InputError("gibbs_operator: no observables");
  const int d = observables.front().first.dim();
  CMat sum = CMat::Zero(d, d);
  for (const auto& [h, mu] : observables) {
    if (h.dim() != d) throw InputError("gibbs_operator: observables of different dimensions");
    sum += h.mat() * mu;
  }
  Eigh e = eigh(sum);
  RVec ex = (-e.values.array()).exp().matrix();
  CMat g = e.vectors * ex.asDiagonal() * e.vectors.adjoint();
  return GammaOperator(HermitianOperator(g, observables.front().first.dims()), std::move(label));
}

AdmissibilityReport is_gamma_subpreserving(const ChoiChannel& phi, const GammaOperator& gamma_in,
                                           const GammaOperator& gamma_out, const Tolerances& tol) {
  if (phi.din() != gamma_in.dim() || phi.dout() != gamma_out.dim())
    throw InputError("is_gamma_subpreserving: dimension mismatch between channel and Gamma operators");
  AdmissibilityReport r;
  r.cp_defect = phi.cp_defect();
  r.tni_excess = phi.tni_excess();
  r.tp_defect = phi.tp_defect();
  CMat image = phi.apply(gamma_in.mat());
  CMat diff = gamma_out.mat() - image;
  r.gamma_defect = min_eig(diff);
  r.gamma_error = norm(herm(diff), NormKind::infinity);
  r.is_cp = r.cp_defect <= tol.psd_tol * scale_of(phi.mat());
  r.is_tni = r.tni_excess <= tol.psd_tol;
  r.verdict = r.is_cp && r.is_tni && r.gamma_defect >= -tol.psd_tol * scale_of(gamma_out.mat());
  return r;
}

TransitionResult transition_feasible(const SubnormalizedState& rho, const SubnormalizedState& sigma,
                                     const GammaOperator& gamma, const std::optional<HermitianOperator>& covariant_under,
                                     const Tolerances& tol) {
  const int d = rho.dim();
  if (sigma.dim() != d || gamma.dim() != d) throw InputError("transition_feasible: dimension mismatch");
  if (covariant_under && covariant_under->dim() != d)
    throw InputError("transition_feasible: Hamiltonian dimension mismatch");
  const CMat id = CMat::Identity(d, d);

  Model m;
  HExpr choi = m.hermitian(d * d);
  m.psd(choi);
  m.equal(sdp::ptrace(choi, {d, d}, {0}) - HExpr(id));
  auto image = [&](const CMat& x) {
    return sdp::map(choi, [&, x](const CMat& c) { return kernels::parallel::apply_choi(c, d, d, x); });
  };
  m.equal(image(gamma.mat()) - HExpr(gamma.mat()));
  if (covariant_under) {
    const CMat& h = covariant_under->mat();
    CMat gen = kron(h, id) - kron(id, h.transpose());
    const Cplx iu(0.0, 1.0);
    m.equal(sdp::map(choi, [&](const CMat& c) { return CMat(iu * (c * gen - gen * c)); }));
  }
  SExpr t = m.scalar_var();
  HExpr diff = image(rho.mat()) - HExpr(sigma.mat());
  m.psd(t * id - diff);
  m.psd(t * id + diff);
  m.minimize(t);

  ModelSolution ms = m.solve(sdp::options_from(tol));
  TransitionResult r;
  sdp::require_solved(ms, "transition_feasible", &r.note);
  r.slack = std::max(0.0, ms.primal);
  r.certificate = ms.dual;
  r.feasible = r.slack <= kFeasibleSlack;
  r.witness = ChoiChannel(clip_psd(ms.value(choi)), rho.dims().empty() ? Dims{d} : rho.dims(),
                          rho.dims().empty() ? Dims{d} : rho.dims(), tol);
  return r;
}

namespace {

struct LorentzPoint {
  double x, y;
};

std::vector<LorentzPoint> lorentz_curve(const RVec& p, const RVec& g) {
  std::vector<int> order(static_cast<std::size_t>(p.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p(a) * g(b) > p(b) * g(a); });
  std::vector<LorentzPoint> pts{{0.0, 0.0}};
  for (int i : order) pts.push_back({pts.back().x + g(i), pts.back().y + p(i)});
  return pts;
}

double curve_at(const std::vector<LorentzPoint>& c, double x) {
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (x <= c[k].x) {
      const double w = c[k].x - c[k - 1].x;
      if (w <= 0.0) return c[k].y;
      return c[k - 1].y + (c[k].y - c[k - 1].y) * (x - c[k - 1].x) / w;
    }
  }
  return c.back().y;
}

void check_triple(const RVec& p, const RVec& q, const RVec& g) {
  if (p.size() != q.size() || p.size() != g.size() || p.size() == 0)
    throw InputError("thermo-majorization: vectors of different lengths");
  check_probability(p, "thermo-majorization");
  check_probability(q, "thermo-majorization");
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (!(g(i) > 0.0)) throw InputError("thermo-majorization: Gibbs vector must be strictly positive");
}

}  // namespace

bool lorentz_majorizes(const RVec& p, const RVec& q, const RVec& gibbs, double slack) {
  check_triple(p, q, gibbs);
  auto cp = lorentz_curve(p, gibbs);
  auto cq = lorentz_curve(q, gibbs);
  // cp is concave, so comparing at the elbows of cq suffices.
  for (const auto& pt : cq)
    if (curve_at(cp, pt.x) < pt.y - slack) return false;
  return true;
}

bool majorizes(const RVec& p, const RVec& q, double slack) {
  if (p.size() != q.size()) throw InputError("majorizes: vectors of different lengths");
  std::vector<double> a(p.data(), p.data() + p.size()), b(q.data(), q.data() + q.size());
  std::sort(a.rbegin(), a.rend());
  std::sort(b.rbegin(), b.rend());
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    if (sa < sb - slack) return false;
  }
  return std::abs(sa - sb) <= std::max(slack, 1e-9);
}

ThermoMajorization thermo_majorization(const RVec& p, const RVec& q, const RVec& gibbs, const Tolerances& tol,
                                       double slack) {
  if (!(slack >= 0.0)) throw InputError("thermo_majorization: slack must be nonnegative");
  check_triple(p, q, gibbs);
  const int n = static_cast<int>(p.size());
  Model m;
  std::vector<std::vector<SExpr>> dmat(n, std::vector<SExpr>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      dmat[i][j] = m.scalar_var();
      m.nonneg(dmat[i][j]);
    }
  SExpr t = m.scalar_var();
  for (int j = 0; j < n; ++j) {
    SExpr col;
    for (int i = 0; i < n; ++i) col += dmat[i][j];
    m.equal(col - SExpr(1.0));
  }
  for (int i = 0; i < n; ++i) {
    SExpr dg, dp;
    for (int j = 0; j < n; ++j) {
      dg += gibbs(j) * dmat[i][j];
      dp += p(j) * dmat[i][j];
    }
    m.equal(dg - SExpr(gibbs(i)));
    m.nonneg(t - (dp - SExpr(q(i))));
    m.nonneg(t + (dp - SExpr(q(i))));
  }
  m.minimize(t);
  ModelSolution ms = m.solve(sdp::options_from(tol));
  std::string note;
  sdp::require_solved(ms, "thermo_majorization", &note);

  ThermoMajorization r;
  r.lp_slack = std::max(0.0, ms.primal);
  r.lp = r.lp_slack <= slack;
  r.lorentz = lorentz_majorizes(p, q, gibbs, slack);
  r.stochastic.assign(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.stochastic[i][j] = ms.value(dmat[i][j]);
  return r;
}

bool thermo_majorizes(const RVec& p, const RVec& q, const RVec& gibbs, const Tolerances& tol) {
  return thermo_majorization(p, q, gibbs, tol).lp;
}

RVec gibbs_rescale(const RVec& p, const RVec& energies, double beta) {
  if (p.size() != energies.size()) throw InputError("gibbs_rescale: p and energies differ in length");
  check_probability(p, "gibbs_rescale");
  std::vector<long> sizes;
  long total = 0;
  for (Eigen::Index i = 0; i < energies.size(); ++i) {
    const double n = std::exp(-beta * energies(i));
    const double r = std::round(n);
    if (r < 1.0 || std::abs(n - r) > 1e-6) {
      std::ostringstream os;
      os << "gibbs_rescale: block dimension exp(-beta E) = " << n << " is not a positive integer";
      throw InputError(os.str());
    }
    if (r > 1e7) throw InputError("gibbs_rescale: block dimension too large");
    sizes.push_back(static_cast<long>(r));
    total += sizes.back();
  }
  RVec out(total);
  Eigen::Index pos = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    for (long k = 0; k < sizes[i]; ++k) out(pos++) = p(static_cast<Eigen::Index>(i)) / static_cast<double>(sizes[i]);
  return out;
}

Counterexample counterexample_map(const SubnormalizedState& rho_target, const GammaOperator& gamma,
                                  int top_level_index, const Tolerances& tol) {
  const int d = gamma.dim();
  if (rho_target.dim() != d) throw InputError("counterexample_map: dimension mismatch");
  if (!rho_target.is_normalized(tol)) throw InputError("counterexample_map: target state must be normalized");
  const CMat g = gamma.normalized();
  double pn = 0.0;
  if (!is_eigenvector(g, top_level_index, tol.herm_tol * 100, &pn))
    throw InputError("counterexample_map: chosen level is not an eigenvector of Gamma");
  if (pn > min_eig(g) + tol.psd_tol) throw InputError("counterexample_map: chosen level does not have the smallest Gamma weight");
  if (pn >= 1.0 - 1e-12) throw InputError("counterexample_map: Gamma is concentrated on the chosen level");

  Counterexample r;
  r.sigma = (g - pn * rho_target.mat()) / (1.0 - pn);
  ensure(min_eig(r.sigma) >= -tol.psd_tol, "counterexample_map: sigma not PSD");
  CMat proj = basis_op(d, top_level_index, top_level_index);
  CMat rest = CMat::Identity(d, d) - proj;
  CMat j = kron(rho_target.mat(), proj) + kron(r.sigma, rest);
  Dims dims = gamma.dims().empty() ? Dims{d} : gamma.dims();
  r.channel = ChoiChannel(j, dims, dims, tol);
  ensure(r.channel.tp_defect() <= kConstructionTol, "counterexample_map: not trace preserving");
  ensure(norm(r.channel.apply(g) - g, NormKind::infinity) <= kConstructionTol,
         "counterexample_map: Gibbs state not preserved");
  return r;
}

Dilation dilate_subpreserving(const ChoiChannel& phi_tilde, const GammaOperator& gamma_k, const GammaOperator& gamma_l,
                              int k_index, int l_index, const Tolerances& tol) {
  AdmissibilityReport pre = is_gamma_subpreserving(phi_tilde, gamma_k, gamma_l, tol);
  if (!pre.verdict) throw InputError("dilate_subpreserving: map is not Gamma-sub-preserving");
  const int dk = gamma_k.dim(), dl = gamma_l.dim();
  double gk = 0.0, gl = 0.0;
  if (!is_eigenvector(gamma_k.mat(), k_index, 1e-10, &gk) || !is_eigenvector(gamma_l.mat(), l_index, 1e-10, &gl))
    throw InputError("dilate_subpreserving: chosen basis vectors are not Gamma eigenvectors");

  // g_l g_i = g_k g_f with the larger of g_i, g_f equal to one.
  double gi = 1.0, gf = 1.0;
  if (gl >= gk && gl > 0.0) {
    gi = gk / gl;
  } else if (gk > 0.0) {
    gf = gl / gk;
  }
  CMat gq = CMat::Zero(2, 2);
  gq(0, 0) = gi;
  gq(1, 1) = gf;

  const CMat& G_k = gamma_k.mat();
  const CMat& G_l = gamma_l.mat();
  const CMat gk_half = mfun(G_k, MatFn::sqrt, tol);
  const CMat gl_inv_half = mfun(G_l, MatFn::inv_sqrt, tol);
  const CMat pi_l = support(G_l, tol).projector;
  const CMat ket_k = basis_op(dk, k_index, k_index);
  const CMat ket_l = basis_op(dl, l_index, l_index);
  const CMat g_kl = kron(G_k, G_l);
  const int dkl = dk * dl;
  const CMat id_kl = CMat::Identity(dkl, dkl);

  const CMat a_op = g_kl - kron(gk_half * phi_tilde.adjoint(pi_l) * gk_half, ket_l) * gl;
  const CMat b_op = id_kl - kron(phi_tilde.adjoint(CMat::Identity(dl, dl)), ket_l);
  const CMat phi_gk = phi_tilde.apply(G_k);
  const CMat c_op = g_kl - kron(ket_k, phi_gk) * gk;
  const CMat d_op = id_kl - kron(ket_k, gl_inv_half * phi_gk * gl_inv_half);
  auto state_of = [&](const CMat& x) -> CMat {
    const double tr = x.trace().real();
    if (tr > 1e-14 * scale_of(g_kl)) return x / tr;
    return id_kl / static_cast<double>(dkl);
  };
  const CMat tau_a = state_of(a_op), tau_c = state_of(c_op);

  auto idx = [dl](int k, int l, int q) { return static_cast<Eigen::Index>((k * dl + l) * 2 + q); };
  const int dtot = dkl * 2;
  auto phi = [&](const CMat& x) {
    CMat out = CMat::Zero(dtot, dtot);
    CMat xk(dk, dk), xl(dl, dl), q0(dkl, dkl), q1(dkl, dkl);
    for (int a = 0; a < dk; ++a)
      for (int b = 0; b < dk; ++b) xk(a, b) = x(idx(a, l_index, 0), idx(b, l_index, 0));
    for (int a = 0; a < dl; ++a)
      for (int b = 0; b < dl; ++b) xl(a, b) = x(idx(k_index, a, 1), idx(k_index, b, 1));
    for (int r = 0; r < dkl; ++r)
      for (int c = 0; c < dkl; ++c) {
        q0(r, c) = x(2 * r, 2 * c);
        q1(r, c) = x(2 * r + 1, 2 * c + 1);
      }
    CMat t1 = phi_tilde.apply(xk);
    CMat t2 = gk_half * phi_tilde.adjoint(gl_inv_half * xl * gl_inv_half) * gk_half;
    CMat t3 = (b_op.cwiseProduct(q0.transpose())).sum() * tau_a;
    CMat t4 = (d_op.cwiseProduct(q1.transpose())).sum() * tau_c;
    for (int a = 0; a < dl; ++a)
      for (int b = 0; b < dl; ++b) out(idx(k_index, a, 1), idx(k_index, b, 1)) += t1(a, b);
    for (int a = 0; a < dk; ++a)
      for (int b = 0; b < dk; ++b) out(idx(a, l_index, 0), idx(b, l_index, 0)) += t2(a, b);
    for (int r = 0; r < dkl; ++r)
      for (int c = 0; c < dkl; ++c) {
        out(2 * r, 2 * c) += t3(r, c);
        out(2 * r + 1, 2 * c + 1) += t4(r, c);
      }
    return out;
  };

  Dilation dil;
  dil.k_index = k_index;
  dil.l_index = l_index;
  Dims dims = {dk, dl, 2};
  dil.phi = channel_from_map(phi, dims, dims, tol);
  dil.gamma_q = GammaOperator(HermitianOperator(gq), "Q");
  dil.gamma_total = GammaOperator(HermitianOperator(kron(g_kl, gq), dims), "KLQ");
  dil.report = is_gamma_subpreserving(dil.phi, dil.gamma_total, dil.gamma_total, tol);
  ensure(dil.report.preserving(kConstructionTol * scale_of(dil.gamma_total.mat())),
         "dilate_subpreserving: dilation is not trace and Gamma preserving");
  ensure(std::abs(gl * gi - gk * gf) <= 1e-15 * std::max(1.0, gl + gk), "dilate_subpreserving: eigenvalue balance");

  CMat restricted = choi_of_map([&](const CMat& x) { return post_select(dil, x); }, dk);
  dil.post_selection_error = (restricted - phi_tilde.mat()).cwiseAbs().maxCoeff();
  ensure(dil.post_selection_error <= kConstructionTol, "dilate_subpreserving: post-selection identity");
  return dil;
}

CMat post_select(const Dilation& d, const CMat& x) {
  const Dims& dims = d.phi.in_dims();
  const int dk = dims[0], dl = dims[1];
  if (x.rows() != dk) throw InputError("post_select: input dimension mismatch");
  CMat in = kron_all({x, basis_op(dl, d.l_index, d.l_index), basis_op(2, 0, 0)});
  CMat out = d.phi.apply(in);
  CMat r(dl, dl);
  for (int a = 0; a < dl; ++a)
    for (int b = 0; b < dl; ++b) r(a, b) = out((d.k_index * dl + a) * 2 + 1, (d.k_index * dl + b) * 2 + 1);
  return r;
}

Battery Battery::information(double lambda1, double lambda2) {
  Battery b;
  b.kind = Kind::information;
  b.lambda1 = lambda1;
  b.lambda2 = lambda2;
  return b;
}

Battery Battery::wit(double g1, double g2) {
  Battery b;
  b.kind = Kind::wit;
  b.g1 = g1;
  b.g2 = g2;
  return b;
}

Battery Battery::projector_pair(const CMat& gamma_w, const CMat& p_in, const CMat& p_out) {
  Battery b;
  b.kind = Kind::projector_pair;
  b.gamma_w = gamma_w;
  b.p_in = p_in;
  b.p_out = p_out;
  return b;
}

double yield_margin(const ChoiChannel& e, const GammaOperator& gamma_x, const GammaOperator& gamma_xp, double y) {
  if (e.din() != gamma_x.dim() || e.dout() != gamma_xp.dim()) throw InputError("yield: dimension mismatch");
  return min_eig(std::exp2(-y) * gamma_xp.mat() - e.apply(gamma_x.mat()));
}

namespace {

void require_yield(const ChoiChannel& e, const GammaOperator& gamma_x, const GammaOperator& gamma_xp, double y,
                   const Tolerances& tol, const char* who) {
  if (!e.is_tni(tol) || e.cp_defect() > tol.psd_tol * scale_of(e.mat()))
    throw InputError(std::string(who) + ": map must be completely positive and trace nonincreasing");
  const double margin = yield_margin(e, gamma_x, gamma_xp, y);
  if (margin < -tol.psd_tol * scale_of(std::exp2(-y) * gamma_xp.mat())) {
    std::ostringstream os;
    os << who << ": E(Gamma_X) <= 2^-y Gamma_X' violated, margin " << margin;
    throw InputError(os.str());
  }
}

int integral_power(double lambda) {
  if (lambda < 0.0) throw InputError("battery_lift: information battery needs lambda >= 0");
  const double n = std::exp2(lambda);
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 || r > 4096) throw InputError("battery_lift: 2^lambda must be a (small) integer");
  return static_cast<int>(r);
}

CMat diag_projector(int d, int rank) {
  CMat p = CMat::Zero(d, d);
  for (int i = 0; i < rank; ++i) p(i, i) = 1.0;
  return p;
}

}  // namespace

BatteryLift battery_lift(const ChoiChannel& e, const GammaOperator& gamma_x, const GammaOperator& gamma_xp, double y,
                         const Battery& battery, const Tolerances& tol) {
  require_yield(e, gamma_x, gamma_xp, y, tol, "battery_lift");
  CMat gw, p_in, p_out;
  switch (battery.kind) {
    case Battery::Kind::information: {
      if (battery.lambda1 - battery.lambda2 > y + 1e-12)
        throw InputError("battery_lift: information battery needs lambda1 - lambda2 <= y");
      const int n1 = integral_power(battery.lambda1), n2 = integral_power(battery.lambda2);
      const int dw = std::max(n1, n2);
      gw = CMat::Identity(dw, dw);
      p_in = diag_projector(dw, n1);
      p_out = diag_projector(dw, n2);
      break;
    }
    case Battery::Kind::wit:
      if (!(battery.g1 > 0.0) || battery.g2 < 0.0) throw InputError("battery_lift: wit needs g1 > 0 and g2 >= 0");
      if (battery.g2 / battery.g1 < std::exp2(-y) * (1.0 - 1e-12))
        throw InputError("battery_lift: wit needs g2/g1 >= 2^-y");
      gw = CMat::Zero(2, 2);
      gw(0, 0) = battery.g1;
      gw(1, 1) = battery.g2;
      p_in = basis_op(2, 0, 0);
      p_out = basis_op(2, 1, 1);
      break;
    case Battery::Kind::projector_pair: {
      gw = battery.gamma_w;
      p_in = battery.p_in;
      p_out = battery.p_out;
      const int dw = static_cast<int>(gw.rows());
      if (gw.cols() != dw || p_in.rows() != dw || p_out.rows() != dw)
        throw InputError("battery_lift: projector and Gamma_W dimensions differ");
      for (const CMat* p : {&p_in, &p_out}) {
        if ((*p * *p - *p).cwiseAbs().maxCoeff() > 1e-9 || (*p - p->adjoint()).cwiseAbs().maxCoeff() > 1e-9)
          throw InputError("battery_lift: P and P' must be orthogonal projectors");
        if ((*p * gw - gw * *p).cwiseAbs().maxCoeff() > 1e-9 * scale_of(gw))
          throw InputError("battery_lift: projectors must commute with Gamma_W");
      }
      break;
    }
  }
  GammaOperator gamma_w(HermitianOperator(gw), "W", tol);
  const double w_in = (p_in * gw).trace().real(), w_out = (p_out * gw).trace().real();
  if (!(w_in > 0.0) || !(w_out > 0.0)) throw InputError("battery_lift: battery states must have tr(P Gamma_W) > 0");
  if (w_out / w_in < std::exp2(-y) * (1.0 - 1e-12))
    throw InputError("battery_lift: tr(P' Gamma_W)/tr(P Gamma_W) >= 2^-y violated");

  const int dw = static_cast<int>(gw.rows());
  const int dx = e.din();
  BatteryLift r;
  r.battery_start = p_in * gw * p_in / w_in;
  r.battery_end = p_out * gw * p_out / w_out;
  const CMat lift_in = kron(p_in, CMat::Identity(dx, dx));
  auto f = [&](const CMat& x) {
    CMat reduced = ptrace(lift_in * x, {dw, dx}, {0});
    return kron(r.battery_end, e.apply(reduced));
  };
  r.map = channel_from_map(f, concat({dw}, e.out_dims()), concat({dw}, e.in_dims()), tol);
  r.gamma_in = tensor_product(gamma_w, gamma_x);
  r.gamma_out = tensor_product(gamma_w, gamma_xp);
  r.report = is_gamma_subpreserving(r.map, r.gamma_in, r.gamma_out, tol);
  ensure(r.report.is_cp && r.report.tni_excess <= kConstructionTol &&
             r.report.gamma_defect >= -kConstructionTol * scale_of(r.gamma_out.mat()),
         "battery_lift: lift is not Gamma-sub-preserving");
  CMat reproduced = choi_of_map([&](const CMat& w) { return r.map.apply(kron(r.battery_start, w)); }, dx);
  CMat expected = choi_of_map([&](const CMat& w) { return kron(r.battery_end, e.apply(w)); }, dx);
  ensure((reproduced - expected).cwiseAbs().maxCoeff() <= kConstructionTol, "battery_lift: E not reproduced");
  return r;
}

ChoiChannel reverse_process(const ChoiChannel& e, const GammaOperator& gamma_x, const GammaOperator& gamma_xp,
                            double y, const Tolerances& tol) {
  require_yield(e, gamma_x, gamma_xp, y, tol, "reverse_process");
  const CMat gx_half = mfun(gamma_x.mat(), MatFn::sqrt, tol);
  const CMat gxp_inv_half = mfun(gamma_xp.mat(), MatFn::inv_sqrt, tol);
  const double factor = std::exp2(y);
  auto f = [&](const CMat& w) { return CMat(factor * gx_half * e.adjoint(gxp_inv_half * w * gxp_inv_half) * gx_half); };
  ChoiChannel r = channel_from_map(f, e.in_dims(), e.out_dims(), tol);
  ensure(r.tni_excess() <= kConstructionTol, "reverse_process: not trace nonincreasing");
  const CMat bound = factor * gamma_x.mat() - r.apply(gamma_xp.mat());
  ensure(min_eig(bound) >= -kConstructionTol * scale_of(factor * gamma_x.mat()),
         "reverse_process: R(Gamma_X') <= 2^y Gamma_X violated");
  return r;
}

}  // namespace ssqt
