#include "ssqt/workcost.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ssqt/coherent.hpp"
#include "ssqt/entropy.hpp"
#include "ssqt/gamma.hpp"

namespace ssqt {

namespace {

constexpr double kCrossCheckTol = 1e-8;

WorkReport report(double bits, double eps, double eps_tilde, WorkMethod method) {
  WorkReport r;
  r.bits = bits;
  r.kt_ln2_units = bits;
  r.epsilon = eps;
  r.epsilon_tilde = eps_tilde;
  r.method = method;
  return r;
}

void check_epsilon(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InputError("smoothing parameter must lie in [0, 1)");
}

// Restricts both factors of a bipartite operator to the supports of its marginals.
SubnormalizedState compress_bipartite(const CMat& m, int d1, int d2, const Tolerances& tol) {
  auto basis = [&](const CMat& marginal) {
    Eigh e = eigh(marginal);
    const double cut = tol.rank_rel_tol * std::max(e.values.maxCoeff(), 1e-300);
    int k = 0;
    while (k < e.values.size() && e.values(k) <= cut) ++k;
    return CMat(e.vectors.rightCols(e.values.size() - k));
  };
  CMat b1 = basis(ptrace(m, {d1, d2}, {1}));
  CMat b2 = basis(ptrace(m, {d1, d2}, {0}));
  CMat iso = kron(b1, b2);
  Tolerances loose = tol;
  loose.trace_tol = std::max(tol.trace_tol, 1e-8);
  return SubnormalizedState(HermitianOperator(herm(iso.adjoint() * m * iso),
                                              {static_cast<int>(b1.cols()), static_cast<int>(b2.cols())}),
                            loose);
}

Dims or_single(const Dims& d, int n) { return d.empty() ? Dims{n} : d; }

// |psi>_X'ER = (V (x) 1)(sigma^{1/2} (x) 1)|Phi>, factor order X', E, R.
Ket purified_output(const Stinespring& st, const SubnormalizedState& sigma, int dout, const Tolerances& tol) {
  Ket in = purify(sigma, tol);
  const int d = sigma.dim();
  Ket out;
  out.amps = kron(st.v, CMat::Identity(d, d)) * in.amps;
  out.dims = {dout, st.env_dim, d};
  return out;
}

}  // namespace

ProcessMatrix::ProcessMatrix(SubnormalizedState rho, Dims out_dims, Dims in_dims)
    : rho_(std::move(rho)), out_(std::move(out_dims)), in_(std::move(in_dims)) {
  if (rho_.dim() != dout() * din()) throw InputError("process matrix: dimension mismatch");
}

CMat ProcessMatrix::sigma() const { return ptrace(rho_.mat(), {dout(), din()}, {0}).transpose(); }

ProcessMatrix process_matrix(const ChoiChannel& e, const SubnormalizedState& sigma, const Tolerances& tol) {
  if (sigma.dim() != e.din()) throw InputError("process_matrix: input state dimension mismatch");
  Dims dims = or_single(e.out_dims(), e.dout());
  Dims in = or_single(e.in_dims(), e.din());
  dims.insert(dims.end(), in.begin(), in.end());
  Tolerances loose = tol;
  loose.trace_tol = std::max(tol.trace_tol, 1e-8);
  return ProcessMatrix(SubnormalizedState(HermitianOperator(process_matrix(e, sigma.mat(), tol), dims), loose),
                       or_single(e.out_dims(), e.dout()), in);
}

ChoiChannel recover_channel(const ProcessMatrix& pm, const Tolerances& tol) {
  const int dout = pm.dout(), din = pm.din();
  CMat rho_r = ptrace(pm.rho().mat(), {dout, din}, {0});
  CMat lift = kron(CMat::Identity(dout, dout), mfun(rho_r, MatFn::inv_sqrt, tol));
  CMat choi = lift * pm.rho().mat() * lift;
  CMat off = CMat::Identity(din, din) - support(rho_r, tol).projector;
  choi += kron(CMat::Identity(dout, dout) / static_cast<double>(dout), off);
  return ChoiChannel(herm(choi), pm.out_dims(), pm.in_dims(), tol);
}

Stinespring stinespring(const ChoiChannel& e, const Tolerances& tol) {
  if (!e.is_tp(tol)) throw InputError("stinespring: channel is not trace preserving");
  std::vector<CMat> kraus = kraus_from_choi(e, tol);
  Stinespring st;
  st.env_dim = std::max<int>(1, static_cast<int>(kraus.size()));
  const int dout = e.dout(), din = e.din();
  st.v = CMat::Zero(dout * st.env_dim, din);
  for (int i = 0; i < static_cast<int>(kraus.size()); ++i)
    for (int a = 0; a < dout; ++a) st.v.row(a * st.env_dim + i) = kraus[i].row(a);
  return st;
}

std::string to_string(WorkMethod m) {
  switch (m) {
    case WorkMethod::exact: return "exact";
    case WorkMethod::smooth: return "smooth";
    case WorkMethod::classical: return "classical";
    case WorkMethod::coherent_sdp: return "coherent_sdp";
  }
  return "?";
}

WorkReport work_cost(const ChoiChannel& e, const SubnormalizedState& sigma, double epsilon, const Tolerances& tol) {
  check_epsilon(epsilon);
  if (sigma.dim() != e.din()) throw InputError("work_cost: input state dimension mismatch");
  CMat pi = support(sigma.mat(), tol).projector;
  // Trace preserving on supp(sigma): Pi E^dagger(1) Pi = Pi.
  CMat unit = e.adjoint(CMat::Identity(e.dout(), e.dout()));
  if ((pi * unit * pi - pi).cwiseAbs().maxCoeff() > 1e-8)
    throw InputError("work_cost: channel is not trace preserving on the support of the input");
  // Only the restriction to supp(sigma) matters; complete it to a channel for the dilation.
  CMat pin = kron(CMat::Identity(e.dout(), e.dout()), CMat(pi.transpose()));
  CMat choi = pin * e.mat() * pin + kron(CMat::Identity(e.dout(), e.dout()) / static_cast<double>(e.dout()),
                                    CMat(CMat::Identity(e.din(), e.din()) - pi).transpose());
  ChoiChannel completed(herm(choi), e.out_dims(), e.in_dims(), tol);
  Stinespring st = stinespring(completed, tol);
  Ket psi = purified_output(st, sigma, e.dout(), tol);

  if (epsilon == 0.0) {
    WorkReport r = report(std::log2(max_eig(e.apply(pi))), 0.0, 0.0, WorkMethod::exact);
    // H_max,0(E|X') on rho_X'E.
    CMat xe = reduced_state(psi, {2});
    Tolerances loose = tol;
    loose.trace_tol = std::max(tol.trace_tol, 1e-8);
    SubnormalizedState rho_xe(HermitianOperator(herm(xe), {e.dout(), st.env_dim}), loose);
    r.cross_check = conditional_entropy(rho_xe, {0}, CondKind::max0, tol).value;
    if (std::abs(r.cross_check - r.bits) > kCrossCheckTol) {
      std::ostringstream os;
      os << "work_cost: norm form " << r.bits << " and entropy form " << r.cross_check << " disagree";
      throw std::logic_error(os.str());
    }
    return r;
  }
  const double eps_tilde = std::sqrt(2.0 * epsilon);
  if (eps_tilde >= 1.0) throw InputError("work_cost: sqrt(2 eps) must be below 1");
  CMat er = reduced_state(psi, {0});
  SubnormalizedState rho_er = compress_bipartite(er, st.env_dim, sigma.dim(), tol);
  EntropyResult h = smooth_h_min(rho_er, {1}, eps_tilde, tol);
  WorkReport r = report(-h.value, epsilon, eps_tilde, WorkMethod::smooth);
  r.note = h.note;
  return r;
}

WorkReport work_cost_coherent(const ChoiChannel& e, const SubnormalizedState& sigma, const Tolerances& tol) {
  CoherentInstance inst = CoherentInstance::from_channel(e, sigma.mat(), identity_gamma(or_single(e.in_dims(), e.din())),
                                                         identity_gamma(or_single(e.out_dims(), e.dout())), tol);
  CoherentResult c = coherent_rel_entropy(inst, tol);
  WorkReport r = report(-c.value, 0.0, 0.0, WorkMethod::coherent_sdp);
  r.cross_check = -neg_hmax0_of_process(inst, tol);
  r.note = c.note;
  return r;
}

WorkReport work_cost_classical(const RMat& p_cond, const std::vector<bool>& support) {
  if (static_cast<int>(support.size()) != p_cond.cols())
    throw InputError("work_cost_classical: support length differs from the number of inputs");
  for (Eigen::Index x = 0; x < p_cond.cols(); ++x) {
    if (p_cond.col(x).minCoeff() < -1e-12 || std::abs(p_cond.col(x).sum() - 1.0) > 1e-9)
      throw InputError("work_cost_classical: columns of p(x'|x) must be probability distributions");
  }
  if (std::none_of(support.begin(), support.end(), [](bool b) { return b; }))
    throw InputError("work_cost_classical: empty support");
  RVec load = RVec::Zero(p_cond.rows());
  for (Eigen::Index x = 0; x < p_cond.cols(); ++x)
    if (support[x]) load += p_cond.col(x);
  return report(std::log2(load.maxCoeff()), 0.0, 0.0, WorkMethod::classical);
}

RMat gate_table(const std::string& name) {
  auto f = [&](int a, int b) -> int {
    if (name == "and") return a & b;
    if (name == "or") return a | b;
    if (name == "xor") return a ^ b;
    if (name == "nand") return 1 - (a & b);
    if (name == "nor") return 1 - (a | b);
    throw InputError("unknown gate '" + name + "' (expected and, or, xor, nand, nor)");
  };
  RMat p = RMat::Zero(2, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) p(f(a, b), 2 * a + b) = 1.0;
  return p;
}

ChoiChannel classical_channel(const RMat& p_cond) {
  const int dout = static_cast<int>(p_cond.rows()), din = static_cast<int>(p_cond.cols());
  CMat choi = CMat::Zero(dout * din, dout * din);
  for (int a = 0; a < dout; ++a)
    for (int x = 0; x < din; ++x) choi(a * din + x, a * din + x) = p_cond(a, x);
  return ChoiChannel(choi, {dout}, {din});
}

ChoiChannel erasure_map(int ds, int dm) {
  return channel_from_map(
      [=](const CMat& x) { return CMat(kron(basis_op(ds, 0, 0), ptrace(x, {ds, dm}, {0}))); }, {ds, dm}, {ds, dm});
}

WorkReport erasure_with_memory(const SubnormalizedState& sigma_sm, double epsilon, const Tolerances& tol) {
  check_epsilon(epsilon);
  if (sigma_sm.dims().size() != 2) throw InputError("erasure_with_memory: expected a bipartite state on S, M");
  if (epsilon == 0.0) {
    WorkReport r = report(conditional_entropy(sigma_sm, {1}, CondKind::max0, tol).value, 0.0, 0.0, WorkMethod::exact);
    r.cross_check = work_cost(erasure_map(sigma_sm.dims()[0], sigma_sm.dims()[1]), sigma_sm, 0.0, tol).bits;
    if (std::abs(r.cross_check - r.bits) > 1e-5) {
      std::ostringstream os;
      os << "erasure_with_memory: H_max,0(S|M) = " << r.bits << " differs from the erasure map cost " << r.cross_check;
      throw std::logic_error(os.str());
    }
    return r;
  }
  EntropyResult h = smooth_h_max(sigma_sm, {1}, epsilon, tol);
  WorkReport r = report(h.value, epsilon, epsilon, WorkMethod::smooth);
  r.note = h.note;
  return r;
}

void MeasurementInstrument::validate(const Tolerances& tol) const {
  if (collapse.empty()) throw InputError("instrument: no outcomes");
  if (!labels.empty() && labels.size() != collapse.size()) throw InputError("instrument: label count mismatch");
  const int din = collapse[0].din(), dout = collapse[0].dout();
  CMat total = CMat::Zero(din, din);
  for (const auto& c : collapse) {
    if (c.din() != din || c.dout() != dout) throw InputError("instrument: collapse maps differ in dimensions");
    if (c.cp_defect() > tol.psd_tol) throw InputError("instrument: collapse map is not completely positive");
    total += c.adjoint(CMat::Identity(dout, dout));
  }
  if ((total - CMat::Identity(din, din)).cwiseAbs().maxCoeff() > 1e-8)
    throw InputError("instrument: outcome probabilities do not sum to one");
}

std::vector<CMat> MeasurementInstrument::povm() const {
  std::vector<CMat> out;
  for (const auto& c : collapse) out.push_back(herm(c.adjoint(CMat::Identity(c.dout(), c.dout()))));
  return out;
}

MeasurementInstrument MeasurementInstrument::projective(const std::vector<CMat>& projectors) {
  MeasurementInstrument m;
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    const int d = static_cast<int>(projectors[k].rows());
    m.collapse.push_back(choi_from_kraus({projectors[k]}, {d}, {d}));
    m.labels.push_back(std::to_string(k));
  }
  return m;
}

MeasurementInstrument MeasurementInstrument::trivial(const RVec& probabilities, int d) {
  MeasurementInstrument m;
  for (Eigen::Index k = 0; k < probabilities.size(); ++k) {
    if (probabilities(k) < 0.0) throw InputError("instrument: negative probability");
    m.collapse.push_back(
        choi_from_kraus({CMat(std::sqrt(probabilities(k)) * CMat::Identity(d, d))}, {d}, {d}));
    m.labels.push_back(std::to_string(k));
  }
  return m;
}

MeasurementReport measurement_analysis(const MeasurementInstrument& inst, const SubnormalizedState& sigma,
                                       double epsilon, const Tolerances& tol) {
  check_epsilon(epsilon);
  inst.validate(tol);
  const int ds = inst.collapse[0].din(), dsp = inst.collapse[0].dout(), nc = inst.outcomes();
  if (sigma.dim() != ds) throw InputError("measurement_analysis: input state dimension mismatch");

  std::vector<std::vector<CMat>> kraus;
  int ne = 0;
  MeasurementReport rep;
  rep.subunital = true;
  rep.single_kraus = true;
  for (const auto& c : inst.collapse) {
    kraus.push_back(kraus_from_choi(c, tol));
    ne += static_cast<int>(kraus.back().size());
    if (kraus.back().size() > 1) rep.single_kraus = false;
    if (max_eig(c.apply(CMat::Identity(ds, ds))) > 1.0 + 1e-9) rep.subunital = false;
  }
  ne = std::max(ne, 1);

  // |rho>_ECS'R = sum_{k,i} |k,i>_E |k>_C (E_i^(k) (x) 1)|sigma>_SR.
  Ket in = purify(sigma, tol);
  Ket psi;
  psi.dims = {ne, nc, dsp, ds};
  psi.amps = CVec::Zero(static_cast<Eigen::Index>(ne) * nc * dsp * ds);
  int e = 0;
  for (int k = 0; k < nc; ++k)
    for (const CMat& kr : kraus[k]) {
      CVec branch = kron(kr, CMat::Identity(ds, ds)) * in.amps;
      const Eigen::Index base = (static_cast<Eigen::Index>(e) * nc + k) * dsp * ds;
      psi.amps.segment(base, static_cast<Eigen::Index>(dsp) * ds) = branch;
      ++e;
    }
  rep.state = psi;
  Tolerances loose = tol;
  loose.trace_tol = std::max(tol.trace_tol, 1e-8);
  loose.psd_tol = std::max(tol.psd_tol, 1e-8);
  auto reduced = [&](const std::vector<int>& traced, Dims dims) {
    return SubnormalizedState(HermitianOperator(reduced_state(psi, traced), std::move(dims)), loose);
  };
  auto hmax = [&](const SubnormalizedState& s, const std::vector<int>& cond) {
    EntropyResult r = smooth_h_max(s, cond, epsilon, tol);
    WorkReport w = report(r.value, epsilon, epsilon, epsilon > 0.0 ? WorkMethod::smooth : WorkMethod::exact);
    w.note = r.note;
    return w;
  };
  rep.measurement = hmax(reduced({3}, {ne, nc, dsp}), {1, 2});
  rep.reset_given_sout = hmax(reduced({0, 3}, {nc, dsp}), {1});
  SubnormalizedState rho_cr = reduced({0, 2}, {nc, ds});
  rep.reset_given_ref = hmax(rho_cr, {1});

  if (rep.subunital && rep.measurement.bits > 1e-6) {
    std::ostringstream os;
    os << "measurement_analysis: subunital instrument with positive measurement cost " << rep.measurement.bits;
    throw std::logic_error(os.str());
  }
  if (rep.single_kraus) {
    const double hmin = smooth_h_min(rho_cr, {1}, epsilon, tol).value;
    rep.identity_defect = std::abs(rep.measurement.bits + rep.reset_given_ref.bits -
                                   (rep.reset_given_ref.bits - hmin));
    if (rep.identity_defect > 1e-5) {
      std::ostringstream os;
      os << "measurement_analysis: measurement cost differs from -H_min(C|R) by " << rep.identity_defect;
      throw std::logic_error(os.str());
    }
  }
  return rep;
}

}  // namespace ssqt
