#include "ssqt/battery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ssqt/coherent.hpp"
#include "ssqt/entropy.hpp"
#include "ssqt/gamma.hpp"
#include "ssqt/random.hpp"
#include "ssqt/sdp_problem.hpp"
#include "ssqt/thermo.hpp"
#include "ssqt/workcost.hpp"

namespace ssqt {

namespace {

// Accumulates the worst deviation of a family of checks.
struct Tally {
  bool ok = true;
  int count = 0;
  double worst = 0.0;  // largest deviation seen by within()
  double min_slack = std::numeric_limits<double>::infinity();
  std::string first_failure;

  void within(double measured, double target, double tol, const std::string& what) {
    const double dev = std::abs(measured - target);
    worst = std::max(worst, dev);
    ++count;
    if (!(dev <= tol)) fail(what, measured, target);
  }
  // Records slack >= -tol.
  void slack(double s, double tol, const std::string& what) {
    min_slack = std::min(min_slack, s);
    ++count;
    if (!(s >= -tol)) fail(what, s, -tol);
  }
  void truth(bool cond, const std::string& what) {
    ++count;
    if (!cond) fail(what, 0.0, 1.0);
  }
  void fail(const std::string& what, double measured, double target) {
    if (ok) {
      std::ostringstream os;
      os << what << ": got " << std::setprecision(10) << measured << ", want " << target;
      first_failure = os.str();
    }
    ok = false;
  }
};

std::string fmt(double v, int prec = 10) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

GammaOperator random_gamma(int d, Rng& rng) { return GammaOperator(HermitianOperator(random_psd(d, rng, 0.2, 2.0))); }

ChoiChannel random_channel(int din, int dout, Rng& rng) {
  return choi_from_kraus(random_kraus(din, dout, rng.integer((din + dout - 1) / dout, din * dout), rng), {dout}, {din});
}

CMat diag_mat(const RVec& v) { return v.cast<Cplx>().asDiagonal(); }

// Commuting pair (Gamma, P): random spectrum and rank-r projector in a shared random eigenbasis.
std::pair<CMat, CMat> commuting_pair(int d, int rank, Rng& rng) {
  CMat u = random_unitary(d, rng);
  RVec g(d), p = RVec::Zero(d);
  for (int i = 0; i < d; ++i) g(i) = rng.uniform(0.2, 2.0);
  for (int i = 0; i < rank; ++i) p(i) = 1.0;
  return {herm(u * diag_mat(g) * u.adjoint()), herm(u * diag_mat(p) * u.adjoint())};
}

// rho_o (x) rho_r plus a correlation term with vanishing marginals, kept inside the supports.
CMat correlated(const CMat& rho_o, const CMat& rho_r, Rng& rng, const Tolerances& tol) {
  const int dxp = static_cast<int>(rho_o.rows()), dr = static_cast<int>(rho_r.rows());
  Support so = support(rho_o, tol), sr = support(rho_r, tol);
  const double ko = so.projector.trace().real(), kr = sr.projector.trace().real();
  CMat pp = kron(so.projector, sr.projector);
  CMat h = herm(pp * random_hermitian(dxp * dr, rng) * pp);
  CMat delta = h - kron(ptrace(h, {dxp, dr}, {1}), sr.projector / kr) - kron(so.projector / ko, ptrace(h, {dxp, dr}, {0})) +
               h.trace().real() * pp / (ko * kr);
  CMat prod = kron(rho_o, rho_r);
  RVec ev = eigh(prod).values;
  double floor = 0.0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > 1e-9) floor = floor == 0.0 ? ev(i) : std::min(floor, ev(i));
  const double scale = norm(delta, NormKind::infinity);
  if (scale <= 1e-12) return prod;  // a pure marginal forces a product state
  return herm(prod + 0.5 * floor / scale * delta);
}

ChoiChannel classical_bit_channel(double flip01, double flip10) {
  RMat pc(2, 2);
  pc << 1.0 - flip01, flip10, flip01, 1.0 - flip10;
  return classical_channel(pc);
}

CriterionResult gate(int id, const std::string& name, double expected) {
  CriterionResult r;
  r.id = id;
  r.name = name + " gate cost";
  const RMat table = gate_table(name);
  WorkReport cl = work_cost_classical(table, std::vector<bool>(4, true));
  SubnormalizedState uniform(CMat(CMat::Identity(4, 4) / 4.0), {4});
  WorkReport coh = work_cost_coherent(classical_channel(table), uniform);
  r.pass = std::abs(cl.bits - expected) <= 1e-9 && std::abs(coh.bits - expected) <= 1e-4;
  r.detail = "classical " + fmt(cl.bits) + ", coherent SDP " + fmt(coh.bits) + ", expected " + fmt(expected);
  return r;
}

CriterionResult c1(std::uint64_t) { return gate(1, "and", std::log2(3.0)); }
CriterionResult c2(std::uint64_t) { return gate(2, "xor", 1.0); }

CriterionResult c3(std::uint64_t) {
  CriterionResult r;
  CVec w = CVec::Zero(8);
  w(1) = w(2) = w(4) = 1.0 / std::sqrt(3.0);
  CMat sm = ptrace(CMat(w * w.adjoint()), {2, 2, 2}, {2});
  SubnormalizedState st(sm, {2, 2});
  const double h = conditional_entropy(st, 1, CondKind::max0).value;
  const double er = erasure_with_memory(st, 0.0).bits;
  const double expected = std::log2(1.5);
  r.pass = std::abs(h - expected) <= 1e-9 && std::abs(er - expected) <= 1e-9;
  r.detail = "H_max,0(S|M) " + fmt(h) + ", erasure " + fmt(er) + ", expected " + fmt(expected);
  return r;
}

CriterionResult c4(std::uint64_t seed) {
  CriterionResult r;
  Rng rng(seed + 4);
  Tally t;
  for (int i = 0; i < 12; ++i) {
    const int d = 2 + i % 2;
    GammaOperator g = random_gamma(d, rng);
    CMat sigma = random_state(d, rng, 1 + (i / 2) % d);
    auto inst = CoherentInstance::from_channel(identity_channel({d}), sigma, g, g);
    t.within(coherent_rel_entropy(inst).value, 0.0, 1e-4, "instance " + std::to_string(i));
  }
  r.pass = t.ok;
  r.detail = std::to_string(t.count) + " instances, max |D| " + fmt(t.worst, 3) + (t.ok ? "" : "; " + t.first_failure);
  return r;
}

CriterionResult c5(std::uint64_t seed) {
  CriterionResult r;
  Rng rng(seed + 5);
  Tally t;
  const Tolerances tol = Tolerances::defaults();
  for (int i = 0; i < 24; ++i) {
    const int dr = rng.integer(2, 4), dxp = rng.integer(2, 4);
    auto [gr, p] = commuting_pair(dr, rng.integer(1, dr), rng);
    auto [go, pp] = commuting_pair(dxp, rng.integer(1, dxp), rng);
    CMat rho_r = p * gr * p / (p * gr).trace().real();
    CMat rho_o = pp * go * pp / (pp * go).trace().real();
    CMat rho = i % 3 == 0 ? CMat(kron(rho_o, rho_r)) : correlated(rho_o, rho_r, rng, tol);
    CoherentInstance inst(SubnormalizedState(rho, {dxp, dr}), GammaOperator(HermitianOperator(gr)),
                          GammaOperator(HermitianOperator(go)));
    const double expected = std::log2((pp * go).trace().real()) - std::log2((p * gr).trace().real());
    t.within(coherent_rel_entropy(inst).value, expected, 1e-5, "instance " + std::to_string(i));
  }
  r.pass = t.ok;
  r.detail = std::to_string(t.count) + " instances, max deviation " + fmt(t.worst, 3) +
             (t.ok ? "" : "; " + t.first_failure);
  return r;
}

CriterionResult c6(std::uint64_t seed) {
  CriterionResult r;
  Rng rng(seed + 6);
  Tally t;
  for (int i = 0; i < 10; ++i) {
    const int d = 2 + i % 3;
    GammaOperator g = random_gamma(d, rng);
    CMat rho = random_state(d, rng, 1 + i % d);
    SubnormalizedState st(rho, {d});
    CoherentInstance to_nothing(SubnormalizedState(rho, {1, d}), g, identity_gamma({1}));
    t.within(coherent_rel_entropy(to_nothing).value, relative_entropy(st, g.op(), RelKind::min0).value, 1e-5,
             "R -> nothing, instance " + std::to_string(i));
    CoherentInstance from_nothing(SubnormalizedState(rho, {d, 1}), identity_gamma({1}), g);
    t.within(coherent_rel_entropy(from_nothing).value, -relative_entropy(st, g.op(), RelKind::max).value, 1e-5,
             "nothing -> X', instance " + std::to_string(i));
  }
  r.pass = t.ok;
  r.detail = std::to_string(t.count) + " reductions, max deviation " + fmt(t.worst, 3) +
             (t.ok ? "" : "; " + t.first_failure);
  return r;
}

CriterionResult c7(std::uint64_t seed) {
  CriterionResult r;
  Rng rng(seed + 7);
  Tally t;
  int product = 0;
  for (int i = 0; i < 54; ++i) {
    const int dx = rng.integer(2, 3), dxp = rng.integer(2, 3);
    GammaOperator gx = random_gamma(dx, rng), gxp = random_gamma(dxp, rng);
    CoherentInstance inst;
    if (i % 3 == 0) {
      CMat rho = kron(random_state(dxp, rng), random_state(dx, rng, rng.integer(1, dx)));
      inst = CoherentInstance(SubnormalizedState(rho, {dxp, dx}), gx, gxp);
      ++product;
    } else {
      inst = CoherentInstance::from_channel(random_channel(dx, dxp, rng), random_state(dx, rng, rng.integer(1, dx)),
                                            gx, gxp);
    }
    const double v = coherent_rel_entropy(inst).value;
    for (const auto& b : bounds(inst)) {
      const double s = b.side == BoundSide::lower ? v - b.value : b.value - v;
      t.slack(s, 1e-6, b.name + ", instance " + std::to_string(i));
    }
  }
  r.pass = t.ok;
  r.detail = std::to_string(t.count) + " bound checks (" + std::to_string(product) + " product instances), worst slack " +
             fmt(t.min_slack, 3) + (t.ok ? "" : "; " + t.first_failure);
  return r;
}

CriterionResult c8(std::uint64_t seed) {
  CriterionResult r;
  Rng rng(seed + 8);
  Tally t;
  for (int i = 0; i < 20; ++i) {
    GammaOperator g0 = random_gamma(2, rng), g1 = random_gamma(2, rng), g2 = random_gamma(2, rng);
    auto first = random_channel(2, 2, rng), second = random_channel(2, 2, rng);
    auto ch = compose(first, random_state(2, rng), second, g0, g1, g2);
    const double a = coherent_rel_entropy(ch.step1).value, b = coherent_rel_entropy(ch.step2).value;
    const double c = coherent_rel_entropy(ch.total).value;
    t.slack(c - a - b, 1e-5, "instance " + std::to_string(i));
  }
  r.pass = t.ok;
  r.detail = std::to_string(t.count) + " compositions, worst slack " + fmt(t.min_slack, 3) +
             (t.ok ? "" : "; " + t.first_failure);
  return r;
}

CriterionResult c9(std::uint64_t) {
  CriterionResult r;
  const double eps = 0.1;
  // Chosen so the smoothed value stays off zero at every n and the gap visibly shrinks.
  ChoiChannel one = classical_bit_channel(0.2, 0.05);
  CMat sigma1 = CMat::Zero(2, 2), g1 = CMat::Zero(2, 2);
  sigma1(0, 0) = 0.8;
  sigma1(1, 1) = 0.2;
  g1(0, 0) = 1.0;
  g1(1, 1) = 0.3;
  ChoiChannel e = one;
  CMat sigma = sigma1, g = g1;
  Tally t;
  double prev_gap = 0.0;
  std::ostringstream os;
  for (int n = 1; n <= 3; ++n) {
    if (n > 1) {
      e = tensor(e, one);
      sigma = kron(sigma, sigma1);
      g = kron(g, g1);
    }
    GammaOperator gn(HermitianOperator(g, Dims(n, 2)));
    auto inst = CoherentInstance::from_channel(e, sigma, gn, gn);
    const double v = smooth_coherent(inst, eps).value / n;
    double lower = 0.0, upper = 0.0;
    for (const auto& b : bounds(inst, eps)) {
      if (b.name == "smooth_lower") lower = b.value / n;
      if (b.name == "relative_entropy_difference") upper = b.value / n;
    }
    t.slack(v - lower, 1e-6, "lower bound at n=" + std::to_string(n));
    t.slack(upper - v, 1e-6, "upper bound at n=" + std::to_string(n));
    const double gap = std::abs(upper - v);
    if (n > 1) t.slack(prev_gap - gap, 1e-6, "gap growth at n=" + std::to_string(n));
    prev_gap = gap;
    os << (n > 1 ? "; " : "") << "n=" << n << ": " << fmt(v, 6) << " in [" << fmt(lower, 4) << ", " << fmt(upper, 6)
       << "], gap " << fmt(gap, 4);
  }
  r.pass = t.ok;
  r.detail = os.str() + (t.ok ? "" : "; " + t.first_failure);
  return r;
}

CriterionResult c10(std::uint64_t seed) {
  CriterionResult r;
  Rng rng(seed + 10);
  Tally t;
  for (int i = 0; i < 6; ++i) {
    CVec psi = random_pure(8, rng);
    CMat abc = psi * psi.adjoint();
    SubnormalizedState ab(ptrace(abc, {2, 2, 2}, {2}), {2, 2}), ac(ptrace(abc, {2, 2, 2}, {1}), {2, 2});
    const std::string tag = "state " + std::to_string(i);
    t.within(conditional_entropy(ab, 1, CondKind::max).value, -conditional_entropy(ac, 1, CondKind::min).value, 1e-6,
             "duality, " + tag);
    t.within(smooth_h_max(ab, {1}, 0.1).value, -smooth_h_min(ac, {1}, 0.1).value, 1e-4, "smooth duality, " + tag);

    SubnormalizedState mixed(random_state(8, rng, 2), {2, 2, 2});
    SubnormalizedState mab(ptrace(mixed.mat(), {2, 2, 2}, {2}), {2, 2});
    for (CondKind k : {CondKind::vn, CondKind::min, CondKind::max}) {
      const double abc_v = conditional_entropy(mixed, std::vector<int>{1, 2}, k).value;
      const double ab_v = conditional_entropy(mab, 1, k).value;
      t.slack(ab_v - abc_v, 1e-6, "subadditivity, " + tag);
    }
    t.slack(smooth_h_min(mab, {1}, 0.1).value - smooth_h_min(mixed, {1, 2}, 0.1).value, 1e-4,
            "smooth min subadditivity, " + tag);
    t.slack(smooth_h_max(mab, {1}, 0.1).value - smooth_h_max(mixed, {1, 2}, 0.1).value, 1e-4,
            "smooth max subadditivity, " + tag);
  }
  r.pass = t.ok;
  r.detail = std::to_string(t.count) + " checks, max deviation " + fmt(t.worst, 3) + ", min slack " + fmt(t.min_slack, 3) +
             (t.ok ? "" : "; " + t.first_failure);
  return r;
}

CriterionResult c11(std::uint64_t seed) {
  CriterionResult r;
  Rng rng(seed + 11);
  Tally t;
  int feasible = 0;
  for (int i = 0; i < 24; ++i) {
    RVec g(3);
    for (int k = 0; k < 3; ++k) g(k) = rng.uniform(0.2, 1.0);
    RVec p = random_probability(3, rng), q = random_probability(3, rng);
    if (i % 2 == 0) {
      // A mixture toward the Gibbs state is always reachable.
      const double lam = rng.uniform(0.0, 1.0);
      q = lam * p + (1.0 - lam) * g / g.sum();
    }
    ThermoMajorization tm = thermo_majorization(p, q, g);
    TransitionResult tr = transition_feasible(SubnormalizedState(diag_mat(p), {3}), SubnormalizedState(diag_mat(q), {3}),
                                              GammaOperator(HermitianOperator(diag_mat(g))));
    t.truth(tm.lp == tr.feasible, "LP vs SDP verdict, instance " + std::to_string(i));
    t.truth(tm.lp == tm.lorentz, "LP vs Lorentz verdict, instance " + std::to_string(i));
    feasible += tm.lp;
  }
  r.pass = t.ok;
  r.detail = std::to_string(t.count / 2) + " instances (" + std::to_string(feasible) + " feasible), verdicts " +
             (t.ok ? "agree" : "disagree; " + t.first_failure);
  return r;
}

CriterionResult c12(std::uint64_t) {
  CriterionResult r;
  CMat g = CMat::Zero(2, 2);
  g(0, 0) = 2.0 / 3.0;
  g(1, 1) = 1.0 / 3.0;
  GammaOperator gamma(HermitianOperator(g), "S");
  SubnormalizedState one(CMat(basis_op(2, 1, 1)), {2});
  SubnormalizedState plus(CMat(CMat::Constant(2, 2, 0.5)), {2});
  TransitionResult free = transition_feasible(one, plus, gamma);
  TransitionResult cov = transition_feasible(one, plus, gamma, HermitianOperator(CMat(basis_op(2, 1, 1))));
  r.pass = free.feasible && !cov.feasible && cov.certificate >= 1e-6;
  r.detail = "Gibbs-preserving slack " + fmt(free.slack, 3) + ", covariant slack " + fmt(cov.slack, 6) +
             ", certificate " + fmt(cov.certificate, 6);
  return r;
}

CriterionResult c13(std::uint64_t seed) {
  CriterionResult r;
  Rng rng(seed + 13);
  Tally t;
  for (int i = 0; i < 10; ++i) {
    const int dx = 2 + i % 2, dxp = 2 + (i / 2) % 2;
    GammaOperator gx = random_gamma(dx, rng), gxp = random_gamma(dxp, rng);
    ChoiChannel e = random_channel(dx, dxp, rng);
    CMat gi = mfun(gxp.mat(), MatFn::inv_sqrt);
    const double y = -std::log2(max_eig(gi * e.apply(gx.mat()) * gi));
    ChoiChannel rev = reverse_process(e, gx, gxp, y);
    const std::string tag = "instance " + std::to_string(i);
    t.within(rev.cp_defect(), 0.0, 1e-10, "complete positivity, " + tag);
    t.within(rev.tni_excess(), 0.0, 1e-10, "trace nonincrease, " + tag);
    const double excess = std::max(0.0, max_eig(rev.apply(gxp.mat()) - std::exp2(y) * gx.mat()));
    t.within(excess, 0.0, 1e-10, "Gamma bound, " + tag);
  }
  Rng rng2(seed + 113);
  for (int d = 2; d <= 3; ++d) {
    GammaOperator g = random_gamma(d, rng2);
    ChoiChannel id = identity_channel({d});
    t.within(choi_distance(reverse_process(id, g, g, 0.0), id), 0.0, 1e-10, "reverse of identity");
    ChoiChannel erase = partial_trace_channel({d}, {0});
    ChoiChannel rev = reverse_process(erase, g, identity_gamma({1}), -std::log2(g.partition_function()));
    t.within((rev.apply(CMat::Identity(1, 1)) - g.normalized()).cwiseAbs().maxCoeff(), 0.0, 1e-10,
             "reverse of erasure");
  }
  r.pass = t.ok;
  r.detail = std::to_string(t.count) + " checks, max defect " + fmt(t.worst, 3) + (t.ok ? "" : "; " + t.first_failure);
  return r;
}

CriterionResult c14(std::uint64_t seed) {
  CriterionResult r;
  Rng rng(seed + 14);
  Tally t;
  for (int n = 1; n <= 3; ++n)
    for (int m : {1, 3, 5}) {
      std::vector<int> x(n);
      for (int& b : x) b = rng.integer(0, 1);
      RepetitionCode rc = repetition_code(n, m, x);
      t.truth(rc.lambda == -static_cast<double>(n * (m - 1)),
              "Lambda(" + std::to_string(n) + "," + std::to_string(m) + ") = " + fmt(rc.lambda));
      if (rc.state) t.truth(natural_potential(*rc.state) == rc.lambda, "dense projector potential");
    }
  // Majority preimages of one logical bit over three physical bits, counted directly.
  int preimages = 0;
  for (int s = 0; s < 8; ++s) preimages += __builtin_popcount(static_cast<unsigned>(s)) >= 2;
  RepetitionCode one = repetition_code(1, 3, {1});
  t.truth(static_cast<int>(one.preimages_per_block) == preimages && one.z == 4u, "n=1, m=3 enumeration");
  r.pass = t.ok;
  r.detail = std::to_string(t.count) + " exact checks" + (t.ok ? "" : "; " + t.first_failure);
  return r;
}

CriterionResult c15(std::uint64_t seed) {
  CriterionResult r;
  Tally t;
  auto comp = MeasurementInstrument::projective({basis_op(2, 0, 0), basis_op(2, 1, 1)});
  SubnormalizedState mixed(CMat(CMat::Identity(2, 2) / 2.0), {2});
  SubnormalizedState plus(CMat(CMat::Constant(2, 2, 0.5)), {2});
  MeasurementReport a = measurement_analysis(comp, mixed, 0.0);
  MeasurementReport b = measurement_analysis(comp, plus, 0.0);
  t.within(a.measurement.bits, 0.0, 1e-6, "maximally mixed, measurement");
  t.within(a.reset_given_sout.bits, 0.0, 1e-6, "maximally mixed, reset given S'");
  t.within(a.reset_given_ref.bits, 0.0, 1e-6, "maximally mixed, reset given R");
  t.within(b.measurement.bits, -1.0, 1e-6, "plus state, measurement");
  t.within(b.reset_given_sout.bits, 0.0, 1e-6, "plus state, reset given S'");
  t.within(b.reset_given_ref.bits, 1.0, 1e-6, "plus state, reset given R");
  Rng rng(seed + 15);
  double worst = -1e300;
  for (int i = 0; i < 10; ++i) {
    const int d = 2 + i % 2;
    CMat u = random_unitary(d, rng);
    const int k = rng.integer(2, d);
    std::vector<CMat> proj(k, CMat::Zero(d, d));
    for (int j = 0; j < d; ++j) {
      const int slot = j < k ? j : rng.integer(0, k - 1);
      proj[slot] += u.col(j) * u.col(j).adjoint();
    }
    SubnormalizedState sigma(random_state(d, rng), {d});
    MeasurementReport m = measurement_analysis(MeasurementInstrument::projective(proj), sigma, 0.0);
    t.truth(m.subunital, "projective instrument is subunital");
    t.slack(1e-6 - m.measurement.bits, 0.0, "subunital measurement work, instrument " + std::to_string(i));
    worst = std::max(worst, m.measurement.bits);
  }
  r.pass = t.ok;
  r.detail = "(" + fmt(a.measurement.bits, 6) + ", " + fmt(a.reset_given_sout.bits, 6) + ", " +
             fmt(a.reset_given_ref.bits, 6) + ") and (" + fmt(b.measurement.bits, 6) + ", " +
             fmt(b.reset_given_sout.bits, 6) + ", " + fmt(b.reset_given_ref.bits, 6) +
             "); max subunital W_meas " + fmt(worst, 3) + (t.ok ? "" : "; " + t.first_failure);
  return r;
}

CriterionResult c16(std::uint64_t seed) {
  CriterionResult r;
  Rng rng(seed + 16);
  Tally values, gaps;
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 3;
    const std::string tag = "operator " + std::to_string(i);
    sdp::SdpSolution cert;
    HermitianOperator a(random_hermitian(d, rng));
    RVec ev = eigh(a.mat()).values;
    switch (i % 3) {
      case 0: {
        HermitianOperator p(random_psd(d, rng, 0.0, 2.0));
        values.within(sdp::norm_via_sdp(p, sdp::NormSdp::infinity, nullptr, Tolerances::defaults(), &cert),
                      eigh(p.mat()).values.maxCoeff(), 1e-7, "infinity norm, " + tag);
        break;
      }
      case 1:
        values.within(sdp::norm_via_sdp(a, sdp::NormSdp::one, nullptr, Tolerances::defaults(), &cert),
                      ev.cwiseAbs().sum(), 1e-7, "trace norm, " + tag);
        break;
      default: {
        HermitianOperator rho(random_state(d, rng)), sigma(random_state(d, rng));
        const double expected = 0.5 * eigh(rho.mat() - sigma.mat()).values.cwiseAbs().sum();
        values.within(sdp::norm_via_sdp(rho, sdp::NormSdp::trace_distance, &sigma, Tolerances::defaults(), &cert),
                      expected, 1e-7, "trace distance, " + tag);
      }
    }
    gaps.within(cert.gap, 0.0, 1e-7, "duality gap, " + tag);
  }
  r.pass = values.ok && gaps.ok;
  r.detail = "100 operators, max value error " + fmt(values.worst, 3) + ", max gap " + fmt(gaps.worst, 3) +
             (values.ok ? "" : "; " + values.first_failure) + (gaps.ok ? "" : "; " + gaps.first_failure);
  return r;
}

CriterionResult c17(std::uint64_t seed) {
  CriterionResult r;
  Rng rng(seed + 17);
  Tally t;
  for (int i = 0; i < 10; ++i) {
    const std::string tag = "seed map " + std::to_string(i);
    const int dk = 2, dl = 2;
    RVec gk(dk), gl(dl);
    for (int j = 0; j < dk; ++j) gk(j) = rng.uniform(0.2, 1.5);
    for (int j = 0; j < dl; ++j) gl(j) = rng.uniform(0.2, 1.5);
    GammaOperator gamma_k(HermitianOperator(diag_mat(gk))), gamma_l(HermitianOperator(diag_mat(gl)));
    ChoiChannel e = random_channel(dk, dl, rng);
    CMat gi = mfun(gamma_l.mat(), MatFn::inv_sqrt);
    const double c = std::min(1.0, 1.0 / max_eig(gi * e.apply(gamma_k.mat()) * gi));
    ChoiChannel sub = scaled(e, 0.9 * c);
    Dilation d = dilate_subpreserving(sub, gamma_k, gamma_l, rng.integer(0, dk - 1), rng.integer(0, dl - 1));
    t.truth(d.report.preserving(1e-8), "dilation is trace and Gamma preserving, " + tag);
    t.within(d.post_selection_error, 0.0, 1e-8, "post-selection identity, " + tag);

    GammaOperator gx = random_gamma(2, rng), gxp = random_gamma(2, rng);
    ChoiChannel ch = random_channel(2, 2, rng);
    CMat gi2 = mfun(gxp.mat(), MatFn::inv_sqrt);
    const double y = -std::log2(max_eig(gi2 * ch.apply(gx.mat()) * gi2));
    const double g1 = 1.0, g2 = std::exp2(-y);
    for (const Battery& b : {Battery::wit(g1, g2), Battery::information(std::floor(y) + 2.0, 2.0)}) {
      if (b.kind == Battery::Kind::information && y < 0.0) continue;
      BatteryLift lift = battery_lift(ch, gx, gxp, y, b);
      t.truth(lift.report.is_cp && lift.report.is_tni, "battery map is CP and trace nonincreasing, " + tag);
      t.slack(lift.report.gamma_defect, 1e-8, "battery map is Gamma-sub-preserving, " + tag);
    }
  }
  r.pass = t.ok;
  r.detail = std::to_string(t.count) + " checks, max defect " + fmt(t.worst, 3) + ", min Gamma slack " + fmt(t.min_slack, 3) + (t.ok ? "" : "; " + t.first_failure);
  return r;
}

using CriterionFn = CriterionResult (*)(std::uint64_t);
constexpr CriterionFn kCriteria[kCriterionCount] = {c1, c2, c3, c4, c5, c6, c7, c8, c9,
                                                    c10, c11, c12, c13, c14, c15, c16, c17};

const char* kNames[kCriterionCount] = {"and gate cost",
                                       "xor gate cost",
                                       "W-state erasure with memory",
                                       "identity channel coherent relative entropy",
                                       "commuting projections",
                                       "trivial-system reductions",
                                       "bound battery",
                                       "chain rule",
                                       "asymptotic equipartition trend",
                                       "duality and strong subadditivity",
                                       "thermo-majorization against the transition SDP",
                                       "Gibbs-preserving versus covariant gap",
                                       "reverse process",
                                       "repetition code potential",
                                       "measurement work",
                                       "solver validation",
                                       "dilation and battery constructions"};

}  // namespace

CriterionResult run_criterion(int id, std::uint64_t seed) {
  if (id < 1 || id > kCriterionCount) throw InputError("run_criterion: id must lie in [1, 17]");
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = kCriteria[id - 1](seed);
  } catch (const std::exception& e) {
    r = CriterionResult{id, kNames[id - 1], false, std::string("exception: ") + e.what()};
  }
  r.id = id;
  r.name = kNames[id - 1];
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_acceptance(std::uint64_t seed,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    out.push_back(run_criterion(id, seed));
    if (on_result) on_result(out.back());
  }
  return out;
}

}  // namespace ssqt
