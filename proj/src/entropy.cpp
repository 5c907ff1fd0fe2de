#include "ssqt/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ssqt/model.hpp"

namespace ssqt {

using sdp::HExpr;
using sdp::Model;
using sdp::ModelSolution;
using sdp::SExpr;

namespace {

struct Bipartite {
  CMat m;
  int dx = 1, dm = 1;
};

// Reorders rho as X (x) M with M the conditioning factors.
Bipartite arrange(const SubnormalizedState& rho, const std::vector<int>& cond) {
  const Dims& dims = rho.dims();
  const int nf = static_cast<int>(dims.size());
  std::vector<int> perm;
  Bipartite b;
  for (int c : cond) {
    if (c < 0 || c >= nf) throw InputError("conditional entropy: conditioning factor out of range");
  }
  for (int k = 0; k < nf; ++k)
    if (std::find(cond.begin(), cond.end(), k) == cond.end()) {
      perm.push_back(k);
      b.dx *= dims[k];
    }
  for (int c : cond) {
    perm.push_back(c);
    b.dm *= dims[c];
  }
  b.m = permute_factors(rho.mat(), dims, perm);
  return b;
}

double safe_log2(double x) { return x > 0.0 ? std::log2(x) : -std::numeric_limits<double>::infinity(); }

std::optional<SubnormalizedState> as_state(const CMat& m) {
  Tolerances loose;
  loose.psd_tol = 1e-6;
  loose.trace_tol = 1e-6;
  try {
    return SubnormalizedState(HermitianOperator(m), loose);
  } catch (const InputError&) {
    return std::nullopt;
  }
}

void check_epsilon(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InputError("smoothing parameter must lie in [0, 1)");
}

void check_support(const CMat& rho, const CMat& gamma, const Tolerances& tol) {
  Support s = support(gamma, tol);
  const int d = static_cast<int>(rho.rows());
  double outside = ((CMat::Identity(d, d) - s.projector) * rho).trace().real();
  if (outside > tol.psd_tol * std::max(1.0, static_cast<double>(d))) {
    std::ostringstream os;
    os << "state not supported inside supp(Gamma): weight outside " << outside;
    throw InputError(os.str());
  }
}

double h_min_value(const CMat& m, int dx, int dm, const Tolerances& tol, EntropyResult* r) {
  Model model;
  HExpr s = model.hermitian(dm);
  int con = model.psd(sdp::kron(CMat::Identity(dx, dx), s) - HExpr(m));
  model.minimize(sdp::trace(s));
  ModelSolution ms = model.solve(sdp::options_from(tol));
  sdp::require_solved(ms, "h_min", r ? &r->note : nullptr);
  if (r) r->certificate = sdp::to_certificate(ms, ms.value(s), ms.psd_duals[con]);
  return -safe_log2(ms.primal);
}

double h_max_value(const CMat& m, int dx, int dm, const Tolerances& tol, EntropyResult* r) {
  sdp::Compressed c = sdp::compress(m, tol);
  const int k = static_cast<int>(c.iso.cols());
  Model model;
  HExpr s = model.hermitian(dm);
  model.psd(s);
  model.nonneg(SExpr(1.0) - sdp::trace(s));
  HExpr y = model.offdiag_block(k, k);
  HExpr side = sdp::congruence(c.iso.adjoint(), sdp::kron(CMat::Identity(dx, dx), s));
  int con = model.psd(sdp::block2(HExpr(c.diag), y, side));
  model.minimize(-sdp::inner(sdp::fidelity_functional(k), y));
  ModelSolution ms = model.solve(sdp::options_from(tol));
  sdp::require_solved(ms, "h_max", r ? &r->note : nullptr);
  if (r) r->certificate = sdp::to_certificate(ms, ms.value(s), ms.psd_duals[con]);
  return 2.0 * safe_log2(-ms.primal);
}

}  // namespace

double shannon(const RVec& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) h -= p(i) * std::log2(p(i));
  return h;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double von_neumann(const SubnormalizedState& rho) { return shannon(eigh(rho.mat()).values.cwiseMax(0.0)); }

EntropyResult conditional_entropy(const SubnormalizedState& rho, int cond_factor, CondKind kind,
                                  const Tolerances& tol) {
  return conditional_entropy(rho, std::vector<int>{cond_factor}, kind, tol);
}

EntropyResult conditional_entropy(const SubnormalizedState& rho, const std::vector<int>& cond_factors, CondKind kind,
                                  const Tolerances& tol) {
  if (rho.trace() <= 0.0) throw InputError("conditional entropy of the zero operator");
  Bipartite b = arrange(rho, cond_factors);
  EntropyResult r;
  switch (kind) {
    case CondKind::vn: {
      CMat rm = ptrace(b.m, {b.dx, b.dm}, {0});
      r.value = shannon(eigh(b.m).values.cwiseMax(0.0)) - shannon(eigh(rm).values.cwiseMax(0.0));
      break;
    }
    case CondKind::max0: {
      CMat proj = support(b.m, tol).projector;
      r.value = std::log2(max_eig(ptrace(proj, {b.dx, b.dm}, {0})));
      break;
    }
    case CondKind::min:
      r.value = h_min_value(b.m, b.dx, b.dm, tol, &r);
      break;
    case CondKind::max:
      r.value = h_max_value(b.m, b.dx, b.dm, tol, &r);
      break;
  }
  return r;
}

double relative_entropy_value(const CMat& rho, const CMat& gamma, RelKind kind, const Tolerances& tol) {
  if (rho.rows() != gamma.rows()) throw InputError("relative entropy: dimension mismatch");
  check_support(rho, gamma, tol);
  switch (kind) {
    case RelKind::vn: {
      CMat diff = mfun(rho, MatFn::log2, tol) - mfun(gamma, MatFn::log2, tol);
      return (rho * diff).trace().real();
    }
    case RelKind::min0:
      return -std::log2((support(rho, tol).projector * gamma).trace().real());
    case RelKind::min: {
      CMat prod = mfun(rho, MatFn::sqrt, tol) * mfun(gamma, MatFn::sqrt, tol);
      double f = prod.jacobiSvd().singularValues().sum();
      return -2.0 * safe_log2(f);
    }
    case RelKind::max: {
      CMat g = mfun(gamma, MatFn::inv_sqrt, tol);
      return std::log2(max_eig(g * rho * g));
    }
    case RelKind::rob: {
      CMat r = mfun(rho, MatFn::inv_sqrt, tol);
      return -std::log2(max_eig(r * gamma * r));
    }
  }
  return 0.0;
}

EntropyResult relative_entropy(const SubnormalizedState& rho, const HermitianOperator& gamma, RelKind kind,
                               const Tolerances& tol) {
  EntropyResult r;
  r.value = relative_entropy_value(rho.mat(), gamma.mat(), kind, tol);
  return r;
}

EntropyResult hypothesis_testing(const SubnormalizedState& rho, const HermitianOperator& gamma, double eta,
                                 const Tolerances& tol) {
  if (!(eta > 0.0 && eta <= 1.0)) throw InputError("hypothesis testing: eta must lie in (0, 1]");
  if (eta > rho.trace() + tol.trace_tol) throw InputError("hypothesis testing: infeasible, eta exceeds tr rho");
  if (rho.dim() != gamma.dim()) throw InputError("hypothesis testing: dimension mismatch");
  const int d = rho.dim();
  Model m;
  HExpr q = m.hermitian(d);
  m.psd(q);
  m.psd(HExpr(CMat::Identity(d, d)) - q);
  int con = m.nonneg(sdp::inner(rho.mat(), q) - SExpr(std::min(eta, rho.trace())));
  m.minimize(sdp::inner(gamma.mat(), q));
  ModelSolution ms = m.solve(sdp::options_from(tol));
  EntropyResult r;
  sdp::require_solved(ms, "hypothesis testing", &r.note);
  CMat dual = CMat::Constant(1, 1, ms.nonneg_duals[con]);
  r.certificate = sdp::to_certificate(ms, ms.value(q), dual);
  r.value = -safe_log2(ms.primal) / eta;
  r.extras.emplace_back("eta", eta);
  return r;
}

EntropyResult smooth_h_min(const SubnormalizedState& rho, const std::vector<int>& cond_factors, double epsilon,
                           const Tolerances& tol) {
  check_epsilon(epsilon);
  if (epsilon == 0.0) return conditional_entropy(rho, cond_factors, CondKind::min, tol);
  Bipartite b = arrange(rho, cond_factors);
  const int n = b.dx * b.dm;
  Model m;
  HExpr s = m.hermitian(b.dm);
  HExpr hat = m.hermitian(n);
  m.psd(hat);
  int con = m.psd(sdp::kron(CMat::Identity(b.dx, b.dx), s) - hat);
  m.nonneg(SExpr(1.0) - sdp::trace(hat));
  sdp::add_fidelity(m, hat, b.m, std::sqrt(1.0 - epsilon * epsilon), tol);
  m.minimize(sdp::trace(s));
  ModelSolution ms = m.solve(sdp::options_from(tol));
  EntropyResult r;
  sdp::require_solved(ms, "smooth h_min", &r.note);
  r.certificate = sdp::to_certificate(ms, ms.value(s), ms.psd_duals[con]);
  r.value = -safe_log2(ms.primal);
  // Back to the caller's factor order.
  CMat opt = ms.value(hat);
  const Dims& dims = rho.dims();
  Dims arranged;
  std::vector<int> perm;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k)
    if (std::find(cond_factors.begin(), cond_factors.end(), k) == cond_factors.end()) perm.push_back(k);
  for (int c : cond_factors) perm.push_back(c);
  for (int k : perm) arranged.push_back(dims[k]);
  std::vector<int> inverse(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inverse[perm[k]] = static_cast<int>(k);
  r.smoothing_state = as_state(permute_factors(opt, arranged, inverse));
  return r;
}

Ket purification(const SubnormalizedState& rho, const Tolerances& tol) {
  Eigh e = eigh(rho.mat());
  RVec lam = cut_small(e.values, tol.rank_rel_tol);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = lam.size() - 1; i >= 0; --i)
    if (lam(i) > 0.0) keep.push_back(i);
  const int r = std::max<int>(1, static_cast<int>(keep.size()));
  const int d = rho.dim();
  Ket k;
  k.amps = CVec::Zero(static_cast<Eigen::Index>(d) * r);
  for (int c = 0; c < static_cast<int>(keep.size()); ++c)
    for (int a = 0; a < d; ++a)
      k.amps(static_cast<Eigen::Index>(a) * r + c) = std::sqrt(lam(keep[c])) * e.vectors(a, keep[c]);
  k.dims = rho.dims();
  k.dims.push_back(r);
  return k;
}

EntropyResult smooth_h_max(const SubnormalizedState& rho, const std::vector<int>& cond_factors, double epsilon,
                           const Tolerances& tol) {
  check_epsilon(epsilon);
  if (epsilon == 0.0) return conditional_entropy(rho, cond_factors, CondKind::max, tol);
  // H_max^eps(X|M) = -H_min^eps(X|C) on a purification X M C.
  Ket psi = purification(rho, tol);
  const int nf = static_cast<int>(rho.dims().size());
  CMat xc = reduced_state(psi, cond_factors);
  Dims xc_dims;
  for (int k = 0; k <= nf; ++k)
    if (std::find(cond_factors.begin(), cond_factors.end(), k) == cond_factors.end()) xc_dims.push_back(psi.dims[k]);
  Tolerances loose = tol;
  loose.trace_tol = std::max(tol.trace_tol, 1e-8);
  SubnormalizedState rho_xc(HermitianOperator(xc, xc_dims), loose);
  EntropyResult r = smooth_h_min(rho_xc, {static_cast<int>(xc_dims.size()) - 1}, epsilon, tol);
  r.value = -r.value;
  r.smoothing_state.reset();
  r.extras.emplace_back("purifying_dim", psi.dims.back());
  return r;
}

EntropyResult smooth_d_max(const SubnormalizedState& rho, const HermitianOperator& gamma, double epsilon,
                           const Tolerances& tol) {
  check_epsilon(epsilon);
  if (rho.dim() != gamma.dim()) throw InputError("smooth d_max: dimension mismatch");
  if (epsilon == 0.0) return relative_entropy(rho, gamma, RelKind::max, tol);
  const int d = rho.dim();
  Model m;
  SExpr lam = m.scalar_var();
  HExpr hat = m.hermitian(d);
  m.psd(hat);
  int con = m.psd(lam * gamma.mat() - hat);
  m.nonneg(SExpr(1.0) - sdp::trace(hat));
  sdp::add_fidelity(m, hat, rho.mat(), std::sqrt(1.0 - epsilon * epsilon), tol);
  m.minimize(lam);
  ModelSolution ms = m.solve(sdp::options_from(tol));
  EntropyResult r;
  sdp::require_solved(ms, "smooth d_max", &r.note);
  r.certificate = sdp::to_certificate(ms, ms.value(hat), ms.psd_duals[con]);
  r.value = safe_log2(ms.primal);
  r.smoothing_state = as_state(ms.value(hat));
  return r;
}

EntropyResult smooth_d_min0_proxy(const SubnormalizedState& rho, const HermitianOperator& gamma, double epsilon,
                                  const Tolerances& tol) {
  check_epsilon(epsilon);
  if (epsilon == 0.0) return relative_entropy(rho, gamma, RelKind::min0, tol);
  const double eps_prime = epsilon * epsilon / (2.0 + epsilon * epsilon);
  EntropyResult r = hypothesis_testing(rho, gamma, 1.0 - eps_prime, tol);
  r.proxy = true;
  r.note = "smooth D_min,0 proxy through hypothesis testing at eta = 1 - eps'";
  r.extras.emplace_back("eps_prime", eps_prime);
  return r;
}

EntropyResult smooth_d_rob(const SubnormalizedState& rho, const HermitianOperator& gamma, double epsilon,
                           const Tolerances& tol) {
  check_epsilon(epsilon);
  EntropyResult r;
  const double exact = relative_entropy_value(rho.mat(), gamma.mat(), RelKind::rob, tol);
  r.extras.emplace_back("unsmoothed", exact);
  if (epsilon == 0.0) {
    r.value = exact;
    return r;
  }
  const double eps_prime = epsilon * epsilon / (2.0 + epsilon * epsilon);
  const double bound = relative_entropy_value(rho.mat(), gamma.mat(), RelKind::min0, tol) + std::log2(eps_prime);
  r.extras.emplace_back("min0_bound", bound);
  r.value = std::max(exact, bound);
  r.lower_bound = true;
  r.note = "lower bound on the smooth Rob entropy";
  return r;
}

EntropyResult smooth(SmoothMeasure measure, const SmoothArgs& args, double epsilon, const Tolerances& tol) {
  switch (measure) {
    case SmoothMeasure::h_min:
      return smooth_h_min(args.rho, args.cond_factors, epsilon, tol);
    case SmoothMeasure::h_max:
      return smooth_h_max(args.rho, args.cond_factors, epsilon, tol);
    case SmoothMeasure::d_max:
      return smooth_d_max(args.rho, args.gamma, epsilon, tol);
    case SmoothMeasure::d_min0_proxy:
      return smooth_d_min0_proxy(args.rho, args.gamma, epsilon, tol);
    case SmoothMeasure::d_rob:
      return smooth_d_rob(args.rho, args.gamma, epsilon, tol);
  }
  throw InputError("smooth: unknown measure");
}

double continuity_bound(double epsilon, const HermitianOperator& gamma, const Tolerances& tol) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InputError("continuity bound: epsilon must lie in [0, 1]");
  Eigh e = eigh(gamma.mat());
  RVec lam = cut_small(e.values, tol.rank_rel_tol);
  int rank = 0;
  double log_norm = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -tol.psd_tol) throw InputError("continuity bound: Gamma not PSD");
    if (lam(i) > 0.0) {
      ++rank;
      log_norm = std::max(log_norm, std::abs(std::log2(lam(i))));
    }
  }
  double first = rank >= 2 ? epsilon * std::log2(static_cast<double>(rank - 1)) : 0.0;
  return first + binary_entropy(epsilon) + epsilon * log_norm;
}

}  // namespace ssqt
