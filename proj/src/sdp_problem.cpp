#include "ssqt/sdp_problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "ssqt/model.hpp"

namespace ssqt::sdp {

CMat apply_map(const std::vector<MapTerm>& map, const CMat& x) {
  if (map.empty()) return CMat(0, 0);
  CMat out = CMat::Zero(map.front().left.rows(), map.front().right.rows());
  for (const auto& t : map) out += t.left * x * t.right.adjoint();
  return out;
}

std::vector<MapTerm> adjoint_map(const std::vector<MapTerm>& map) {
  std::vector<MapTerm> out;
  for (const auto& t : map) out.push_back({t.right.adjoint(), t.left.adjoint()});
  return out;
}

double hermiticity_defect(const std::vector<MapTerm>& map, int dim) {
  double worst = 0.0;
  for (const auto& b : hermitian_basis(dim)) {
    CMat y = apply_map(map, b);
    if (y.size()) worst = std::max(worst, (y - y.adjoint()).cwiseAbs().maxCoeff());
  }
  return worst;
}

ConeOptions options_from(const Tolerances& tol) {
  ConeOptions o;
  o.feastol = tol.sdp_gap;
  o.gaptol = tol.sdp_gap;
  if (const char* env = std::getenv("SSQT_SDP_MAX_ITERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0 && v < 100000) o.max_iters = static_cast<int>(v);
  }
  return o;
}

void require_solved(const ModelSolution& ms, const std::string& what, std::string* note) {
  if (ms.status == Status::optimal) return;
  double rel = std::abs(ms.primal - ms.dual) / (1.0 + std::abs(ms.primal));
  if (ms.status == Status::max_iters && rel <= 1e-6 && ms.pres <= 1e-6 && ms.dres <= 1e-6) {
    if (note) *note = what + ": solver stopped at the iteration limit with relative gap " + std::to_string(rel);
    return;
  }
  throw SolverError(what + ": solver status " + to_string(ms.status));
}

SdpSolution to_certificate(const ModelSolution& ms, const CMat& primal, const CMat& dual) {
  SdpSolution s;
  s.status = ms.status;
  s.primal_value = ms.primal;
  s.dual_value = ms.dual;
  s.gap = ms.primal - ms.dual;
  s.pres = ms.pres;
  s.dres = ms.dres;
  s.iters = ms.iters;
  s.primal_X = HermitianOperator(primal);
  if (dual.size()) s.dual_Y = HermitianOperator(dual);
  return s;
}

SdpSolution solve(const SdpProblem& p, const Tolerances& tol, const ConeOptions* override_opts) {
  const int dx = p.objective.dim();
  if (dx == 0) throw InputError("sdp: empty objective matrix");
  int dy = 0;
  for (const auto& t : p.map) {
    if (t.left.cols() != dx || t.right.cols() != dx) throw InputError("sdp: map term input dimension mismatch");
    if (dy == 0) dy = static_cast<int>(t.left.rows());
    if (t.left.rows() != dy || t.right.rows() != dy) throw InputError("sdp: map term output dimension mismatch");
  }
  if (!p.map.empty() && p.rhs.dim() != dy) throw InputError("sdp: rhs dimension does not match map output");
  for (const auto& [e, v] : p.equalities)
    if (e.dim() != dx) throw InputError("sdp: equality functional dimension mismatch");
  if (!p.map.empty()) {
    double defect = hermiticity_defect(p.map, dx);
    if (defect > 1e-9) {
      std::ostringstream os;
      os << "sdp: constraint map is not Hermiticity-preserving (defect " << defect << ")";
      throw InputError(os.str());
    }
  }

  Model m;
  HExpr X = m.hermitian(dx);
  m.psd(X);
  if (!p.map.empty()) {
    HExpr phix = map(X, [&](const CMat& x) { return herm(apply_map(p.map, x)); });
    phix -= HExpr(p.rhs.mat());
    m.psd(phix);
  }
  for (const auto& [e, v] : p.equalities) m.equal(inner(e.mat(), X) - SExpr(v));
  m.minimize(inner(p.objective.mat(), X));

  ModelSolution ms = m.solve(override_opts ? *override_opts : options_from(tol));
  SdpSolution out;
  out.status = ms.status;
  out.primal_value = ms.primal;
  out.dual_value = ms.dual;
  out.gap = ms.primal - ms.dual;
  out.pres = ms.pres;
  out.dres = ms.dres;
  out.iters = ms.iters;
  out.primal_X = HermitianOperator(ms.value(X), p.objective.dims());
  if (!p.map.empty()) out.dual_Y = HermitianOperator(ms.psd_duals[1], p.rhs.dims());
  // Model multipliers enter as G^T z + A^T y + c = 0; the dual above uses w = -y.
  for (double y : ms.eq_duals) out.eq_multipliers.push_back(-y);
  if (out.status == Status::primal_infeasible || out.status == Status::dual_infeasible) {
    out.primal_value = out.status == Status::primal_infeasible ? std::numeric_limits<double>::infinity()
                                                                : -std::numeric_limits<double>::infinity();
    out.dual_value = out.primal_value;
    out.gap = 0.0;
  }
  return out;
}

SdpProblem dual_problem(const SdpProblem& p) {
  if (!p.equalities.empty()) throw InputError("dual_problem: equality constraints not supported");
  SdpProblem d;
  d.objective = HermitianOperator(-p.rhs.mat(), p.rhs.dims());
  d.rhs = HermitianOperator(-p.objective.mat(), p.objective.dims());
  for (const auto& t : adjoint_map(p.map)) d.map.push_back({-t.left, t.right});
  return d;
}

namespace {

// Equalities forcing P1 X P1^dagger - P2 X P2^dagger = target on a 2d-dim X.
std::vector<std::pair<HermitianOperator, double>> split_equalities(const CMat& target) {
  const int d = static_cast<int>(target.rows());
  std::vector<std::pair<HermitianOperator, double>> out;
  for (const auto& b : hermitian_basis(d)) {
    CMat e = CMat::Zero(2 * d, 2 * d);
    e.topLeftCorner(d, d) = b;
    e.bottomRightCorner(d, d) = -b;
    out.emplace_back(HermitianOperator(e), (b.cwiseProduct(target.transpose())).sum().real());
  }
  return out;
}

}  // namespace

double norm_via_sdp(const HermitianOperator& a, NormSdp kind, const HermitianOperator* second, const Tolerances& tol,
                    SdpSolution* certificate) {
  const int d = a.dim();
  SdpProblem p;
  switch (kind) {
    case NormSdp::infinity: {
      if (min_eig(a.mat()) < -tol.psd_tol * std::max(1.0, norm(a.mat(), NormKind::infinity)))
        throw InputError("norm_via_sdp: infinity-norm SDP requires a PSD operator");
      p.objective = HermitianOperator(CMat::Identity(1, 1));
      p.rhs = a;
      for (int k = 0; k < d; ++k) {
        CMat ek = CMat::Zero(d, 1);
        ek(k, 0) = 1.0;
        p.map.push_back({ek, ek});
      }
      break;
    }
    case NormSdp::one:
      p.objective = HermitianOperator(CMat::Identity(2 * d, 2 * d));
      p.equalities = split_equalities(a.mat());
      break;
    case NormSdp::trace_distance:
      if (!second || second->dim() != d) throw InputError("norm_via_sdp: trace distance needs a second operand");
      p.objective = HermitianOperator(0.5 * CMat::Identity(2 * d, 2 * d));
      p.equalities = split_equalities(second->mat() - a.mat());
      break;
  }
  SdpSolution s = solve(p, tol);
  if (s.status != Status::optimal) throw SolverError("norm_via_sdp: solver status " + to_string(s.status));
  if (certificate) *certificate = s;
  return s.primal_value;
}

}  // namespace ssqt::sdp
