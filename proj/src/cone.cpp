#include "ssqt/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ssqt/kernels.hpp"

namespace ssqt::sdp {

Eigen::Index ConeDims::rows() const {
  Eigen::Index r = lp;
  for (int k : psd) r += static_cast<Eigen::Index>(k) * k;
  return r;
}

int ConeDims::degree() const {
  int d = lp;
  for (int k : psd) d += k;
  return d;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::primal_infeasible: return "primal_infeasible";
    case Status::dual_infeasible: return "dual_infeasible";
    case Status::max_iters: return "max_iters";
  }
  return "unknown";
}

namespace {

struct NumericalBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Layout {
  int lp = 0;
  std::vector<int> k;
  std::vector<Eigen::Index> off;   // block offset into full vectors
  std::vector<Eigen::Index> loff;  // block offset into lambda vectors
  Eigen::Index rows = 0, lrows = 0;

  explicit Layout(const ConeDims& d) : lp(d.lp), k(d.psd) {
    rows = lp;
    lrows = lp;
    for (int kk : k) {
      off.push_back(rows);
      loff.push_back(lrows);
      rows += static_cast<Eigen::Index>(kk) * kk;
      lrows += kk;
    }
  }
};

using MapM = Eigen::Map<RMat>;
using CMapM = Eigen::Map<const RMat>;

// Nesterov-Todd scaling: W z = r^T z r on PSD blocks, d .* z on the orthant.
struct Scaling {
  RVec d;
  std::vector<RMat> r, rinv;
  RVec lambda;

  explicit Scaling(const Layout& L) {
    d = RVec::Ones(L.lp);
    for (int kk : L.k) {
      r.push_back(RMat::Identity(kk, kk));
      rinv.push_back(RMat::Identity(kk, kk));
    }
    lambda = RVec::Ones(L.lrows);
  }
};

enum class Mode { W, WT, Winv, WinvT };

RVec apply(const Layout& L, const Scaling& w, const RVec& v, Mode mode) {
  RVec out(v.size());
  if (L.lp) {
    if (mode == Mode::W || mode == Mode::WT)
      out.head(L.lp) = v.head(L.lp).cwiseProduct(w.d);
    else
      out.head(L.lp) = v.head(L.lp).cwiseQuotient(w.d);
  }
  for (std::size_t b = 0; b < L.k.size(); ++b) {
    const int kk = L.k[b];
    CMapM m(v.data() + L.off[b], kk, kk);
    MapM o(out.data() + L.off[b], kk, kk);
    switch (mode) {
      case Mode::W: o.noalias() = w.r[b].transpose() * m * w.r[b]; break;
      case Mode::WT: o.noalias() = w.r[b] * m * w.r[b].transpose(); break;
      case Mode::Winv: o.noalias() = w.rinv[b].transpose() * m * w.rinv[b]; break;
      case Mode::WinvT: o.noalias() = w.rinv[b] * m * w.rinv[b].transpose(); break;
    }
  }
  return out;
}

RVec unit(const Layout& L) {
  RVec e = RVec::Zero(L.rows);
  e.head(L.lp).setOnes();
  for (std::size_t b = 0; b < L.k.size(); ++b) MapM(e.data() + L.off[b], L.k[b], L.k[b]).setIdentity();
  return e;
}

RVec lam_full(const Layout& L, const RVec& lam) {
  RVec e = RVec::Zero(L.rows);
  e.head(L.lp) = lam.head(L.lp);
  for (std::size_t b = 0; b < L.k.size(); ++b)
    MapM(e.data() + L.off[b], L.k[b], L.k[b]).diagonal() = lam.segment(L.loff[b], L.k[b]);
  return e;
}

// lambda o u, with lambda diagonal.
RVec lam_prod(const Layout& L, const RVec& lam, const RVec& u) {
  RVec out(u.size());
  out.head(L.lp) = lam.head(L.lp).cwiseProduct(u.head(L.lp));
  for (std::size_t b = 0; b < L.k.size(); ++b) {
    const int kk = L.k[b];
    CMapM m(u.data() + L.off[b], kk, kk);
    MapM o(out.data() + L.off[b], kk, kk);
    auto l = lam.segment(L.loff[b], kk);
    for (int j = 0; j < kk; ++j)
      for (int i = 0; i < kk; ++i) o(i, j) = 0.5 * (l(i) + l(j)) * m(i, j);
  }
  return out;
}

// Solves lambda o u = v.
RVec lam_div(const Layout& L, const RVec& lam, const RVec& v) {
  RVec out(v.size());
  out.head(L.lp) = v.head(L.lp).cwiseQuotient(lam.head(L.lp));
  for (std::size_t b = 0; b < L.k.size(); ++b) {
    const int kk = L.k[b];
    CMapM m(v.data() + L.off[b], kk, kk);
    MapM o(out.data() + L.off[b], kk, kk);
    auto l = lam.segment(L.loff[b], kk);
    for (int j = 0; j < kk; ++j)
      for (int i = 0; i < kk; ++i) o(i, j) = 2.0 * m(i, j) / (l(i) + l(j));
  }
  return out;
}

// Symmetrized product (AB + BA)/2 blockwise.
RVec sprod(const Layout& L, const RVec& a, const RVec& bv) {
  RVec out(a.size());
  out.head(L.lp) = a.head(L.lp).cwiseProduct(bv.head(L.lp));
  for (std::size_t b = 0; b < L.k.size(); ++b) {
    const int kk = L.k[b];
    CMapM x(a.data() + L.off[b], kk, kk);
    CMapM y(bv.data() + L.off[b], kk, kk);
    MapM o(out.data() + L.off[b], kk, kk);
    RMat p = x * y;
    o = 0.5 * (p + p.transpose());
  }
  return out;
}

// Largest alpha with lambda + alpha*dv in the cone.
double max_step(const Layout& L, const RVec& lam, const RVec& dv) {
  double alpha = kInf;
  for (int i = 0; i < L.lp; ++i)
    if (dv(i) < 0) alpha = std::min(alpha, -lam(i) / dv(i));
  for (std::size_t b = 0; b < L.k.size(); ++b) {
    const int kk = L.k[b];
    CMapM m(dv.data() + L.off[b], kk, kk);
    RVec is = lam.segment(L.loff[b], kk).cwiseSqrt().cwiseInverse();
    RMat mm = is.asDiagonal() * m * is.asDiagonal();
    mm = 0.5 * (mm + mm.transpose());
    double t = Eigen::SelfAdjointEigenSolver<RMat>(mm, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (t < 0) alpha = std::min(alpha, -1.0 / t);
  }
  return alpha;
}

// Largest t with v + t*e not in the interior, i.e. -lambda_min(v).
double min_eig_vec(const Layout& L, const RVec& v) {
  double m = kInf;
  for (int i = 0; i < L.lp; ++i) m = std::min(m, v(i));
  for (std::size_t b = 0; b < L.k.size(); ++b) {
    const int kk = L.k[b];
    RMat mm = CMapM(v.data() + L.off[b], kk, kk);
    mm = 0.5 * (mm + mm.transpose());
    m = std::min(m, Eigen::SelfAdjointEigenSolver<RMat>(mm, Eigen::EigenvaluesOnly).eigenvalues()(0));
  }
  return m;
}

// Replaces the scaling by its composition with the NT scaling of (st, zt),
// both given in the current scaled coordinates.
void update_scaling(const Layout& L, Scaling& w, const RVec& st, const RVec& zt) {
  for (int i = 0; i < L.lp; ++i) {
    if (!(st(i) > 0) || !(zt(i) > 0)) throw NumericalBreakdown("orthant iterate left the cone");
    w.d(i) *= std::sqrt(st(i) / zt(i));
    w.lambda(i) = std::sqrt(st(i) * zt(i));
  }
  for (std::size_t b = 0; b < L.k.size(); ++b) {
    const int kk = L.k[b];
    RMat s = CMapM(st.data() + L.off[b], kk, kk);
    RMat z = CMapM(zt.data() + L.off[b], kk, kk);
    Eigen::LLT<RMat> ls(0.5 * (s + s.transpose())), lz(0.5 * (z + z.transpose()));
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success)
      throw NumericalBreakdown("PSD iterate left the cone");
    RMat Ls = ls.matrixL(), Lz = lz.matrixL();
    Eigen::JacobiSVD<RMat> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    RVec sv = svd.singularValues();
    if (!(sv.minCoeff() > 0)) throw NumericalBreakdown("degenerate scaling");
    RVec isq = sv.cwiseSqrt().cwiseInverse();
    w.r[b] = w.r[b] * (Ls * svd.matrixV() * isq.asDiagonal());
    w.rinv[b] = (isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose()) * w.rinv[b];
    w.lambda.segment(L.loff[b], kk) = sv;
  }
}

std::vector<kernels::ScaleBlock> scale_blocks(const Layout& L, const Scaling& w) {
  std::vector<kernels::ScaleBlock> out;
  if (L.lp) {
    kernels::ScaleBlock b;
    b.offset = 0;
    b.size = L.lp;
    b.psd = false;
    b.dinv = w.d.cwiseInverse();
    out.push_back(std::move(b));
  }
  for (std::size_t i = 0; i < L.k.size(); ++i) {
    kernels::ScaleBlock b;
    b.offset = L.off[i];
    b.size = L.k[i];
    b.psd = true;
    b.rinv = w.rinv[i];
    out.push_back(std::move(b));
  }
  return out;
}

// Reduced KKT system  [0 A^T G^T; A 0 0; G 0 -W^T W] u = rhs.
class Kkt {
 public:
  Kkt(const Layout& L, const RMat& G, const RMat& A) : L_(L), G_(G), A_(A) {}

  void factor(const Scaling& w) {
    w_ = &w;
    Gt_ = kernels::parallel::scale_columns(G_, scale_blocks(L_, w));
    RMat H = kernels::parallel::gram(Gt_);
    if (A_.rows()) H.noalias() += A_.transpose() * A_;
    factor_pd(H, hllt_);
    if (A_.rows()) {
      HinvAt_ = hllt_.solve(A_.transpose());
      RMat S = A_ * HinvAt_;
      factor_pd(S, sllt_);
    }
  }

  void solve(const RVec& bx, const RVec& by, const RVec& bz, RVec& ux, RVec& uy, RVec& uz, int refinement) const {
    solve_once(bx, by, bz, ux, uy, uz);
    for (int it = 0; it < refinement; ++it) {
      RVec ex = bx - G_.transpose() * uz;
      if (A_.rows()) ex -= A_.transpose() * uy;
      RVec ey = A_.rows() ? RVec(by - A_ * ux) : RVec(0);
      RVec ez = bz - (G_ * ux - apply(L_, *w_, apply(L_, *w_, uz, Mode::W), Mode::WT));
      double e = std::max({ex.lpNorm<Eigen::Infinity>(), ey.size() ? ey.lpNorm<Eigen::Infinity>() : 0.0,
                           ez.lpNorm<Eigen::Infinity>()});
      if (e == 0.0) break;
      RVec cx, cy, cz;
      solve_once(ex, ey, ez, cx, cy, cz);
      ux += cx;
      if (A_.rows()) uy += cy;
      uz += cz;
    }
  }

 private:
  static void factor_pd(RMat& M, Eigen::LLT<RMat>& llt) {
    double scale = std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
    llt.compute(M);
    double reg = 1e-14 * scale;
    while (llt.info() != Eigen::Success) {
      if (reg > 1e-6 * scale) throw NumericalBreakdown("KKT system is singular");
      M.diagonal().array() += reg;
      llt.compute(M);
      reg *= 100;
    }
  }

  void solve_once(const RVec& bx, const RVec& by, const RVec& bz, RVec& ux, RVec& uy, RVec& uz) const {
    RVec t = apply(L_, *w_, bz, Mode::WinvT);
    RVec r1 = bx + Gt_.transpose() * t;
    if (A_.rows()) {
      r1 += A_.transpose() * by;
      uy = sllt_.solve(A_ * hllt_.solve(r1) - by);
      ux = hllt_.solve(r1 - A_.transpose() * uy);
    } else {
      uy = RVec(0);
      ux = hllt_.solve(r1);
    }
    RVec wuz = Gt_ * ux - t;
    uz = apply(L_, *w_, wuz, Mode::Winv);
  }

  const Layout& L_;
  const RMat& G_;
  const RMat& A_;
  const Scaling* w_ = nullptr;
  RMat Gt_, HinvAt_;
  Eigen::LLT<RMat> hllt_, sllt_;
};

struct Metrics {
  double pcost, dcost, gap, pres, dres, resid_term;
  double pinf = kInf, dinf = kInf;
};

}  // namespace

ConeSolution solve_cone(const ConeProblem& p, const ConeOptions& opt) {
  const Eigen::Index n = p.c.size();
  const Eigen::Index m = p.dims.rows();
  if (p.G.rows() != m || p.G.cols() != n || p.h.size() != m)
    throw std::invalid_argument("solve_cone: inconsistent G/h/c dimensions");
  if (p.A.rows() != p.b.size() || (p.A.rows() > 0 && p.A.cols() != n))
    throw std::invalid_argument("solve_cone: inconsistent A/b dimensions");
  const Layout L(p.dims);

  ConeSolution sol;

  // Drop redundant equality rows; detect inconsistent ones.
  RMat A(0, n);
  RVec b(0);
  if (p.A.rows() > 0) {
    Eigen::ColPivHouseholderQR<RMat> qr(p.A.transpose());
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();
    std::vector<int> kept;
    for (Eigen::Index i = 0; i < rank; ++i) kept.push_back(qr.colsPermutation().indices()(i));
    std::sort(kept.begin(), kept.end());
    A.resize(static_cast<Eigen::Index>(kept.size()), n);
    b.resize(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) {
      A.row(static_cast<Eigen::Index>(i)) = p.A.row(kept[i]);
      b(static_cast<Eigen::Index>(i)) = p.b(kept[i]);
    }
    sol.kept_rows = kept;
    if (static_cast<Eigen::Index>(kept.size()) < p.A.rows()) {
      RVec xls = A.rows() ? RVec(A.completeOrthogonalDecomposition().solve(b)) : RVec(RVec::Zero(n));
      RVec res = p.b - p.A * xls;
      if (res.norm() > 1e-9 * (1.0 + p.b.norm())) {
        sol.status = Status::primal_infeasible;
        sol.y = -res / res.squaredNorm();
        sol.z = RVec::Zero(m);
        sol.x = RVec::Zero(n);
        sol.s = RVec::Zero(m);
        sol.pres = res.norm();
        return sol;
      }
    }
  }
  const Eigen::Index np = A.rows();
  const double deg = p.dims.degree();
  const double resx0 = std::max(1.0, p.c.norm());
  const double resy0 = std::max(1.0, b.norm());
  const double resz0 = std::max(1.0, p.h.norm());
  const RVec e = unit(L);

  Scaling w(L);
  Kkt kkt(L, p.G, A);

  auto expand_y = [&](const RVec& yk) {
    RVec y = RVec::Zero(p.A.rows());
    for (std::size_t i = 0; i < sol.kept_rows.size(); ++i) y(sol.kept_rows[i]) = yk(static_cast<Eigen::Index>(i));
    return y;
  };

  RVec x, y, s, z;
  double tau = 1.0, kappa = 1.0;

  struct Best {
    double score = kInf;
    RVec x, y, s, z;
    Metrics met{};
    int iter = 0;
  } best;

  try {
    // Initial point: least-squares primal and least-norm dual, shifted into the cone.
    kkt.factor(w);
    RVec ux, uy, uz;
    kkt.solve(RVec::Zero(n), b, p.h, ux, uy, uz, opt.refinement);
    x = ux;
    s = -uz;
    kkt.solve(-p.c, RVec::Zero(np), RVec::Zero(m), ux, uy, uz, opt.refinement);
    y = uy;
    z = uz;
    const double nrms = std::max(1.0, s.norm()), nrmz = std::max(1.0, z.norm());
    double ts = -min_eig_vec(L, s), tz = -min_eig_vec(L, z);
    if (ts >= -1e-8 * nrms) s += (1.0 + ts) * e;
    if (tz >= -1e-8 * nrmz) z += (1.0 + tz) * e;
    update_scaling(L, w, s, z);
  } catch (const NumericalBreakdown&) {
    sol.status = Status::max_iters;
    return sol;
  }

  RVec ds_a, dz_a;
  double dtau_a = 0, dkappa_a = 0;

  for (int iter = 0; iter <= opt.max_iters; ++iter) {
    // Residuals of the embedding.
    RVec rx = p.G.transpose() * z + p.c * tau;
    if (np) rx += A.transpose() * y;
    RVec ry = np ? RVec(b * tau - A * x) : RVec(0);
    RVec rz = p.h * tau - p.G * x - s;
    const double cx = p.c.dot(x), by = np ? b.dot(y) : 0.0, hz = p.h.dot(z);
    const double rt = -cx - by - hz - kappa;
    const double sz = s.dot(z);

    Metrics met;
    met.pcost = cx / tau;
    met.dcost = -(by + hz) / tau;
    met.gap = sz / (tau * tau);
    met.pres = std::max(np ? ry.norm() / resy0 : 0.0, rz.norm() / resz0) / tau;
    met.dres = rx.norm() / resx0 / tau;
    met.resid_term = (x.dot(rx) + (np ? y.dot(ry) : 0.0) + z.dot(rz)) / (tau * tau);
    if (hz + by < 0) {
      RVec g = p.G.transpose() * z;
      if (np) g += A.transpose() * y;
      met.pinf = g.norm() / resx0 / (-(hz + by));
    }
    if (cx < 0) {
      RVec gs = p.G * x + s;
      double num = gs.norm() / resz0;
      if (np) num = std::max(num, (A * x).norm() / resy0);
      met.dinf = num / (-cx);
    }

    if (opt.on_iterate) {
      IterateInfo info;
      info.iter = iter;
      info.pcost = met.pcost;
      info.dcost = met.dcost;
      info.gap = met.gap;
      info.pres = met.pres;
      info.dres = met.dres;
      info.tau = tau;
      info.kappa = kappa;
      info.resid_term = met.resid_term;
      opt.on_iterate(info);
    }

    const double scale = 1.0 + std::abs(met.pcost);
    const double relgap = std::max(std::abs(met.pcost - met.dcost), std::abs(met.gap)) / scale;
    const double score = std::max({met.pres, met.dres, relgap});
    if (std::isfinite(score) && score < best.score) {
      best.score = score;
      best.x = x / tau;
      best.y = np ? RVec(y / tau) : RVec(0);
      best.s = s / tau;
      best.z = z / tau;
      best.met = met;
      best.iter = iter;
    }
    sol.iters = iter;

    if (met.pres <= opt.feastol && met.dres <= opt.feastol && relgap <= opt.gaptol) {
      sol.status = Status::optimal;
      sol.x = x / tau;
      sol.y = expand_y(np ? RVec(y / tau) : RVec(0));
      sol.s = s / tau;
      sol.z = z / tau;
      sol.pcost = met.pcost;
      sol.dcost = met.dcost;
      sol.gap = met.gap;
      sol.pres = met.pres;
      sol.dres = met.dres;
      return sol;
    }
    if (met.pinf <= opt.feastol) {
      const double t = -(hz + by);
      sol.status = Status::primal_infeasible;
      sol.y = expand_y(np ? RVec(y / t) : RVec(0));
      sol.z = z / t;
      sol.x = RVec::Zero(n);
      sol.s = RVec::Zero(m);
      sol.pres = met.pinf;
      return sol;
    }
    if (met.dinf <= opt.feastol) {
      const double t = -cx;
      sol.status = Status::dual_infeasible;
      sol.x = x / t;
      sol.s = s / t;
      sol.y = RVec::Zero(p.A.rows());
      sol.z = RVec::Zero(m);
      sol.dres = met.dinf;
      return sol;
    }
    if (iter == opt.max_iters) break;

    try {
      kkt.factor(w);
      const RVec lam = lam_full(L, w.lambda);
      const double mu = (sz + tau * kappa) / (deg + 1.0);

      RVec u1x, u1y, u1z;
      kkt.solve(-p.c, b, p.h, u1x, u1y, u1z, opt.refinement);
      const double denom = kappa / tau + apply(L, w, u1z, Mode::W).squaredNorm();

      double sigma = 0.0, alpha = 0.0;
      RVec dx, dy, dz, dst, dzt;
      double dtau = 0, dkappa = 0;
      for (int pass = 0; pass < 2; ++pass) {
        const double eta = sigma;
        RVec rhs_c = -lam_prod(L, w.lambda, lam) + sigma * mu * e;
        double dk = -tau * kappa + sigma * mu;
        if (pass == 1) {
          rhs_c -= sprod(L, ds_a, dz_a);
          dk -= dtau_a * dkappa_a;
        }
        RVec q = lam_div(L, w.lambda, rhs_c);
        RVec bx = -(1.0 - eta) * rx;
        RVec bqy = (1.0 - eta) * ry;
        RVec bz = (1.0 - eta) * rz - apply(L, w, q, Mode::WT);
        RVec u2x, u2y, u2z;
        kkt.solve(bx, bqy, bz, u2x, u2y, u2z, opt.refinement);
        double num = -(1.0 - eta) * rt + dk / tau + p.c.dot(u2x) + p.h.dot(u2z);
        if (np) num += b.dot(u2y);
        dtau = num / denom;
        dx = u2x + dtau * u1x;
        dy = np ? RVec(u2y + dtau * u1y) : RVec(0);
        dz = u2z + dtau * u1z;
        dkappa = (dk - kappa * dtau) / tau;
        dzt = apply(L, w, dz, Mode::W);
        dst = q - dzt;

        double amax = std::min(max_step(L, w.lambda, dst), max_step(L, w.lambda, dzt));
        if (dtau < 0) amax = std::min(amax, -tau / dtau);
        if (dkappa < 0) amax = std::min(amax, -kappa / dkappa);
        if (pass == 0) {
          const double aa = std::min(1.0, amax);
          sigma = std::pow(1.0 - aa, 3);
          ds_a = dst;
          dz_a = dzt;
          dtau_a = dtau;
          dkappa_a = dkappa;
        } else {
          alpha = std::min(1.0, 0.99 * amax);
        }
      }
      if (!(alpha > 1e-12)) throw NumericalBreakdown("step length collapsed");

      x += alpha * dx;
      if (np) y += alpha * dy;
      tau += alpha * dtau;
      kappa += alpha * dkappa;
      RVec st = lam + alpha * dst;
      RVec zt = lam + alpha * dzt;
      update_scaling(L, w, st, zt);
      const RVec lnew = lam_full(L, w.lambda);
      s = apply(L, w, lnew, Mode::WT);
      z = apply(L, w, lnew, Mode::Winv);
    } catch (const NumericalBreakdown&) {
      break;
    }
  }

  sol.status = Status::max_iters;
  sol.x = best.x;
  sol.y = expand_y(best.y);
  sol.s = best.s;
  sol.z = best.z;
  sol.pcost = best.met.pcost;
  sol.dcost = best.met.dcost;
  sol.gap = best.met.gap;
  sol.pres = best.met.pres;
  sol.dres = best.met.dres;
  return sol;
}

}  // namespace ssqt::sdp
