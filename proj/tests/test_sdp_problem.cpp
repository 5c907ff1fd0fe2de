#include <cmath>

#include <gtest/gtest.h>

#include "ssqt/model.hpp"
#include "ssqt/random.hpp"
#include "ssqt/sdp_problem.hpp"

using namespace ssqt;
using namespace ssqt::sdp;

namespace {

CMat diag(std::initializer_list<double> v) {
  RVec d(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) d(i++) = x;
  return d.cast<Cplx>().asDiagonal();
}

// min tr(A X) s.t. K X K^dagger >= B, X >= 0 with A > 0 and K invertible: strictly
// feasible on both sides.
SdpProblem random_problem(int d, Rng& rng) {
  SdpProblem p;
  p.objective = HermitianOperator(random_psd(d, rng, 0.5, 2.0));
  p.rhs = HermitianOperator(random_hermitian(d, rng));
  CMat k = random_unitary(d, rng) * random_psd(d, rng, 0.5, 1.5);
  p.map.push_back({k, k});
  return p;
}

}  // namespace

TEST(SdpProblem, ApplyAndAdjointMap) {
  Rng rng(30);
  std::vector<MapTerm> map{{random_ginibre(2, 3, rng), random_ginibre(2, 3, rng)},
                           {random_ginibre(2, 3, rng), random_ginibre(2, 3, rng)}};
  CMat x = random_ginibre(3, 3, rng), y = random_ginibre(2, 2, rng);
  // Pairing tr(Y Phi(X)) = tr(Phi^dagger(Y) X), which is the Hilbert-Schmidt adjoint on
  // Hermitian arguments of Hermiticity-preserving maps.
  Cplx lhs = (y * apply_map(map, x)).trace();
  Cplx rhs = (apply_map(adjoint_map(map), y) * x).trace();
  EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12);
  CMat k = random_ginibre(2, 3, rng);
  std::vector<MapTerm> hp{{k, k}};
  CMat hx = random_hermitian(3, rng), hy = random_hermitian(2, rng);
  EXPECT_NEAR(std::abs((hy.adjoint() * apply_map(hp, hx)).trace() - (apply_map(adjoint_map(hp), hy).adjoint() * hx).trace()),
              0.0, 1e-12);
}

TEST(SdpProblem, HermiticityDefect) {
  Rng rng(31);
  CMat k = random_ginibre(2, 2, rng);
  EXPECT_LE(hermiticity_defect({{k, k}}, 2), 1e-14);
  std::vector<MapTerm> bad{{k, CMat::Identity(2, 2)}};
  EXPECT_GT(hermiticity_defect(bad, 2), 1e-3);
  SdpProblem p;
  p.objective = HermitianOperator(CMat::Identity(2, 2));
  p.rhs = HermitianOperator(CMat::Zero(2, 2));
  p.map = bad;
  EXPECT_THROW(solve(p), InputError);
}

TEST(SdpProblem, DimensionErrors) {
  SdpProblem p;
  p.objective = HermitianOperator(CMat::Identity(2, 2));
  p.rhs = HermitianOperator(CMat::Identity(3, 3));
  p.map.push_back({CMat::Identity(2, 2), CMat::Identity(2, 2)});
  EXPECT_THROW(solve(p), InputError);
}

TEST(SdpProblem, TraceTimesIdentityMatchesClosedForm) {
  // Phi(X) = tr(X) I >= B: optimum max(lambda_max(B), 0) * lambda_min(A), checked against a
  // scan over X = t |v><v| with v on a grid of real angles.
  Rng rng(32);
  for (int trial = 0; trial < 6; ++trial) {
    RMat ar = RMat::Random(2, 2);
    CMat a = (ar * ar.transpose() + 0.1 * RMat::Identity(2, 2)).cast<Cplx>();
    RMat br = RMat::Random(2, 2);
    CMat b = (br + br.transpose()).cast<Cplx>();
    SdpProblem p;
    p.objective = HermitianOperator(a);
    p.rhs = HermitianOperator(b);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) p.map.push_back({basis_op(2, i, j), basis_op(2, i, j)});
    SdpSolution s = solve(p);
    ASSERT_EQ(s.status, Status::optimal);
    const double need = std::max(0.0, max_eig(b));
    double scan = 1e300;
    for (int k = 0; k <= 20000; ++k) {
      const double th = M_PI * k / 20000.0;
      CVec v(2);
      v << std::cos(th), std::sin(th);
      scan = std::min(scan, need * (v.adjoint() * a * v)(0, 0).real());
    }
    EXPECT_NEAR(s.primal_value, scan, 1e-6);
  }
}

TEST(SdpProblem, StrongDualityAndDualOfDual) {
  Rng rng(33);
  const Tolerances tol;
  for (int trial = 0; trial < 8; ++trial) {
    SdpProblem p = random_problem(3, rng);
    SdpSolution s = solve(p);
    ASSERT_EQ(s.status, Status::optimal);
    EXPECT_LE(std::abs(s.primal_value - s.dual_value), tol.sdp_gap * (1 + std::abs(s.primal_value)));
    EXPECT_LE(s.pres, tol.sdp_gap);
    EXPECT_LE(s.dres, tol.sdp_gap);
    // Certificate feasibility.
    EXPECT_GE(min_eig(s.primal_X.mat()), -1e-8);
    EXPECT_GE(min_eig(apply_map(p.map, s.primal_X.mat()) - p.rhs.mat()), -1e-7);
    EXPECT_GE(min_eig(p.objective.mat() - apply_map(adjoint_map(p.map), s.dual_Y.mat())), -1e-7);

    SdpSolution d = solve(dual_problem(p));
    EXPECT_NEAR(-d.primal_value, s.primal_value, 1e-6);
    SdpSolution dd = solve(dual_problem(dual_problem(p)));
    EXPECT_NEAR(dd.primal_value, s.primal_value, 1e-6);
  }
}

TEST(SdpProblem, DualProblemRejectsEqualities) {
  SdpProblem p;
  p.objective = HermitianOperator(CMat::Identity(2, 2));
  p.equalities.emplace_back(HermitianOperator(CMat::Identity(2, 2)), 1.0);
  EXPECT_THROW(dual_problem(p), InputError);
}

TEST(NormSdp, Examples) {
  EXPECT_NEAR(norm_via_sdp(HermitianOperator(diag({3, 1, 2})), NormSdp::infinity), 3, 1e-7);
  EXPECT_NEAR(norm_via_sdp(HermitianOperator(diag({3, -1})), NormSdp::one), 4, 1e-7);
  HermitianOperator zero(diag({1, 0})), one(diag({0, 1}));
  EXPECT_NEAR(norm_via_sdp(zero, NormSdp::trace_distance, &one), 1, 1e-7);
  EXPECT_THROW(norm_via_sdp(HermitianOperator(diag({1, -1})), NormSdp::infinity), InputError);
  EXPECT_THROW(norm_via_sdp(zero, NormSdp::trace_distance), InputError);
}

TEST(NormSdp, AgreesWithEigendecomposition) {
  Rng rng(34);
  const Tolerances tol;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = rng.integer(1, 8);
    HermitianOperator h(random_hermitian(d, rng));
    SdpSolution cert;
    const double one = norm_via_sdp(h, NormSdp::one, nullptr, tol, &cert);
    EXPECT_NEAR(one, norm(h.mat(), NormKind::trace), 1e-7) << "d=" << d;
    EXPECT_LE(cert.gap, tol.sdp_gap * (1 + std::abs(one)) + 1e-12);
    HermitianOperator psd(random_psd(d, rng, 0.0, 3.0));
    EXPECT_NEAR(norm_via_sdp(psd, NormSdp::infinity), norm(psd.mat(), NormKind::infinity), 1e-7) << "d=" << d;
  }
}

TEST(SdpProblem, OptionsFromTolerances) {
  Tolerances t;
  t.sdp_gap = 1e-6;
  ConeOptions o = options_from(t);
  EXPECT_LE(o.gaptol, 1e-6);
}
