#include <cmath>

#include <gtest/gtest.h>

#include "ssqt/cone.hpp"

using namespace ssqt::sdp;

namespace {

// min -x1 - x2  s.t.  x1 + 2 x2 <= 4, 3 x1 + x2 <= 6, x >= 0. Optimum at (8/5, 6/5).
ConeProblem small_lp() {
  ConeProblem p;
  p.c = RVec::Constant(2, -1.0);
  p.G = RMat(4, 2);
  p.G << 1, 2, 3, 1, -1, 0, 0, -1;
  p.h = RVec(4);
  p.h << 4, 6, 0, 0;
  p.A = RMat(0, 2);
  p.b = RVec(0);
  p.dims.lp = 4;
  return p;
}

// min t  s.t.  t I - M >= 0 with M symmetric 3x3: the largest eigenvalue.
ConeProblem lambda_max(const RMat& m) {
  const int k = static_cast<int>(m.rows());
  ConeProblem p;
  p.c = RVec::Ones(1);
  p.G = RMat(k * k, 1);
  p.h = RVec(k * k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) {
      p.G(j * k + i, 0) = i == j ? -1.0 : 0.0;
      p.h(j * k + i) = -m(i, j);
    }
  p.A = RMat(0, 1);
  p.b = RVec(0);
  p.dims.psd = {k};
  return p;
}

}  // namespace

TEST(Cone, Dims) {
  ConeDims d;
  d.lp = 3;
  d.psd = {2, 4};
  EXPECT_EQ(d.rows(), 3 + 4 + 16);
  EXPECT_EQ(d.degree(), 3 + 2 + 4);
  EXPECT_EQ(to_string(Status::optimal), "optimal");
}

TEST(Cone, SmallLp) {
  ConeSolution s = solve_cone(small_lp());
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.x(0), 1.6, 1e-7);
  EXPECT_NEAR(s.x(1), 1.2, 1e-7);
  EXPECT_NEAR(s.pcost, -2.8, 1e-7);
  EXPECT_NEAR(s.dcost, -2.8, 1e-7);
}

TEST(Cone, EqualityConstraint) {
  // min x1 + 2 x2  s.t.  x1 + x2 = 1, x >= 0.
  ConeProblem p;
  p.c = RVec(2);
  p.c << 1, 2;
  p.G = -RMat::Identity(2, 2);
  p.h = RVec::Zero(2);
  p.A = RMat::Ones(1, 2);
  p.b = RVec::Ones(1);
  p.dims.lp = 2;
  ConeSolution s = solve_cone(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.pcost, 1.0, 1e-7);
  EXPECT_NEAR(s.x(0), 1.0, 1e-6);
}

TEST(Cone, RedundantEqualitiesAreDropped) {
  ConeProblem p;
  p.c = RVec(2);
  p.c << 1, 2;
  p.G = -RMat::Identity(2, 2);
  p.h = RVec::Zero(2);
  p.A = RMat(2, 2);
  p.A << 1, 1, 2, 2;
  p.b = RVec(2);
  p.b << 1, 2;
  p.dims.lp = 2;
  ConeSolution s = solve_cone(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.pcost, 1.0, 1e-7);
  EXPECT_EQ(s.kept_rows.size(), 1u);
}

TEST(Cone, LargestEigenvalueSdp) {
  RMat m(3, 3);
  m << 2, 1, 0, 1, 3, 1, 0, 1, 4;
  ConeSolution s = solve_cone(lambda_max(m));
  ASSERT_EQ(s.status, Status::optimal);
  Eigen::SelfAdjointEigenSolver<RMat> es(m);
  EXPECT_NEAR(s.pcost, es.eigenvalues()(2), 1e-7);
  EXPECT_NEAR(s.dcost, es.eigenvalues()(2), 1e-7);
}

TEST(Cone, PrimalInfeasible) {
  // x <= -1 and x >= 0.
  ConeProblem p;
  p.c = RVec::Ones(1);
  p.G = RMat(2, 1);
  p.G << 1, -1;
  p.h = RVec(2);
  p.h << -1, 0;
  p.A = RMat(0, 1);
  p.b = RVec(0);
  p.dims.lp = 2;
  EXPECT_EQ(solve_cone(p).status, Status::primal_infeasible);
}

TEST(Cone, DualInfeasible) {
  // min -x with x >= 0 only: unbounded.
  ConeProblem p;
  p.c = -RVec::Ones(1);
  p.G = -RMat::Identity(1, 1);
  p.h = RVec::Zero(1);
  p.A = RMat(0, 1);
  p.b = RVec(0);
  p.dims.lp = 1;
  EXPECT_EQ(solve_cone(p).status, Status::dual_infeasible);
}

TEST(Cone, WeakDualityAtEveryIterate) {
  RMat m(3, 3);
  m << 1, 0.5, 0.2, 0.5, -1, 0.3, 0.2, 0.3, 0.5;
  for (const ConeProblem& p : {small_lp(), lambda_max(m)}) {
    ConeOptions opt;
    int seen = 0;
    opt.on_iterate = [&seen](const IterateInfo& it) {
      ++seen;
      EXPECT_GE(it.gap, 0.0) << "iteration " << it.iter;
      EXPECT_NEAR(it.pcost - it.dcost, it.gap + it.resid_term, 1e-9 * (1 + std::abs(it.pcost)))
          << "iteration " << it.iter;
    };
    ConeSolution s = solve_cone(p, opt);
    EXPECT_EQ(s.status, Status::optimal);
    EXPECT_GT(seen, 0);
  }
}

TEST(Cone, IterationCapReported) {
  ConeOptions opt;
  opt.max_iters = 1;
  EXPECT_EQ(solve_cone(small_lp(), opt).status, Status::max_iters);
}
