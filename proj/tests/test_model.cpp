#include <cmath>

#include <gtest/gtest.h>

#include "ssqt/model.hpp"
#include "ssqt/random.hpp"

using namespace ssqt;
using namespace ssqt::sdp;

TEST(Model, ExpressionAlgebra) {
  Model m;
  SExpr x = m.scalar_var(), y = m.scalar_var();
  SExpr e = 2.0 * x - y + 3.0;
  ModelSolution s;
  s.x = RVec(2);
  s.x << 1.5, 4.0;
  EXPECT_DOUBLE_EQ(s.value(e), 2.0);
  HExpr h = x * CMat::Identity(2, 2) + HExpr(CMat::Ones(2, 2));
  EXPECT_NEAR((s.value(h) - CMat::Ones(2, 2) - 1.5 * CMat::Identity(2, 2)).norm(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.value(trace(h)), 5.0);
}

TEST(Model, HermitianBasisIsOrthonormal) {
  for (int d : {1, 2, 3, 4}) {
    std::vector<CMat> b = hermitian_basis(d);
    ASSERT_EQ(static_cast<int>(b.size()), d * d);
    for (std::size_t i = 0; i < b.size(); ++i) {
      EXPECT_LE((b[i] - b[i].adjoint()).norm(), 1e-15);
      for (std::size_t j = 0; j < b.size(); ++j)
        EXPECT_NEAR((b[i] * b[j]).trace().real(), i == j ? 1.0 : 0.0, 1e-14);
    }
    EXPECT_EQ(static_cast<int>(hermitian_basis(d, true).size()), d);
    EXPECT_EQ(static_cast<int>(hermitian_basis(d, false, true).size()), d * (d + 1) / 2);
  }
}

TEST(Model, Classification) {
  EXPECT_EQ(classify(HExpr(CMat::Identity(2, 2))), ConeKind::lp);
  EXPECT_EQ(classify(HExpr(CMat::Ones(2, 2))), ConeKind::real_psd);
  CMat c = CMat::Identity(2, 2);
  c(0, 1) = Cplx(0, 1);
  c(1, 0) = Cplx(0, -1);
  EXPECT_EQ(classify(HExpr(c)), ConeKind::complex_psd);
}

TEST(Model, MinimalTraceDominatingOperator) {
  // min tr X s.t. X >= M, X >= 0 has value equal to the positive part trace of M.
  Rng rng(20);
  for (int trial = 0; trial < 5; ++trial) {
    CMat mm = random_hermitian(3, rng);
    Model m;
    HExpr x = m.hermitian(3);
    m.psd(x);
    m.psd(x - HExpr(mm));
    m.minimize(trace(x));
    ModelSolution s = m.solve();
    ASSERT_EQ(s.status, Status::optimal);
    Eigh e = eigh(mm);
    EXPECT_NEAR(s.primal, e.values.cwiseMax(0.0).sum(), 1e-7);
    EXPECT_NEAR(s.primal, s.dual, 1e-7);
  }
}

TEST(Model, EqualityOnHermitianExpression) {
  // min <0|X|0> s.t. X >= 0, tr_2 X = rho (on 2 x 2): minimum is 0 via X = |1><1| (x) ...
  Model m;
  HExpr x = m.hermitian(4);
  m.psd(x);
  CMat rho = CMat::Identity(2, 2) / 2.0;
  m.equal(ptrace(x, {2, 2}, {1}) - HExpr(rho));
  m.minimize(inner(basis_op(4, 0, 0), x));
  ModelSolution s = m.solve();
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.primal, 0.0, 1e-7);
  EXPECT_LE((ptrace(s.value(x), {2, 2}, {1}) - rho).norm(), 1e-7);
  EXPECT_EQ(s.heq_duals.size(), 1u);
}

TEST(Model, RootFidelityViaOffDiagonalBlock) {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    CMat r = random_state(3, rng), t = random_state(3, rng);
    Model m;
    HExpr y = m.offdiag_block(3, 3);
    m.psd(block2(HExpr(r), y, HExpr(t)));
    m.minimize(-inner(fidelity_functional(3), y));
    ModelSolution s = m.solve();
    ASSERT_EQ(s.status, Status::optimal);
    EXPECT_NEAR(-s.primal, generalized_fidelity(r, t), 1e-6);
  }
}

TEST(Model, AddFidelitySubnormalizedTarget) {
  // min tr(hat) with F(hat, diag(1/2, 0)) >= f; the optimum is diagonal with
  // sqrt(h) + sqrt(1 - h) = f sqrt 2 at the smallest root.
  const double f = 0.9, c = f * std::sqrt(2.0);
  const double root = (c - std::sqrt(2.0 - c * c)) / 2.0;
  Model m;
  HExpr hat = m.hermitian(2);
  m.psd(hat);
  CMat target = CMat::Zero(2, 2);
  target(0, 0) = 0.5;
  add_fidelity(m, hat, target, f);
  m.minimize(trace(hat));
  ModelSolution s = m.solve();
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.primal, root * root, 1e-6);
  EXPECT_NEAR(generalized_fidelity(s.value(hat), target), f, 1e-6);
}

TEST(Model, CompressKeepsSupport) {
  CMat t = CMat::Zero(3, 3);
  t(0, 0) = 0.7;
  t(2, 2) = 0.3;
  Compressed c = compress(t);
  ASSERT_EQ(c.iso.cols(), 2);
  EXPECT_LE((c.iso * c.diag * c.iso.adjoint() - t).norm(), 1e-14);
  EXPECT_LE((c.iso.adjoint() * c.iso - CMat::Identity(2, 2)).norm(), 1e-14);
}
