#include <cmath>

#include <gtest/gtest.h>

#include "ssqt/entropy.hpp"
#include "ssqt/random.hpp"
#include "ssqt/workcost.hpp"

using namespace ssqt;

namespace {

CMat diag(std::initializer_list<double> v) {
  RVec d(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) d(i++) = x;
  return d.cast<Cplx>().asDiagonal();
}

double inf_norm(const CMat& m) { return norm(m, NormKind::infinity); }

ChoiChannel random_channel(int din, int dout, Rng& rng) {
  return choi_from_kraus(random_kraus(din, dout, rng.integer((din + dout - 1) / dout, din * dout), rng), {dout}, {din});
}

ChoiChannel dephasing(double lambda) {
  CMat k0 = std::sqrt(1.0 - lambda / 2.0) * CMat::Identity(2, 2);
  CMat k1 = std::sqrt(lambda / 2.0) * diag({1, -1});
  return choi_from_kraus({k0, k1}, {2}, {2});
}

SubnormalizedState state(const CMat& m) { return SubnormalizedState(m, {static_cast<int>(m.rows())}); }

CMat ket_projector(const CVec& v) { return v * v.adjoint(); }

}  // namespace

TEST(ProcessMatrix, Examples) {
  ProcessMatrix id = process_matrix(identity_channel({2}), state(diag({1, 0})));
  EXPECT_LE(inf_norm(id.rho().mat() - diag({1, 0, 0, 0})), 1e-14);
  EXPECT_EQ(id.din(), 2);
  EXPECT_EQ(id.dout(), 2);

  ChoiChannel erase = replacement_channel(diag({1, 0}), {2}, {2});
  ProcessMatrix er = process_matrix(erase, state(CMat(CMat::Identity(2, 2) / 2.0)));
  EXPECT_LE(inf_norm(er.rho().mat() - kron(diag({1, 0}), diag({0.5, 0.5}))), 1e-14);
  EXPECT_LE(inf_norm(er.sigma() - diag({0.5, 0.5})), 1e-14);
  EXPECT_THROW(process_matrix(identity_channel({3}), state(diag({1, 0}))), InputError);
}

TEST(ProcessMatrix, RecoverChannelRoundTrip) {
  Rng rng(80);
  for (int trial = 0; trial < 5; ++trial) {
    const int din = rng.integer(2, 3), dout = rng.integer(1, 3);
    ChoiChannel e = random_channel(din, dout, rng);
    CMat sigma = random_state(din, rng, trial < 3 ? 0 : din - 1);
    ProcessMatrix pm = process_matrix(e, state(sigma));
    EXPECT_LE(inf_norm(pm.sigma() - sigma), 1e-12);
    ChoiChannel back = recover_channel(pm);
    EXPECT_LE(back.tp_defect(), 1e-9);
    EXPECT_LE(inf_norm(process_matrix(back, state(sigma)).rho().mat() - pm.rho().mat()), 1e-9);
    if (trial < 3) EXPECT_LE(choi_distance(back, e), 1e-8);
  }
}

TEST(Stinespring, Examples) {
  Rng rng(81);
  CMat u = random_unitary(3, rng);
  Stinespring su = stinespring(unitary_channel(u));
  EXPECT_EQ(su.env_dim, 1);
  EXPECT_NEAR(std::abs((u.adjoint() * su.v).trace()), 3.0, 1e-10);

  Stinespring sd = stinespring(dephasing(0.4));
  EXPECT_EQ(sd.env_dim, 2);

  ChoiChannel erase = replacement_channel(diag({1, 0}), {2}, {2});
  Stinespring se = stinespring(erase);
  EXPECT_EQ(se.env_dim, 2);
  CMat x = random_state(2, rng);
  CMat full = se.v * x * se.v.adjoint();
  EXPECT_LE(inf_norm(ptrace(full, {2, 2}, {1}) - diag({1, 0})), 1e-10);
  // The input ends up in the environment, up to a basis change there.
  EXPECT_LE((eigh(ptrace(full, {2, 2}, {0})).values - eigh(x).values).cwiseAbs().maxCoeff(), 1e-10);

  EXPECT_THROW(stinespring(scaled(identity_channel({2}), 0.5)), InputError);
}

TEST(Stinespring, DilatesRandomChannels) {
  Rng rng(82);
  for (int trial = 0; trial < 5; ++trial) {
    const int din = rng.integer(1, 3), dout = rng.integer(1, 3);
    ChoiChannel e = random_channel(din, dout, rng);
    Stinespring s = stinespring(e);
    EXPECT_LE(inf_norm(s.v.adjoint() * s.v - CMat::Identity(din, din)), 1e-9);
    EXPECT_EQ(s.env_dim, static_cast<int>(kraus_from_choi(e).size()));
    for (int i = 0; i < din; ++i)
      for (int j = 0; j < din; ++j) {
        CMat out = ptrace(s.v * basis_op(din, i, j) * s.v.adjoint(), {dout, s.env_dim}, {1});
        EXPECT_LE(inf_norm(out - e.apply(basis_op(din, i, j))), 1e-9);
      }
  }
}

TEST(WorkCost, Examples) {
  Rng rng(83);
  WorkReport id = work_cost(identity_channel({3}), state(random_state(3, rng)), 0.0);
  EXPECT_NEAR(id.bits, 0.0, 1e-10);
  EXPECT_EQ(id.method, WorkMethod::exact);
  EXPECT_DOUBLE_EQ(id.kt_ln2_units, id.bits);

  ChoiChannel erase = replacement_channel(diag({1, 0}), {2}, {2});
  WorkReport landauer = work_cost(erase, state(CMat(CMat::Identity(2, 2) / 2.0)), 0.0);
  EXPECT_NEAR(landauer.bits, 1.0, 1e-10);
  EXPECT_NEAR(landauer.cross_check, 1.0, 1e-8);

  // Reset-and-prepare of (|0><0| (x) |000><000| + |1><1| (x) 1/8) / 2 on itself.
  CMat rho = CMat::Zero(16, 16);
  rho(0, 0) = 0.5;
  for (int i = 8; i < 16; ++i) rho(i, i) = 0.5 / 8.0;
  WorkReport decouple = work_cost(replacement_channel(rho, {16}, {16}), state(rho), 0.0);
  EXPECT_NEAR(decouple.bits, std::log2(9.0) - 1.0, 1e-9);
  EXPECT_NEAR(decouple.cross_check, decouple.bits, 1e-8);
}

TEST(WorkCost, NormFormMatchesEntropyFormAndCoherent) {
  Rng rng(84);
  for (int trial = 0; trial < 5; ++trial) {
    const int din = rng.integer(1, 3), dout = rng.integer(1, 3);
    ChoiChannel e = random_channel(din, dout, rng);
    SubnormalizedState sigma = state(random_state(din, rng, trial % 2 == 0 ? 0 : 1));
    WorkReport w = work_cost(e, sigma, 0.0);
    EXPECT_NEAR(w.bits, w.cross_check, 1e-8);
    WorkReport c = work_cost_coherent(e, sigma);
    EXPECT_EQ(c.method, WorkMethod::coherent_sdp);
    EXPECT_NEAR(c.bits, w.bits, 1e-5);
  }
}

TEST(WorkCost, SmoothingUsesSquareRootOfTwiceEpsilon) {
  Rng rng(85);
  ChoiChannel e = random_channel(2, 2, rng);
  SubnormalizedState sigma = state(random_state(2, rng));
  WorkReport w = work_cost(e, sigma, 0.02);
  EXPECT_EQ(w.method, WorkMethod::smooth);
  EXPECT_NEAR(w.epsilon_tilde, 0.2, 1e-15);
  EXPECT_LE(w.bits, work_cost(e, sigma, 0.0).bits + 1e-6);
  EXPECT_THROW(work_cost(e, sigma, 0.5), InputError);
}

TEST(WorkCost, ClassicalGates) {
  const std::vector<bool> all(4, true);
  EXPECT_NEAR(work_cost_classical(gate_table("and"), all).bits, std::log2(3.0), 1e-12);
  EXPECT_NEAR(work_cost_classical(gate_table("xor"), all).bits, 1.0, 1e-12);
  EXPECT_NEAR(work_cost_classical(gate_table("nand"), all).bits, std::log2(3.0), 1e-12);
  EXPECT_NEAR(work_cost_classical(gate_table("and"), {true, false, false, true}).bits, 0.0, 1e-12);
  RMat swap(2, 2);
  swap << 0, 1, 1, 0;
  EXPECT_NEAR(work_cost_classical(swap, {true, true}).bits, 0.0, 1e-12);
  EXPECT_THROW(gate_table("implies"), InputError);
}

TEST(WorkCost, SameInputAndOutputStatesDifferentCost) {
  // p01 + p10 = p11: AND and XOR both output 1 with probability 0.3.
  CMat p = diag({0.4, 0.15, 0.15, 0.3});
  ChoiChannel and_gate = classical_channel(gate_table("and")), xor_gate = classical_channel(gate_table("xor"));
  EXPECT_LE(inf_norm(and_gate.apply(p) - xor_gate.apply(p)), 1e-15);
  EXPECT_NEAR(work_cost(and_gate, state(p), 0.0).bits, std::log2(3.0), 1e-9);
  EXPECT_NEAR(work_cost(xor_gate, state(p), 0.0).bits, 1.0, 1e-9);
}

TEST(WorkCost, DephasingIidTrendApproachesEntropyDifference) {
  // Smoothed cost per copy moves toward H(sigma) - H(E(sigma)).
  ChoiChannel one = dephasing(0.3);
  CMat s(2, 2);
  s << 0.8, 0.3, 0.3, 0.2;
  const double limit = von_neumann(state(s)) - von_neumann(state(one.apply(s)));
  ChoiChannel e = one;
  CMat sigma = s;
  double previous = 1e300;
  for (int n = 1; n <= 2; ++n) {
    if (n > 1) {
      e = tensor(e, one);
      sigma = kron(sigma, s);
    }
    const double per_copy = work_cost(e, state(sigma), 0.1).bits / n;
    const double distance = std::abs(per_copy - limit);
    EXPECT_LT(distance, previous) << "n=" << n;
    EXPECT_LE(per_copy, work_cost(e, state(sigma), 0.0).bits / n + 1e-6);
    previous = distance;
  }
}

TEST(ErasureWithMemory, Examples) {
  CVec bell = CVec::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  SubnormalizedState phi(ket_projector(bell), {2, 2});
  WorkReport b = erasure_with_memory(phi, 0.0);
  EXPECT_NEAR(b.bits, -1.0, 1e-9);
  EXPECT_NEAR(b.cross_check, -1.0, 1e-5);

  SubnormalizedState product(CMat(kron(diag({0.5, 0.5}), diag({0.3, 0.7}))), {2, 2});
  EXPECT_NEAR(erasure_with_memory(product, 0.0).bits, 1.0, 1e-9);

  CVec w = CVec::Zero(8);
  w(1) = w(2) = w(4) = 1.0 / std::sqrt(3.0);
  SubnormalizedState wsm(ptrace(ket_projector(w), {2, 2, 2}, {2}), {2, 2});
  WorkReport wr = erasure_with_memory(wsm, 0.0);
  EXPECT_NEAR(wr.bits, std::log2(1.5), 1e-9);
  EXPECT_NEAR(wr.cross_check, wr.bits, 1e-5);

  WorkReport smooth = erasure_with_memory(wsm, 0.05);
  EXPECT_NEAR(smooth.bits, smooth_h_max(wsm, {1}, 0.05).value, 1e-9);
  EXPECT_LE(smooth.bits, conditional_entropy(wsm, 1, CondKind::max).value + 1e-6);
}

TEST(ErasureWithMemory, ExplicitMap) {
  ChoiChannel e = erasure_map(2, 3);
  Rng rng(86);
  CMat s = random_state(6, rng);
  EXPECT_LE(inf_norm(e.apply(s) - kron(diag({1, 0}), ptrace(s, {2, 3}, {0}))), 1e-12);
  EXPECT_TRUE(e.is_tp());
}

TEST(Measurement, InstrumentValidation) {
  auto good = MeasurementInstrument::projective({diag({1, 0}), diag({0, 1})});
  EXPECT_NO_THROW(good.validate());
  EXPECT_EQ(good.outcomes(), 2);
  std::vector<CMat> q = good.povm();
  EXPECT_LE(inf_norm(q[0] + q[1] - CMat::Identity(2, 2)), 1e-12);

  MeasurementInstrument missing;
  missing.collapse = {choi_from_kraus({diag({1, 0})}, {2}, {2})};
  missing.labels = {"0"};
  EXPECT_THROW(missing.validate(), InputError);

  MeasurementInstrument mixed;
  mixed.collapse = {choi_from_kraus({diag({1, 0})}, {2}, {2}), choi_from_kraus({diag({0, 0, 1})}, {3}, {3})};
  mixed.labels = {"0", "1"};
  EXPECT_THROW(mixed.validate(), InputError);
  EXPECT_THROW(MeasurementInstrument::trivial((RVec(2) << 0.5, 0.6).finished(), 2).validate(), InputError);
  EXPECT_THROW(MeasurementInstrument::trivial((RVec(2) << 1.5, -0.5).finished(), 2), InputError);
}

TEST(Measurement, ComputationalBasisOnMixedState) {
  auto inst = MeasurementInstrument::projective({diag({1, 0}), diag({0, 1})});
  MeasurementReport r = measurement_analysis(inst, state(diag({0.5, 0.5})), 0.0);
  EXPECT_NEAR(r.measurement.bits, 0.0, 1e-6);
  EXPECT_NEAR(r.reset_given_sout.bits, 0.0, 1e-6);
  EXPECT_NEAR(r.reset_given_ref.bits, 0.0, 1e-6);
  EXPECT_TRUE(r.subunital);
  EXPECT_TRUE(r.single_kraus);
}

TEST(Measurement, ComputationalBasisOnPlusState) {
  auto inst = MeasurementInstrument::projective({diag({1, 0}), diag({0, 1})});
  CMat plus = CMat::Constant(2, 2, 0.5);
  MeasurementReport r = measurement_analysis(inst, state(plus), 0.0);
  EXPECT_NEAR(r.measurement.bits, -1.0, 1e-6);
  EXPECT_NEAR(r.reset_given_sout.bits, 0.0, 1e-6);
  EXPECT_NEAR(r.reset_given_ref.bits, 1.0, 1e-6);
  EXPECT_LE(r.identity_defect, 1e-5);
  EXPECT_NEAR(r.state.amps.norm(), 1.0, 1e-9);
}

TEST(Measurement, TrivialPovm) {
  Rng rng(87);
  const RVec p = (RVec(3) << 0.5, 0.3, 0.2).finished();
  auto inst = MeasurementInstrument::trivial(p, 2);
  const double renyi_half = 2.0 * std::log2(p.cwiseSqrt().sum());
  MeasurementReport r = measurement_analysis(inst, state(random_state(2, rng)), 0.0);
  EXPECT_NEAR(r.measurement.bits, std::log2(0.5), 1e-6);
  EXPECT_LE(r.measurement.bits, 1e-6);
  EXPECT_NEAR(r.reset_given_sout.bits, renyi_half, 1e-6);
  EXPECT_NEAR(r.reset_given_ref.bits, renyi_half, 1e-6);
}

TEST(Measurement, YieldNeverExceedsResetCost) {
  Rng rng(88);
  for (int trial = 0; trial < 4; ++trial) {
    CMat u = random_unitary(2, rng);
    auto inst = MeasurementInstrument::projective({u * diag({1, 0}) * u.adjoint(), u * diag({0, 1}) * u.adjoint()});
    MeasurementReport r = measurement_analysis(inst, state(random_state(2, rng)), trial % 2 == 0 ? 0.0 : 0.01);
    EXPECT_GE(r.measurement.bits + r.reset_given_ref.bits, -1e-6);
    EXPECT_LE(r.measurement.bits, 1e-6);
    EXPECT_LE(r.identity_defect, 1e-5);
  }
}
