#include <cmath>

#include <gtest/gtest.h>

#include "ssqt/coherent.hpp"
#include "ssqt/random.hpp"
#include "ssqt/thermo.hpp"

using namespace ssqt;

namespace {

CMat diag(std::initializer_list<double> v) {
  RVec d(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) d(i++) = x;
  return d.cast<Cplx>().asDiagonal();
}

CMat rank_projector(int d, int rank) {
  CMat p = CMat::Zero(d, d);
  for (int i = 0; i < rank; ++i) p(i, i) = 1.0;
  return p;
}

GammaOperator gamma_of(const CMat& m) { return GammaOperator(HermitianOperator(m)); }

}  // namespace

TEST(ThermoState, Validation) {
  GammaOperator g = gamma_of(diag({1, 0.5, 0.25}));
  EXPECT_THROW(ThermoState(diag({1, 0.5, 0}), g), InputError);
  CMat rotated = CMat::Constant(3, 3, 1.0 / 3.0);
  EXPECT_THROW(ThermoState(rotated, g), InputError);
  EXPECT_THROW(ThermoState(CMat::Zero(3, 3), g), InputError);
  EXPECT_THROW(ThermoState(rank_projector(2, 1), g), InputError);
  ThermoState ok(diag({0, 1, 1}), g, {2.0});
  EXPECT_NEAR(ok.omega(), 0.75, 1e-15);
  EXPECT_LE((ok.state().mat() - diag({0, 0.5 / 0.75, 0.25 / 0.75})).norm(), 1e-14);
  EXPECT_LE(ok.commutation_defect(), 1e-15);
  EXPECT_EQ(ok.labels().size(), 1u);
}

TEST(NaturalPotential, Examples) {
  GammaOperator i8 = identity_gamma({8});
  EXPECT_NEAR(natural_potential(ThermoState(rank_projector(8, 4), i8)), -2.0, 1e-14);
  GammaOperator g = gamma_of(diag({1, 0.5, 0.2, 0}));
  EXPECT_NEAR(natural_potential(ThermoState(rank_projector(4, 3), g)), -std::log2(1.7), 1e-14);
  EXPECT_NEAR(natural_potential(ThermoState(CMat::Identity(2, 2), gamma_of(diag({1, 0.5})))), -std::log2(1.5), 1e-14);
  EXPECT_NEAR(bits_to_nats(1.0), std::log(2.0), 1e-15);
}

TEST(Transition, Examples) {
  GammaOperator i8 = identity_gamma({8});
  ThermoState big(rank_projector(8, 4), i8), small(rank_projector(8, 2), i8);
  EXPECT_NEAR(transition_value(big, big).value, 0.0, 1e-14);
  SubnormalizedState product(CMat(kron(small.state().mat(), big.state().mat().transpose())), {8, 8});
  TransitionValue t = transition_value(big, small, product);
  EXPECT_NEAR(t.value, -1.0, 1e-14);
  ASSERT_TRUE(t.sdp_value.has_value());
  EXPECT_NEAR(*t.sdp_value, -1.0, 1e-5);
  SubnormalizedState wrong(CMat(kron(big.state().mat(), big.state().mat())), {8, 8});
  EXPECT_THROW(transition_value(big, small, wrong), InputError);
}

TEST(Transition, RandomCommutingQutritPairs) {
  Rng rng(90);
  for (int trial = 0; trial < 4; ++trial) {
    CMat u = random_unitary(3, rng), w = random_unitary(3, rng);
    RVec gr = RVec::NullaryExpr(3, [&] { return rng.uniform(0.2, 2.0); });
    RVec go = RVec::NullaryExpr(3, [&] { return rng.uniform(0.2, 2.0); });
    GammaOperator gamma_in = gamma_of(herm(u * CMat(gr.cast<Cplx>().asDiagonal()) * u.adjoint()));
    GammaOperator gamma_out = gamma_of(herm(w * CMat(go.cast<Cplx>().asDiagonal()) * w.adjoint()));
    ThermoState from(herm(u * rank_projector(3, 1 + trial % 3) * u.adjoint()), gamma_in);
    ThermoState to(herm(w * rank_projector(3, 1 + (trial + 1) % 3) * w.adjoint()), gamma_out);
    SubnormalizedState rho(CMat(kron(to.state().mat(), from.state().mat().transpose())), {3, 3});
    TransitionValue t = transition_value(from, to, rho);
    EXPECT_NEAR(t.value, natural_potential(from) - natural_potential(to), 1e-12);
    EXPECT_NEAR(*t.sdp_value, t.value, 1e-5);
  }
}

TEST(Transition, SecondLawForGibbsPreservingReplacement) {
  // Replacement by Gamma / tr Gamma preserves Gamma; the potential cannot increase.
  Rng rng(91);
  for (int trial = 0; trial < 4; ++trial) {
    RVec g = RVec::NullaryExpr(3, [&] { return rng.uniform(0.2, 2.0); });
    CMat gm = g.cast<Cplx>().asDiagonal();
    GammaOperator gamma = gamma_of(gm);
    ThermoState from(rank_projector(3, 1 + trial % 3), gamma), to(CMat::Identity(3, 3), gamma);
    ChoiChannel replace = replacement_channel(gm / gm.trace(), {3}, {3});
    SubnormalizedState rho(process_matrix(replace, from.state().mat()), {3, 3});
    TransitionValue t = transition_value(from, to, rho);
    EXPECT_GE(t.value, -1e-6);
    EXPECT_GE(*t.sdp_value, -1e-6);
  }
}

TEST(Transition, SmoothBandOnCommutingProjections) {
  CMat gr = diag({1, 0.4, 0.7}), go = diag({0.6, 1.2});
  ThermoState from(diag({1, 1, 0}), gamma_of(gr)), to(CMat::Identity(2, 2), gamma_of(go));
  CMat rho = kron(to.state().mat(), from.state().mat().transpose());
  CoherentInstance inst(SubnormalizedState(rho, {2, 3}), from.gamma(), to.gamma());
  const double eps = 0.05;
  auto f0 = [&](const CMat& gamma, int rank) {
    double log_norm = 0.0;
    for (int i = 0; i < gamma.rows(); ++i) log_norm = std::max(log_norm, std::abs(std::log2(gamma(i, i).real())));
    return eps * std::log2(rank - 1.0) + eps * log_norm -
           eps * std::log2(eps) - (1 - eps) * std::log2(1 - eps);
  };
  const double lambda_diff = natural_potential(from) - natural_potential(to);
  CoherentResult r = smooth_coherent(inst, eps);
  EXPECT_GE(r.value - lambda_diff, -1e-6);
  EXPECT_LE(r.value - lambda_diff, f0(gr, 3) + f0(go, 2) + 1e-6);
}

TEST(ChemicalPotential, LinearTableHasExactSlope) {
  PotentialTable t;
  for (int z = 0; z <= 4; ++z) t.add({static_cast<double>(z)}, std::exp2(-(3.0 * z - 1.0)));
  EXPECT_NEAR(chemical_potential(t, {2.0}, 0, 1.0), 3.0, 1e-12);
  EXPECT_EQ(chemical_potentials(t, 0, 1.0).size(), 3u);
  EXPECT_THROW(chemical_potential(t, {4.0}, 0, 1.0), InputError);
  EXPECT_THROW(chemical_potential(t, {2.0}, 1, 1.0), InputError);
  EXPECT_EQ(t.find({3.0 + 1e-12}), 3);
  EXPECT_EQ(t.find({7.0}), -1);
}

TEST(ChemicalPotential, RepetitionCodeGrid) {
  // Lambda(n, m) = -n (m - 1): the slope in m is -n.
  PotentialTable t;
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 7; m += 2) t.add_log2({static_cast<double>(n), static_cast<double>(m)}, -repetition_code(n, m, std::vector<int>(n, 0)).lambda);
  for (int n = 1; n <= 3; ++n) EXPECT_NEAR(chemical_potential(t, {static_cast<double>(n), 3.0}, 1, 2.0), -n, 1e-12);
  EXPECT_NEAR(chemical_potential(t, {2.0, 5.0}, 0, 1.0), -4.0, 1e-12);
}

TEST(MicrocanonicalToy, Examples) {
  MicrocanonicalToy t = microcanonical_toy(3, 1);
  EXPECT_EQ(t.omega, 3u);
  EXPECT_NEAR(t.lambda, -std::log2(3.0), 1e-15);
  EXPECT_NEAR(t.entropy_nats, std::log(3.0), 1e-15);
  ASSERT_TRUE(t.state.has_value());
  EXPECT_NEAR(natural_potential(*t.state), t.lambda, 1e-12);
  EXPECT_NEAR(t.state->state().mat()(1, 1).real(), 1.0 / 3.0, 1e-15);  // |001>
  MicrocanonicalToy ground = microcanonical_toy(5, 0);
  EXPECT_EQ(ground.omega, 1u);
  EXPECT_EQ(ground.lambda, 0.0);
  EXPECT_THROW(microcanonical_toy(3, 4), InputError);
  EXPECT_THROW(microcanonical_toy(3, -1), InputError);
  EXPECT_FALSE(microcanonical_toy(12, 3).state.has_value());
  EXPECT_EQ(microcanonical_toy(12, 3).omega, 220u);
}

TEST(MicrocanonicalToy, MergingSectorsLowersPotential) {
  for (int e = 0; e < 6; ++e) {
    ThermoState one = *microcanonical_toy(6, e).state;
    CMat merged = one.projector() + microcanonical_toy(6, e + 1).state->projector();
    EXPECT_LE(natural_potential(ThermoState(merged, identity_gamma({64}))), natural_potential(one) + 1e-12);
  }
}

TEST(MicrocanonicalToy, AdditivityOverProductSectors) {
  MicrocanonicalToy a = microcanonical_toy(3, 1), b = microcanonical_toy(4, 2);
  ThermoState product(kron(a.state->projector(), b.state->projector()), identity_gamma({128}));
  EXPECT_NEAR(a.lambda + b.lambda, natural_potential(product), 1e-12);
}

TEST(ToyGas, ChemicalPotentialMatchesInverseTemperature) {
  PotentialTable t = toy_gas_table(1000, "nats");
  EXPECT_EQ(t.units, "nats");
  const double mu = chemical_potential(t, {300.0}, 0, 1.0);
  EXPECT_NEAR(mu, -0.846348, 1e-6);
  EXPECT_NEAR(matching_beta(1000, 300), std::log(700.0 / 300.0), 1e-12);
  EXPECT_NEAR(mu, -matching_beta(1000, 300), 2e-3);
}

TEST(ToyGas, FiniteSizeTrendTowardInverseTemperature) {
  double previous = 1e300;
  for (int n : {4, 8, 16}) {
    PotentialTable t = toy_gas_table(n, "nats");
    const int e = n / 4;
    const double gap = std::abs(chemical_potential(t, {static_cast<double>(e)}, 0, 1.0) + matching_beta(n, e));
    EXPECT_LT(gap, previous) << "N=" << n;
    previous = gap;
  }
}

TEST(RepetitionCode, Examples) {
  RepetitionCode c = repetition_code(2, 3, {0, 1});
  EXPECT_EQ(c.lambda, -4.0);
  EXPECT_EQ(c.z, 16u);
  ASSERT_TRUE(c.state.has_value());
  EXPECT_NEAR(natural_potential(*c.state), -4.0, 1e-12);
  EXPECT_EQ(repetition_code(3, 1, {1, 0, 1}).lambda, 0.0);
  EXPECT_THROW(repetition_code(1, 2, {0}), InputError);
  EXPECT_THROW(repetition_code(2, 3, {0}), InputError);

  RepetitionCode one = repetition_code(1, 3, {1});
  EXPECT_EQ(one.preimages_per_block, 4u);
  ASSERT_TRUE(one.state.has_value());
  // Majority-one strings 011, 101, 110, 111.
  EXPECT_LE((one.state->state().mat() - diag({0, 0, 0, 0.25, 0, 0.25, 0.25, 0.25})).norm(), 1e-14);
}

TEST(FlatSpectrum, Examples) {
  Rng rng(92);
  CMat u = random_unitary(4, rng);
  EXPECT_NEAR(natural_potential(flat_spectrum_state(4, u, 4)), -2.0, 1e-12);
  EXPECT_NEAR(natural_potential(flat_spectrum_state(1, u, 4)), 0.0, 1e-12);
  for (int r = 1; r <= 4; ++r)
    EXPECT_NEAR(natural_potential(flat_spectrum_state(r, random_unitary(4, rng), 4)), -std::log2(r), 1e-12);
  ThermoState s = flat_spectrum_state(2, u, 4);
  EXPECT_NEAR(s.state().mat().trace().real(), 1.0, 1e-12);
  EXPECT_LE((s.state().mat() * s.state().mat() - s.state().mat() / 2.0).norm(), 1e-12);
  EXPECT_THROW(flat_spectrum_state(0, u, 4), InputError);
  EXPECT_THROW(flat_spectrum_state(5, u, 4), InputError);
  EXPECT_THROW(flat_spectrum_state(2, 2.0 * u, 4), InputError);
}
