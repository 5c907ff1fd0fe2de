#include <cmath>

#include <gtest/gtest.h>

#include "ssqt/linalg.hpp"
#include "ssqt/random.hpp"

using namespace ssqt;

namespace {

CMat diag(std::initializer_list<double> v) {
  RVec d(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) d(i++) = x;
  return d.cast<Cplx>().asDiagonal();
}

double inf_norm(const CMat& m) { return norm(m, NormKind::infinity); }

}  // namespace

TEST(Tolerances, DefaultsAndValidation) {
  Tolerances t;
  EXPECT_DOUBLE_EQ(t.herm_tol, 1e-10);
  EXPECT_DOUBLE_EQ(t.psd_tol, 1e-9);
  EXPECT_DOUBLE_EQ(t.trace_tol, 1e-8);
  EXPECT_DOUBLE_EQ(t.rank_rel_tol, 1e-10);
  EXPECT_DOUBLE_EQ(t.sdp_gap, 1e-8);
  t.psd_tol = 0.0;
  EXPECT_THROW(t.validate(), InputError);
}

TEST(HermitianOperator, SymmetrizesAndChecks) {
  CMat m(2, 2);
  m << 1, Cplx(0, 1), Cplx(0, -1), 2;
  HermitianOperator h = HermitianOperator::checked(m, {2}, Tolerances{});
  EXPECT_LE(h.herm_defect(), 1e-15);
  m(0, 1) += 1e-6;
  EXPECT_THROW(HermitianOperator::checked(m, {2}, Tolerances{}), InputError);
  HermitianOperator loose(m);
  EXPECT_NEAR((loose.mat() - loose.mat().adjoint()).norm(), 0.0, 1e-15);
  EXPECT_THROW(HermitianOperator::checked(CMat::Identity(4, 4), {3}, Tolerances{}), InputError);
}

TEST(SubnormalizedState, RejectsNegativeAndOvernormalized) {
  EXPECT_NO_THROW(SubnormalizedState(diag({0.5, 0.25}), {2}));
  EXPECT_THROW(SubnormalizedState(diag({1.0, 0.5}), {2}), InputError);
  EXPECT_THROW(SubnormalizedState(diag({1.1, -0.1}), {2}), InputError);
  SubnormalizedState s(diag({0.5, 0.5}), {2});
  EXPECT_TRUE(s.is_normalized());
  EXPECT_FALSE(SubnormalizedState(diag({0.5, 0.25}), {2}).is_normalized());
}

TEST(Linalg, EighAscendingAndCutSmall) {
  Eigh e = eigh(diag({3, 1, 2}));
  EXPECT_NEAR(e.values(0), 1, 1e-14);
  EXPECT_NEAR(e.values(2), 3, 1e-14);
  RVec v(3);
  v << 1e-14, 0.5, 1.0;
  EXPECT_EQ(cut_small(v, 1e-10)(0), 0.0);
  EXPECT_EQ(cut_small(v, 1e-10)(1), 0.5);
}

TEST(Linalg, KronAndPartialTrace) {
  Rng rng(1);
  CMat a = random_state(2, rng), b = random_state(3, rng);
  CMat ab = kron(a, b);
  EXPECT_LE(inf_norm(ptrace(ab, {2, 3}, {1}) - a), 1e-12);
  EXPECT_LE(inf_norm(ptrace(ab, {2, 3}, {0}) - b), 1e-12);
  CMat c = random_state(2, rng);
  CMat abc = kron_all({a, b, c});
  EXPECT_LE(inf_norm(ptrace(abc, {2, 3, 2}, {0, 2}) - b), 1e-12);
}

TEST(Linalg, PartialTraceIsTracePreservingAndPositive) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int da = rng.integer(1, 4), db = rng.integer(1, 3);
    CMat r = random_psd(da * db, rng, 0.0, 1.0);
    CMat red = ptrace(r, {da, db}, {1});
    EXPECT_NEAR(red.trace().real(), r.trace().real(), 1e-10);
    EXPECT_GE(min_eig(red), -1e-12);
  }
}

TEST(Linalg, PartialTransposeAndPermutation) {
  CMat m = kron(basis_op(2, 0, 1), basis_op(3, 2, 0));
  EXPECT_LE(inf_norm(ptranspose(m, {2, 3}, 1) - kron(basis_op(2, 0, 1), basis_op(3, 0, 2))), 1e-15);
  CMat swapped = permute_factors(m, {2, 3}, {1, 0});
  EXPECT_LE(inf_norm(swapped - kron(basis_op(3, 2, 0), basis_op(2, 0, 1))), 1e-15);
  CVec v = CVec::Zero(6);
  v(1) = 1;  // |0>|1>
  CVec w = permute_factors(v, {2, 3}, {1, 0});
  EXPECT_EQ(w(2), Cplx(1, 0));  // |1>|0> in 3 x 2
}

TEST(Linalg, MatrixFunctions) {
  CMat m = diag({4, 1, 0});
  EXPECT_LE(inf_norm(mfun(m, MatFn::sqrt) - diag({2, 1, 0})), 1e-14);
  EXPECT_LE(inf_norm(mfun(m, MatFn::log2) - diag({2, 0, 0})), 1e-14);
  EXPECT_LE(inf_norm(mfun(m, MatFn::pinv) - diag({0.25, 1, 0})), 1e-14);
  EXPECT_LE(inf_norm(mfun(m, MatFn::inv_sqrt) - diag({0.5, 1, 0})), 1e-14);
  EXPECT_LE(inf_norm(mfun(diag({-2, 1}), MatFn::abs) - diag({2, 1})), 1e-14);
}

TEST(Linalg, SupportProjectorIdempotent) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = rng.integer(2, 6);
    CMat r = random_state(d, rng, rng.integer(1, d));
    Support s = support(r);
    EXPECT_LE(inf_norm(s.projector * s.projector - s.projector), 1e-10);
    EXPECT_LE(inf_norm(s.projector * r - r), 1e-10);
  }
}

TEST(Linalg, PurifyRoundTrip) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = rng.integer(2, 5);
    SubnormalizedState rho(random_state(d, rng, rng.integer(1, d)), {d});
    Ket psi = purify(rho);
    ASSERT_EQ(psi.dims.size(), 2u);
    CMat back = ptrace(psi.projector(), psi.dims, {1});
    EXPECT_LE(inf_norm(back - rho.mat()), 1e-9);
  }
}

TEST(Linalg, SchmidtOfMaximallyEntangled) {
  Ket phi{maximally_entangled_ket(3).amps / std::sqrt(3.0), {3, 3}};
  Schmidt s = schmidt_decompose(phi, {0});
  ASSERT_EQ(s.coeffs.size(), 3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(s.coeffs(i), 1 / std::sqrt(3.0), 1e-12);
}

TEST(Linalg, MaximallyEntangledKet) {
  Ket k = maximally_entangled_ket(2);
  EXPECT_NEAR(k.amps.squaredNorm(), 2, 1e-15);
  EXPECT_EQ(k.amps(0), Cplx(1, 0));
  EXPECT_EQ(k.amps(3), Cplx(1, 0));
  Ket k3 = maximally_entangled_ket(3);
  EXPECT_LE(inf_norm(ptrace(k3.projector(), {3, 3}, {1}) - CMat::Identity(3, 3)), 1e-14);
}

TEST(Linalg, Norms) {
  EXPECT_NEAR(norm(diag({3, -1}), NormKind::trace), 4, 1e-14);
  EXPECT_NEAR(norm(diag({3, 1, 2}), NormKind::infinity), 3, 1e-14);
}

TEST(Linalg, DistancesOnOrthogonalStates) {
  CMat z = diag({1, 0}), o = diag({0, 1});
  EXPECT_NEAR(distance(z, o, DistanceKind::trace), 1, 1e-12);
  EXPECT_NEAR(generalized_fidelity(z, o), 0, 1e-12);
  EXPECT_NEAR(distance(z, o, DistanceKind::purified), 1, 1e-12);
  EXPECT_NEAR(distance(z, z, DistanceKind::purified), 0, 1e-7);
}

TEST(Linalg, GeneralizedFidelityOfSubnormalized) {
  CMat a = diag({0.5, 0}), b = diag({0.5, 0});
  EXPECT_NEAR(generalized_fidelity(a, b), 1.0, 1e-12);
}

TEST(Linalg, DistanceSandwichAndMonotonicity) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    CMat r = random_state(4, rng), s = random_state(4, rng);
    const double t = distance(r, s, DistanceKind::trace);
    const double p = distance(r, s, DistanceKind::purified);
    EXPECT_LE(t, p + 1e-9);
    EXPECT_LE(p, std::sqrt(2 * t) + 1e-9);
    CMat ra = ptrace(r, {2, 2}, {1}), sa = ptrace(s, {2, 2}, {1});
    for (DistanceKind k : {DistanceKind::trace, DistanceKind::purified})
      EXPECT_GE(distance(r, s, k), distance(ra, sa, k) - 1e-9);
    EXPECT_LE(generalized_fidelity(r, s), generalized_fidelity(ra, sa) + 1e-9);
  }
}

TEST(Linalg, GeometricMeanContraction) {
  Rng rng(6);
  HermitianOperator id(CMat::Identity(2, 2));
  EXPECT_LE(inf_norm(geometric_mean_contraction(id, id).mat() - CMat::Identity(2, 2)), 1e-10);
  HermitianOperator zero(CMat::Zero(2, 2));
  EXPECT_LE(inf_norm(geometric_mean_contraction(zero, id).mat()), 1e-10);
  CMat b = random_psd(3, rng);
  HermitianOperator half(b / 2.0), full(b);
  CMat c = geometric_mean_contraction(half, full).mat();
  EXPECT_LE(inf_norm(c * b * c - b / 2.0), 1e-9);
  EXPECT_LE(inf_norm(c * c - CMat::Identity(3, 3) / 2.0), 1e-9);
  EXPECT_THROW(geometric_mean_contraction(full, half), InputError);
}

TEST(Random, SeededDeterminismAndValidity) {
  Rng a(42), b(42);
  EXPECT_LE(inf_norm(random_state(3, a) - random_state(3, b)), 0.0);
  Rng rng(7);
  CMat u = random_unitary(4, rng);
  EXPECT_LE(inf_norm(u.adjoint() * u - CMat::Identity(4, 4)), 1e-12);
  CMat r = random_state(4, rng, 2);
  EXPECT_NEAR(r.trace().real(), 1, 1e-12);
  EXPECT_EQ(support(r).rank, 2);
  RVec p = random_probability(5, rng);
  EXPECT_NEAR(p.sum(), 1, 1e-12);
  EXPECT_GE(p.minCoeff(), 0);
}

TEST(Linalg, ReducedStateMatchesPartialTrace) {
  Rng rng(19);
  Ket psi{random_pure(12, rng), {2, 3, 2}};
  for (std::vector<int> traced : {std::vector<int>{0}, {1}, {2}, {0, 2}, {2, 0}, {}}) {
    CMat expected = ptrace(psi.projector(), psi.dims, traced);
    EXPECT_LE(inf_norm(reduced_state(psi, traced) - expected), 1e-14);
  }
  EXPECT_THROW(reduced_state(psi, {3}), InputError);
  EXPECT_THROW(reduced_state(psi, {1, 1}), InputError);
}
