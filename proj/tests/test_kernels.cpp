#include <gtest/gtest.h>
#include <omp.h>

#include "ssqt/kernels.hpp"
#include "ssqt/linalg.hpp"
#include "ssqt/random.hpp"

using namespace ssqt;
namespace k = ssqt::kernels;

namespace {

// Runs the parallel kernels with several threads even on a single-core machine.
class KernelParity : public ::testing::Test {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(4);
  }
  void TearDown() override { omp_set_num_threads(saved_); }

 private:
  int saved_ = 1;
};

}  // namespace

TEST(Kernels, TraceIndexOffsets) {
  k::TraceIndex idx = k::trace_index({2, 3}, {1});
  EXPECT_EQ(idx.kept, (std::vector<Eigen::Index>{0, 3}));
  EXPECT_EQ(idx.traced, (std::vector<Eigen::Index>{0, 1, 2}));
  EXPECT_THROW(k::trace_index({2, 3}, {2}), std::out_of_range);
  EXPECT_EQ(k::permutation_index({2, 3}, {1, 0}), (std::vector<Eigen::Index>{0, 3, 1, 4, 2, 5}));
}

TEST_F(KernelParity, PartialTrace) {
  Rng rng(10);
  for (const auto& [dims, traced] : std::vector<std::pair<std::vector<int>, std::vector<int>>>{
           {{2, 3}, {0}}, {{2, 3}, {1}}, {{2, 2, 3}, {1}}, {{3, 2, 2}, {0, 2}}, {{4, 4}, {0}}, {{20, 20}, {1}}, {{6, 5, 6}, {1}}}) {
    const int d = dims_product(dims);
    CMat m = random_ginibre(d, d, rng);
    k::TraceIndex idx = k::trace_index(dims, traced);
    CMat s = k::serial::partial_trace(m, idx), p = k::parallel::partial_trace(m, idx);
    EXPECT_LE((s - p).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE((s - ptrace(m, dims, traced)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST_F(KernelParity, ApplyChoi) {
  Rng rng(11);
  for (auto [dout, din] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 4}, {4, 4}, {10, 10}}) {
    CMat j = random_ginibre(dout * din, dout * din, rng);
    CMat x = random_ginibre(din, din, rng);
    CMat s = k::serial::apply_choi(j, dout, din, x), p = k::parallel::apply_choi(j, dout, din, x);
    EXPECT_LE((s - p).cwiseAbs().maxCoeff(), 1e-12);
    // Reference: tr_in[J (1 (x) X^T)].
    CMat ref = ptrace(j * kron(CMat::Identity(dout, dout), x.transpose()), {dout, din}, {1});
    EXPECT_LE((s - ref).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST_F(KernelParity, ScaleColumns) {
  Rng rng(12);
  const int lp = 3, side = 4;
  const Eigen::Index rows = lp + side * side;
  Eigen::MatrixXd g = Eigen::MatrixXd::Random(rows, 7);
  g.col(2).tail(side * side).setZero();
  k::ScaleBlock a;
  a.offset = 0;
  a.size = lp;
  a.dinv = Eigen::VectorXd::Random(lp);
  k::ScaleBlock b;
  b.offset = lp;
  b.size = side;
  b.psd = true;
  b.rinv = Eigen::MatrixXd::Random(side, side);
  std::vector<k::ScaleBlock> blocks{a, b};
  Eigen::MatrixXd s = k::serial::scale_columns(g, blocks), p = k::parallel::scale_columns(g, blocks);
  EXPECT_LE((s - p).cwiseAbs().maxCoeff(), 1e-13);
  Eigen::Map<const Eigen::MatrixXd> m(g.col(0).data() + lp, side, side);
  Eigen::MatrixXd ref = b.rinv * m * b.rinv.transpose();
  Eigen::Map<const Eigen::MatrixXd> got(s.col(0).data() + lp, side, side);
  EXPECT_LE((got - ref).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_NEAR(s(1, 0), g(1, 0) * a.dinv(1), 1e-15);
}

TEST_F(KernelParity, Gram) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Random(40, 25);
  Eigen::MatrixXd s = k::serial::gram(g), p = k::parallel::gram(g);
  EXPECT_LE((s - p).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((s - g.transpose() * g).cwiseAbs().maxCoeff(), 1e-12);
}
