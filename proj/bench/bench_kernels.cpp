#include <benchmark/benchmark.h>

#include "ssqt/kernels.hpp"
#include "ssqt/random.hpp"

using namespace ssqt;
using namespace ssqt::kernels;

namespace {

Eigen::MatrixXcd random_square(int d) {
  Rng rng(7);
  return random_state(d, rng);
}

template <Eigen::MatrixXcd (*Fn)(const Eigen::MatrixXcd&, const TraceIndex&)>
void BM_PartialTrace(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Eigen::MatrixXcd m = random_square(d * d);
  const TraceIndex idx = trace_index({d, d}, {1});
  for (auto _ : state) benchmark::DoNotOptimize(Fn(m, idx));
}

template <Eigen::MatrixXcd (*Fn)(const Eigen::MatrixXcd&, int, int, const Eigen::MatrixXcd&)>
void BM_ApplyChoi(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Eigen::MatrixXcd choi = random_square(d * d), x = random_square(d);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(choi, d, d, x));
}

std::vector<ScaleBlock> psd_blocks(int side, int count) {
  std::vector<ScaleBlock> blocks;
  Eigen::Index offset = 0;
  for (int b = 0; b < count; ++b) {
    ScaleBlock blk;
    blk.offset = offset;
    blk.size = side;
    blk.psd = true;
    blk.rinv = Eigen::MatrixXd::Random(side, side).triangularView<Eigen::Upper>();
    blk.rinv.diagonal().array() += side;
    blocks.push_back(blk);
    offset += side * side;
  }
  return blocks;
}

template <Eigen::MatrixXd (*Fn)(const Eigen::MatrixXd&, const std::vector<ScaleBlock>&)>
void BM_ScaleColumns(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto blocks = psd_blocks(side, 2);
  const Eigen::MatrixXd g = Eigen::MatrixXd::Random(2 * side * side, 4 * side);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(g, blocks));
}

template <Eigen::MatrixXd (*Fn)(const Eigen::MatrixXd&)>
void BM_Gram(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd g = Eigen::MatrixXd::Random(2 * n, n);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(g));
}

}  // namespace

BENCHMARK(BM_PartialTrace<serial::partial_trace>)->Name("partial_trace/serial")->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_PartialTrace<parallel::partial_trace>)->Name("partial_trace/parallel")->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_ApplyChoi<serial::apply_choi>)->Name("apply_choi/serial")->Arg(4)->Arg(8)->Arg(16);
BENCHMARK(BM_ApplyChoi<parallel::apply_choi>)->Name("apply_choi/parallel")->Arg(4)->Arg(8)->Arg(16);
BENCHMARK(BM_ScaleColumns<serial::scale_columns>)->Name("scale_columns/serial")->Arg(4)->Arg(8)->Arg(16);
BENCHMARK(BM_ScaleColumns<parallel::scale_columns>)->Name("scale_columns/parallel")->Arg(4)->Arg(8)->Arg(16);
BENCHMARK(BM_Gram<serial::gram>)->Name("gram/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_Gram<parallel::gram>)->Name("gram/parallel")->Arg(64)->Arg(256);

BENCHMARK_MAIN();
