#pragma once

// Hot loops with a serial reference and an OpenMP variant. The library calls
// the parallel:: versions; tests check them against serial::.

#include <vector>

#include <Eigen/Dense>

namespace ssqt::kernels {

// Row offsets of the kept and traced sub-indices for a partial trace.
struct TraceIndex {
  std::vector<Eigen::Index> kept;
  std::vector<Eigen::Index> traced;
};
TraceIndex trace_index(const std::vector<int>& dims, const std::vector<int>& traced);

// Offsets of each kept index of the output order in the input (used for permutations).
std::vector<Eigen::Index> permutation_index(const std::vector<int>& dims, const std::vector<int>& perm);

// One block of the cone: LP blocks are scaled entrywise by 1/d, PSD blocks by
// M -> Rinv M Rinv^T on the k*k column segment.
struct ScaleBlock {
  Eigen::Index offset = 0;
  int size = 0;  // LP: length; PSD: side
  bool psd = false;
  Eigen::MatrixXd rinv;  // PSD only
  Eigen::VectorXd dinv;  // LP only
};

namespace serial {
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& m, const TraceIndex& idx);
// out(a,b) = sum_ij J((a,i),(b,j)) X(i,j), output factor first.
Eigen::MatrixXcd apply_choi(const Eigen::MatrixXcd& choi, int dout, int din, const Eigen::MatrixXcd& x);
Eigen::MatrixXd scale_columns(const Eigen::MatrixXd& g, const std::vector<ScaleBlock>& blocks);
// Upper triangle mirrored: returns g^T g.
Eigen::MatrixXd gram(const Eigen::MatrixXd& g);
}  // namespace serial

namespace parallel {
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& m, const TraceIndex& idx);
Eigen::MatrixXcd apply_choi(const Eigen::MatrixXcd& choi, int dout, int din, const Eigen::MatrixXcd& x);
Eigen::MatrixXd scale_columns(const Eigen::MatrixXd& g, const std::vector<ScaleBlock>& blocks);
Eigen::MatrixXd gram(const Eigen::MatrixXd& g);
}  // namespace parallel

int max_threads();

}  // namespace ssqt::kernels
