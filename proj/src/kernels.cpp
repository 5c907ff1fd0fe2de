#include "ssqt/kernels.hpp"

#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ssqt::kernels {

namespace {

std::vector<Eigen::Index> strides_of(const std::vector<int>& dims) {
  std::vector<Eigen::Index> s(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * dims[k + 1];
  return s;
}

// Offsets spanned by the listed factors, enumerated in row-major order of those factors.
std::vector<Eigen::Index> offsets(const std::vector<int>& dims, const std::vector<Eigen::Index>& strides,
                                  const std::vector<int>& factors) {
  std::vector<Eigen::Index> out{0};
  for (int f : factors) {
    std::vector<Eigen::Index> next;
    next.reserve(out.size() * dims[f]);
    for (Eigen::Index base : out)
      for (int v = 0; v < dims[f]; ++v) next.push_back(base + v * strides[f]);
    out.swap(next);
  }
  return out;
}

void scale_one_column(const Eigen::MatrixXd& g, Eigen::MatrixXd& out, Eigen::Index j,
                      const std::vector<ScaleBlock>& blocks) {
  for (const auto& b : blocks) {
    if (!b.psd) {
      out.col(j).segment(b.offset, b.size) = g.col(j).segment(b.offset, b.size).cwiseProduct(b.dinv);
      continue;
    }
    const int k = b.size;
    Eigen::Map<const Eigen::MatrixXd> m(g.col(j).data() + b.offset, k, k);
    if (m.isZero(0.0)) {
      out.col(j).segment(b.offset, static_cast<Eigen::Index>(k) * k).setZero();
      continue;
    }
    Eigen::Map<Eigen::MatrixXd> o(out.col(j).data() + b.offset, k, k);
    o.noalias() = b.rinv * m * b.rinv.transpose();
  }
}

}  // namespace

TraceIndex trace_index(const std::vector<int>& dims, const std::vector<int>& traced) {
  std::vector<bool> is_traced(dims.size(), false);
  for (int t : traced) {
    if (t < 0 || t >= static_cast<int>(dims.size())) throw std::out_of_range("trace factor index out of range");
    is_traced[t] = true;
  }
  std::vector<int> kept_f, traced_f;
  for (int k = 0; k < static_cast<int>(dims.size()); ++k) (is_traced[k] ? traced_f : kept_f).push_back(k);
  auto strides = strides_of(dims);
  return {offsets(dims, strides, kept_f), offsets(dims, strides, traced_f)};
}

std::vector<Eigen::Index> permutation_index(const std::vector<int>& dims, const std::vector<int>& perm) {
  auto strides = strides_of(dims);
  return offsets(dims, strides, perm);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& m, const TraceIndex& idx) {
  const auto n = static_cast<Eigen::Index>(idx.kept.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      std::complex<double> acc = 0.0;
      for (Eigen::Index t : idx.traced) acc += m(idx.kept[i] + t, idx.kept[j] + t);
      out(i, j) = acc;
    }
  return out;
}

Eigen::MatrixXcd apply_choi(const Eigen::MatrixXcd& choi, int dout, int din, const Eigen::MatrixXcd& x) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dout, dout);
  for (int a = 0; a < dout; ++a)
    for (int b = 0; b < dout; ++b) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < din; ++i)
        for (int j = 0; j < din; ++j) acc += choi(a * din + i, b * din + j) * x(i, j);
      out(a, b) = acc;
    }
  return out;
}

Eigen::MatrixXd scale_columns(const Eigen::MatrixXd& g, const std::vector<ScaleBlock>& blocks) {
  Eigen::MatrixXd out(g.rows(), g.cols());
  for (Eigen::Index j = 0; j < g.cols(); ++j) scale_one_column(g, out, j, blocks);
  return out;
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& g) {
  const Eigen::Index n = g.cols();
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      double acc = 0.0;
      for (Eigen::Index r = 0; r < g.rows(); ++r) acc += g(r, i) * g(r, j);
      h(i, j) = acc;
      h(j, i) = acc;
    }
  return h;
}

}  // namespace serial

namespace parallel {

Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& m, const TraceIndex& idx) {
  const auto n = static_cast<Eigen::Index>(idx.kept.size());
  Eigen::MatrixXcd out(n, n);
#pragma omp parallel for schedule(static) if (n * n * static_cast<Eigen::Index>(idx.traced.size()) > 4096)
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      std::complex<double> acc = 0.0;
      for (Eigen::Index t : idx.traced) acc += m(idx.kept[i] + t, idx.kept[j] + t);
      out(i, j) = acc;
    }
  return out;
}

Eigen::MatrixXcd apply_choi(const Eigen::MatrixXcd& choi, int dout, int din, const Eigen::MatrixXcd& x) {
  Eigen::MatrixXcd out(dout, dout);
#pragma omp parallel for schedule(static) if (dout * dout * din * din > 4096)
  for (int b = 0; b < dout; ++b)
    for (int a = 0; a < dout; ++a)
      out(a, b) = (choi.block(static_cast<Eigen::Index>(a) * din, static_cast<Eigen::Index>(b) * din, din, din)
                       .cwiseProduct(x))
                      .sum();
  return out;
}

Eigen::MatrixXd scale_columns(const Eigen::MatrixXd& g, const std::vector<ScaleBlock>& blocks) {
  Eigen::MatrixXd out(g.rows(), g.cols());
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index j = 0; j < g.cols(); ++j) scale_one_column(g, out, j, blocks);
  return out;
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& g) {
  const Eigen::Index n = g.cols();
  Eigen::MatrixXd h(n, n);
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) h(i, j) = g.col(i).dot(g.col(j));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) h(i, j) = h(j, i);
  return h;
}

}  // namespace parallel

}  // namespace ssqt::kernels
