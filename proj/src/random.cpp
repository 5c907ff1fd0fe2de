#include "ssqt/random.hpp"

#include <cmath>

namespace ssqt {

double Rng::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

int Rng::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

CMat random_ginibre(int rows, int cols, Rng& rng) {
  CMat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = Cplx(rng.normal(), rng.normal());
  return m;
}

CMat random_unitary(int d, Rng& rng) {
  Eigen::HouseholderQR<CMat> qr(random_ginibre(d, d, rng));
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    Cplx ph = r(i, i) / std::abs(r(i, i));
    q.col(i) *= ph;
  }
  return q;
}

CMat random_hermitian(int d, Rng& rng) {
  CMat g = random_ginibre(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

CMat random_state(int d, Rng& rng, int rank) {
  if (rank <= 0 || rank > d) rank = d;
  CMat g = random_ginibre(d, rank, rng);
  CMat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return herm(rho);
}

CMat random_psd(int d, Rng& rng, double lo, double hi) {
  CMat u = random_unitary(d, rng);
  RVec lam(d);
  for (int i = 0; i < d; ++i) lam(i) = rng.uniform(lo, hi);
  return herm(u * lam.asDiagonal() * u.adjoint());
}

CVec random_pure(int d, Rng& rng) {
  CVec v = random_ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

RVec random_probability(int d, Rng& rng) {
  RVec p(d);
  for (int i = 0; i < d; ++i) p(i) = -std::log(rng.uniform(1e-12, 1.0));
  return p / p.sum();
}

std::vector<CMat> random_kraus(int din, int dout, int count, Rng& rng) {
  if (count < 1 || dout * count < din) throw InputError("random_kraus: need dout * count >= din for a trace-preserving map");
  // Isometry din -> dout*count; block k gives the k-th Kraus operator.
  Eigen::HouseholderQR<CMat> qr(random_ginibre(dout * count, din, rng));
  CMat v = qr.householderQ() * CMat::Identity(dout * count, din);
  std::vector<CMat> out;
  for (int k = 0; k < count; ++k) out.push_back(v.middleRows(static_cast<Eigen::Index>(k) * dout, dout));
  return out;
}

}  // namespace ssqt
