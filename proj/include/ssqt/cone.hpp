#pragma once

// Dense primal-dual interior-point solver for
//
//   minimize c^T x  subject to  G x + s = h,  A x = b,  s in K
//   maximize -h^T z - b^T y  subject to  G^T z + A^T y + c = 0,  z in K
//
// with K a product of a nonnegative orthant and real symmetric PSD cones.
// PSD blocks are stored in full column-major k*k form. Uses a homogeneous
// self-dual embedding with Nesterov-Todd scaling and a Mehrotra corrector.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ssqt::sdp {

using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

struct ConeDims {
  int lp = 0;
  std::vector<int> psd;

  Eigen::Index rows() const;
  int degree() const;
};

struct ConeProblem {
  RVec c;
  RMat G;
  RVec h;
  RMat A;  // may have zero rows
  RVec b;
  ConeDims dims;
};

enum class Status { optimal, primal_infeasible, dual_infeasible, max_iters };
std::string to_string(Status s);

struct IterateInfo {
  int iter = 0;
  double pcost = 0, dcost = 0;
  double gap = 0;     // s^T z / tau^2
  double pres = 0, dres = 0;
  double tau = 0, kappa = 0;
  // pcost - dcost = gap + resid_term exactly; resid_term vanishes on feasible iterates.
  double resid_term = 0;
};

struct ConeOptions {
  double feastol = 1e-8;
  double gaptol = 1e-8;
  int max_iters = 120;
  int refinement = 2;
  std::function<void(const IterateInfo&)> on_iterate;
};

struct ConeSolution {
  Status status = Status::max_iters;
  RVec x, y, s, z;  // for infeasible statuses: the normalized certificate
  double pcost = 0, dcost = 0;
  double gap = 0, pres = 0, dres = 0;
  int iters = 0;
  std::vector<int> kept_rows;  // equality rows kept after redundancy removal
};

ConeSolution solve_cone(const ConeProblem& p, const ConeOptions& opt = {});

}  // namespace ssqt::sdp
