#pragma once

#include <Eigen/Dense>

#include "core.hpp"

namespace arcscat {

using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;

// Dense complex LU, factored once, reused for many right-hand sides.
// A pivot that is zero to tolerance raises SingularMatrixError with the
// pivot magnitude.
class CpxLU {
 public:
  explicit CpxLU(const MatC& A) : lu_(A) {
    Eigen::VectorXcd d = lu_.matrixLU().diagonal();
    double dmin = 1e300, dmax = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      double a = std::abs(d[i]);
      dmin = std::min(dmin, a);
      dmax = std::max(dmax, a);
    }
    if (!(dmin > dmax * 1e-14) || dmax == 0.0) throw SingularMatrixError(dmin);
  }
  VecC solve(const VecC& b) const { return lu_.solve(b); }
  MatC solve(const MatC& B) const { return lu_.solve(B); }

 private:
  Eigen::PartialPivLU<MatC> lu_;
};

inline VecC complex_dense_solve(const MatC& A, const VecC& b) { return CpxLU(A).solve(b); }

// min ||Ax-b||^2 + lambda ||x||^2 via the normal equations; lambda = 0 falls
// back to the minimum-norm least-squares solution.
inline VecR tikhonov_lstsq(const MatR& A, const VecR& b, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("tikhonov_lstsq: lambda must be >= 0");
  if (lambda == 0.0) {
    Eigen::CompleteOrthogonalDecomposition<MatR> cod(A);
    return cod.solve(b);
  }
  MatR N = A.transpose() * A;
  N.diagonal().array() += lambda;
  return Eigen::LDLT<MatR>(N).solve(A.transpose() * b);
}

}  // namespace arcscat
