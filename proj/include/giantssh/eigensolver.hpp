#pragma once

// Dense Hermitian eigensolvers used by the spectral module and by the
// piecewise-exact propagation oracle.
//
// Real symmetric input goes through Householder tridiagonalization followed by
// implicit QL with Wilkinson-style shifts; complex Hermitian input goes through
// cyclic Jacobi rotations. Both return eigenvalues in ascending order and fix
// the phase of every eigenvector so that its largest-magnitude component
// (lowest index on ties) is real and positive, which makes the output a pure
// function of the input.

#include <Eigen/Dense>

namespace giantssh::linalg {

struct RealEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  ///< columns
};

struct HermitianEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;  ///< columns
};

/// Throws NumericalError if QL fails to converge.
RealEigen symmetric_eigen(const Eigen::MatrixXd& a);

/// Off-diagonal tolerance is relative to the Frobenius norm of the input.
HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& a, double tolerance = 1e-12);

}  // namespace giantssh::linalg
