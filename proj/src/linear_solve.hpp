#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace lh::detail {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Sparse LDLT solve of an SPD system with any number of right-hand sides.
// Throws NumericalError when the factorization fails or a pivot collapses.
Eigen::MatrixXd spd_solve(const SparseMatrix& normal, const Eigen::MatrixXd& rhs, const char* what);

// max|r| / max|ref| (max|r| when ref vanishes).
double relative_norm(const Eigen::MatrixXd& r, const Eigen::MatrixXd& ref);

// Least-squares solve of A x = B through the normal equations. Reports the
// relative normal-equation residual and the misfit |Ax - B| / |B|.
Eigen::MatrixXd least_squares(const SparseMatrix& a, const Eigen::MatrixXd& b, const char* what,
                              double& normal_residual, double& misfit);

}  // namespace lh::detail
