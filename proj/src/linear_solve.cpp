#include "linear_solve.hpp"

#include <sstream>
#include <string>

#include <Eigen/SparseCholesky>

#include "lh/errors.hpp"

namespace lh::detail {

Eigen::MatrixXd spd_solve(const SparseMatrix& normal, const Eigen::MatrixXd& rhs, const char* what) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt;
    ldlt.compute(normal);
    if (ldlt.info() != Eigen::Success) {
        throw NumericalError(std::string(what) + ": sparse factorization failed");
    }
    const Eigen::VectorXd d = ldlt.vectorD();
    double dmax = d.cwiseAbs().maxCoeff();
    double dmin = d.minCoeff();
    if (!(dmin > 1e-14 * dmax)) {
        std::ostringstream msg;
        msg << what << ": singular or ill-conditioned system (pivot ratio " << dmin / dmax << ")";
        throw NumericalError(msg.str());
    }
    Eigen::MatrixXd x = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !x.allFinite()) {
        throw NumericalError(std::string(what) + ": sparse solve failed");
    }
    return x;
}

double relative_norm(const Eigen::MatrixXd& r, const Eigen::MatrixXd& ref) {
    double denom = ref.cwiseAbs().maxCoeff();
    double num = r.cwiseAbs().maxCoeff();
    return denom > 0.0 ? num / denom : num;
}

Eigen::MatrixXd least_squares(const SparseMatrix& a, const Eigen::MatrixXd& b, const char* what,
                              double& normal_residual, double& misfit) {
    SparseMatrix at = a.transpose();
    SparseMatrix normal = at * a;
    Eigen::MatrixXd atb = at * b;
    Eigen::MatrixXd x = spd_solve(normal, atb, what);
    normal_residual = relative_norm(normal * x - atb, atb);
    Eigen::MatrixXd r = a * x - b;
    double bn = b.norm();
    misfit = bn > 0.0 ? r.norm() / bn : r.norm();
    return x;
}

}  // namespace lh::detail
