#pragma once

#include <Eigen/Core>

namespace porodarcy {

/// Kronecker product: the block matrix [a_ij * B].
Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Row-wise flattening (a_11, ..., a_1m, a_21, ..., a_nm). Element vectors of
/// the velocity field use this ordering: node-major, component-minor.
Eigen::VectorXd vec(const Eigen::MatrixXd& A);

}  // namespace porodarcy
