#include "porodarcy/kronecker.hpp"

namespace porodarcy {

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return out;
}

Eigen::VectorXd vec(const Eigen::MatrixXd& A) {
  Eigen::VectorXd out(A.size());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) out(i * A.cols() + j) = A(i, j);
  }
  return out;
}

}  // namespace porodarcy
