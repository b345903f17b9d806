#pragma once

#include <Eigen/Core>

#include <span>

namespace nestquad {

/// Thin SVD J = U diag(S) V^T with S descending.
struct SvdFactors {
  Eigen::MatrixXd U;
  Eigen::VectorXd S;
  Eigen::MatrixXd V;
};

SvdFactors thin_svd(const Eigen::MatrixXd& J);

/// Picks a regularization parameter from a descending singular spectrum by
/// locating the first sharp bend of log(sigma). Falls back to sigma_max * 1e-10.
double select_lambda(std::span<const double> singular_values);
double select_lambda(const Eigen::VectorXd& singular_values);

/// Regularized Gauss-Newton correction, to be subtracted from d.
/// Far from the root the Tikhonov-filtered solution is used; near the root
/// every singular value is shifted by lambda instead.
Eigen::VectorXd tikhonov_step(const SvdFactors& svd, const Eigen::VectorXd& residual,
                              double lambda, bool near_root);
Eigen::VectorXd tikhonov_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& residual,
                              double lambda, bool near_root);

/// sqrt(|step . J^T R|).
double newton_decrement(const Eigen::VectorXd& step, const Eigen::MatrixXd& J,
                        const Eigen::VectorXd& residual);

}  // namespace nestquad
