#include "nestquad/regularization.hpp"

#include "nestquad/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <vector>

namespace nestquad {

namespace {

// Singular values this far below the largest carry no usable direction.
constexpr double kSpectrumCutoff = 1e-14;
constexpr double kFallbackRatio = 1e-10;
// A bend must exceed a factor of 100 between neighbouring ratios (ln 100).
constexpr double kMinCurvature = 4.6;
constexpr double kSpikeFactor = 5.0;

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

SvdFactors thin_svd(const Eigen::MatrixXd& J) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "singular value decomposition failed");
  }
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

double select_lambda(std::span<const double> singular_values) {
  if (singular_values.empty()) {
    throw Error(ErrorKind::DegenerateJacobian, "empty singular spectrum");
  }
  const double smax = singular_values.front();
  if (!std::isfinite(smax)) throw Error(ErrorKind::Numerical, "non-finite singular value");
  if (!(smax > 0.0)) {
    throw Error(ErrorKind::DegenerateJacobian, "all singular values are zero");
  }
  std::vector<double> logs;
  for (double s : singular_values) {
    if (s > smax * kSpectrumCutoff) logs.push_back(std::log(s));
  }
  if (logs.size() < 3) return smax * kFallbackRatio;

  std::vector<double> seen;
  for (std::size_t i = 1; i + 1 < logs.size(); ++i) {
    const double curvature = logs[i - 1] - 2.0 * logs[i] + logs[i + 1];
    const double trailing = seen.empty() ? 0.0 : kSpikeFactor * median(seen);
    if (curvature > std::max(trailing, kMinCurvature)) {
      return singular_values[i];
    }
    seen.push_back(std::max(curvature, 0.0));
  }
  return smax * kFallbackRatio;
}

double select_lambda(const Eigen::VectorXd& singular_values) {
  return select_lambda(std::span<const double>(singular_values.data(),
                                               static_cast<std::size_t>(singular_values.size())));
}

Eigen::VectorXd tikhonov_step(const SvdFactors& svd, const Eigen::VectorXd& residual,
                              double lambda, bool near_root) {
  const Eigen::VectorXd beta = svd.U.transpose() * residual;
  Eigen::VectorXd coeff(beta.size());
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    const double s = svd.S(i);
    const double denom = near_root ? s + lambda : s * s + lambda * lambda;
    const double numer = near_root ? beta(i) : s * beta(i);
    coeff(i) = denom > 0.0 ? numer / denom : 0.0;
  }
  return svd.V * coeff;
}

Eigen::VectorXd tikhonov_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& residual,
                              double lambda, bool near_root) {
  return tikhonov_step(thin_svd(J), residual, lambda, near_root);
}

double newton_decrement(const Eigen::VectorXd& step, const Eigen::MatrixXd& J,
                        const Eigen::VectorXd& residual) {
  return std::sqrt(std::abs(step.dot(J.transpose() * residual)));
}

}  // namespace nestquad
