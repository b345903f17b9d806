#include "nestquad/nested_problem.hpp"

#include "nestquad/error.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace nestquad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_layout(const Eigen::VectorXd& d, const NestedDims& dims,
                  std::span<const int> subset_map) {
  if (dims.n1 < 1 || dims.n2 <= dims.n1) {
    throw Error(ErrorKind::ParameterDomain, "nested problem needs 1 <= n1 < n2");
  }
  if (d.size() != dims.unknowns()) {
    throw Error(ErrorKind::ParameterDomain,
                "decision vector has length " + std::to_string(d.size()) + ", expected " +
                    std::to_string(dims.unknowns()));
  }
  if (static_cast<int>(subset_map.size()) != dims.n1) {
    throw Error(ErrorKind::ParameterDomain, "subset map must have n1 entries");
  }
  std::vector<bool> seen(static_cast<std::size_t>(dims.n2), false);
  for (int idx : subset_map) {
    if (idx < 0 || idx >= dims.n2 || seen[static_cast<std::size_t>(idx)]) {
      throw Error(ErrorKind::ParameterDomain,
                  "subset map entries must be distinct fine-node indices");
    }
    seen[static_cast<std::size_t>(idx)] = true;
  }
}

std::vector<double> coarse_nodes(const Eigen::VectorXd& d, std::span<const int> subset_map) {
  std::vector<double> x1;
  x1.reserve(subset_map.size());
  for (int idx : subset_map) x1.push_back(d(idx));
  return x1;
}

}  // namespace

void OptimizerConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::ParameterDomain, what);
  };
  require(std::isfinite(epsilon) && epsilon > 0.0, "epsilon must be positive");
  require(std::isfinite(penalty_scale) && penalty_scale >= 1.0, "penalty scale A must be >= 1");
  require(weight_floor > 0.0 && weight_floor < 1.0, "weight floor must lie in (0, 1)");
  require(node_margin >= 0.0, "node margin must be non-negative");
  require(max_iterations >= 1, "max_iterations must be >= 1");
  require(lambda_update_period >= 1, "lambda update period must be >= 1");
  require(decrement_stall_tol > 0.0, "decrement stall tolerance must be positive");
  require(prune_threshold >= 0.0, "prune threshold must be non-negative");
  require(stall_window >= 1 && progress_window >= 1, "stall windows must be >= 1");
  require(near_root_threshold >= 0.0, "near-root threshold must be non-negative");
  if (alpha2_initial) require(*alpha2_initial >= 1, "initial alpha2 must be >= 1");
}

PenaltyBounds nested_bounds(const NestedDims& dims, const Interval& domain,
                            const OptimizerConfig& config) {
  const Eigen::Index n = dims.unknowns();
  PenaltyBounds bounds{Eigen::VectorXd::Constant(n, -kInf), Eigen::VectorXd::Constant(n, kInf)};
  const double floor = config.allow_negative_weights ? -kInf : config.weight_floor;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i < dims.n2) {
      bounds.lower(i) = domain.lo + config.node_margin;
      bounds.upper(i) = domain.hi - config.node_margin;
    } else {
      bounds.lower(i) = floor;
    }
  }
  return bounds;
}

Eigen::VectorXd assemble_residual(const Eigen::VectorXd& d, const RecurrenceTable& table,
                                  const NestedDims& dims, std::span<const int> subset_map) {
  check_layout(d, dims, subset_map);
  const std::vector<double> x1 = coarse_nodes(d, subset_map);
  const std::span<const double> x2(d.data(), static_cast<std::size_t>(dims.n2));
  const Eigen::MatrixXd V1 = vandermonde(table, dims.alpha1, x1);
  const Eigen::MatrixXd V2 = vandermonde(table, dims.alpha2, x2);

  Eigen::VectorXd R(dims.moments());
  R.head(dims.alpha1 + 1) = V1 * d.segment(dims.n2, dims.n1);
  R.tail(dims.alpha2 + 1) = V2 * d.tail(dims.n2);
  const double target = std::sqrt(table.b[0]);
  R(0) -= target;
  R(dims.alpha1 + 1) -= target;
  return R;
}

Eigen::MatrixXd residual_jacobian(const Eigen::VectorXd& d, const RecurrenceTable& table,
                                  const NestedDims& dims, std::span<const int> subset_map) {
  check_layout(d, dims, subset_map);
  const std::vector<double> x1 = coarse_nodes(d, subset_map);
  const std::span<const double> x2(d.data(), static_cast<std::size_t>(dims.n2));
  const PolynomialEvaluation e1 = eval_orthonormal(table, dims.alpha1, x1, true);
  const PolynomialEvaluation e2 = eval_orthonormal(table, dims.alpha2, x2, true);

  const Eigen::Index r1 = dims.alpha1 + 1;
  const Eigen::Index r2 = dims.alpha2 + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dims.moments(), dims.unknowns());
  for (int i = 0; i < dims.n1; ++i) {
    const double w = d(dims.n2 + i);
    J.block(0, subset_map[static_cast<std::size_t>(i)], r1, 1) += e1.derivatives->col(i) * w;
  }
  J.block(0, dims.n2, r1, dims.n1) = e1.values;
  for (int q = 0; q < dims.n2; ++q) {
    J.block(r1, q, r2, 1) = e2.derivatives->col(q) * d(dims.n2 + dims.n1 + q);
  }
  J.block(r1, dims.n2 + dims.n1, r2, dims.n2) = e2.values;
  return J;
}

Eigen::VectorXd penalty_terms(const Eigen::VectorXd& d, const PenaltyBounds& bounds) {
  Eigen::VectorXd P(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double v = std::max({0.0, d(i) - bounds.upper(i), bounds.lower(i) - d(i)});
    P(i) = v * v;
  }
  return P;
}

Eigen::VectorXd penalty_terms(const Eigen::VectorXd& d, const NestedDims& dims,
                              const Interval& domain, const OptimizerConfig& config) {
  return penalty_terms(d, nested_bounds(dims, domain, config));
}

Eigen::VectorXd penalty_gradient(const Eigen::VectorXd& d, const PenaltyBounds& bounds) {
  Eigen::VectorXd G = Eigen::VectorXd::Zero(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) > bounds.upper(i)) {
      G(i) = 2.0 * (d(i) - bounds.upper(i));
    } else if (d(i) < bounds.lower(i)) {
      G(i) = -2.0 * (bounds.lower(i) - d(i));
    }
  }
  return G;
}

double penalty_coefficient(double residual_norm, const OptimizerConfig& config) {
  if (!(residual_norm > 0.0)) return kPenaltyCoefficientCap;
  return std::min(kPenaltyCoefficientCap, std::max(config.penalty_scale, 1.0 / residual_norm));
}

Eigen::MatrixXd assemble_jacobian(const Eigen::VectorXd& d, const RecurrenceTable& table,
                                  const NestedDims& dims, std::span<const int> subset_map,
                                  double c_k, const PenaltyBounds& bounds) {
  const Eigen::MatrixXd top = residual_jacobian(d, table, dims, subset_map);
  const Eigen::VectorXd G = penalty_gradient(d, bounds);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(top.rows() + d.size(), d.size());
  J.topRows(top.rows()) = top;
  J.bottomRows(d.size()).diagonal() = c_k * G;
  return J;
}

}  // namespace nestquad
