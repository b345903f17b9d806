#pragma once

// Residual, penalty and Jacobian assembly for the nested moment-matching
// problem. The decision vector is laid out as (fine nodes, coarse weights,
// fine weights); coarse nodes are the fine nodes selected by subset_map.

#include "nestquad/orthopoly.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>

namespace nestquad {

struct OptimizerConfig {
  double epsilon = 1e-12;
  double penalty_scale = 1e3;
  double weight_floor = 1e-6;
  double node_margin = 0.0;
  int max_iterations = 5000;
  int lambda_update_period = 40;
  double decrement_stall_tol = 1e-12;
  double prune_threshold = 1e-13;
  bool allow_negative_weights = false;
  std::optional<int> alpha2_initial;

  /// Consecutive small-decrement iterations that count as a stall.
  int stall_window = 25;
  /// Iterations allowed without a 1% improvement of the best residual.
  int progress_window = 300;
  /// Below this augmented residual the shifted regularization is used.
  double near_root_threshold = 1e-8;

  /// Throws ParameterDomain when a field is out of range.
  void validate() const;
};

struct NestedDims {
  int n1 = 0;
  int n2 = 0;
  int alpha1 = 0;
  int alpha2 = 0;

  int unknowns() const { return n1 + 2 * n2; }
  int moments() const { return alpha1 + alpha2 + 2; }
};

/// Per-variable box used by the quadratic penalty. Infinite entries disable
/// the corresponding side.
struct PenaltyBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

PenaltyBounds nested_bounds(const NestedDims& dims, const Interval& domain,
                            const OptimizerConfig& config);

/// Stacked [R1; R2] of length alpha1 + alpha2 + 2.
Eigen::VectorXd assemble_residual(const Eigen::VectorXd& d, const RecurrenceTable& table,
                                  const NestedDims& dims, std::span<const int> subset_map);

/// dR/dd, (alpha1 + alpha2 + 2) x (n1 + 2 n2).
Eigen::MatrixXd residual_jacobian(const Eigen::VectorXd& d, const RecurrenceTable& table,
                                  const NestedDims& dims, std::span<const int> subset_map);

/// (max(0, v - upper, lower - v))^2 per variable.
Eigen::VectorXd penalty_terms(const Eigen::VectorXd& d, const PenaltyBounds& bounds);
Eigen::VectorXd penalty_terms(const Eigen::VectorXd& d, const NestedDims& dims,
                              const Interval& domain, const OptimizerConfig& config);

/// Derivative of each penalty term with respect to its own variable.
Eigen::VectorXd penalty_gradient(const Eigen::VectorXd& d, const PenaltyBounds& bounds);

/// max(A, 1 / residual_norm), with 1e16 when the residual vanishes.
double penalty_coefficient(double residual_norm, const OptimizerConfig& config);

inline constexpr double kPenaltyCoefficientCap = 1e16;

/// [dR/dd; c_k diag(dP/dd)].
Eigen::MatrixXd assemble_jacobian(const Eigen::VectorXd& d, const RecurrenceTable& table,
                                  const NestedDims& dims, std::span<const int> subset_map,
                                  double c_k, const PenaltyBounds& bounds);

}  // namespace nestquad
