#pragma once

// Penalized, Tikhonov-regularized Gauss-Newton iteration shared by the
// Kronrod-style and Patterson-style generators.

#include "nestquad/nested_problem.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace nestquad {

/// A least-squares moment problem with box constraints handled by penalty.
class PenalizedProblem {
 public:
  virtual ~PenalizedProblem() = default;

  virtual Eigen::VectorXd residual(const Eigen::VectorXd& d) const = 0;
  virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& d) const = 0;
  virtual const PenaltyBounds& bounds() const = 0;
};

struct IterationRecord {
  int iteration = 0;
  double residual_norm = 0.0;
  double newton_decrement = 0.0;
  double c_k = 0.0;
  double lambda = 0.0;
  int alpha2 = 0;
};

using IterationSink = std::function<void(const IterationRecord&)>;

enum class StopReason { Converged, Stalled, NoProgress, NonFinite, IterationLimit };

const char* to_string(StopReason reason) noexcept;

struct OptimizerState {
  Eigen::VectorXd d;
  double c_k = 0.0;
  int iteration = 0;
  /// Norm of the augmented residual [R; c_k P].
  double residual_norm = 0.0;
  double newton_decrement = 0.0;
  double lambda = 0.0;
  int alpha2_current = 0;
  std::vector<IterationRecord> history;
};

struct SolveOutcome {
  OptimizerState state;
  StopReason reason = StopReason::IterationLimit;

  bool converged() const { return reason == StopReason::Converged; }
};

SolveOutcome solve_penalized(const PenalizedProblem& problem, Eigen::VectorXd d0,
                             const OptimizerConfig& config, int alpha2,
                             const IterationSink& sink = {});

}  // namespace nestquad
