#include "nestquad/gauss_newton.hpp"

#include "nestquad/regularization.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace nestquad {

const char* to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::Converged: return "converged";
    case StopReason::Stalled: return "stalled";
    case StopReason::NoProgress: return "no-progress";
    case StopReason::NonFinite: return "non-finite";
    case StopReason::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

constexpr int kMaxDampingTries = 16;
constexpr double kDampingGrowth = 10.0;
constexpr double kDampingCeiling = 1e3;
constexpr int kPolishSteps = 3;
constexpr double kProgressRatio = 0.99;

struct Augmented {
  Eigen::VectorXd R;
  Eigen::VectorXd P;
  double c_k = 0.0;
  double norm = 0.0;
};

Augmented evaluate(const PenalizedProblem& problem, const Eigen::VectorXd& d,
                   const OptimizerConfig& config) {
  Augmented out;
  out.R = problem.residual(d);
  out.P = penalty_terms(d, problem.bounds());
  out.c_k = penalty_coefficient(out.R.norm(), config);
  out.norm = std::sqrt(out.R.squaredNorm() + out.c_k * out.c_k * out.P.squaredNorm());
  return out;
}

double merit(const PenalizedProblem& problem, const Eigen::VectorXd& d, double c_k) {
  const Eigen::VectorXd R = problem.residual(d);
  const Eigen::VectorXd P = penalty_terms(d, problem.bounds());
  return std::sqrt(R.squaredNorm() + c_k * c_k * P.squaredNorm());
}

// Stacks residual and the active penalty rows; inactive rows are identically
// zero in both the residual and the Jacobian and do not affect the step.
void build_system(const PenalizedProblem& problem, const Eigen::VectorXd& d,
                  const Augmented& aug, Eigen::MatrixXd& J, Eigen::VectorXd& Rt) {
  const Eigen::MatrixXd top = problem.jacobian(d);
  const Eigen::VectorXd G = penalty_gradient(d, problem.bounds());
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < aug.P.size(); ++i) {
    if (aug.P(i) > 0.0 || G(i) != 0.0) active.push_back(i);
  }
  const auto extra = static_cast<Eigen::Index>(active.size());
  J = Eigen::MatrixXd::Zero(top.rows() + extra, d.size());
  Rt.resize(top.rows() + extra);
  J.topRows(top.rows()) = top;
  Rt.head(top.rows()) = aug.R;
  for (Eigen::Index k = 0; k < extra; ++k) {
    const Eigen::Index i = active[static_cast<std::size_t>(k)];
    J(top.rows() + k, i) = aug.c_k * G(i);
    Rt(top.rows() + k) = aug.c_k * aug.P(i);
  }
}

}  // namespace

SolveOutcome solve_penalized(const PenalizedProblem& problem, Eigen::VectorXd d0,
                             const OptimizerConfig& config, int alpha2,
                             const IterationSink& sink) {
  SolveOutcome out;
  OptimizerState& st = out.state;
  st.d = std::move(d0);
  st.alpha2_current = alpha2;

  double lambda = std::numeric_limits<double>::quiet_NaN();
  double best = std::numeric_limits<double>::infinity();
  int best_iteration = 0;
  int stalled_for = 0;
  int polish_left = -1;
  Eigen::VectorXd best_converged;
  double best_converged_norm = std::numeric_limits<double>::infinity();

  Eigen::MatrixXd J;
  Eigen::VectorXd Rt;
  for (int it = 0;; ++it) {
    const Augmented aug = evaluate(problem, st.d, config);
    st.iteration = it;
    st.c_k = aug.c_k;
    st.residual_norm = aug.norm;

    if (!std::isfinite(aug.norm)) {
      out.reason = StopReason::NonFinite;
      break;
    }
    if (polish_left < 0 && aug.norm < config.epsilon) polish_left = kPolishSteps;
    if (polish_left >= 0) {
      if (aug.norm < best_converged_norm) {
        best_converged = st.d;
        best_converged_norm = aug.norm;
      } else {
        polish_left = 0;
      }
      if (polish_left == 0 || aug.norm == 0.0) {
        out.reason = StopReason::Converged;
        break;
      }
      --polish_left;
    }
    if (it >= config.max_iterations) {
      out.reason = StopReason::IterationLimit;
      break;
    }
    if (aug.norm < best * kProgressRatio) {
      best = aug.norm;
      best_iteration = it;
    }
    if (polish_left < 0 && it - best_iteration > config.progress_window) {
      out.reason = StopReason::NoProgress;
      break;
    }

    build_system(problem, st.d, aug, J, Rt);
    const SvdFactors svd = thin_svd(J);
    if (!std::isfinite(svd.S(0))) {
      out.reason = StopReason::NonFinite;
      break;
    }
    if (std::isnan(lambda) || it % config.lambda_update_period == 0) {
      lambda = select_lambda(svd.S);
    }

    const bool near_root = aug.norm < config.near_root_threshold;
    const double smax = svd.S(0);
    const double smin = svd.S(svd.S.size() - 1);
    double applied = lambda;
    Eigen::VectorXd step;
    for (int attempt = 0; attempt < kMaxDampingTries; ++attempt) {
      step = tikhonov_step(svd, Rt, applied, near_root);
      const double trial = merit(problem, st.d - step, aug.c_k);
      if (trial < aug.norm || !(applied < smax * kDampingCeiling)) break;
      applied = std::max(applied * kDampingGrowth, smin > 0.0 ? smin : smax * 1e-12);
    }

    st.newton_decrement = newton_decrement(step, J, Rt);
    st.lambda = applied;
    st.d -= step;
    st.iteration = it + 1;

    const IterationRecord rec{it, aug.norm, st.newton_decrement, aug.c_k, applied, alpha2};
    st.history.push_back(rec);
    if (sink) sink(rec);

    if (polish_left < 0) {
      const bool small_decrement = st.newton_decrement < config.decrement_stall_tol;
      stalled_for = (small_decrement && aug.norm > 100.0 * config.epsilon) ? stalled_for + 1 : 0;
      if (stalled_for >= config.stall_window) {
        out.reason = StopReason::Stalled;
        break;
      }
    }
  }

  if (out.reason == StopReason::Converged ||
      (polish_left >= 0 && best_converged.size() == st.d.size())) {
    out.reason = StopReason::Converged;
    st.d = best_converged;
    const Augmented fin = evaluate(problem, st.d, config);
    st.c_k = fin.c_k;
    st.residual_norm = fin.norm;
  }
  return out;
}

}  // namespace nestquad
