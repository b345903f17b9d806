#include "nestquad/gauss.hpp"

#include "nestquad/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace nestquad {

RecurrenceTable ensure_capacity(const RecurrenceTable& table, int degree) {
  if (table.max_degree() >= degree) return table;
  if (table.family.kind() == FamilyKind::Custom) {
    throw Error(ErrorKind::Capacity,
                "custom recurrence table stops at degree " +
                    std::to_string(table.max_degree()) + ", degree " +
                    std::to_string(degree) + " required");
  }
  return recurrence_coefficients(table.family, degree);
}

namespace {

// 1 / sum_{k<n} p_k(x)^2 over the orthonormal polynomials. The running sum is
// rescaled as it grows so tail nodes of unbounded weights keep relative accuracy.
double christoffel_weight(const RecurrenceTable& table, int n, double x) {
  double prev = 0.0;
  double cur = 1.0 / std::sqrt(table.b[0]);
  double sum = cur * cur;
  double log_scale = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double next =
        ((x - table.a[kk]) * cur - (k > 0 ? std::sqrt(table.b[kk]) * prev : 0.0)) /
        std::sqrt(table.b[kk + 1]);
    prev = cur;
    cur = next;
    sum += cur * cur;
    if (sum > 1e100) {
      prev *= 1e-50;
      cur *= 1e-50;
      sum *= 1e-100;
      log_scale += 100.0 * std::log(10.0);
    }
  }
  return std::exp(-std::log(sum) - log_scale);
}

}  // namespace

QuadratureRule gauss_rule(const RecurrenceTable& table, int n) {
  if (n < 1) throw Error(ErrorKind::ParameterDomain, "gauss rule needs n >= 1");
  if (n > table.max_degree()) {
    throw Error(ErrorKind::Capacity, "gauss rule of size " + std::to_string(n) +
                                         " exceeds table capacity " +
                                         std::to_string(table.max_degree()));
  }
  QuadratureRule rule;
  rule.family = table.family;
  rule.exactness_degree = 2 * n - 1;
  const auto size = static_cast<Eigen::Index>(n);

  if (n == 1) {
    rule.nodes = {table.a[0]};
    rule.weights = {table.b[0]};
  } else {
    Eigen::VectorXd diag(size);
    Eigen::VectorXd sub(size - 1);
    for (Eigen::Index i = 0; i < size; ++i) diag(i) = table.a[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i + 1 < size; ++i) {
      sub(i) = std::sqrt(table.b[static_cast<std::size_t>(i) + 1]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::Numerical,
                  "tridiagonal eigen-solver failed for gauss rule of size " +
                      std::to_string(n));
    }
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < size; ++i) {
      const double x = solver.eigenvalues()(i);
      rule.nodes[static_cast<std::size_t>(i)] = x;
      rule.weights[static_cast<std::size_t>(i)] = christoffel_weight(table, n, x);
    }
  }
  const RecurrenceTable wide = ensure_capacity(table, rule.exactness_degree);
  rule.residual_norm = verify_rule(rule, wide, rule.exactness_degree).norm;
  return rule;
}

VerificationReport verify_rule(const QuadratureRule& rule, const RecurrenceTable& table,
                               int alpha) {
  const Eigen::MatrixXd V = vandermonde(table, alpha, rule.nodes);
  VerificationReport report;
  report.moment_residuals.assign(static_cast<std::size_t>(alpha) + 1, 0.0);
  for (Eigen::Index j = 0; j <= alpha; ++j) {
    double sum = 0.0;
    for (Eigen::Index q = 0; q < V.cols(); ++q) {
      sum += V(j, q) * rule.weights[static_cast<std::size_t>(q)];
    }
    if (j == 0) sum -= std::sqrt(table.b[0]);
    report.moment_residuals[static_cast<std::size_t>(j)] = sum;
  }
  double sq = 0.0;
  for (double r : report.moment_residuals) sq += r * r;
  report.norm = std::sqrt(sq);
  return report;
}

namespace {

void require_unit_interval(const QuadratureRule& rule) {
  const Interval& dom = rule.family.domain();
  if (!(dom.lo == -1.0 && dom.hi == 1.0)) {
    throw Error(ErrorKind::UnsupportedFamily,
                "circle theorem applies to weights on [-1, 1]; " + rule.family.label() +
                    " is not one");
  }
}

}  // namespace

double circle_theorem_deviation(const QuadratureRule& rule,
                                const std::function<double(double)>& density,
                                double max_abs_node) {
  require_unit_interval(rule);
  const double n = static_cast<double>(rule.size());
  double worst = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double x = rule.nodes[q];
    if (std::abs(x) > max_abs_node) continue;
    const double scaled = n * rule.weights[q] / (std::numbers::pi * density(x));
    worst = std::max(worst, std::abs(scaled - std::sqrt(1.0 - x * x)));
  }
  return worst;
}

double circle_theorem_deviation(const QuadratureRule& rule, double max_abs_node) {
  require_unit_interval(rule);
  const WeightFamily& family = rule.family;
  return circle_theorem_deviation(
      rule, [&family](double x) { return family.density(x); }, max_abs_node);
}

}  // namespace nestquad
