#pragma once

#include "nestquad/orthopoly.hpp"

#include <functional>
#include <vector>

namespace nestquad {

/// Nodes and weights of a quadrature rule for a probability weight.
/// Nodes are kept in ascending order.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  WeightFamily family = WeightFamily::legendre();
  int exactness_degree = 0;
  double residual_norm = 0.0;
  bool weight_floor_relaxed = false;

  std::size_t size() const { return nodes.size(); }
};

/// Golub-Welsch: eigen-decomposition of the n x n Jacobi matrix.
QuadratureRule gauss_rule(const RecurrenceTable& table, int n);

struct VerificationReport {
  /// moment_residuals[j] = sum_q p_j(x_q) w_q - sqrt(b_0) [j == 0]
  std::vector<double> moment_residuals;
  double norm = 0.0;
};

VerificationReport verify_rule(const QuadratureRule& rule, const RecurrenceTable& table,
                               int alpha);

/// Largest |n w / (pi w(x)) - sqrt(1 - x^2)| over nodes with |x| <= max_abs_node.
/// `density` is the probability density of the weight function.
double circle_theorem_deviation(const QuadratureRule& rule,
                                const std::function<double(double)>& density,
                                double max_abs_node = 0.9);

/// Same, using the density of the rule's own family.
double circle_theorem_deviation(const QuadratureRule& rule, double max_abs_node = 0.9);

/// Returns a table with at least `degree` coefficients, rebuilding built-in
/// families when the given one is too short.
RecurrenceTable ensure_capacity(const RecurrenceTable& table, int degree);

}  // namespace nestquad
