#pragma once

#include "nestquad/gauss.hpp"
#include "nestquad/gauss_newton.hpp"
#include "nestquad/nested_problem.hpp"

#include <vector>

namespace nestquad {

/// A coarse rule whose nodes are a subset of the fine rule's nodes:
/// coarse.nodes[i] == fine.nodes[subset_map[i]] bit for bit.
struct NestedRulePair {
  QuadratureRule coarse;
  QuadratureRule fine;
  std::vector<int> subset_map;
};

/// Combined certification norm ||[R1; R2]|| of a pair.
double pair_residual_norm(const NestedRulePair& pair, const RecurrenceTable& table);

struct AttemptRecord {
  int alpha2 = 0;
  bool fresh_start = true;
  StopReason reason = StopReason::IterationLimit;
  int iterations = 0;
  double residual_norm = 0.0;
};

struct GenerationReport {
  std::vector<AttemptRecord> attempts;
  int total_iterations = 0;
  double wall_seconds = 0.0;
  double weight_floor = 0.0;
  /// State of the last successful attempt.
  OptimizerState final_state;
};

struct Initialization {
  Eigen::VectorXd d;
  std::vector<int> subset_map;
  int n2 = 0;
  int alpha1 = 0;
};

/// Interlaced starting point: fine nodes from the Gauss-(2 n1 + 1) rule, coarse
/// nodes at the odd fine indices, uniform weights. On unbounded supports the
/// fine nodes are shrunk towards the span of a Gauss rule of degree alpha2.
Initialization initialize(int n1, const RecurrenceTable& table, int alpha2_target);

/// Floor actually enforced on weights: the configured floor, lowered for
/// rules whose Gauss weights are themselves tiny (deep tails of unbounded
/// weights).
double effective_weight_floor(const RecurrenceTable& table, int n2,
                              const OptimizerConfig& config);

struct NestedResult {
  NestedRulePair pair;
  GenerationReport report;
};

/// Searches for the highest fine exactness reachable with n2 = 2 n1 + 1 nodes.
NestedResult generate_nested(int n1, const RecurrenceTable& table,
                             const OptimizerConfig& config, const IterationSink& sink = {});

struct PattersonResult {
  QuadratureRule rule;
  /// Position of each base node inside the extended rule.
  std::vector<int> base_map;
  GenerationReport report;
};

/// Adds n + 1 nodes to a certified n-point rule, keeping its nodes fixed and
/// re-optimizing all weights.
PattersonResult extend_patterson(const QuadratureRule& base, const RecurrenceTable& table,
                                 const OptimizerConfig& config,
                                 const IterationSink& sink = {});

/// Drops nodes whose weight falls below config.prune_threshold when the
/// re-verified residual stays within 10 epsilon; otherwise returns the input.
QuadratureRule prune_negligible(const QuadratureRule& rule, const RecurrenceTable& table,
                                const OptimizerConfig& config);

/// Folds a symmetric rule for |x|^rho e^{-x^2} into a rule for
/// x^{(rho-1)/2} e^{-x} via x -> x^2.
QuadratureRule hermite_to_laguerre(const QuadratureRule& rule, double rho);
NestedRulePair hermite_to_laguerre(const NestedRulePair& pair, double rho);

}  // namespace nestquad
