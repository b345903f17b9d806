#include "nestquad/nested_optimizer.hpp"

#include "nestquad/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace nestquad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class NestedProblem final : public PenalizedProblem {
 public:
  NestedProblem(const RecurrenceTable& table, NestedDims dims, std::vector<int> subset_map,
                PenaltyBounds bounds)
      : table_(table), dims_(dims), map_(std::move(subset_map)), bounds_(std::move(bounds)) {}

  Eigen::VectorXd residual(const Eigen::VectorXd& d) const override {
    return assemble_residual(d, table_, dims_, map_);
  }
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& d) const override {
    return residual_jacobian(d, table_, dims_, map_);
  }
  const PenaltyBounds& bounds() const override { return bounds_; }

 private:
  const RecurrenceTable& table_;
  NestedDims dims_;
  std::vector<int> map_;
  PenaltyBounds bounds_;
};

// Decision vector (new nodes, weights of base nodes then new nodes).
class ExtensionProblem final : public PenalizedProblem {
 public:
  ExtensionProblem(const RecurrenceTable& table, std::vector<double> base, int added,
                   int alpha2, PenaltyBounds bounds)
      : table_(table), base_(std::move(base)), added_(added), alpha2_(alpha2),
        bounds_(std::move(bounds)) {}

  std::vector<double> nodes(const Eigen::VectorXd& d) const {
    std::vector<double> x = base_;
    for (int j = 0; j < added_; ++j) x.push_back(d(j));
    return x;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& d) const override {
    Eigen::VectorXd R = vandermonde(table_, alpha2_, nodes(d)) * d.tail(d.size() - added_);
    R(0) -= std::sqrt(table_.b[0]);
    return R;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& d) const override {
    const auto nb = static_cast<Eigen::Index>(base_.size());
    const PolynomialEvaluation e = eval_orthonormal(table_, alpha2_, nodes(d), true);
    Eigen::MatrixXd J(alpha2_ + 1, d.size());
    for (int j = 0; j < added_; ++j) {
      J.col(j) = e.derivatives->col(nb + j) * d(added_ + nb + j);
    }
    J.rightCols(d.size() - added_) = e.values;
    return J;
  }

  const PenaltyBounds& bounds() const override { return bounds_; }

 private:
  const RecurrenceTable& table_;
  std::vector<double> base_;
  int added_;
  int alpha2_;
  PenaltyBounds bounds_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Scale that shrinks a Gauss-n rule on an unbounded support to the span of
// the Gauss rule needed for degree alpha2.
double unbounded_shrink(const RecurrenceTable& table, int n, int alpha2) {
  const int reference = std::max(1, (alpha2 + 1) / 2);
  const double ref_span = max_abs(gauss_rule(ensure_capacity(table, reference), reference).nodes);
  const double span = max_abs(gauss_rule(ensure_capacity(table, n), n).nodes);
  return span > 0.0 ? ref_span / span : 1.0;
}

std::vector<std::size_t> ascending_order(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&x](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  return order;
}

bool strictly_ascending(const std::vector<double>& x) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i - 1] < x[i])) return false;
  }
  return true;
}

bool rule_feasible(const QuadratureRule& rule, bool allow_negative) {
  const Interval& dom = rule.family.domain();
  for (double x : rule.nodes) {
    if (!dom.contains(x)) return false;
  }
  if (!allow_negative) {
    for (double w : rule.weights) {
      if (!(w > 0.0)) return false;
    }
  }
  return strictly_ascending(rule.nodes);
}

NestedRulePair build_pair(const Eigen::VectorXd& d, const std::vector<int>& map,
                          const NestedDims& dims, const RecurrenceTable& table,
                          const OptimizerConfig& config) {
  std::vector<double> x2(d.data(), d.data() + dims.n2);
  const std::vector<std::size_t> order = ascending_order(x2);
  std::vector<int> position(order.size());
  NestedRulePair pair;
  pair.fine.family = table.family;
  for (std::size_t k = 0; k < order.size(); ++k) {
    position[order[k]] = static_cast<int>(k);
    pair.fine.nodes.push_back(x2[order[k]]);
    pair.fine.weights.push_back(d(dims.n2 + dims.n1 + static_cast<Eigen::Index>(order[k])));
  }
  std::vector<double> x1;
  for (int idx : map) x1.push_back(x2[static_cast<std::size_t>(idx)]);
  pair.coarse.family = table.family;
  for (std::size_t i : ascending_order(x1)) {
    const int fine_index = position[static_cast<std::size_t>(map[i])];
    pair.subset_map.push_back(fine_index);
    pair.coarse.nodes.push_back(pair.fine.nodes[static_cast<std::size_t>(fine_index)]);
    pair.coarse.weights.push_back(d(dims.n2 + static_cast<Eigen::Index>(i)));
  }
  pair.coarse.exactness_degree = dims.alpha1;
  pair.fine.exactness_degree = dims.alpha2;
  pair.coarse.residual_norm = verify_rule(pair.coarse, table, dims.alpha1).norm;
  pair.fine.residual_norm = verify_rule(pair.fine, table, dims.alpha2).norm;
  pair.coarse.weight_floor_relaxed = config.allow_negative_weights;
  pair.fine.weight_floor_relaxed = config.allow_negative_weights;
  return pair;
}

struct ExtendedRule {
  QuadratureRule rule;
  std::vector<int> base_map;
};

ExtendedRule build_extension(const Eigen::VectorXd& d, const std::vector<double>& base,
                             int added, int alpha2, const RecurrenceTable& table,
                             const OptimizerConfig& config) {
  std::vector<double> x = base;
  for (int j = 0; j < added; ++j) x.push_back(d(j));
  const std::vector<std::size_t> order = ascending_order(x);
  ExtendedRule out;
  out.rule.family = table.family;
  out.base_map.assign(base.size(), 0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.rule.nodes.push_back(x[order[k]]);
    out.rule.weights.push_back(d(added + static_cast<Eigen::Index>(order[k])));
    if (order[k] < base.size()) out.base_map[order[k]] = static_cast<int>(k);
  }
  out.rule.exactness_degree = alpha2;
  out.rule.residual_norm = verify_rule(out.rule, table, alpha2).norm;
  out.rule.weight_floor_relaxed = config.allow_negative_weights;
  return out;
}

// Initial guess for the nodes added between frozen base nodes: even-indexed
// nodes of the Gauss rule of the extended size, or a midpoint when that
// node falls outside its gap.
Eigen::VectorXd extension_start(const std::vector<double>& sorted_base,
                                const RecurrenceTable& table, int alpha2) {
  const auto nb = static_cast<int>(sorted_base.size());
  const int n2 = 2 * nb + 1;
  const Interval& dom = table.family.domain();
  std::vector<double> g = gauss_rule(ensure_capacity(table, n2), n2).nodes;
  if (!dom.bounded()) {
    const double s = unbounded_shrink(table, n2, alpha2);
    for (double& v : g) v *= s;
  }
  Eigen::VectorXd d(nb + 1 + n2);
  for (int j = 0; j <= nb; ++j) {
    const double lo = j > 0 ? sorted_base[static_cast<std::size_t>(j) - 1] : dom.lo;
    const double hi = j < nb ? sorted_base[static_cast<std::size_t>(j)] : dom.hi;
    double c = g[static_cast<std::size_t>(2 * j)];
    if (!(lo < c && c < hi)) {
      if (std::isfinite(lo) && std::isfinite(hi)) {
        c = 0.5 * (lo + hi);
      } else if (std::isfinite(lo)) {
        c = lo + (lo != 0.0 ? std::abs(lo) : 1.0) * 0.5;
      } else {
        c = hi - (hi != 0.0 ? std::abs(hi) : 1.0) * 0.5;
      }
    }
    d(j) = c;
  }
  d.tail(n2).setConstant(1.0 / n2);
  return d;
}

PenaltyBounds extension_bounds(int added, int n2, const Interval& domain,
                               const OptimizerConfig& config) {
  const Eigen::Index n = added + n2;
  PenaltyBounds b{Eigen::VectorXd::Constant(n, -kInf), Eigen::VectorXd::Constant(n, kInf)};
  const double floor = config.allow_negative_weights ? -kInf : config.weight_floor;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i < added) {
      b.lower(i) = domain.lo + config.node_margin;
      b.upper(i) = domain.hi - config.node_margin;
    } else {
      b.lower(i) = floor;
    }
  }
  return b;
}

// Shared outer search over the fine exactness degree: climb while attempts
// succeed, restart from a fresh start once after a failed warm start, and
// step down while nothing has succeeded yet.
template <typename Attempt, typename Start>
std::optional<int> search_alpha2(int alpha2, int min_alpha2, int max_alpha2, bool unbounded,
                                 Attempt&& attempt, Start&& start,
                                 GenerationReport& report) {
  Eigen::VectorXd d = start(alpha2);
  bool fresh = true;
  std::optional<int> best;
  while (alpha2 >= min_alpha2) {
    bool ok = attempt(d, alpha2, fresh);
    if (!ok && !fresh) ok = attempt(start(alpha2), alpha2, true);
    if (ok) {
      d = report.final_state.d;
      best = alpha2;
      if (alpha2 >= max_alpha2) break;
      ++alpha2;
      fresh = false;
      continue;
    }
    if (best) break;
    --alpha2;
    if (unbounded) d = start(alpha2);
    fresh = true;
  }
  return best;
}

void fail_search(const std::string& what, const GenerationReport& report, bool infeasible) {
  double best = kInf;
  for (const auto& a : report.attempts) best = std::min(best, a.residual_norm);
  if (infeasible) {
    throw Error(ErrorKind::Feasibility,
                what + ": converged only to points violating node or weight bounds");
  }
  throw NoConvergenceError(what + ": no exactness degree reached the residual tolerance",
                           best);
}

}  // namespace

double pair_residual_norm(const NestedRulePair& pair, const RecurrenceTable& table) {
  const int top = std::max(pair.coarse.exactness_degree, pair.fine.exactness_degree);
  const RecurrenceTable wide = ensure_capacity(table, top);
  const double r1 = verify_rule(pair.coarse, wide, pair.coarse.exactness_degree).norm;
  const double r2 = verify_rule(pair.fine, wide, pair.fine.exactness_degree).norm;
  return std::hypot(r1, r2);
}

Initialization initialize(int n1, const RecurrenceTable& table, int alpha2_target) {
  if (n1 < 1) throw Error(ErrorKind::ParameterDomain, "n1 must be >= 1");
  Initialization init;
  init.n2 = 2 * n1 + 1;
  init.alpha1 = 2 * n1 - 1;
  std::vector<double> x = gauss_rule(ensure_capacity(table, init.n2), init.n2).nodes;
  if (!table.family.domain().bounded()) {
    const double s = unbounded_shrink(table, init.n2, alpha2_target);
    for (double& v : x) v *= s;
  }
  init.d.resize(n1 + 2 * init.n2);
  for (int q = 0; q < init.n2; ++q) init.d(q) = x[static_cast<std::size_t>(q)];
  init.d.segment(init.n2, n1).setConstant(1.0 / n1);
  init.d.tail(init.n2).setConstant(1.0 / init.n2);
  for (int i = 0; i < n1; ++i) init.subset_map.push_back(2 * i + 1);
  return init;
}

double effective_weight_floor(const RecurrenceTable& table, int n2,
                              const OptimizerConfig& config) {
  const QuadratureRule g = gauss_rule(ensure_capacity(table, n2), n2);
  const double smallest = *std::min_element(g.weights.begin(), g.weights.end());
  return std::min(config.weight_floor, 0.01 * smallest);
}

NestedResult generate_nested(int n1, const RecurrenceTable& table_in,
                             const OptimizerConfig& config_in, const IterationSink& sink) {
  config_in.validate();
  if (n1 < 1) throw Error(ErrorKind::ParameterDomain, "n1 must be >= 1");
  const auto start_time = std::chrono::steady_clock::now();

  const int n2 = 2 * n1 + 1;
  const int alpha1 = 2 * n1 - 1;
  const int max_alpha2 = 2 * n2 - 1;
  int alpha2 = std::min(config_in.alpha2_initial.value_or(3 * n1 + 2), max_alpha2);
  if (alpha2 <= alpha1) {
    throw Error(ErrorKind::ParameterDomain, "initial alpha2 must exceed alpha1 = " +
                                                std::to_string(alpha1));
  }
  const RecurrenceTable table = ensure_capacity(table_in, std::max(max_alpha2, n2));
  OptimizerConfig config = config_in;
  config.weight_floor = effective_weight_floor(table, n2, config_in);
  const bool unbounded = !table.family.domain().bounded();
  const std::vector<int> subset_map = initialize(n1, table, alpha2).subset_map;

  NestedResult result;
  GenerationReport& report = result.report;
  report.weight_floor = config.weight_floor;
  bool infeasible = false;

  auto attempt = [&](const Eigen::VectorXd& d0, int a2, bool fresh) {
    const NestedDims dims{n1, n2, alpha1, a2};
    NestedProblem problem(table, dims, subset_map,
                          nested_bounds(dims, table.family.domain(), config));
    SolveOutcome out = solve_penalized(problem, d0, config, a2, sink);
    AttemptRecord rec{a2, fresh, out.reason, out.state.iteration, out.state.residual_norm};
    report.attempts.push_back(rec);
    report.total_iterations += out.state.iteration;
    if (!out.converged()) return false;
    NestedRulePair pair = build_pair(out.state.d, subset_map, dims, table, config);
    if (!rule_feasible(pair.fine, config.allow_negative_weights) ||
        !rule_feasible(pair.coarse, config.allow_negative_weights)) {
      infeasible = true;
      return false;
    }
    if (pair_residual_norm(pair, table) > config.epsilon) return false;
    result.pair = std::move(pair);
    report.final_state = std::move(out.state);
    return true;
  };
  auto start = [&](int a2) { return initialize(n1, table, a2).d; };

  const auto best = search_alpha2(alpha2, alpha1 + 1, max_alpha2, unbounded, attempt, start,
                                  report);
  report.wall_seconds = seconds_since(start_time);
  if (!best) fail_search("nested generation for n1 = " + std::to_string(n1), report, infeasible);
  return result;
}

PattersonResult extend_patterson(const QuadratureRule& base, const RecurrenceTable& table_in,
                                 const OptimizerConfig& config_in, const IterationSink& sink) {
  config_in.validate();
  if (base.nodes.empty() || base.nodes.size() != base.weights.size()) {
    throw Error(ErrorKind::ParameterDomain, "base rule must have matching, non-empty nodes and weights");
  }
  if (!(base.family == table_in.family)) {
    throw Error(ErrorKind::ParameterDomain, "base rule family " + base.family.label() +
                                                " does not match table family " +
                                                table_in.family.label());
  }
  const auto start_time = std::chrono::steady_clock::now();
  std::vector<double> sorted_base = base.nodes;
  std::sort(sorted_base.begin(), sorted_base.end());

  const int nb = static_cast<int>(base.nodes.size());
  const int added = nb + 1;
  const int n2 = 2 * nb + 1;
  const int max_alpha2 = 2 * n2 - 1;
  const int min_alpha2 = std::max(1, base.exactness_degree + 1);
  int alpha2 = std::min(config_in.alpha2_initial.value_or(3 * nb + 2), max_alpha2);
  if (alpha2 < min_alpha2) {
    throw Error(ErrorKind::ParameterDomain,
                "initial alpha2 must exceed the base exactness degree");
  }
  const RecurrenceTable table = ensure_capacity(table_in, std::max(max_alpha2, n2));
  OptimizerConfig config = config_in;
  config.weight_floor = effective_weight_floor(table, n2, config_in);
  const bool unbounded = !table.family.domain().bounded();

  PattersonResult result;
  GenerationReport& report = result.report;
  report.weight_floor = config.weight_floor;
  bool infeasible = false;

  auto attempt = [&](const Eigen::VectorXd& d0, int a2, bool fresh) {
    ExtensionProblem problem(table, base.nodes, added, a2,
                             extension_bounds(added, n2, table.family.domain(), config));
    SolveOutcome out = solve_penalized(problem, d0, config, a2, sink);
    report.attempts.push_back({a2, fresh, out.reason, out.state.iteration, out.state.residual_norm});
    report.total_iterations += out.state.iteration;
    if (!out.converged()) return false;
    ExtendedRule ext = build_extension(out.state.d, base.nodes, added, a2, table, config);
    if (!rule_feasible(ext.rule, config.allow_negative_weights)) {
      infeasible = true;
      return false;
    }
    if (ext.rule.residual_norm > config.epsilon) return false;
    result.rule = std::move(ext.rule);
    result.base_map = std::move(ext.base_map);
    report.final_state = std::move(out.state);
    return true;
  };
  auto start = [&](int a2) { return extension_start(sorted_base, table, a2); };

  const auto best = search_alpha2(alpha2, min_alpha2, max_alpha2, unbounded, attempt, start,
                                  report);
  report.wall_seconds = seconds_since(start_time);
  if (!best) {
    fail_search("extension of the " + std::to_string(nb) + "-point rule", report, infeasible);
  }
  return result;
}

QuadratureRule prune_negligible(const QuadratureRule& rule, const RecurrenceTable& table,
                                const OptimizerConfig& config) {
  QuadratureRule pruned = rule;
  pruned.nodes.clear();
  pruned.weights.clear();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    if (std::abs(rule.weights[q]) < config.prune_threshold) continue;
    pruned.nodes.push_back(rule.nodes[q]);
    pruned.weights.push_back(rule.weights[q]);
  }
  if (pruned.size() == rule.size() || pruned.size() == 0) return rule;
  const RecurrenceTable wide = ensure_capacity(table, rule.exactness_degree);
  pruned.residual_norm = verify_rule(pruned, wide, rule.exactness_degree).norm;
  if (pruned.residual_norm > 10.0 * config.epsilon) return rule;
  return pruned;
}

namespace {

constexpr double kSymmetryTolerance = 1e-8;

void check_symmetric(const QuadratureRule& rule) {
  const std::size_t n = rule.size();
  double wmax = 0.0;
  for (double w : rule.weights) wmax = std::max(wmax, std::abs(w));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    const double scale = std::max(1.0, std::abs(rule.nodes[i]));
    if (std::abs(rule.nodes[i] + rule.nodes[j]) > kSymmetryTolerance * scale ||
        std::abs(rule.weights[i] - rule.weights[j]) > kSymmetryTolerance * wmax) {
      throw Error(ErrorKind::Symmetry, "rule is not symmetric about the origin (node " +
                                           std::to_string(i) + ")");
    }
  }
  if (!strictly_ascending(rule.nodes)) {
    throw Error(ErrorKind::Symmetry, "rule nodes must be strictly ascending");
  }
}

}  // namespace

QuadratureRule hermite_to_laguerre(const QuadratureRule& rule, double rho) {
  if (rule.family.kind() != FamilyKind::GeneralizedHermite) {
    throw Error(ErrorKind::UnsupportedFamily, "fold expects a generalized Hermite rule, got " +
                                                  rule.family.label());
  }
  if (rule.family.param("rho") != rho) {
    throw Error(ErrorKind::ParameterDomain, "rho does not match the rule's family parameter");
  }
  check_symmetric(rule);
  const std::size_t n = rule.size();
  QuadratureRule out;
  out.family = WeightFamily::laguerre(0.5 * (rho - 1.0));
  out.weight_floor_relaxed = rule.weight_floor_relaxed;
  out.exactness_degree = rule.exactness_degree / 2;
  const std::size_t first = n / 2;
  if (n % 2 == 1) {
    out.nodes.push_back(0.0);
    out.weights.push_back(rule.weights[first]);
  }
  for (std::size_t i = n % 2 == 1 ? first + 1 : first; i < n; ++i) {
    const double x = rule.nodes[i];
    out.nodes.push_back(x * x);
    out.weights.push_back(rule.weights[i] + rule.weights[n - 1 - i]);
  }
  const RecurrenceTable table =
      recurrence_coefficients(out.family, std::max(1, out.exactness_degree));
  out.residual_norm = verify_rule(out, table, out.exactness_degree).norm;
  return out;
}

NestedRulePair hermite_to_laguerre(const NestedRulePair& pair, double rho) {
  NestedRulePair out;
  out.fine = hermite_to_laguerre(pair.fine, rho);
  out.coarse = hermite_to_laguerre(pair.coarse, rho);

  const std::size_t n2 = pair.fine.size();
  const std::size_t n1 = pair.coarse.size();
  const std::size_t fine_first = n2 / 2 + (n2 % 2);
  for (std::size_t i = n1 / 2; i < n1; ++i) {
    const auto j = static_cast<std::size_t>(pair.subset_map[i]);
    if (n1 % 2 == 1 && i == n1 / 2) {
      if (n2 % 2 == 0 || j != n2 / 2) {
        throw Error(ErrorKind::Symmetry, "coarse middle node is not the fine middle node");
      }
      out.subset_map.push_back(0);
      continue;
    }
    if (j < fine_first) {
      throw Error(ErrorKind::Symmetry, "coarse node maps into the negative half");
    }
    const std::size_t folded = j - fine_first + (n2 % 2);
    out.subset_map.push_back(static_cast<int>(folded));
  }
  for (std::size_t i = 0; i < out.coarse.size(); ++i) {
    out.coarse.nodes[i] = out.fine.nodes[static_cast<std::size_t>(out.subset_map[i])];
  }
  const RecurrenceTable table = recurrence_coefficients(
      out.fine.family, std::max(1, std::max(out.fine.exactness_degree, out.coarse.exactness_degree)));
  out.coarse.residual_norm = verify_rule(out.coarse, table, out.coarse.exactness_degree).norm;
  return out;
}

}  // namespace nestquad
