#pragma once

#include "nestquad/gauss.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace nestquad {

/// Univariate rules indexed by level; levels[i - 1] is level i.
struct UnivariateLevelFamily {
  std::vector<QuadratureRule> levels;
  bool nested = false;

  int max_level() const { return static_cast<int>(levels.size()); }
  std::vector<int> sizes() const;
};

/// Level sizes 1, 3, 3, 7, 7, 7, 15 x 6, 31 x 12, ...: level i takes the
/// smallest rule of the 1, 3, 7, 15, ... sequence that integrates degree 2i - 1.
std::vector<int> default_nested_schedule(int levels);

/// Picks, for each scheduled size, the rule of that size from `sequence`.
/// Throws Capacity when a size is missing.
UnivariateLevelFamily nested_levels(const std::vector<QuadratureRule>& sequence,
                                    const std::vector<int>& schedule);

/// Level i is the i-point Gauss rule.
UnivariateLevelFamily gauss_levels(const RecurrenceTable& table, int levels);

/// Weighted point cloud in d dimensions; coordinates stored row-major.
struct PointSet {
  int dim = 0;
  std::vector<double> coords;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
};

inline constexpr double kMaxTensorPoints = 1e8;

/// Full Cartesian product in lexicographic order (last dimension fastest).
PointSet tensor_rule(std::span<const QuadratureRule> rules);

struct SparseGrid {
  int dim = 0;
  int level = 0;
  PointSet points;
  UnivariateLevelFamily source;

  std::size_t node_count() const { return points.size(); }
};

/// Combination-technique sum of tensor rules over |i| = d + r,
/// r = max(0, k - d) .. k - 1, before any merging of coincident nodes.
PointSet smolyak_unmerged(const UnivariateLevelFamily& family, int d, int k);

/// Smolyak grid with coincident nodes merged.
SparseGrid smolyak_grid(const UnivariateLevelFamily& family, int d, int k);

using Integrand = std::function<double(std::span<const double>)>;

/// Sum of w_q f(x_q) in node order. Throws Evaluation on a non-finite value.
double integrate(const PointSet& points, const Integrand& f);
double integrate(const SparseGrid& grid, const Integrand& f);

double tensor_error_bound(double epsilon, std::span<const int> alphas, int d,
                          double p_norm);

/// One row per node: d coordinates then the weight.
void write_grid_csv(const PointSet& points, std::ostream& out);

}  // namespace nestquad
