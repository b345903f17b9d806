#include "nestquad/sparse_grid.hpp"

#include "nestquad/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace nestquad {

namespace {

constexpr double kGaussMergeTolerance = 1e-14;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return std::round(c);
}

// All i with i_q >= 1 and |i| = total, in colexicographic order.
std::vector<std::vector<int>> compositions(int d, int total) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(d), 1);
  auto rec = [&](auto&& self, int q, int left) -> void {
    if (q == d - 1) {
      cur[static_cast<std::size_t>(q)] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 1; v <= left - (d - 1 - q); ++v) {
      cur[static_cast<std::size_t>(q)] = v;
      self(self, q + 1, left - v);
    }
  };
  if (total >= d) rec(rec, 0, total);
  std::sort(out.begin(), out.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
  });
  return out;
}

// Maps every univariate node value used by the family to a canonical id.
class CoordinateIndex {
 public:
  CoordinateIndex(const UnivariateLevelFamily& family, int k) {
    std::vector<double> all;
    for (int i = 0; i < k; ++i) {
      const auto& r = family.levels[static_cast<std::size_t>(i)];
      all.insert(all.end(), r.nodes.begin(), r.nodes.end());
    }
    std::sort(all.begin(), all.end());
    const double tol = family.nested ? 0.0 : kGaussMergeTolerance;
    for (double x : all) {
      if (canonical_.empty() || x - canonical_.back() > tol) canonical_.push_back(x);
    }
    tolerance_ = tol;
  }

  int id(double x) const {
    auto it = std::lower_bound(canonical_.begin(), canonical_.end(), x - tolerance_);
    return static_cast<int>(it - canonical_.begin());
  }
  double value(int id) const { return canonical_[static_cast<std::size_t>(id)]; }

 private:
  std::vector<double> canonical_;
  double tolerance_ = 0.0;
};

void check_family(const UnivariateLevelFamily& family, int d, int k) {
  if (d < 1) throw Error(ErrorKind::ParameterDomain, "sparse grid dimension must be >= 1");
  if (k < 1) throw Error(ErrorKind::ParameterDomain, "sparse grid level must be >= 1");
  if (family.max_level() < k) {
    throw Error(ErrorKind::Capacity, "level family provides " +
                                         std::to_string(family.max_level()) +
                                         " levels, level " + std::to_string(k) + " requested");
  }
}

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os << std::setprecision(17) << "(";
  for (std::size_t q = 0; q < x.size(); ++q) os << (q ? ", " : "") << x[q];
  os << ")";
  return os.str();
}

}  // namespace

std::vector<int> UnivariateLevelFamily::sizes() const {
  std::vector<int> out;
  for (const auto& r : levels) out.push_back(static_cast<int>(r.size()));
  return out;
}

std::vector<int> default_nested_schedule(int levels) {
  std::vector<int> out;
  for (int i = 1; i <= levels; ++i) {
    int n = 1;
    while (i > 1 && 3 * (n + 1) / 2 - 1 < 2 * i - 1) n = 2 * n + 1;
    out.push_back(n);
  }
  return out;
}

UnivariateLevelFamily nested_levels(const std::vector<QuadratureRule>& sequence,
                                    const std::vector<int>& schedule) {
  UnivariateLevelFamily family;
  family.nested = true;
  for (int size : schedule) {
    auto it = std::find_if(sequence.begin(), sequence.end(), [size](const QuadratureRule& r) {
      return static_cast<int>(r.size()) == size;
    });
    if (it == sequence.end()) {
      throw Error(ErrorKind::Capacity, "no rule of size " + std::to_string(size) +
                                           " in the nested sequence");
    }
    family.levels.push_back(*it);
  }
  for (std::size_t i = 1; i < family.levels.size(); ++i) {
    const auto& small = family.levels[i - 1].nodes;
    const auto& large = family.levels[i].nodes;
    for (double x : small) {
      if (std::find(large.begin(), large.end(), x) == large.end()) {
        throw Error(ErrorKind::ParameterDomain,
                    "level " + std::to_string(i) + " nodes are not contained in level " +
                        std::to_string(i + 1));
      }
    }
  }
  return family;
}

UnivariateLevelFamily gauss_levels(const RecurrenceTable& table, int levels) {
  UnivariateLevelFamily family;
  const RecurrenceTable wide = ensure_capacity(table, std::max(1, 2 * levels));
  for (int i = 1; i <= levels; ++i) family.levels.push_back(gauss_rule(wide, i));
  return family;
}

PointSet tensor_rule(std::span<const QuadratureRule> rules) {
  if (rules.empty()) throw Error(ErrorKind::ParameterDomain, "tensor rule needs d >= 1");
  double count = 1.0;
  for (const auto& r : rules) count *= static_cast<double>(r.size());
  if (count > kMaxTensorPoints) {
    throw Error(ErrorKind::Capacity, "tensor product would have " + std::to_string(count) +
                                         " points");
  }
  const auto d = rules.size();
  PointSet out;
  out.dim = static_cast<int>(d);
  const auto total = static_cast<std::size_t>(count);
  out.coords.resize(total * d);
  out.weights.resize(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t p = 0; p < total; ++p) {
    double w = 1.0;
    for (std::size_t q = 0; q < d; ++q) {
      out.coords[p * d + q] = rules[q].nodes[idx[q]];
      w *= rules[q].weights[idx[q]];
    }
    out.weights[p] = w;
    for (std::size_t q = d; q-- > 0;) {
      if (++idx[q] < rules[q].size()) break;
      idx[q] = 0;
    }
  }
  return out;
}

PointSet smolyak_unmerged(const UnivariateLevelFamily& family, int d, int k) {
  check_family(family, d, k);
  PointSet out;
  out.dim = d;
  std::vector<QuadratureRule> factors(static_cast<std::size_t>(d));
  for (int r = std::max(0, k - d); r <= k - 1; ++r) {
    const double sign = (k - 1 - r) % 2 == 0 ? 1.0 : -1.0;
    const double coeff = sign * binomial(d - 1, k - 1 - r);
    for (const auto& multi : compositions(d, d + r)) {
      for (int q = 0; q < d; ++q) {
        factors[static_cast<std::size_t>(q)] =
            family.levels[static_cast<std::size_t>(multi[static_cast<std::size_t>(q)] - 1)];
      }
      const PointSet block = tensor_rule(factors);
      out.coords.insert(out.coords.end(), block.coords.begin(), block.coords.end());
      for (double w : block.weights) out.weights.push_back(coeff * w);
    }
  }
  return out;
}

SparseGrid smolyak_grid(const UnivariateLevelFamily& family, int d, int k) {
  const PointSet raw = smolyak_unmerged(family, d, k);
  const CoordinateIndex index(family, k);

  std::map<std::vector<int>, std::size_t> slot;
  std::vector<std::vector<int>> keys;
  std::vector<double> weights;
  std::vector<int> key(static_cast<std::size_t>(d));
  for (std::size_t p = 0; p < raw.size(); ++p) {
    const auto x = raw.node(p);
    for (int q = 0; q < d; ++q) key[static_cast<std::size_t>(q)] = index.id(x[static_cast<std::size_t>(q)]);
    auto [it, inserted] = slot.try_emplace(key, keys.size());
    if (inserted) {
      keys.push_back(key);
      weights.push_back(raw.weights[p]);
    } else {
      weights[it->second] += raw.weights[p];
    }
  }

  // Merged nodes stay even when their weight cancels to zero, so node counts
  // match the union of the tensor grids.
  SparseGrid grid;
  grid.dim = d;
  grid.level = k;
  grid.source = family;
  grid.points.dim = d;
  for (std::size_t p = 0; p < keys.size(); ++p) {
    for (int id : keys[p]) grid.points.coords.push_back(index.value(id));
    grid.points.weights.push_back(weights[p]);
  }
  return grid;
}

double integrate(const PointSet& points, const Integrand& f) {
  // Compensated, since Smolyak weights are large and of mixed sign.
  double sum = 0.0;
  double carry = 0.0;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto x = points.node(p);
    const double v = f(x);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::Evaluation, "integrand is not finite at " + format_point(x));
    }
    const double term = points.weights[p] * v;
    const double t = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + carry;
}

double integrate(const SparseGrid& grid, const Integrand& f) { return integrate(grid.points, f); }

double tensor_error_bound(double epsilon, std::span<const int> alphas, int d, double p_norm) {
  if (!(epsilon >= 0.0)) throw Error(ErrorKind::ParameterDomain, "epsilon must be >= 0");
  if (d < 1 || static_cast<int>(alphas.size()) != d) {
    throw Error(ErrorKind::ParameterDomain, "need one degree per dimension");
  }
  double product = 1.0;
  for (int a : alphas) product *= std::sqrt(static_cast<double>(a) + 1.0);
  return epsilon * p_norm * d * std::pow(1.0 + epsilon, d - 1) * product;
}

void write_grid_csv(const PointSet& points, std::ostream& out) {
  for (int q = 0; q < points.dim; ++q) out << "x" << (q + 1) << ",";
  out << "weight\n";
  out << std::setprecision(17);
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (double x : points.node(p)) out << x << ",";
    out << points.weights[p] << "\n";
  }
}

}  // namespace nestquad
