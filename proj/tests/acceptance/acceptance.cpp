// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any
// gating criterion fails. Run with --large to include the n1 = 100 stretch run.

#include "jacobian_check.hpp"
#include "nestquad/nestquad.hpp"
#include "oracle.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace nestquad;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string secs(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", v);
  return buf;
}

// Everything produced by criteria 1-9, re-checked by criterion 13.
struct PairArtifact {
  std::string name;
  NestedRulePair pair;
  std::function<NestedRulePair()> rerun;
};
struct RuleArtifact {
  std::string name;
  QuadratureRule rule;
  std::function<QuadratureRule()> rerun;
};
struct GridArtifact {
  std::string name;
  SparseGrid grid;
  std::function<SparseGrid()> rerun;
};
struct Artifacts {
  std::vector<PairArtifact> pairs;
  std::vector<RuleArtifact> rules;
  std::vector<GridArtifact> grids;
};

RecurrenceTable table_for(const WeightFamily& family, int degree = 120) {
  return recurrence_coefficients(family, degree);
}

NestedRulePair nested(const WeightFamily& family, int n1) {
  return generate_nested(n1, table_for(family), OptimizerConfig{}).pair;
}

// Seed {0} followed by `steps` extensions.
std::vector<QuadratureRule> patterson_chain(const WeightFamily& family, int steps) {
  const auto table = table_for(family);
  std::vector<QuadratureRule> out{gauss_rule(table, 1)};
  for (int i = 0; i < steps; ++i) out.push_back(extend_patterson(out.back(), table, {}).rule);
  return out;
}

Outcome kronrod_legendre(Artifacts& art) {
  Outcome o;
  const Clock clock;
  double worst = 0.0;
  std::ostringstream triples;
  for (int n1 = 1; n1 <= 10; ++n1) {
    const auto pair = nested(WeightFamily::legendre(), n1);
    const double r = pair_residual_norm(pair, table_for(WeightFamily::legendre()));
    worst = std::max(worst, r);
    const int n2 = static_cast<int>(pair.fine.size());
    const int a1 = pair.coarse.exactness_degree;
    const int a2 = pair.fine.exactness_degree;
    const int want = n1 % 2 == 0 ? 3 * n1 + 1 : 3 * n1 + 2;
    if (n2 != 2 * n1 + 1 || a1 != 2 * n1 - 1 || a2 != want || !(r <= 1e-12)) {
      o.pass = false;
      triples << " n1=" << n1 << ":(" << n2 << "," << a1 << "," << a2 << ")!=" << want;
    }
    art.pairs.push_back({"legendre n1=" + std::to_string(n1), pair,
                         [n1] { return nested(WeightFamily::legendre(), n1); }});
  }
  const double t = clock.seconds();
  if (t >= 60.0) o.pass = false;
  o.detail = "max ||R||=" + sci(worst) + " in " + secs(t) + triples.str();
  return o;
}

// Published 15-point Gauss-Kronrod rule on [-1, 1] (weights sum to 2).
const double kGk15Nodes[8] = {0.0,
                              0.2077849550078984676006894,
                              0.4058451513773971669066064,
                              0.5860872354676911302941448,
                              0.7415311855993944398638648,
                              0.8648644233597690727897128,
                              0.9491079123427585245261897,
                              0.9914553711208126392068547};
const double kGk15Weights[8] = {0.2094821410847278280129992, 0.2044329400752988924141620,
                                0.1903505780647854099132564, 0.1690047266392679028265834,
                                0.1406532597155259187451896, 0.1047900103222501838398763,
                                0.0630920926299785532907007, 0.0229353220105292249637320};

Outcome legendre_seven(Artifacts& art) {
  Outcome o;
  const auto pair = nested(WeightFamily::legendre(), 7);
  const auto& fine = pair.fine;
  if (fine.size() != 15 || pair.coarse.exactness_degree != 13 || fine.exactness_degree != 23) {
    o.pass = false;
  }
  const auto ref = oracle::gram_schmidt({oracle::Weight::Legendre}, 23);
  double worst = 0.0;
  for (int j = 0; j <= 23; ++j) {
    oracle::Real s = 0;
    for (std::size_t q = 0; q < fine.size(); ++q) {
      s += oracle::Real(fine.weights[q]) * oracle::evaluate(ref.coeffs[j], oracle::Real(fine.nodes[q]));
    }
    if (j == 0) s -= 1;
    worst = std::max(worst, std::abs(static_cast<double>(s)));
  }
  if (!(worst <= 1e-12)) o.pass = false;

  double node_gap = 0.0;
  double weight_gap = 0.0;
  if (fine.size() == 15) {
    for (int q = 0; q < 15; ++q) {
      const int k = std::abs(q - 7);
      const double x = q < 7 ? -kGk15Nodes[k] : kGk15Nodes[k];
      node_gap = std::max(node_gap, std::abs(fine.nodes[q] - x));
      weight_gap = std::max(weight_gap, std::abs(fine.weights[q] - 0.5 * kGk15Weights[k]));
    }
    if (!(node_gap <= 1e-8 && weight_gap <= 1e-8)) o.pass = false;
  }
  o.detail = "(" + std::to_string(fine.size()) + "," + std::to_string(pair.coarse.exactness_degree) +
             "," + std::to_string(fine.exactness_degree) + "), max oracle moment residual " +
             sci(worst) + ", published GK15 gap nodes " + sci(node_gap) + " weights " +
             sci(weight_gap);
  art.pairs.push_back({"legendre n1=7", pair, [] { return nested(WeightFamily::legendre(), 7); }});
  return o;
}

Outcome jacobi_ten(Artifacts& art) {
  const auto family = WeightFamily::jacobi(0.0, 0.3);
  const auto pair = nested(family, 10);
  const double r = pair_residual_norm(pair, table_for(family));
  Outcome o;
  o.pass = pair.fine.size() == 21 && pair.coarse.exactness_degree == 19 &&
           pair.fine.exactness_degree == 31 && r <= 1e-12;
  o.detail = "(" + std::to_string(pair.fine.size()) + "," +
             std::to_string(pair.coarse.exactness_degree) + "," +
             std::to_string(pair.fine.exactness_degree) + ") ||R||=" + sci(r);
  art.pairs.push_back({"jacobi(0,0.3) n1=10", pair, [family] { return nested(family, 10); }});
  return o;
}

Outcome hermite_table(Artifacts& art) {
  // Fine degree reported for n1 = 1..8 with rho = 0.
  const int table_alpha2[8] = {5, 7, 9, 11, 15, 17, 19, 21};
  const auto family = WeightFamily::hermite(0.0);
  Outcome o;
  std::ostringstream os;
  const Clock clock;
  for (int n1 = 1; n1 <= 8; ++n1) {
    const auto pair = nested(family, n1);
    const double r = pair_residual_norm(pair, table_for(family));
    const bool ok = pair.fine.size() == static_cast<std::size_t>(2 * n1 + 1) &&
                    pair.coarse.exactness_degree >= 2 * n1 - 1 &&
                    pair.fine.exactness_degree >= table_alpha2[n1 - 1] && r <= 1e-12;
    o.pass = o.pass && ok;
    os << " " << n1 << ":" << pair.fine.exactness_degree << "@" << sci(r) << (ok ? "" : "!");
    art.pairs.push_back({"hermite(0) n1=" + std::to_string(n1), pair,
                         [family, n1] { return nested(family, n1); }});
  }
  o.detail = "n1:alpha2@||R||" + os.str() + " in " + secs(clock.seconds());
  return o;
}

Outcome patterson(Artifacts& art, const WeightFamily& family, const std::vector<int>& alphas) {
  const auto chain = patterson_chain(family, static_cast<int>(alphas.size()));
  Outcome o;
  std::ostringstream os;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto& r = chain[i + 1];
    const std::size_t n = (std::size_t{2} << (i + 1)) - 1;
    const bool ok = r.size() == n && r.exactness_degree == alphas[i] && r.residual_norm <= 1e-12;
    o.pass = o.pass && ok;
    os << " " << r.size() << "/" << r.exactness_degree << "@" << sci(r.residual_norm);
    art.rules.push_back({family.label() + " patterson n=" + std::to_string(r.size()), r,
                         [family, i] { return patterson_chain(family, static_cast<int>(i) + 1).back(); }});
  }
  o.detail = "n2/alpha2@||R2||" + os.str();
  return o;
}

Outcome patterson_chebyshev(Artifacts& art) {
  Outcome o = patterson(art, WeightFamily::chebyshev(), {5, 11, 23});
  // Inject a zero-weight node into the 15-point rule; pruning must undo it.
  const auto table = table_for(WeightFamily::chebyshev());
  const QuadratureRule base = art.rules.back().rule;
  QuadratureRule padded = base;
  const auto at = std::upper_bound(padded.nodes.begin(), padded.nodes.end(), 0.33);
  const auto idx = at - padded.nodes.begin();
  padded.nodes.insert(at, 0.33);
  padded.weights.insert(padded.weights.begin() + idx, 0.0);
  const auto pruned = prune_negligible(padded, table, OptimizerConfig{});
  const bool ok = pruned.nodes == base.nodes && pruned.weights == base.weights;
  o.pass = o.pass && ok;
  o.detail += ", prune " + std::to_string(padded.size()) + "->" + std::to_string(pruned.size());
  art.rules.push_back({"chebyshev pruned n=15", pruned, [padded, table] {
                         return prune_negligible(padded, table, OptimizerConfig{});
                       }});
  return o;
}

std::vector<QuadratureRule> legendre_nested_seq() { return patterson_chain(WeightFamily::legendre(), 2); }

Outcome sparse_counts(Artifacts& art) {
  const Clock clock;
  const auto seq = legendre_nested_seq();
  const auto table = table_for(WeightFamily::legendre());
  const auto nested4 = nested_levels(seq, {1, 3, 3, 7, 7, 7});
  const auto gauss6 = gauss_levels(table, 6);
  struct Case {
    const UnivariateLevelFamily* family;
    int d;
    std::vector<std::size_t> expect;
    std::string name;
  };
  const std::vector<Case> cases{{&nested4, 4, {1, 9, 33, 81, 193, 385}, "nested d=4"},
                                {&gauss6, 4, {1, 9, 41, 137, 385, 953}, "gauss d=4"},
                                {&nested4, 10, {1, 21, 201, 1201}, "nested d=10"},
                                {&gauss6, 10, {1, 21, 221, 1581}, "gauss d=10"}};
  Outcome o;
  std::ostringstream os;
  for (const auto& c : cases) {
    os << " " << c.name << " [";
    for (std::size_t k = 1; k <= c.expect.size(); ++k) {
      const auto grid = smolyak_grid(*c.family, c.d, static_cast<int>(k));
      os << (k > 1 ? "," : "") << grid.node_count();
      o.pass = o.pass && grid.node_count() == c.expect[k - 1];
      if (k == c.expect.size()) {
        const auto* family = c.family;
        const int d = c.d;
        const bool is_nested = family == &nested4;
        art.grids.push_back({c.name + " k=" + std::to_string(k), grid, [is_nested, d, k, table] {
                               const auto fam = is_nested
                                                    ? nested_levels(legendre_nested_seq(), {1, 3, 3, 7, 7, 7})
                                                    : gauss_levels(table, 6);
                               return smolyak_grid(fam, d, static_cast<int>(k));
                             }});
      }
    }
    os << "]";
  }
  const double t = clock.seconds();
  o.pass = o.pass && t < 30.0;
  o.detail = os.str().substr(1) + " in " + secs(t);
  return o;
}

double monomial(std::span<const double> x, const std::vector<int>& p) {
  double v = 1.0;
  for (std::size_t q = 0; q < x.size(); ++q) v *= std::pow(x[q], p[q]);
  return v;
}

Outcome smolyak_exactness(Artifacts& art) {
  const auto seq = legendre_nested_seq();
  const auto nested = nested_levels(seq, default_nested_schedule(4));
  const auto gauss = gauss_levels(table_for(WeightFamily::legendre()), 4);
  double worst = 0.0;
  int checked = 0;
  for (const auto* family : {&nested, &gauss}) {
    for (int d : {2, 3}) {
      for (int k = 1; k <= 4; ++k) {
        const auto grid = smolyak_grid(*family, d, k);
        std::vector<int> p(static_cast<std::size_t>(d), 0);
        auto walk = [&](auto&& self, int q, int left) -> void {
          if (q == d) {
            double truth = 1.0;
            for (int e : p) truth *= oracle::moment_d({oracle::Weight::Legendre}, e);
            const double v = integrate(grid, [&p](std::span<const double> x) { return monomial(x, p); });
            worst = std::max(worst, std::abs(v - truth));
            ++checked;
            return;
          }
          for (int e = 0; e <= left; ++e) {
            p[static_cast<std::size_t>(q)] = e;
            self(self, q + 1, left - e);
          }
        };
        walk(walk, 0, 2 * k - 1);
        if (k == 4 && family == &nested) {
          art.grids.push_back({"nested d=" + std::to_string(d) + " k=4", grid, [d] {
                                 return smolyak_grid(nested_levels(legendre_nested_seq(),
                                                                   default_nested_schedule(4)),
                                                     d, 4);
                               }});
        }
      }
    }
  }
  return {worst <= 1e-9, std::to_string(checked) + " monomials, max error " + sci(worst)};
}

// Rule with the same nodes as `g` whose weights are moved so that its moment
// residual through g.exactness_degree has norm exactly eps.
QuadratureRule perturbed(const QuadratureRule& g, const RecurrenceTable& table, double eps,
                         std::mt19937_64& rng) {
  const Eigen::MatrixXd V = vandermonde(table, g.exactness_degree, g.nodes);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd delta(static_cast<Eigen::Index>(g.size()));
  for (auto& v : delta) v = n(rng);
  delta *= eps / (V * delta).norm();
  QuadratureRule out = g;
  for (std::size_t q = 0; q < g.size(); ++q) out.weights[q] += delta(static_cast<Eigen::Index>(q));
  return out;
}

Outcome tensor_bound() {
  const double eps = 1e-6;
  const int d = 3;
  const auto table = table_for(WeightFamily::legendre());
  std::mt19937_64 rng(2024);
  Outcome o;
  double worst_ratio = 0.0;
  int checked = 0;
  for (const std::vector<int>& sizes : {std::vector<int>{2, 3, 4}, std::vector<int>{3, 3, 3},
                                        std::vector<int>{1, 5, 2}}) {
    std::vector<QuadratureRule> rules;
    std::vector<int> alphas;
    for (int n : sizes) {
      rules.push_back(perturbed(gauss_rule(table, n), table, eps, rng));
      alphas.push_back(2 * n - 1);
      const double r = verify_rule(rules.back(), table, alphas.back()).norm;
      if (std::abs(r - eps) > 1e-12) o.pass = false;
    }
    const PointSet tensor = tensor_rule(rules);
    const double bound = tensor_error_bound(eps, alphas, d, 1.0);
    for (int a = 0; a <= alphas[0]; ++a) {
      for (int b = 0; b <= alphas[1]; ++b) {
        for (int c = 0; c <= alphas[2]; ++c) {
          const int j[3] = {a, b, c};
          const double v = integrate(tensor, [&](std::span<const double> x) {
            double prod = 1.0;
            for (int q = 0; q < 3; ++q) {
              const double xq = x[static_cast<std::size_t>(q)];
              prod *= eval_orthonormal(table, j[q], {&xq, 1}, false).values(j[q], 0);
            }
            return prod;
          });
          const double exact = (a == 0 && b == 0 && c == 0) ? 1.0 : 0.0;
          worst_ratio = std::max(worst_ratio, std::abs(v - exact) / bound);
          ++checked;
        }
      }
    }
  }
  if (!(worst_ratio <= 1.0)) o.pass = false;

  // Product perturbation lemma.
  int lemma_violations = 0;
  for (double e : {1e-3, 1e-6}) {
    std::uniform_real_distribution<double> s_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> gap(-e, e);
    for (int k = 1; k <= 12; ++k) {
      const double bound = k * e * std::pow(1.0 + e, k - 1);
      for (int trial = 0; trial < 2000; ++trial) {
        double ps = 1.0;
        double pr = 1.0;
        for (int q = 0; q < k; ++q) {
          const bool extreme = trial % 4 == 0;
          const double s = extreme ? 1.0 : s_dist(rng);
          ps *= s;
          pr *= extreme ? 1.0 + e : s + gap(rng);
        }
        if (std::abs(ps - pr) > bound * (1.0 + 1e-12)) ++lemma_violations;
      }
    }
  }
  if (lemma_violations) o.pass = false;
  o.detail = std::to_string(checked) + " basis polynomials, max error/bound " + sci(worst_ratio) +
             ", product lemma violations " + std::to_string(lemma_violations) + " (k<=12)";
  return o;
}

Outcome gradient_check() {
  std::mt19937_64 rng(11);
  const std::vector<WeightFamily> families{
      WeightFamily::legendre(),     WeightFamily::chebyshev(),   WeightFamily::jacobi(0.0, 0.3),
      WeightFamily::hermite(0.0),   WeightFamily::hermite(1.0),  WeightFamily::laguerre(0.0),
      WeightFamily::laguerre(0.5)};
  const NestedDims dims{3, 7, 5, 11};
  double worst = 0.0;
  for (const auto& family : families) {
    const auto table = table_for(family, 20);
    const auto bounds = nested_bounds(dims, family.domain(), OptimizerConfig{});
    for (int i = 0; i < 20; ++i) {
      const auto p = oracle::random_feasible_point(dims, family.domain(), rng);
      worst = std::max(worst, oracle::max_jacobian_deviation(p, table, dims, 1e3, bounds));
    }
  }
  return {worst <= 1e-6, std::to_string(families.size()) + " families x 20 points, max relative deviation " +
                             sci(worst)};
}

Outcome large_stretch() {
  const Clock clock;
  try {
    const auto result = generate_nested(100, table_for(WeightFamily::legendre(), 700), OptimizerConfig{});
    const auto& p = result.pair;
    return {true, "(" + std::to_string(p.fine.size()) + "," + std::to_string(p.coarse.exactness_degree) +
                      "," + std::to_string(p.fine.exactness_degree) + ") after " +
                      std::to_string(result.report.total_iterations) + " iterations, " +
                      secs(clock.seconds())};
  } catch (const Error& e) {
    return {false, std::string(e.what()) + " after " + secs(clock.seconds())};
  }
}

bool same_rule(const QuadratureRule& a, const QuadratureRule& b) {
  return a.nodes == b.nodes && a.weights == b.weights && a.exactness_degree == b.exactness_degree;
}

// Neumaier summation: sparse-grid weights reach O(100) and cancel.
double sum(const std::vector<double>& v) {
  double s = 0.0;
  double c = 0.0;
  for (double x : v) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

Outcome properties(const Artifacts& art) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("nestquad-acceptance-" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  std::vector<std::string> failures;
  auto check = [&failures](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  auto rule_props = [&](const QuadratureRule& r, const std::string& name) {
    check(*std::min_element(r.weights.begin(), r.weights.end()) > 0.0, name + " positivity");
    check(std::abs(sum(r.weights) - 1.0) <= 1e-12, name + " weight sum");
  };
  int file = 0;
  for (const auto& a : art.pairs) {
    rule_props(a.pair.coarse, a.name + " coarse");
    rule_props(a.pair.fine, a.name + " fine");
    bool nested_ok = a.pair.subset_map.size() == a.pair.coarse.size();
    for (std::size_t i = 0; nested_ok && i < a.pair.coarse.size(); ++i) {
      nested_ok = a.pair.coarse.nodes[i] == a.pair.fine.nodes[a.pair.subset_map[i]];
    }
    check(nested_ok, a.name + " subset map");
    const auto path = dir / ("pair" + std::to_string(file++) + ".json");
    save(make_record(a.pair, OptimizerConfig{}, 0), path);
    const auto back = std::get<NestedRulePair>(load(path).payload);
    check(same_rule(back.fine, a.pair.fine) && same_rule(back.coarse, a.pair.coarse) &&
              back.subset_map == a.pair.subset_map,
          a.name + " round trip");
    const auto again = a.rerun();
    check(same_rule(again.fine, a.pair.fine) && same_rule(again.coarse, a.pair.coarse),
          a.name + " rerun");
  }
  for (const auto& a : art.rules) {
    rule_props(a.rule, a.name);
    const auto path = dir / ("rule" + std::to_string(file++) + ".json");
    save(make_record(a.rule, RuleMode::Patterson, OptimizerConfig{}, 0), path);
    check(same_rule(std::get<QuadratureRule>(load(path).payload), a.rule), a.name + " round trip");
    check(same_rule(a.rerun(), a.rule), a.name + " rerun");
  }
  for (const auto& a : art.grids) {
    check(std::abs(sum(a.grid.points.weights) - 1.0) <= 1e-12, a.name + " weight sum");
    const auto path = dir / ("grid" + std::to_string(file++) + ".json");
    save_grid(a.grid, path);
    const auto back = load_grid(path);
    check(back.points.coords == a.grid.points.coords && back.points.weights == a.grid.points.weights,
          a.name + " round trip");
    const auto again = a.rerun();
    check(again.points.coords == a.grid.points.coords &&
              again.points.weights == a.grid.points.weights,
          a.name + " rerun");
  }
  std::filesystem::remove_all(dir);
  Outcome o;
  o.pass = failures.empty();
  o.detail = std::to_string(art.pairs.size()) + " pairs, " + std::to_string(art.rules.size()) +
             " rules, " + std::to_string(art.grids.size()) + " grids";
  for (const auto& f : failures) o.detail += "; " + f;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  bool large = false;
  app.add_flag("--large", large, "Also run the n1 = 100 Legendre stretch case");
  CLI11_PARSE(app, argc, argv);

  Artifacts art;
  int failed = 0;
  auto report = [&failed](const std::string& id, const std::string& title, const Outcome& o,
                          bool gating = true) {
    const char* tag = o.pass ? "PASS" : (gating ? "FAIL" : "INFO");
    if (!o.pass && gating) ++failed;
    std::cout << tag << "  " << id << "  " << title << " | " << o.detail << std::endl;
  };
  auto guarded = [](const std::function<Outcome()>& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };

  report("1", "Kronrod relationship, Legendre n1=1..10",
         guarded([&] { return kronrod_legendre(art); }));
  report("2", "Legendre n1=7 pair and moment oracle", guarded([&] { return legendre_seven(art); }));
  report("3", "Jacobi(0,0.3) n1=10", guarded([&] { return jacobi_ten(art); }));
  report("4", "Hermite rho=0 table, n1=1..8", guarded([&] { return hermite_table(art); }));
  report("5", "Patterson Legendre 3/7/15",
         guarded([&] { return patterson(art, WeightFamily::legendre(), {5, 11, 23}); }));
  report("6", "Patterson Chebyshev 3/7/15 and pruning", guarded([&] { return patterson_chebyshev(art); }));
  report("7", "Patterson Hermite rho=1 3/7/15",
         guarded([&] { return patterson(art, WeightFamily::hermite(1.0), {5, 9, 15}); }));
  report("8", "Sparse-grid node counts", guarded([&] { return sparse_counts(art); }));
  report("9", "Smolyak total-degree exactness", guarded([&] { return smolyak_exactness(art); }));
  report("10", "Tensor error bound and product lemma", guarded(tensor_bound));
  report("11", "Analytic vs finite-difference Jacobian", guarded(gradient_check));
  if (large) {
    report("12", "Legendre n1=100 stretch (informational)", guarded(large_stretch), false);
  } else {
    std::cout << "SKIP  12  Legendre n1=100 stretch (informational) | run with --large\n";
  }
  report("13", "Property suite over generated artifacts", guarded([&] { return properties(art); }));

  std::cout << (failed ? "FAILED " + std::to_string(failed) + " criteria" : "ALL CRITERIA PASSED")
            << std::endl;
  return failed ? 1 : 0;
}
