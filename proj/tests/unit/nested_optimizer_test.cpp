#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace nestquad;

namespace {

RecurrenceTable table_for(const WeightFamily& family) {
  return recurrence_coefficients(family, 80);
}

double weight_sum(const QuadratureRule& r) {
  double s = 0.0;
  for (double w : r.weights) s += w;
  return s;
}

void expect_valid_pair(const NestedRulePair& pair, const RecurrenceTable& table) {
  ASSERT_EQ(pair.subset_map.size(), pair.coarse.size());
  for (std::size_t i = 0; i < pair.coarse.size(); ++i) {
    EXPECT_EQ(pair.coarse.nodes[i], pair.fine.nodes[pair.subset_map[i]]) << "i=" << i;
  }
  for (const auto* r : {&pair.coarse, &pair.fine}) {
    EXPECT_TRUE(std::is_sorted(r->nodes.begin(), r->nodes.end()));
    EXPECT_GT(*std::min_element(r->weights.begin(), r->weights.end()), 0.0);
    EXPECT_NEAR(weight_sum(*r), 1.0, 1e-12);
    for (double x : r->nodes) EXPECT_TRUE(table.family.domain().contains(x));
  }
  EXPECT_LT(pair.coarse.exactness_degree, pair.fine.exactness_degree);
  const auto fine = verify_rule(pair.fine, ensure_capacity(table, pair.fine.exactness_degree),
                                pair.fine.exactness_degree);
  EXPECT_LE(fine.norm, 1e-12);
}

}  // namespace

TEST(Initialize, InterlacedLegendre) {
  const auto table = table_for(WeightFamily::legendre());
  const auto init = initialize(3, table, 11);
  EXPECT_EQ(init.n2, 7);
  EXPECT_EQ(init.alpha1, 5);
  EXPECT_EQ(init.subset_map, (std::vector<int>{1, 3, 5}));
  EXPECT_EQ(init.d.size(), 3 + 2 * 7);
  EXPECT_TRUE(std::is_sorted(init.d.data(), init.d.data() + 7));
}

TEST(Initialize, SingleCoarseNodeAtCenter) {
  for (const auto& family : {WeightFamily::legendre(), WeightFamily::chebyshev(),
                             WeightFamily::hermite(0.0)}) {
    const auto init = initialize(1, table_for(family), 5);
    EXPECT_EQ(init.subset_map, std::vector<int>{1});
    EXPECT_NEAR(init.d(1), 0.0, 1e-15) << family.label();
  }
}

TEST(Initialize, HermiteNodesShrunk) {
  const auto table = table_for(WeightFamily::hermite(0.0));
  const auto init = initialize(7, table, 23);
  const auto g15 = gauss_rule(table, 15);
  const double span = init.d(14) - init.d(0);
  EXPECT_LT(span, g15.nodes.back() - g15.nodes.front());
}

TEST(GenerateNested, LegendreSevenPoints) {
  const auto table = table_for(WeightFamily::legendre());
  const auto result = generate_nested(7, table, OptimizerConfig{});
  EXPECT_EQ(result.pair.fine.size(), 15u);
  EXPECT_EQ(result.pair.coarse.exactness_degree, 13);
  EXPECT_EQ(result.pair.fine.exactness_degree, 23);
  EXPECT_LE(pair_residual_norm(result.pair, table), 1e-12);
  expect_valid_pair(result.pair, table);
}

TEST(GenerateNested, KronrodRelationSymmetricWeights) {
  // Legendre hits 3 n1 + 1 (even n1) and 3 n1 + 2 (odd n1). Chebyshev is at
  // least as good: its Lobatto-type extension integrates up to 4 n1 - 1.
  for (const auto& family : {WeightFamily::legendre(), WeightFamily::chebyshev()}) {
    const auto table = table_for(family);
    for (int n1 = 1; n1 <= 10; ++n1) {
      SCOPED_TRACE(family.label() + " n1=" + std::to_string(n1));
      const auto result = generate_nested(n1, table, OptimizerConfig{});
      const int kronrod = n1 % 2 == 0 ? 3 * n1 + 1 : 3 * n1 + 2;
      EXPECT_EQ(result.pair.fine.size(), static_cast<std::size_t>(2 * n1 + 1));
      EXPECT_EQ(result.pair.coarse.exactness_degree, 2 * n1 - 1);
      if (family.kind() == FamilyKind::Legendre) {
        EXPECT_EQ(result.pair.fine.exactness_degree, kronrod);
      } else {
        EXPECT_GE(result.pair.fine.exactness_degree, kronrod);
      }
      EXPECT_LE(pair_residual_norm(result.pair, table), 1e-12);
      expect_valid_pair(result.pair, table);
    }
  }
}

TEST(GenerateNested, KronrodRelationAsymmetricJacobi) {
  // Without symmetry there is no parity bonus: 3 n1 + 1 for every n1.
  const auto table = table_for(WeightFamily::jacobi(0.0, 0.3));
  for (int n1 = 1; n1 <= 10; ++n1) {
    SCOPED_TRACE("n1=" + std::to_string(n1));
    const auto result = generate_nested(n1, table, OptimizerConfig{});
    EXPECT_GE(result.pair.fine.exactness_degree, 3 * n1 + 1);
    EXPECT_LE(pair_residual_norm(result.pair, table), 1e-12);
    expect_valid_pair(result.pair, table);
  }
}

TEST(GenerateNested, JacobiTenPoints) {
  const auto table = table_for(WeightFamily::jacobi(0.0, 0.3));
  const auto result = generate_nested(10, table, OptimizerConfig{});
  EXPECT_EQ(result.pair.fine.size(), 21u);
  EXPECT_EQ(result.pair.coarse.exactness_degree, 19);
  EXPECT_EQ(result.pair.fine.exactness_degree, 31);
}

TEST(GenerateNested, HermiteThreePoints) {
  const auto table = table_for(WeightFamily::hermite(0.0));
  const auto result = generate_nested(3, table, OptimizerConfig{});
  EXPECT_EQ(result.pair.fine.size(), 7u);
  EXPECT_EQ(result.pair.coarse.exactness_degree, 5);
  EXPECT_EQ(result.pair.fine.exactness_degree, 9);
  expect_valid_pair(result.pair, table);
}

TEST(GenerateNested, Deterministic) {
  const auto table = table_for(WeightFamily::jacobi(0.0, 0.3));
  const auto a = generate_nested(4, table, OptimizerConfig{});
  const auto b = generate_nested(4, table, OptimizerConfig{});
  EXPECT_EQ(a.pair.fine.nodes, b.pair.fine.nodes);
  EXPECT_EQ(a.pair.fine.weights, b.pair.fine.weights);
  EXPECT_EQ(a.pair.coarse.weights, b.pair.coarse.weights);
  EXPECT_EQ(a.report.total_iterations, b.report.total_iterations);
}

TEST(GenerateNested, SinkSeesEveryIteration) {
  const auto table = table_for(WeightFamily::legendre());
  int calls = 0;
  const auto result = generate_nested(2, table, OptimizerConfig{},
                                      [&calls](const IterationRecord&) { ++calls; });
  EXPECT_EQ(calls, result.report.total_iterations);
  EXPECT_FALSE(result.report.attempts.empty());
}

TEST(GenerateNested, RejectsBadInput) {
  const auto table = table_for(WeightFamily::legendre());
  EXPECT_THROW(generate_nested(0, table, OptimizerConfig{}), Error);
  OptimizerConfig c;
  c.alpha2_initial = 3;
  EXPECT_THROW(generate_nested(2, table, c), Error);
}

TEST(GenerateNested, UnreachableTargetReportsBestResidual) {
  const auto table = table_for(WeightFamily::legendre());
  OptimizerConfig c;
  c.max_iterations = 3;
  c.epsilon = 1e-15;
  try {
    generate_nested(6, table, c);
    FAIL() << "expected failure";
  } catch (const NoConvergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
    EXPECT_TRUE(std::isfinite(e.best_residual()));
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Feasibility);
  }
}

namespace {

void expect_patterson(const WeightFamily& family, const std::vector<int>& alphas) {
  const auto table = table_for(family);
  QuadratureRule base = gauss_rule(table, 1);
  std::size_t expected = 1;
  for (int alpha : alphas) {
    const auto ext = extend_patterson(base, table, OptimizerConfig{});
    expected = 2 * expected + 1;
    ASSERT_EQ(ext.rule.size(), expected);
    EXPECT_EQ(ext.rule.exactness_degree, alpha) << family.label() << " n=" << expected;
    EXPECT_LE(ext.rule.residual_norm, 1e-12);
    ASSERT_EQ(ext.base_map.size(), base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_EQ(ext.rule.nodes[ext.base_map[i]], base.nodes[i]);
    }
    EXPECT_NEAR(weight_sum(ext.rule), 1.0, 1e-12);
    EXPECT_GT(*std::min_element(ext.rule.weights.begin(), ext.rule.weights.end()), 0.0);
    base = ext.rule;
  }
}

}  // namespace

TEST(ExtendPatterson, Legendre) { expect_patterson(WeightFamily::legendre(), {5, 11, 23}); }

TEST(ExtendPatterson, Chebyshev) { expect_patterson(WeightFamily::chebyshev(), {5, 11, 23}); }

TEST(ExtendPatterson, HermiteRhoOne) { expect_patterson(WeightFamily::hermite(1.0), {5, 9, 15}); }

TEST(PruneNegligible, NoOpWithoutSmallWeights) {
  const auto table = table_for(WeightFamily::legendre());
  const auto g = gauss_rule(table, 5);
  const auto pruned = prune_negligible(g, table, OptimizerConfig{});
  EXPECT_EQ(pruned.nodes, g.nodes);
  EXPECT_EQ(pruned.weights, g.weights);
}

TEST(PruneNegligible, DropsZeroWeightNode) {
  const auto table = table_for(WeightFamily::legendre());
  const auto g = gauss_rule(table, 3);
  QuadratureRule padded = g;
  padded.nodes = {g.nodes[0], g.nodes[1], 0.5, g.nodes[2]};
  padded.weights = {g.weights[0], g.weights[1], 0.0, g.weights[2]};
  const auto pruned = prune_negligible(padded, table, OptimizerConfig{});
  EXPECT_EQ(pruned.nodes, g.nodes);
  EXPECT_EQ(pruned.weights, g.weights);
  EXPECT_NEAR(verify_rule(pruned, table, 5).norm, verify_rule(padded, table, 5).norm, 1e-16);
}

TEST(HermiteToLaguerre, GaussTwoFoldsToOneNode) {
  const auto g = gauss_rule(table_for(WeightFamily::hermite(0.0)), 2);
  const auto lag = hermite_to_laguerre(g, 0.0);
  ASSERT_EQ(lag.size(), 1u);
  EXPECT_NEAR(lag.nodes[0], 0.5, 1e-15);
  EXPECT_NEAR(lag.weights[0], 1.0, 1e-15);
  EXPECT_EQ(lag.family, WeightFamily::laguerre(-0.5));
  // Laguerre rho = -1/2: E[1] = 1, E[x] = 1/2.
  EXPECT_NEAR(lag.weights[0] * lag.nodes[0], oracle::moment_d({oracle::Weight::Laguerre, -0.5}, 1),
              1e-15);
}

TEST(HermiteToLaguerre, FoldedPairStaysExact) {
  const auto htable = table_for(WeightFamily::hermite(1.0));
  const auto pair = generate_nested(4, htable, OptimizerConfig{}).pair;
  const auto lag = hermite_to_laguerre(pair, 1.0);
  EXPECT_EQ(lag.coarse.size(), 2u);
  EXPECT_EQ(lag.fine.size(), 5u);
  EXPECT_EQ(lag.fine.exactness_degree, pair.fine.exactness_degree / 2);
  const auto ltable = table_for(WeightFamily::laguerre(0.0));
  EXPECT_LE(verify_rule(lag.fine, ltable, lag.fine.exactness_degree).norm, 1e-11);
  EXPECT_LE(verify_rule(lag.coarse, ltable, lag.coarse.exactness_degree).norm, 1e-11);
  for (std::size_t i = 0; i < lag.coarse.size(); ++i) {
    EXPECT_EQ(lag.coarse.nodes[i], lag.fine.nodes[lag.subset_map[i]]);
  }
}

TEST(HermiteToLaguerre, AsymmetricRuleRejected) {
  QuadratureRule r;
  r.family = WeightFamily::hermite(0.0);
  r.nodes = {-0.5, 0.9};
  r.weights = {0.5, 0.5};
  EXPECT_THROW(hermite_to_laguerre(r, 0.0), Error);
}
