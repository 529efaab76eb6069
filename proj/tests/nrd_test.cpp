#include <gtest/gtest.h>

#include "nrd/catalog.hpp"
#include "nrd/generators.hpp"
#include "nrd/nrd.hpp"
#include "oracles.hpp"

using namespace nrd;

namespace {

Hypergraph graph_on(int n, std::vector<Edge> edges, int arity = 2) {
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i + 1));
  return Hypergraph(arity, labels, std::move(edges));
}

const ConditionalPredicate kEqFull = ConditionalPredicate::plain(fixtures::eq(2));
const ConditionalPredicate kOr2Full = ConditionalPredicate::plain(fixtures::or_k(2));

/// Random hypergraph with distinct edges over n vertices.
Hypergraph random_hypergraph(oracle::Rng& rng, int n, int r, int m) {
  std::set<Edge> es;
  for (int tries = 0; tries < 200 && static_cast<int>(es.size()) < m; ++tries) {
    Edge e;
    for (int i = 0; i < r; ++i) e.push_back(oracle::uniform(rng, 0, n - 1));
    es.insert(e);
  }
  return graph_on(n, {es.begin(), es.end()}, r);
}

/// Random P inside Q inside the full relation, strict at both steps.
std::pair<Predicate, Predicate> random_chain(oracle::Rng& rng, int d, int r) {
  auto full = Predicate::full(d, r);
  for (;;) {
    std::vector<Tuple> p, q;
    for (const auto& t : full.tuples()) {
      int c = oracle::uniform(rng, 0, 2);
      if (c == 0) p.push_back(t);
      if (c <= 1) q.push_back(t);
    }
    if (p.empty() || p.size() == q.size() || q.size() == full.size()) continue;
    return {Predicate(d, r, p), Predicate(d, r, q)};
  }
}

}  // namespace

TEST(VerifyNrd, PathIsNonRedundantForEq) {
  auto h = graph_on(3, {{0, 1}, {1, 2}});
  auto res = verify_nrd(h, kEqFull);
  EXPECT_TRUE(res.non_redundant);
  EXPECT_TRUE(check_nrd(h, kEqFull, res.certificate.witnesses).non_redundant);
}

TEST(VerifyNrd, TriangleIsRedundantForEq) {
  auto res = verify_nrd(graph_on(3, {{0, 1}, {1, 2}, {0, 2}}), kEqFull);
  EXPECT_FALSE(res.non_redundant);
  EXPECT_TRUE(res.failed_edge.has_value());
}

TEST(VerifyNrd, CompleteGraphForOr2WithPaperWitnesses) {
  std::vector<Edge> edges;
  for (int u = 0; u < 4; ++u)
    for (int v = u + 1; v < 4; ++v) edges.push_back({u, v});
  auto h = graph_on(4, edges);
  std::vector<Assignment> ws;
  for (const auto& e : edges) {
    Assignment a(4, 1);
    a[static_cast<std::size_t>(e[0])] = a[static_cast<std::size_t>(e[1])] = 0;
    ws.push_back(a);
  }
  EXPECT_TRUE(check_nrd(h, kOr2Full, ws).non_redundant);
  EXPECT_TRUE(verify_nrd(h, kOr2Full).non_redundant);
}

TEST(VerifyNrd, HeawoodGraphForC6Pair) {
  auto g = gen_girth6(2);
  auto h = bipartite_instance(g.graph);
  EXPECT_TRUE(verify_nrd(h, fixtures::c6_pair()).non_redundant);
}

TEST(VerifyNrd, ArityMismatchRejected) {
  EXPECT_THROW(verify_nrd(graph_on(3, {{0, 1, 2}}, 3), kEqFull), std::invalid_argument);
}

TEST(VerifyNrd, CheckGivenRejectsWrongWitness) {
  auto h = graph_on(3, {{0, 1}, {1, 2}});
  std::vector<Assignment> ws{{0, 0, 0}, {0, 0, 0}};
  auto res = check_nrd(h, kEqFull, ws);
  EXPECT_FALSE(res.non_redundant);
  EXPECT_EQ(res.failed_edge, 0u);
}

TEST(NrdExact, EqIsTreeSize) {
  for (int n = 2; n <= 5; ++n) EXPECT_EQ(nrd_exact(kEqFull, n).value, n - 1) << n;
}

TEST(NrdExact, Or2OnFourVerticesMatchesExhaustive) {
  auto res = nrd_exact(kOr2Full, 4);
  EXPECT_EQ(res.value, nrd_exhaustive(kOr2Full, 4));
  EXPECT_EQ(res.value, 6);
  EXPECT_TRUE(oracle::non_redundant(res.witness_instance, kOr2Full));
}

TEST(NrdExact, PartiteSingleEdgeLowerBound) {
  EXPECT_GE(nrd_exact(ConditionalPredicate::plain(fixtures::or_k(3)), 3, {{1, 1, 1}}).value, 1);
}

TEST(NrdExact, BudgetExhaustionIsAResourceError) {
  NrdExactOptions opt;
  opt.node_budget = 3;
  EXPECT_THROW(nrd_exact(kOr2Full, 4, opt), ResourceError);
}

TEST(NrdProperty, VerifyAgreesWithExhaustiveOracle) {
  oracle::Rng rng(51);
  for (int t = 0; t < 150; ++t) {
    const int d = oracle::uniform(rng, 2, 3), r = oracle::uniform(rng, 2, 3);
    const int n = oracle::uniform(rng, 3, d == 2 ? 7 : 5);
    auto pq = oracle::random_pair(rng, d, r);
    auto h = random_hypergraph(rng, n, r, oracle::uniform(rng, 1, 6));
    auto res = verify_nrd(h, pq);
    ASSERT_EQ(res.non_redundant, oracle::non_redundant(h, pq)) << pq.base().str() << " | " << pq.ambient().str();
    if (res.non_redundant) {
      EXPECT_TRUE(check_nrd(h, pq, res.certificate.witnesses).non_redundant);
    }
  }
}

TEST(NrdProperty, SubInstancesOfNonRedundantInstancesStayNonRedundant) {
  oracle::Rng rng(52);
  int checked = 0;
  for (int t = 0; t < 3000 && checked < 60; ++t) {
    auto pq = oracle::random_pair(rng, 2, 2);
    auto h = random_hypergraph(rng, 6, 2, 6);
    auto res = verify_nrd(h, pq);
    if (!res.non_redundant) continue;
    ++checked;
    std::vector<std::size_t> keep;
    std::vector<Assignment> ws;
    for (std::size_t e = 0; e < h.edge_count(); ++e)
      if (oracle::uniform(rng, 0, 1)) {
        keep.push_back(e);
        ws.push_back(res.certificate.witnesses[e]);
      }
    auto sub = h.with_edges(keep);
    EXPECT_TRUE(check_nrd(sub, pq, ws).non_redundant);
    EXPECT_TRUE(verify_nrd(sub, pq).non_redundant);
  }
  EXPECT_GE(checked, 20);
}

TEST(NrdProperty, TriangleInequalityAtToyScale) {
  oracle::Rng rng(53);
  for (int t = 0; t < 25; ++t) {
    auto [p, q] = random_chain(rng, 2, 2);
    long long lhs = nrd_exact(ConditionalPredicate::plain(p), 4).value;
    long long mid = nrd_exact(ConditionalPredicate(p, q), 4).value;
    long long rhs = nrd_exact(ConditionalPredicate::plain(q), 4).value;
    EXPECT_LE(lhs, mid + rhs) << p.str() << " in " << q.str();
  }
}

TEST(NrdProperty, PermutationInvariance) {
  oracle::Rng rng(54);
  for (int t = 0; t < 20; ++t) {
    const int r = oracle::uniform(rng, 2, 3);
    const int n = r == 2 ? 4 : 3;
    auto pq = oracle::random_pair(rng, 2, r);
    auto sigma = oracle::random_permutation(rng, r);
    auto permuted = permute(pq, sigma);
    EXPECT_EQ(nrd_exact(permuted, n).value, nrd_exact(pq, n).value);
  }
}

TEST(NrdProperty, ExactAgreesWithExhaustive) {
  oracle::Rng rng(55);
  for (int t = 0; t < 30; ++t) {
    auto pq = oracle::random_pair(rng, 2, 2);
    EXPECT_EQ(nrd_exact(pq, 3).value, nrd_exhaustive(pq, 3));
  }
}
