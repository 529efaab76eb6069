#include <gtest/gtest.h>

#include <set>

#include "nrd/generators.hpp"
#include "nrd/hypergraph.hpp"
#include "oracles.hpp"

using namespace nrd;

namespace {

PartiteHypergraph small_partite() {
  return PartiteHypergraph::from_labels({{"a1", "a2"}, {"b1", "b2"}, {"c1"}},
                                        {{"a1", "b1", "c1"}, {"a1", "b2", "c1"}, {"a2", "b2", "c1"}});
}

}  // namespace

TEST(Hypergraph, RejectsDuplicatesAndBadEdges) {
  EXPECT_THROW(Hypergraph(2, {"u", "v"}, {{0, 1}, {0, 1}}), std::invalid_argument);
  EXPECT_THROW(Hypergraph(2, {"u", "u"}, {}), std::invalid_argument);
  EXPECT_THROW(Hypergraph(2, {"u"}, {{0, 1}}), std::invalid_argument);
  EXPECT_THROW(PartiteHypergraph::from_labels({{"a"}, {"b"}}, {{"b", "a"}}), std::invalid_argument);
}

TEST(ProjectInstance, IdentityAndCounts) {
  auto h = small_partite();
  auto full = project_instance(h, {0, 1, 2});
  EXPECT_EQ(full.edges(), h.edges());
  auto p = project_instance(h, {0, 2});
  EXPECT_EQ(p.edge_count(), 2u);
  EXPECT_EQ(p.arity(), 2);
  EXPECT_THROW(project_instance(h, {3}), std::invalid_argument);
}

TEST(ProjectInstance, SingleEdgeStaysSingle) {
  auto h = PartiteHypergraph::from_labels({{"a"}, {"b"}, {"c"}}, {{"a", "b", "c"}});
  EXPECT_EQ(project_instance(h, {1}).edge_count(), 1u);
}

TEST(ProjectionHypergraph, SingletonFamilyIsRelabeling) {
  auto h = small_partite();
  auto ph = projection_hypergraph(h, IndexFamily::singletons(3));
  EXPECT_EQ(ph.graph.edge_count(), h.edge_count());
  EXPECT_EQ(ph.merged, 0u);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(ph.graph.part_size(j), h.part_size(j));
}

TEST(ProjectionHypergraph, FullSetsCopyTheEdgeSet) {
  auto h = small_partite();
  auto ph = projection_hypergraph(h, IndexFamily(3, {{0, 1, 2}, {0, 1, 2}}));
  EXPECT_EQ(ph.graph.edge_count(), 3u);
  EXPECT_EQ(ph.graph.part_size(0), 3);
  EXPECT_EQ(ph.graph.part_size(1), 3);
}

TEST(ProjectionHypergraph, EmptySetIsOneConstantVertex) {
  auto h = small_partite();
  auto ph = projection_hypergraph(h, IndexFamily(3, {{}, {0}, {0}, {1}}));
  EXPECT_EQ(ph.graph.part_size(0), 1);
  EXPECT_EQ(ph.graph.part_size(1), 2);
}

TEST(ProjectionHypergraph, CollisionsAreMergedAndCounted) {
  auto h = small_partite();
  auto ph = projection_hypergraph(h, IndexFamily(3, {{0}, {2}}));
  EXPECT_EQ(ph.graph.edge_count(), 2u);
  EXPECT_EQ(ph.merged, 1u);
}

TEST(ShrinkingReport, DisjointEdgesHaveFactorOne) {
  auto h = PartiteHypergraph::from_labels({{"a1", "a2"}, {"b1", "b2"}}, {{"a1", "b1"}, {"a2", "b2"}});
  auto rep = shrinking_report(h);
  EXPECT_DOUBLE_EQ(rep.lambda, 1.0);
  for (const auto& e : rep.entries) EXPECT_EQ(e.projected, 2u);
}

TEST(ShrinkingReport, ProductCountsMatchDirectSets) {
  auto h = small_partite();
  auto rep = shrinking_report(h);
  EXPECT_EQ(rep.entries.size(), 6u);  // proper nonempty subsets of [3]
  for (const auto& e : rep.entries) {
    std::set<Edge> distinct;
    for (const auto& edge : h.edges()) distinct.insert(project_tuple(edge, e.coords));
    EXPECT_EQ(e.projected, distinct.size());
  }
}

TEST(ToRPartite, AlreadyPartiteIsIdentity) {
  auto h = small_partite();
  auto res = to_r_partite(h.graph(), 7);
  EXPECT_EQ(res.kept.size(), h.edge_count());
  EXPECT_DOUBLE_EQ(res.retained_fraction, 1.0);
}

TEST(ToRPartite, SingleEdgeRetainedWithinRetries) {
  Hypergraph h(3, {"u", "v", "w"}, {{2, 0, 1}});
  auto res = to_r_partite(h, 3, 64, PartitionMode::kSymmetric);
  EXPECT_GE(res.kept.size(), 1u);
}

TEST(ToRPartite, RetainedFractionNearExpectation) {
  oracle::Rng rng(41);
  std::set<Edge> triples;
  while (triples.size() < 100) {
    Edge e{oracle::uniform(rng, 0, 11), oracle::uniform(rng, 0, 11), oracle::uniform(rng, 0, 11)};
    if (e[0] != e[1] && e[1] != e[2] && e[0] != e[2]) triples.insert(e);
  }
  std::vector<std::string> labels;
  for (int i = 0; i < 12; ++i) labels.push_back("v" + std::to_string(i));
  Hypergraph h(3, labels, {triples.begin(), triples.end()});
  double total = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto res = to_r_partite(h, seed, 1, PartitionMode::kSymmetric);
    total += res.retained_fraction;
    EXPECT_NEAR(res.expected_fraction, 6.0 / 27.0, 1e-12);
  }
  double mean = total / 50;
  EXPECT_GE(mean, 0.5 * 6.0 / 27.0);
  EXPECT_LE(mean, 2.0 * 6.0 / 27.0);
}

TEST(Slicing, PartitionAndFullKey) {
  auto h = small_partite().graph();
  auto s = slice_by_projection(h, {0, 1, 2}, h.edge(1));
  ASSERT_EQ(s.edge_count(), 1u);
  EXPECT_EQ(s.edge(0), h.edge(1));
  std::set<Edge> keys;
  for (const auto& e : h.edges()) keys.insert(project_tuple(e, Coords{0}));
  std::size_t sum = 0;
  for (const auto& k : keys) sum += slice_by_projection(h, {0}, k).edge_count();
  EXPECT_EQ(sum, h.edge_count());
  auto best = argmax_slice(h, {0});
  EXPECT_EQ(best.total, h.edge_count());
  EXPECT_EQ(best.size, 2u);
}

TEST(HypergraphProperty, R2S2TripleProjectionCounts) {
  auto inst = build_R2S2_instance(2);
  auto h = inst.graph;
  // |pi_{1,2,3} E| = |E12| * |V3|
  EXPECT_EQ(project_instance(h, {0, 1, 2}).edge_count(), 21u * 7u);
}
