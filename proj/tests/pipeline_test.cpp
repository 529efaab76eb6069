#include <gtest/gtest.h>

#include <cmath>

#include "nrd/catalog.hpp"
#include "nrd/generators.hpp"
#include "nrd/pipeline.hpp"
#include "nrd/substructure.hpp"
#include "nrd/tables.hpp"
#include "oracles.hpp"

using namespace nrd;

namespace {

std::vector<std::string> labels(const std::string& p, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(p + std::to_string(i));
  return out;
}

/// OR3 on all triples of three 2-vertex parts.
PartiteHypergraph or3_cube() {
  std::vector<Edge> es;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) es.push_back({a, 2 + b, 4 + c});
  return PartiteHypergraph({labels("a", 2), labels("b", 2), labels("c", 2)}, es);
}

/// Witness from an independent search, for use as a WitnessFn.
WitnessFn searched(const Hypergraph& h, const ConditionalPredicate& pq) {
  auto res = verify_nrd(h, pq);
  if (!res.non_redundant) throw std::logic_error("source instance is redundant");
  auto ws = std::make_shared<std::vector<Assignment>>(res.certificate.witnesses);
  return [ws](std::size_t e, Assignment& out) { out = (*ws)[e]; };
}

}  // namespace

TEST(ApplyReduction, Or3CubeInto3Lin) {
  auto h = or3_cube();
  auto cert = tables::or3_into_3lin();
  auto out = apply_reduction(h, searched(h, cert.source), cert);
  ASSERT_TRUE(out.check.has_value());
  EXPECT_TRUE(out.check->non_redundant);
  EXPECT_EQ(out.edges(), 8u);
  EXPECT_EQ(out.vertices(), 12u);  // three pair-projections of four values each
  EXPECT_TRUE(verify_nrd(out.projection.graph, cert.target).non_redundant);
}

TEST(ApplyReduction, SingleEdge) {
  auto h = PartiteHypergraph({{"a"}, {"b"}, {"c"}}, {{0, 1, 2}});
  auto cert = tables::or3_into_3lin();
  auto out = apply_reduction(h, searched(h, cert.source), cert);
  EXPECT_EQ(out.edges(), 1u);
  EXPECT_TRUE(out.check->non_redundant);
}

TEST(ApplyReduction, R2S2AtQ2IntoJ1) {
  auto inst = build_R2S2_instance(2);
  auto cert = tables::r2s2_into_j1();
  auto out = apply_reduction(inst.graph, inst.witness, cert);
  EXPECT_EQ(out.edges(), 441u);
  EXPECT_EQ(out.vertices(), 8u * 147u);
  std::size_t sum = 0;
  for (const auto& s : cert.family.sets()) sum += projected_edge_count(inst.graph, s);
  EXPECT_EQ(out.vertices(), sum);
  EXPECT_TRUE(out.check->non_redundant);
}

TEST(ApplyReduction, InvalidInputsRejected) {
  auto h = or3_cube();
  auto cert = tables::or3_into_3lin();
  auto bad = cert;
  bad.family = IndexFamily::from_one_based(3, {{1}, {1}, {2}});
  EXPECT_THROW(apply_reduction(h, searched(h, cert.source), bad), std::invalid_argument);
  auto inst = build_R2S2_instance(2);
  EXPECT_THROW(apply_reduction(inst.graph, inst.witness, cert), std::invalid_argument);
}

TEST(FitExponent, ExactPowerLaws) {
  std::vector<std::pair<double, double>> pts;
  for (double m : {100.0, 1000.0, 20000.0, 500000.0}) pts.emplace_back(std::pow(m, 5.0 / 6.0), m);
  auto fit = fit_exponent(pts);
  EXPECT_NEAR(fit.exponent, 1.2, 1.2e-9);
  EXPECT_NEAR(fit.epsilon, 1.0 / 6.0, 1e-9);
  for (double r : fit.residuals) EXPECT_NEAR(r, 0.0, 1e-9);
}

TEST(FitExponent, RejectsBadInput) {
  EXPECT_THROW(fit_exponent({{1, 2}}), std::invalid_argument);
  EXPECT_THROW(fit_exponent({{1, 5}, {2, 3}}), std::invalid_argument);
  EXPECT_THROW(fit_exponent({{0, 1}, {2, 3}}), std::invalid_argument);
}

TEST(PipelineProperty, FitRecoversRandomPowerLaws) {
  oracle::Rng rng(91);
  for (int t = 0; t < 200; ++t) {
    const double alpha = 1.0 + oracle::uniform(rng, 1, 2000) / 1000.0;
    const double c = 0.1 + oracle::uniform(rng, 1, 1000) / 100.0;
    std::vector<std::pair<double, double>> pts;
    double n = 5 + oracle::uniform(rng, 0, 50);
    for (int k = 0; k < oracle::uniform(rng, 2, 6); ++k) {
      pts.emplace_back(n, c * std::pow(n, alpha));
      n *= 1.5 + oracle::uniform(rng, 0, 300) / 100.0;
    }
    auto fit = fit_exponent(pts);
    EXPECT_LE(std::abs(fit.exponent - alpha) / alpha, 1e-9);
  }
}

TEST(ReductionRun, ReductionPipelinesAtSmallScale) {
  std::vector<ShrinkingInstance> r2{build_R2S2_instance(2), build_R2S2_instance(3)};
  auto run = run_reduction(r2, tables::r2s2_into_j1());
  ASSERT_EQ(run.steps.size(), 2u);
  EXPECT_EQ(run.steps[0].vertices, 1176u);
  EXPECT_EQ(run.steps[1].vertices, 5408u);
  for (const auto& s : run.steps) EXPECT_TRUE(s.verified);
  EXPECT_GT(run.fit.exponent, 1.0);

  std::vector<ShrinkingInstance> r1{build_R1S1_instance(2, 3), build_R1S1_instance(3, 4)};
  EXPECT_THROW(run_reduction(r1, tables::r2s2_into_j1()), std::invalid_argument);
  auto c3 = run_reduction(r1, tables::r1s1_into_p1q1());
  EXPECT_EQ(c3.steps[0].vertices, 63u);
  EXPECT_EQ(c3.steps[1].vertices, 156u);
}

TEST(ConditionalToPlain, C6PairSize) {
  auto r = conditional_to_plain(fixtures::c6_pair());
  EXPECT_EQ(r.arity(), 4);
  // (P x {0,1}^2) u (Q x OR2): 5*4 + 6*3 - 5*3.
  std::size_t direct = 0;
  const auto cube = Predicate::full(3, 4);
  for (const auto& t : cube.tuples()) {
    bool low = t[2] <= 1 && t[3] <= 1;
    bool or2 = low && (t[2] || t[3]);
    Tuple head{t[0], t[1]};
    if ((fixtures::c6_star().contains(head) && low) || (fixtures::c6().contains(head) && or2)) ++direct;
  }
  EXPECT_EQ(r.size(), direct);
  EXPECT_EQ(r.size(), 23u);
}

TEST(ConditionalToPlain, UnaryExampleAndGap) {
  ConditionalPredicate pq(Predicate(2, 1, {{1}}), Predicate(2, 1, {{0}, {1}}));
  EXPECT_EQ(conditional_to_plain(pq), Predicate(2, 2, {{0, 1}, {1, 0}, {1, 1}}));
  auto full = box_product(fixtures::c6_pair(),
                          ConditionalPredicate(Predicate(3, 2, {{0, 1}, {1, 0}, {1, 1}}),
                                               Predicate(3, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}})));
  EXPECT_EQ(full.gap(), Predicate(3, 4, {{0, 0, 0, 0}}));
}

TEST(PlainLowerBound, ToyInstanceVerifiesAndSlices) {
  // Two-edge path for C6*|C6.
  auto h = PartiteHypergraph({{"a1", "a2"}, {"b1"}}, {{0, 2}, {1, 2}});
  auto pq = fixtures::c6_pair();
  auto lb = build_plain_lb_instance(h.graph(), searched(h, pq), pq, 3);
  EXPECT_EQ(lb.graph.edge_count(), 6u);
  EXPECT_EQ(lb.subsets, 3u);
  EXPECT_TRUE(check_nrd(lb.graph, lb.predicate, lb.witness).non_redundant);
  EXPECT_TRUE(oracle::non_redundant(lb.graph, lb.predicate));
  auto best = argmax_slice(lb.graph, {2, 3});
  EXPECT_EQ(best.size, lb.graph.edge_count() / 3);
  EXPECT_EQ(best.total, lb.graph.edge_count());
}

TEST(PlainLowerBound, SubsetCounts) {
  auto pq = fixtures::c6_pair();
  auto one = PartiteHypergraph({{"a"}, {"b"}}, {{0, 1}});
  EXPECT_EQ(build_plain_lb_instance(one.graph(), searched(one, pq), pq, 2).graph.edge_count(), 1u);
  EXPECT_EQ(build_plain_lb_instance(one.graph(), searched(one, pq), pq, 5).graph.edge_count(), 10u);
  EXPECT_THROW(build_plain_lb_instance(one.graph(), searched(one, pq), pq, 1), std::invalid_argument);
}

TEST(PipelineProperty, RandomReductionsPassIndependentSearch) {
  // Random small certificates found by the solver, random small source
  // instances found non-redundant by search.
  oracle::Rng rng(92);
  int done = 0;
  for (int t = 0; t < 2000 && done < 50; ++t) {
    auto src = oracle::random_pair(rng, 2, 2);
    auto tgt = oracle::random_pair(rng, oracle::uniform(rng, 2, 3), oracle::uniform(rng, 2, 3));
    std::vector<Coords> sets;
    for (int j = 0; j < tgt.arity(); ++j) {
      Coords s;
      for (int i = 0; i < 2; ++i)
        if (oracle::uniform(rng, 0, 1)) s.push_back(i);
      sets.push_back(s);
    }
    IndexFamily fam(2, sets);
    auto found = find_substructure(src, tgt, fam);
    if (!found.certificate) continue;
    const int a = oracle::uniform(rng, 1, 3), b = oracle::uniform(rng, 1, 3);
    std::vector<Edge> es;
    for (int u = 0; u < a; ++u)
      for (int v = 0; v < b; ++v)
        if (oracle::uniform(rng, 0, 1)) es.push_back({u, a + v});
    if (es.empty()) continue;
    PartiteHypergraph h({labels("u", a), labels("v", b)}, es);
    auto src_res = verify_nrd(h, src);
    if (!src_res.non_redundant) continue;
    auto ws = std::make_shared<std::vector<Assignment>>(src_res.certificate.witnesses);
    auto out = apply_reduction(h, [ws](std::size_t e, Assignment& o) { o = (*ws)[e]; }, *found.certificate);
    ASSERT_TRUE(out.check && out.check->non_redundant);
    EXPECT_TRUE(verify_nrd(out.projection.graph, tgt).non_redundant);
    std::size_t sum = 0;
    for (const auto& s : fam.sets()) sum += projected_edge_count(h.graph(), s);
    EXPECT_EQ(out.vertices(), sum);
    ++done;
  }
  EXPECT_EQ(done, 50);
}
