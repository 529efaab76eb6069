#include <gtest/gtest.h>

#include "nrd/catalog.hpp"
#include "nrd/generators.hpp"
#include "nrd/json_io.hpp"
#include "nrd/tables.hpp"

using namespace nrd;
using io::Json;

TEST(JsonIo, CatalogRoundTrip) {
  for (const auto& name : catalog_names()) {
    auto e = catalog(name);
    if (auto* p = std::get_if<Predicate>(&e)) {
      auto text = io::to_json(*p).dump();
      EXPECT_EQ(io::predicate_from_json(Json::parse(text)), *p) << name;
    } else {
      const auto& pq = std::get<ConditionalPredicate>(e);
      EXPECT_EQ(io::conditional_from_json(Json::parse(io::to_json(pq).dump())), pq) << name;
    }
  }
}

TEST(JsonIo, TuplesAsArraysOrDigits) {
  auto p = io::predicate_from_json(Json::parse(R"({"domain": 3, "arity": 2, "tuples": [[0, 1], "21"]})"));
  EXPECT_EQ(p, Predicate(3, 2, {{0, 1}, {2, 1}}));
  EXPECT_THROW(io::predicate_from_json(Json::parse(R"({"domain": 2, "tuples": [[0, 2]]})")), std::invalid_argument);
  EXPECT_THROW(io::predicate_from_json(Json::parse(R"({"tuples": []})")), std::invalid_argument);
}

TEST(JsonIo, BarePredicateReadsAsPlainConditional) {
  auto pq = io::conditional_from_json(io::to_json(fixtures::or_k(2)));
  EXPECT_EQ(pq, ConditionalPredicate::plain(fixtures::or_k(2)));
}

TEST(JsonIo, InstanceAndWitnessRoundTrip) {
  auto inst = build_R1S1_instance(2, 2);
  auto j = io::to_json(inst.graph);
  auto back = io::partite_from_json(j);
  EXPECT_EQ(back.edges(), inst.graph.edges());
  EXPECT_EQ(back.parts(), inst.graph.parts());
  auto ws = inst.witnesses();
  auto wj = io::witnesses_to_json(inst.graph.graph(), ws);
  EXPECT_EQ(io::witnesses_from_json(back.graph(), wj), ws);
  EXPECT_TRUE(wj.contains("1"));
  EXPECT_FALSE(wj.contains("0"));
}

TEST(JsonIo, FlatHypergraphRoundTrip) {
  Hypergraph h(2, {"x", "y", "z"}, {{0, 1}, {1, 2}});
  auto back = io::hypergraph_from_json(Json::parse(io::to_json(h).dump()));
  EXPECT_EQ(back.edges(), h.edges());
  EXPECT_EQ(back.labels(), h.labels());
}

TEST(JsonIo, MissingWitnessRejected) {
  Hypergraph h(2, {"x", "y"}, {{0, 1}});
  EXPECT_THROW(io::witnesses_from_json(h, Json::object()), std::invalid_argument);
  EXPECT_THROW(io::witnesses_from_json(h, Json::parse(R"({"1": {"w": 0}})")), std::invalid_argument);
}

TEST(JsonIo, CertificateRoundTripIsOneBased) {
  for (const auto& named : tables::all_certificates()) {
    auto j = io::to_json(named.certificate);
    auto back = io::certificate_from_json(Json::parse(j.dump()));
    EXPECT_EQ(back.sigma, named.certificate.sigma) << named.name;
    EXPECT_EQ(back.family.sets(), named.certificate.family.sets()) << named.name;
    EXPECT_TRUE(back.source == named.certificate.source);
  }
  auto j = io::to_json(tables::or3_into_3lin());
  EXPECT_EQ(j["family"].dump(), "[[1,2],[1,3],[2,3]]");
  EXPECT_EQ(j["sigma"]["000"], "000");
}

TEST(JsonIo, DeterministicDump) {
  auto a = io::to_json(tables::r2s2_into_j1()).dump();
  auto b = io::to_json(tables::r2s2_into_j1()).dump();
  EXPECT_EQ(a, b);
}
