#include <gtest/gtest.h>

#include "nrd/sat.hpp"
#include "oracles.hpp"

using namespace nrd;

namespace {

sat::CnfFormula formula(int vars, const std::vector<std::vector<int>>& clauses) {
  sat::CnfFormula f;
  for (int v = 1; v <= vars; ++v) f.new_var("v" + std::to_string(v));
  for (const auto& c : clauses) f.add_clause(c);
  return f;
}

}  // namespace

TEST(Sat, ContradictionIsUnsat) {
  EXPECT_EQ(sat::solve(formula(1, {{1}, {-1}})).status, sat::Status::kUnsat);
}

TEST(Sat, ModelSatisfiesFormula) {
  auto f = formula(3, {{1, 2}, {-1, 3}, {-3, -2}});
  auto res = sat::solve(f);
  ASSERT_EQ(res.status, sat::Status::kSat);
  EXPECT_TRUE(sat::satisfies(f, res.model));
}

TEST(Sat, PigeonholeFourIntoThreeIsUnsat) {
  // p(i,h): pigeon i in hole h, variable 3*i + h + 1.
  std::vector<std::vector<int>> cl;
  for (int i = 0; i < 4; ++i) cl.push_back({3 * i + 1, 3 * i + 2, 3 * i + 3});
  for (int h = 0; h < 3; ++h)
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) cl.push_back({-(3 * i + h + 1), -(3 * j + h + 1)});
  EXPECT_EQ(sat::solve(formula(12, cl)).status, sat::Status::kUnsat);
}

TEST(Sat, ConflictBudgetRaisesResourceError) {
  std::vector<std::vector<int>> cl;
  const int p = 8, holes = 7;
  auto var = [&](int i, int h) { return i * holes + h + 1; };
  for (int i = 0; i < p; ++i) {
    std::vector<int> c;
    for (int h = 0; h < holes; ++h) c.push_back(var(i, h));
    cl.push_back(c);
  }
  for (int h = 0; h < holes; ++h)
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j) cl.push_back({-var(i, h), -var(j, h)});
  EXPECT_THROW(sat::solve(formula(p * holes, cl), sat::SolverOptions{5}), ResourceError);
}

TEST(Sat, DimacsRoundTrip) {
  auto f = formula(4, {{1, -2}, {3, 4, -1}, {-4}});
  auto text = sat::to_dimacs(f);
  EXPECT_NE(text.find("p cnf 4 3"), std::string::npos);
  auto g = sat::parse_dimacs(text);
  EXPECT_EQ(g.num_vars(), 4);
  EXPECT_EQ(g.clauses(), f.clauses());
  EXPECT_EQ(g.registry(), f.registry());
  auto model = sat::parse_model("s SATISFIABLE\nv 1 2 3 -4 0\n", 4);
  EXPECT_TRUE(sat::satisfies(f, model));
}

TEST(Sat, MalformedDimacsRejected) {
  EXPECT_THROW(sat::parse_dimacs("p cnf x y\n"), std::invalid_argument);
  EXPECT_THROW(sat::parse_dimacs("p cnf 2 1\n1 5 0\n"), std::invalid_argument);
}

TEST(SatProperty, AgreesWithTruthTableOnRandom3Cnf) {
  oracle::Rng rng(61);
  int sat_count = 0;
  for (int t = 0; t < 500; ++t) {
    const int vars = oracle::uniform(rng, 3, 20);
    // Around the 4.26 threshold so both outcomes occur.
    const int m = static_cast<int>(vars * (3.0 + (oracle::uniform(rng, 0, 30) / 10.0)));
    std::vector<std::vector<int>> cl;
    for (int c = 0; c < m; ++c) {
      std::vector<int> clause;
      for (int k = 0; k < 3; ++k) {
        int v = oracle::uniform(rng, 1, vars);
        clause.push_back(oracle::uniform(rng, 0, 1) ? v : -v);
      }
      cl.push_back(clause);
    }
    auto f = formula(vars, cl);
    auto res = sat::solve(f);
    bool expect = oracle::cnf_satisfiable(vars, cl);
    ASSERT_EQ(res.status == sat::Status::kSat, expect) << "trial " << t;
    if (expect) {
      EXPECT_TRUE(sat::satisfies(f, res.model));
      ++sat_count;
    }
  }
  EXPECT_GT(sat_count, 50);
  EXPECT_LT(sat_count, 450);
}

TEST(SatProperty, LargerRandomInstancesProduceValidModels) {
  oracle::Rng rng(62);
  for (int t = 0; t < 50; ++t) {
    const int vars = 40;
    std::vector<std::vector<int>> cl;
    for (int c = 0; c < 150; ++c) {
      std::vector<int> clause;
      for (int k = 0; k < 3; ++k) {
        int v = oracle::uniform(rng, 1, vars);
        clause.push_back(oracle::uniform(rng, 0, 1) ? v : -v);
      }
      cl.push_back(clause);
    }
    auto f = formula(vars, cl);
    auto res = sat::solve(f);
    if (res.status == sat::Status::kSat) EXPECT_TRUE(sat::satisfies(f, res.model));
  }
}
