// Acceptance gate: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nrd/audit.hpp"
#include "nrd/balance.hpp"
#include "nrd/cancellation.hpp"
#include "nrd/catalog.hpp"
#include "nrd/generators.hpp"
#include "nrd/nrd.hpp"
#include "nrd/pipeline.hpp"
#include "nrd/substructure.hpp"
#include "nrd/tables.hpp"
#include "oracles.hpp"

using namespace nrd;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fixed(double x, int digits = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  return os.str();
}

// 1 ------------------------------------------------------------------------
void printed_tables(Outcome& o) {
  struct Expect {
    const char* name;
    std::size_t rows;
  };
  const Expect expected[] = {{"or3-into-3lin", 8},   {"r2s2-into-boolbck-j1", 36}, {"r2s2-into-boolbck-j2", 36},
                             {"r1s1-into-p1q1", 18}, {"r1s1-into-p2q2", 18},      {"r2s2-into-p3q3", 36}};
  auto start = Clock::now();
  auto all = tables::all_certificates();
  int ok = 0;
  for (const auto& e : expected) {
    auto it = std::find_if(all.begin(), all.end(), [&](const auto& n) { return n.name == e.name; });
    if (it == all.end()) {
      o.require(false, std::string(e.name) + " missing");
      continue;
    }
    o.require(it->certificate.sigma.size() == e.rows, std::string(e.name) + " row count");
    auto chk = verify_certificate(it->certificate);
    o.require(chk.ok, std::string(e.name) + ": " + chk.detail);
    ok += chk.ok;
  }
  double secs = since(start);
  o.require(secs < 1.0, "time " + fixed(secs));
  o.detail << ok << "/6 tables verify with the stated families in " << fixed(secs) << " s";
}

// 2 ------------------------------------------------------------------------
void balance_suite(Outcome& o) {
  auto witness_ok = [](const Predicate& p, const BalanceReport& r) { return !r.balanced && r.witness && verify_witness(p, *r.witness); };
  auto or2 = fixtures::or_k(2);
  auto l = is_balanced_lattice(or2);
  auto b = is_balanced_bounded(or2, 1);
  o.require(witness_ok(or2, l) && witness_ok(or2, b) && b.witness->terms.size() == 3, "OR2 length-3 witness");

  auto one = fixtures::one_in_three();
  o.require(is_balanced_lattice(one).balanced && is_balanced_bounded(one, 3).balanced, "1-in-3 balanced");

  auto bck = fixtures::boolbck();
  auto k1 = is_balanced_bounded(bck, 1);
  auto k2 = is_balanced_bounded(bck, 2);
  o.require(k1.balanced, "BoolBCK balanced at k=1");
  o.require(witness_ok(bck, k2) && k2.witness->terms.size() == 5 && to_digits(k2.witness->result) == "100010001",
            "BoolBCK 5-term witness giving 100010001");
  o.require(witness_ok(bck, is_balanced_lattice(bck)), "BoolBCK lattice imbalanced");

  auto plus = fixtures::boolbck_plus();
  o.require(is_balanced_lattice(plus).balanced, "BoolBCK+ lattice balanced");
  bool agree = true;
  for (const auto& p : {or2, one, bck, plus}) agree = agree && is_balanced_lattice(p).balanced == is_balanced_bounded(p, 3).balanced;
  o.require(agree, "lattice and bounded methods agree");
  if (k2.witness) {
    o.detail << "BoolBCK: ";
    for (std::size_t i = 0; i < k2.witness->terms.size(); ++i)
      o.detail << (i ? (i % 2 ? " - " : " + ") : "") << to_digits(k2.witness->terms[i]);
    o.detail << " = " << to_digits(k2.witness->result);
  }
}

// 3 ------------------------------------------------------------------------
void exact_nrd(Outcome& o) {
  auto eq = ConditionalPredicate::plain(fixtures::eq(2));
  for (int n = 2; n <= 5; ++n) {
    auto t = Clock::now();
    auto v = nrd_exact(eq, n).value;
    o.require(v == n - 1 && since(t) < 60, "NRD(EQ, " + std::to_string(n) + ") = " + std::to_string(v));
  }
  auto or2 = ConditionalPredicate::plain(fixtures::or_k(2));
  auto t = Clock::now();
  auto v = nrd_exact(or2, 4).value;
  auto brute = nrd_exhaustive(or2, 4);
  o.require(v == brute && v == 6 && since(t) < 60, "NRD(OR2, 4)");
  o.detail << "NRD(EQ, n) = n-1 for n=2..5; NRD(OR2, 4) = " << v << " (exhaustive " << brute << ")";
}

// 4 ------------------------------------------------------------------------
void girth_equivalence(Outcome& o) {
  oracle::Rng rng(4001);
  int disagreements = 0, girth6 = 0;
  for (int t = 0; t < 500; ++t) {
    BipartiteGraph g;
    g.left = oracle::uniform(rng, 1, 5);
    g.right = oracle::uniform(rng, 1, 9 - g.left);
    const int density = oracle::uniform(rng, 20, 70);
    for (int a = 0; a < g.left; ++a)
      for (int b = 0; b < g.right; ++b)
        if (oracle::uniform(rng, 0, 99) < density) g.edges.emplace_back(a, b);
    if (g.edges.empty()) g.edges.emplace_back(0, 0);
    auto gi = girth(g);
    bool long_girth = !gi || *gi >= 6;
    bool c4_free = oracle::bipartite_c4_free(g.left, g.edges);
    bool nrd = verify_nrd(bipartite_instance(g), fixtures::c6_pair()).non_redundant;
    disagreements += (nrd != long_girth) + (long_girth != c4_free);
    girth6 += long_girth;
  }
  o.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
  o.detail << "500 graphs (" << girth6 << " of girth >= 6), " << disagreements << " disagreements";
}

// 5 ------------------------------------------------------------------------
void sat_rediscovery(Outcome& o) {
  {
    auto t = Clock::now();
    FamilySearchOptions opt;
    opt.size_bound = 2;
    auto c = tables::or3_into_3lin();
    auto res = search_families(c.source, c.target, opt);
    bool found = std::any_of(res.families.begin(), res.families.end(), [](const auto& f) {
      return f.first.one_based() == std::vector<Coords>{{1, 2}, {1, 3}, {2, 3}} && verify_certificate(f.second).ok;
    });
    double s = since(t);
    o.require(found && s < 120, "OR3 -> 3LIN* family");
    o.detail << "OR3->3LIN*: " << res.families.size() << " families incl. ({1,2},{1,3},{2,3}) in " << fixed(s, 2)
             << " s; ";
  }
  for (int which : {0, 1}) {
    auto t = Clock::now();
    FamilySearchOptions opt;
    opt.size_bound = 3;
    opt.max_families = 1;
    auto res = search_families(fixtures::r2s2(), fixtures::boolbck_drop(which), opt);
    double s = since(t);
    bool ok = !res.families.empty() && verify_certificate(res.families.front().second).ok;
    for (const auto& set : ok ? res.families.front().first.sets() : std::vector<Coords>{}) ok = ok && set.size() == 3;
    o.require(ok && s < 120, "R2|S2 -> J" + std::to_string(which + 1) + " family with every |I_j| = 3");
    o.detail << "J" << which + 1 << ": " << (ok ? res.families.front().first.str() : "none") << " in " << fixed(s, 2)
             << " s; ";
  }
}

// 6 ------------------------------------------------------------------------
void shrinking_instances(Outcome& o) {
  for (int q : {2, 3}) {
    for (auto inst : {build_R1S1_instance(q, q + 1), build_R2S2_instance(q)}) {
      auto given = check_nrd(inst.graph, inst.predicate, inst.witness);
      auto searched = verify_nrd(inst.graph, inst.predicate, VerifyOptions{1, false});
      o.require(given.non_redundant && searched.non_redundant,
                inst.lemma + " q=" + std::to_string(q) + " verification");
    }
  }
  std::vector<std::pair<double, double>> r1, r2;
  for (int q : {2, 3, 5}) {
    auto a = build_R1S1_instance(q, q + 1);
    r1.emplace_back(static_cast<double>(a.graph.edge_count()), shrinking_report(a.graph).lambda);
    auto b = build_R2S2_instance(q);
    r2.emplace_back(static_cast<double>(b.graph.edge_count()), shrinking_report(b.graph).lambda);
  }
  double e1 = fit_shrinking_epsilon(r1), e2 = fit_shrinking_epsilon(r2);
  o.require(std::abs(e1 - 0.25) <= 0.10, "R1|S1 epsilon " + fixed(e1, 4));
  o.require(std::abs(e2 - 1.0 / 6.0) <= 0.12, "R2|S2 epsilon " + fixed(e2, 4));
  o.detail << "q=2,3 verified both ways; epsilon R1|S1 = " << fixed(e1, 4) << " (1/4), R2|S2 = " << fixed(e2, 4)
           << " (1/6)";
}

// 7 ------------------------------------------------------------------------
void pipelines(Outcome& o) {
  std::vector<ShrinkingInstance> r2, r1;
  for (int q : {2, 3, 5}) {
    r2.push_back(build_R2S2_instance(q));
    r1.push_back(build_R1S1_instance(q, q + 1));
  }
  auto j1 = run_reduction(r2, tables::r2s2_into_j1());
  auto c2 = run_reduction(r1, tables::r1s1_into_p1q1());
  for (const auto& s : j1.steps) o.require(s.verified, "J1 output q=" + std::to_string(s.q));
  for (const auto& s : c2.steps) o.require(s.verified, "P1|Q1 output q=" + std::to_string(s.q));
  o.require(std::abs(j1.fit.exponent - 1.2) <= 0.15, "J1 exponent " + fixed(j1.fit.exponent, 4));
  o.require(std::abs(c2.fit.exponent - 4.0 / 3.0) <= 0.15, "P1|Q1 exponent " + fixed(c2.fit.exponent, 4));
  o.detail << "J1 (n,m):";
  for (const auto& s : j1.steps) o.detail << " (" << s.vertices << "," << s.edges << ")";
  o.detail << " exponent " << fixed(j1.fit.exponent, 4) << " (6/5); P1|Q1 (n,m):";
  for (const auto& s : c2.steps) o.detail << " (" << s.vertices << "," << s.edges << ")";
  o.detail << " exponent " << fixed(c2.fit.exponent, 4) << " (4/3)";
}

// 8 ------------------------------------------------------------------------
void conditional_to_plain_suite(Outcome& o) {
  auto pq = fixtures::c6_pair();
  auto g = gen_girth6(2).graph;
  auto h = bipartite_instance(g);
  auto ws = std::make_shared<std::vector<Assignment>>();
  for (std::size_t e = 0; e < g.edges.size(); ++e) ws->push_back(girth6_witness(g, e));
  o.require(check_nrd(h, pq, *ws).non_redundant, "source instance");
  const int v_prime = 4;
  auto lb = build_plain_lb_instance(h.graph(), [ws](std::size_t e, Assignment& a) { a = (*ws)[e]; }, pq, v_prime);
  auto chk = check_nrd(lb.graph, lb.predicate, lb.witness);
  o.require(chk.non_redundant, "lifted witnesses: " + chk.reason);
  o.require(lb.graph.edge_count() == h.edge_count() * 6, "|E'| = |E| * C(4,2)");
  auto slice = argmax_slice(lb.graph, {2, 3});
  o.require(slice.total == lb.graph.edge_count(), "slices partition E'");
  o.require(slice.size * lb.subsets == lb.graph.edge_count() && slice.size == h.edge_count(),
            "argmax slice = |E'| / C(|V'|, r)");
  o.detail << "|R| = " << lb.predicate.base().size() << ", |E'| = " << lb.graph.edge_count()
           << ", all witnesses verify, argmax slice " << slice.size << " = " << lb.graph.edge_count() << "/"
           << lb.subsets;
}

// 9 ------------------------------------------------------------------------
void cancellation_suite(Outcome& o) {
  o.require(to_digits(cancel(parse_digits("0221221"))) == "0", "0221221 -> 0");
  std::vector<Tuple> cols;
  for (auto c : tables::kCat5MatrixColumns) cols.push_back(parse_digits(c));
  auto m = catalan_matrix_check(fixtures::cat5_plus(), cols);
  o.require(m.residual && to_digits(*m.residual) == "00000" && !fixtures::cat5().contains(*m.residual),
            "matrix residual 00000 outside Cat5");
  o.require(catalan_search(fixtures::cat5_plus(), 5).empty(), "Cat5+ has no violations");
  oracle::Rng rng(9001);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    Word w(static_cast<std::size_t>(oracle::uniform(rng, 0, 15)));
    const int d = oracle::uniform(rng, 1, 3);
    for (auto& s : w) s = oracle::uniform(rng, 0, d - 1);
    Word expect = cancel(w);
    for (int k = 0; k < 10; ++k) {
      Word x = w;
      for (;;) {
        std::vector<std::size_t> spots;
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
          if (x[i] == x[i + 1]) spots.push_back(i);
        if (spots.empty()) break;
        auto i = spots[static_cast<std::size_t>(oracle::uniform(rng, 0, static_cast<int>(spots.size()) - 1))];
        x.erase(x.begin() + static_cast<long>(i), x.begin() + static_cast<long>(i) + 2);
      }
      bad += x != expect;
    }
  }
  o.require(bad == 0, "confluence");
  o.detail << "0221221 -> 0; residual 00000; Cat5+ clean at length 5; 1000 words x 10 orders confluent";
}

// 10 -----------------------------------------------------------------------
void sigma_audit(Outcome& o) {
  auto t = Clock::now();
  auto rep = paper_verify();
  double secs = since(t);
  int pass = 0, rows = 0;
  bool sigma6 = false;
  for (const auto& i : rep.items) {
    if (i.group != "sigma") continue;
    ++rows;
    pass += i.status == AuditStatus::kPass;
    if (i.name.rfind("sigma_6", 0) == 0)
      sigma6 = i.status == AuditStatus::kAnomaly && i.detail.find("not a bijection") != std::string::npos &&
               i.detail.find("repair search") != std::string::npos;
  }
  o.require(rows == 7, "seven rows checked");
  o.require(pass >= 6, std::to_string(pass) + " rows certify");
  o.require(sigma6, "sigma_6 reported as non-bijection with repair attempt");
  o.require(secs < 30, "audit time " + fixed(secs, 2));
  o.detail << pass << "/7 rows certify, sigma_6 anomaly with repair; full audit " << fixed(secs, 2) << " s ("
           << rep.count(AuditStatus::kPass) << " pass, " << rep.count(AuditStatus::kAnomaly) << " anomaly, "
           << rep.count(AuditStatus::kFail) << " fail)";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"printed-table suite", printed_tables},
      {"balance suite", balance_suite},
      {"exact NRD", exact_nrd},
      {"C6*|C6 non-redundancy vs girth", girth_equivalence},
      {"SAT re-discovery", sat_rediscovery},
      {"shrinking instances", shrinking_instances},
      {"end-to-end pipelines", pipelines},
      {"conditional-to-plain", conditional_to_plain_suite},
      {"cancellation suite", cancellation_suite},
      {"sigma-table audit", sigma_audit},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    auto t = Clock::now();
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    failed += !o.pass;
    std::cout << "criterion " << k + 1 << " (" << criteria[k].first << "): " << (o.pass ? "PASS" : "FAIL") << " ["
              << fixed(since(t), 2) << " s] " << o.detail.str() << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria pass"
            << std::endl;
  return failed ? 1 : 0;
}
