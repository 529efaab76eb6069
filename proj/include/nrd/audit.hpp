#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nrd/balance.hpp"
#include "nrd/cancellation.hpp"
#include "nrd/catalog.hpp"
#include "nrd/generators.hpp"
#include "nrd/hypergraph.hpp"
#include "nrd/nrd.hpp"
#include "nrd/pipeline.hpp"
#include "nrd/substructure.hpp"
#include "nrd/tables.hpp"

namespace nrd {

// ---------------------------------------------------------------------------
// Certificate repair

struct CertificateRepair {
  /// Output coordinate k of the repaired map is coordinate permutation[k] of
  /// the printed map.
  std::vector<int> permutation;
  SubstructureCertificate certificate;
};

/// Looks for a permutation of the printed map's output coordinates, paired
/// with a family read off the map's own dependencies, that passes
/// verify_certificate against the stated source and target.
inline std::optional<CertificateRepair> repair_certificate(const SubstructureCertificate& printed) {
  const int r2 = printed.target.arity();
  if (r2 > 8) throw std::invalid_argument("repair_certificate: target arity too large");
  std::vector<int> perm(static_cast<std::size_t>(r2));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    TupleMap sigma;
    for (const auto& [x, y] : printed.sigma) sigma.emplace(x, project_tuple(y, perm));
    bool images_ok = true;
    for (const auto& [x, y] : sigma) {
      if (!printed.source.ambient().contains(x)) continue;
      bool want_base = printed.source.base().contains(x);
      bool in_base = printed.target.base().contains(y);
      if (want_base != in_base || !printed.target.ambient().contains(y)) {
        images_ok = false;
        break;
      }
    }
    if (!images_ok) continue;
    auto deps = dependency_analysis(sigma);
    // Try every combination of minimal dependency sets.
    std::vector<std::size_t> pick(deps.size(), 0);
    for (;;) {
      std::vector<Coords> sets;
      for (std::size_t j = 0; j < deps.size(); ++j) sets.push_back(deps[j][pick[j]]);
      SubstructureCertificate cand{printed.source, printed.target, IndexFamily(printed.source.arity(), sets), sigma};
      if (verify_certificate(cand).ok) return CertificateRepair{perm, std::move(cand)};
      std::size_t j = 0;
      while (j < pick.size() && ++pick[j] == deps[j].size()) pick[j++] = 0;
      if (j == pick.size()) break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Symmetry table

struct SigmaRowCheck {
  int row = 0;
  int printed_target = 0;
  bool bijection = false;
  /// Labels of J_target hit twice or never (1-based), for non-bijections.
  std::vector<int> repeated;
  std::vector<int> missing;
  bool certifies_printed = false;
  /// Which of J_1, J_2 the printed row certifies as a permutation.
  std::vector<int> certified_targets;
  /// Bijections J_i -> J_target (1-based labels by j in J_i) that do certify.
  std::size_t repairs_found = 0;
  std::optional<std::vector<int>> closest_repair;
  int closest_agreement = 0;
};

namespace detail {

inline Coords all_but(int dropped) {
  Coords c;
  for (int k = 0; k < 9; ++k)
    if (k != dropped) c.push_back(k);
  return c;
}

/// Sorted tuple lists of base and gap, the canonical form used for equality.
struct PairForm {
  std::vector<Tuple> base, gap;
  friend bool operator==(const PairForm&, const PairForm&) = default;
};

inline PairForm pair_form(const ConditionalPredicate& pq) { return {pq.base().tuples(), pq.gap().tuples()}; }

inline PairForm permuted_form(const PairForm& f, const std::vector<int>& positions) {
  PairForm out;
  for (const auto& t : f.base) out.base.push_back(project_tuple(t, positions));
  for (const auto& t : f.gap) out.gap.push_back(project_tuple(t, positions));
  std::sort(out.base.begin(), out.base.end());
  std::sort(out.gap.begin(), out.gap.end());
  return out;
}

/// Positions in J_target of the labels (1-based) assigned to J_i, or nullopt
/// when some label is outside J_target.
inline std::optional<std::vector<int>> label_positions(const std::vector<int>& labels, int target) {
  Coords jt = all_but(target - 1);
  std::vector<int> pos;
  for (int lab : labels) {
    auto it = std::find(jt.begin(), jt.end(), lab - 1);
    if (it == jt.end()) return std::nullopt;
    pos.push_back(static_cast<int>(it - jt.begin()));
  }
  return pos;
}

}  // namespace detail

inline SigmaRowCheck check_sigma_row(const tables::SigmaRow& row) {
  SigmaRowCheck out;
  out.row = row.i;
  out.printed_target = row.target;
  const auto pair = fixtures::boolbck_pair();
  const auto source_form = detail::pair_form(project(pair, detail::all_but(row.i - 1)));

  std::vector<int> labels;
  for (int j = 0; j < 9; ++j)
    if (j != row.i - 1) labels.push_back(row.values[static_cast<std::size_t>(j)]);

  auto certifies = [&](const std::vector<int>& labs, int target) {
    auto pos = detail::label_positions(labs, target);
    if (!pos) return false;
    std::vector<int> sorted = *pos;
    std::sort(sorted.begin(), sorted.end());
    for (int k = 0; k < 8; ++k)
      if (sorted[static_cast<std::size_t>(k)] != k) return false;
    auto target_form = detail::pair_form(project(pair, detail::all_but(target - 1)));
    return detail::permuted_form(target_form, *pos) == source_form;
  };

  Coords jt = detail::all_but(row.target - 1);
  std::vector<int> count(10, 0);
  for (int lab : labels) ++count[static_cast<std::size_t>(lab)];
  out.bijection = true;
  for (int c : jt) {
    if (count[static_cast<std::size_t>(c + 1)] == 0) out.missing.push_back(c + 1);
    if (count[static_cast<std::size_t>(c + 1)] > 1) out.repeated.push_back(c + 1);
  }
  if (!out.missing.empty() || !out.repeated.empty() || count[static_cast<std::size_t>(row.target)] != 0)
    out.bijection = false;

  for (int target : {1, 2})
    if (certifies(labels, target)) out.certified_targets.push_back(target);
  out.certifies_printed = out.bijection && certifies(labels, row.target);

  if (!out.certifies_printed) {
    auto target_form = detail::pair_form(project(pair, detail::all_but(row.target - 1)));
    std::vector<int> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      if (detail::permuted_form(target_form, perm) != source_form) continue;
      ++out.repairs_found;
      std::vector<int> cand;
      int agree = 0;
      for (int k = 0; k < 8; ++k) {
        cand.push_back(jt[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] + 1);
        if (cand.back() == labels[static_cast<std::size_t>(k)]) ++agree;
      }
      if (!out.closest_repair || agree > out.closest_agreement) {
        out.closest_repair = cand;
        out.closest_agreement = agree;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Audit driver

enum class AuditStatus { kPass, kFail, kAnomaly };

inline const char* to_string(AuditStatus s) {
  switch (s) {
    case AuditStatus::kPass: return "pass";
    case AuditStatus::kFail: return "fail";
    case AuditStatus::kAnomaly: return "anomaly";
  }
  return "?";
}

struct AuditItem {
  std::string group;
  std::string name;
  AuditStatus status = AuditStatus::kPass;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditItem> items;

  bool ok() const {
    return std::none_of(items.begin(), items.end(), [](const AuditItem& i) { return i.status == AuditStatus::kFail; });
  }
  std::size_t count(AuditStatus s) const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(), [s](const AuditItem& i) { return i.status == s; }));
  }
};

struct AuditOptions {
  /// Groups to run; empty runs everything.
  std::set<std::string> only;
  unsigned workers = 1;
  /// Also run independent witness search on the larger instances and
  /// check-given verification of every pipeline output.
  bool thorough = false;
};

inline const std::vector<std::string>& audit_groups() {
  static const std::vector<std::string> groups{"catalog", "small-nrd", "balance",   "tables",    "sigma",
                                               "cat5",    "girth",     "instances", "pipelines"};
  return groups;
}

namespace detail {

class Auditor {
 public:
  explicit Auditor(const AuditOptions& opt) : opt_(opt) {
    for (const auto& g : opt.only)
      if (std::find(audit_groups().begin(), audit_groups().end(), g) == audit_groups().end())
        throw std::invalid_argument("paper_verify: unknown group '" + g + "'");
  }

  AuditReport run() {
    section("catalog", [this] { catalog(); });
    section("small-nrd", [this] { small_nrd(); });
    section("balance", [this] { balance(); });
    section("tables", [this] { tables_(); });
    section("sigma", [this] { sigma(); });
    section("cat5", [this] { cat5(); });
    section("girth", [this] { girth6(); });
    section("instances", [this] { instances(); });
    section("pipelines", [this] { pipelines(); });
    return std::move(report_);
  }

 private:
  void section(const std::string& group, const std::function<void()>& body) {
    if (!opt_.only.empty() && !opt_.only.count(group)) return;
    group_ = group;
    body();
  }

  void item(const std::string& name, AuditStatus status, std::string detail) {
    report_.items.push_back({group_, name, status, std::move(detail)});
  }

  void check(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    try {
      auto [ok, detail] = body();
      item(name, ok ? AuditStatus::kPass : AuditStatus::kFail, std::move(detail));
    } catch (const std::exception& e) {
      item(name, AuditStatus::kFail, std::string("error: ") + e.what());
    }
  }

  void catalog() {
    check("catalog sizes", [] {
      using namespace fixtures;
      struct Expect {
        const char* name;
        std::size_t size;
      };
      static const Expect expected[] = {{"BoolBCK", 5}, {"BoolBCK+", 6}, {"Cat5", 5},  {"Cat5+", 6},  {"C6", 6},
                                        {"C6*", 5},     {"OR2", 3},      {"1in3SAT", 3}, {"3LIN*R", 8}, {"3LIN*S", 9}};
      std::ostringstream bad;
      for (const auto& e : expected)
        if (catalog_predicate(e.name).size() != e.size) bad << e.name << " ";
      return std::pair{bad.str().empty(), bad.str().empty() ? std::to_string(catalog_names().size()) + " entries"
                                                            : "unexpected sizes: " + bad.str()};
    });
    check("projections of Cat5", [] {
      auto p1 = fixtures::cat5_p1q1().base().str(), p2 = fixtures::cat5_p2q2().base().str();
      bool ok = p2 == Predicate::from_digits(3, {"011", "111", "120", "222", "202"}).str();
      return std::pair{ok, "P1 = " + p1 + ", P2 = " + p2};
    });
  }

  void small_nrd() {
    for (int n = 2; n <= 5; ++n)
      check("NRD(EQ, " + std::to_string(n) + ")", [n] {
        auto res = nrd_exact(ConditionalPredicate::plain(fixtures::eq(2)), n);
        return std::pair{res.value == n - 1, "value " + std::to_string(res.value)};
      });
    check("NRD(OR2, 4)", [] {
      auto pq = ConditionalPredicate::plain(fixtures::or_k(2));
      auto res = nrd_exact(pq, 4);
      auto brute = nrd_exhaustive(pq, 4);
      return std::pair{res.value == brute && res.value == 6,
                       "branch-and-bound " + std::to_string(res.value) + ", exhaustive " + std::to_string(brute)};
    });
  }

  void balance() {
    auto agree = [](const Predicate& p, int k) {
      auto lat = is_balanced_lattice(p);
      auto bnd = is_balanced_bounded(p, k);
      return std::pair{lat, bnd};
    };
    check("OR2 imbalanced", [&] {
      auto [lat, bnd] = agree(fixtures::or_k(2), 1);
      bool ok = !lat.balanced && !bnd.balanced && bnd.witness && bnd.witness->terms.size() == 3;
      return std::pair{ok, bnd.witness ? "witness result " + to_digits(bnd.witness->result) : "no witness"};
    });
    check("1-in-3-SAT balanced", [&] {
      auto [lat, bnd] = agree(fixtures::one_in_three(), 2);
      return std::pair{lat.balanced && bnd.balanced, "lattice and bounded (k=2) agree"};
    });
    check("BoolBCK imbalanced", [] {
      auto p = fixtures::boolbck();
      auto lat = is_balanced_lattice(p);
      auto k1 = is_balanced_bounded(p, 1);
      auto k2 = is_balanced_bounded(p, 2);
      bool ok = !lat.balanced && k1.balanced && !k2.balanced && k2.witness && k2.witness->terms.size() == 5 &&
                to_digits(k2.witness->result) == "100010001";
      return std::pair{ok, k2.witness ? "5-term sum reaches " + to_digits(k2.witness->result) : "no witness at k=2"};
    });
    check("BoolBCK+ balanced", [&] {
      auto [lat, bnd] = agree(fixtures::boolbck_plus(), 2);
      return std::pair{lat.balanced && bnd.balanced, "lattice closure"};
    });
  }

  void tables_() {
    for (const auto& named : tables::all_certificates()) {
      try {
        auto chk = verify_certificate(named.certificate);
        if (chk.ok) {
          item(named.name, AuditStatus::kPass,
               std::to_string(named.rows) + " rows, family " + named.certificate.family.str());
          continue;
        }
        std::string detail = std::string("printed table fails the ") + to_string(chk.violated) +
                             " condition (" + chk.detail + ")";
        auto fix = repair_certificate(named.certificate);
        if (fix) {
          std::ostringstream os;
          os << "; repair: output coordinates (";
          for (std::size_t k = 0; k < fix->permutation.size(); ++k) os << (k ? "," : "") << fix->permutation[k] + 1;
          os << ") with family " << fix->certificate.family.str() << " verifies";
          item(named.name, AuditStatus::kAnomaly, detail + os.str());
        } else {
          item(named.name, AuditStatus::kFail, detail + "; no coordinate-permutation repair found");
        }
      } catch (const std::exception& e) {
        item(named.name, AuditStatus::kFail, std::string("error: ") + e.what());
      }
    }
  }

  void sigma() {
    for (const auto& row : tables::kSigmaRows) {
      std::string name = "sigma_" + std::to_string(row.i) + " -> J_" + std::to_string(row.target);
      try {
        auto res = check_sigma_row(row);
        if (res.certifies_printed) {
          item(name, AuditStatus::kPass, "bijection certifies the permuted projection");
          continue;
        }
        std::ostringstream os;
        if (!res.bijection) {
          os << "anomaly: not a bijection as printed";
          if (!res.repeated.empty()) os << " (repeats " << join(res.repeated);
          if (!res.missing.empty()) os << ", misses " << join(res.missing);
          if (!res.repeated.empty()) os << ")";
        } else {
          os << "bijection does not certify the permuted projection";
        }
        os << "; repair search: " << res.repairs_found << " certifying bijections";
        if (res.closest_repair)
          os << ", closest (" << res.closest_agreement << "/8 agree) = " << join(*res.closest_repair);
        else
          os << ", none found";
        item(name, res.bijection ? AuditStatus::kFail : AuditStatus::kAnomaly, os.str());
      } catch (const std::exception& e) {
        item(name, AuditStatus::kFail, std::string("error: ") + e.what());
      }
    }
  }

  void cat5() {
    check("cancel(0221221)", [] {
      auto w = cancel(parse_digits("0221221"));
      return std::pair{to_digits(w) == "0", "residual " + to_digits(w)};
    });
    check("Cat5 matrix", [] {
      std::vector<Tuple> cols;
      for (auto c : tables::kCat5MatrixColumns) cols.push_back(parse_digits(c));
      auto m = catalan_matrix_check(fixtures::cat5_plus(), cols);
      bool ok = m.residual && to_digits(*m.residual) == "00000" && !fixtures::cat5().contains(*m.residual);
      return std::pair{ok, m.residual ? "residual " + to_digits(*m.residual) + " outside Cat5" : "rows do not reduce"};
    });
    check("Cat5+ into BoolBCK+", [] {
      auto sigma = tables::to_map(tables::kCat5IntoBoolBCK);
      bool ok = true;
      for (const auto& [x, y] : sigma) {
        bool base = fixtures::cat5().contains(x);
        if (base ? !fixtures::boolbck().contains(y)
                 : (fixtures::boolbck().contains(y) || !fixtures::boolbck_plus().contains(y)))
          ok = false;
      }
      auto deps = dependency_analysis(sigma);
      std::ostringstream os;
      os << "Sigma(Cat5) in BoolBCK and Sigma(00000) = 100010001; minimal dependencies";
      for (std::size_t j = 0; j < deps.size(); ++j) {
        os << (j ? ", " : " ") << j + 1 << ":";
        for (const auto& s : deps[j]) {
          os << "{";
          for (std::size_t k = 0; k < s.size(); ++k) os << s[k] + 1;
          os << "}";
        }
      }
      return std::pair{ok, os.str()};
    });
    check("catalan_search(Cat5+, 5)", [this] {
      auto v = catalan_search(fixtures::cat5_plus(), 5, opt_.workers);
      return std::pair{v.empty(), std::to_string(v.size()) + " violations"};
    });
  }

  void girth6() {
    for (int q : {2, 3})
      check("girth-6 plane q=" + std::to_string(q), [q] {
        auto g = gen_girth6(q);
        auto inst = bipartite_instance(g.graph);
        auto res = check_nrd(inst, fixtures::c6_pair(),
                             [&](std::size_t e, Assignment& out) { out = girth6_witness(g.graph, e); });
        return std::pair{g.measured_girth == 6 && res.non_redundant,
                         std::to_string(g.n_vertices) + " vertices, " + std::to_string(g.n_edges) +
                             " edges, girth " + std::to_string(g.measured_girth)};
      });
  }

  void instances() {
    std::vector<std::pair<double, double>> r1_points, r2_points;
    for (int q : {2, 3, 5}) {
      auto r1 = build_R1S1_instance(q, q + 1);
      auto r2 = build_R2S2_instance(q);
      double l1 = shrinking_report(r1.graph).lambda, l2 = shrinking_report(r2.graph).lambda;
      r1_points.emplace_back(static_cast<double>(r1.graph.edge_count()), l1);
      r2_points.emplace_back(static_cast<double>(r2.graph.edge_count()), l2);
      if (q == 5) continue;
      for (auto* inst : {&r1, &r2}) {
        check(inst->lemma + " instance q=" + std::to_string(q), [&, inst, q] {
          auto given = check_nrd(inst->graph, inst->predicate, inst->witness, opt_.workers);
          std::string detail = std::to_string(inst->graph.edge_count()) + " edges, lambda " +
                               format(shrinking_report(inst->graph).lambda) + ", constructed witnesses " +
                               (given.non_redundant ? "verify" : "fail");
          bool ok = given.non_redundant;
          if (opt_.thorough || inst->graph.edge_count() <= 1000) {
            VerifyOptions vo;
            vo.workers = opt_.workers;
            vo.keep_witnesses = false;
            auto search = verify_nrd(inst->graph, inst->predicate, vo);
            ok = ok && search.non_redundant;
            detail += std::string(", independent search ") + (search.non_redundant ? "agrees" : "disagrees");
          }
          (void)q;
          return std::pair{ok, detail};
        });
      }
    }
    check("R1|S1 shrinking exponent", [&] {
      double eps = fit_shrinking_epsilon(r1_points);
      return std::pair{std::abs(eps - 0.25) <= 0.10, "fitted " + format(eps) + " over q=2,3,5 (target 1/4)"};
    });
    check("R2|S2 shrinking exponent", [&] {
      double eps = fit_shrinking_epsilon(r2_points);
      return std::pair{std::abs(eps - 1.0 / 6.0) <= 0.12, "fitted " + format(eps) + " over q=2,3,5 (target 1/6)"};
    });
  }

  void pipelines() {
    std::vector<ShrinkingInstance> r1, r2;
    for (int q : {2, 3, 5}) {
      r1.push_back(build_R1S1_instance(q, q + 1));
      r2.push_back(build_R2S2_instance(q));
    }
    auto c4 = tables::r1s1_into_p2q2();
    if (!verify_certificate(c4).ok)
      if (auto fix = repair_certificate(c4)) c4 = fix->certificate;
    struct Job {
      std::string name;
      const std::vector<ShrinkingInstance>* family;
      SubstructureCertificate cert;
      double target;
    };
    std::vector<Job> jobs{{"R2|S2 -> J1 projection", &r2, tables::r2s2_into_j1(), 6.0 / 5.0},
                          {"R2|S2 -> J2 projection", &r2, tables::r2s2_into_j2(), 6.0 / 5.0},
                          {"R1|S1 -> P1|Q1", &r1, tables::r1s1_into_p1q1(), 4.0 / 3.0},
                          {"R1|S1 -> P2|Q2", &r1, c4, 4.0 / 3.0},
                          {"R2|S2 -> P3|Q3", &r2, tables::r2s2_into_p3q3(), 6.0 / 5.0}};
    for (const auto& job : jobs)
      check(job.name, [&] {
        std::vector<std::pair<double, double>> points;
        std::size_t verified = 0;
        for (const auto& inst : *job.family) {
          bool verify = opt_.thorough || inst.q <= 3;
          auto out = apply_reduction(inst.graph, inst.witness, job.cert, opt_.workers, verify);
          if (verify) ++verified;
          points.emplace_back(static_cast<double>(out.vertices()), static_cast<double>(out.edges()));
        }
        auto fit = fit_exponent(points);
        return std::pair{std::abs(fit.exponent - job.target) <= 0.15,
                         "exponent " + format(fit.exponent) + " (target " + format(job.target) + "), " +
                             std::to_string(verified) + "/" + std::to_string(job.family->size()) +
                             " outputs verified"};
      });
  }

  static std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
    return s;
  }

  static std::string format(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
  }

  AuditOptions opt_;
  AuditReport report_;
  std::string group_;
};

}  // namespace detail

/// Re-checks every explicit artifact; failures are collected per item.
inline AuditReport paper_verify(const AuditOptions& opt = {}) { return detail::Auditor(opt).run(); }

}  // namespace nrd
