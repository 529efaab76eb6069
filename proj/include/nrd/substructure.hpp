#pragma once

// I-substructures: certificates, their verification, the SAT encoding,
// family search and dependency analysis of tuple maps.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <tuple>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrd/errors.hpp"
#include "nrd/predicate.hpp"
#include "nrd/sat.hpp"

namespace nrd {

/// A map Sigma : Q1 -> D2^{r2} together with the family it claims to respect.
using TupleMap = std::map<Tuple, Tuple>;

struct SubstructureCertificate {
  ConditionalPredicate source;
  ConditionalPredicate target;
  IndexFamily family;
  TupleMap sigma;
};

enum class SubstructureCondition {
  kNone,
  /// Sigma(P1) in P2 and Sigma(Q1 \ P1) in Q2 \ P2.
  kImage,
  /// x, y in Q1 differing only in a coordinate i outside I_j must agree at j.
  kCoordinate,
  /// Sigma_j must be constant on every fiber of pi_{I_j} within Q1, so that
  /// the witnessing map g_j is well defined.
  kFiber,
};

inline const char* to_string(SubstructureCondition c) {
  switch (c) {
    case SubstructureCondition::kNone: return "none";
    case SubstructureCondition::kImage: return "image";
    case SubstructureCondition::kCoordinate: return "coordinate";
    case SubstructureCondition::kFiber: return "fiber";
  }
  return "?";
}

struct CertificateCheck {
  bool ok = true;
  SubstructureCondition violated = SubstructureCondition::kNone;
  std::string detail;
};

namespace detail {

inline void check_shapes(const ConditionalPredicate& source, const ConditionalPredicate& target, const IndexFamily& family) {
  if (family.source_arity() != source.arity())
    throw std::invalid_argument("substructure: family source arity " + std::to_string(family.source_arity()) +
                                " does not match source arity " + std::to_string(source.arity()));
  if (static_cast<int>(family.size()) != target.arity())
    throw std::invalid_argument("substructure: family has " + std::to_string(family.size()) + " sets but target arity is " +
                                std::to_string(target.arity()));
}

}  // namespace detail

/// Checks the image condition, the single-coordinate condition, and fiber
/// constancy, in that order, reporting the first violation.
inline CertificateCheck verify_certificate(const SubstructureCertificate& c) {
  detail::check_shapes(c.source, c.target, c.family);
  const auto& q1 = c.source.ambient().tuples();
  for (const auto& x : q1)
    if (!c.sigma.count(x)) throw std::invalid_argument("verify_certificate: sigma is not defined on " + to_string(x));
  const int d1 = c.source.domain_size();

  for (const auto& x : q1) {
    const Tuple& y = c.sigma.at(x);
    bool in_p = c.source.base().contains(x);
    if (in_p && !c.target.base().contains(y))
      return {false, SubstructureCondition::kImage, to_string(x) + " is in P1 but maps to " + to_string(y) + ", not in P2"};
    if (!in_p && !c.target.gap().contains(y))
      return {false, SubstructureCondition::kImage,
              to_string(x) + " is in Q1\\P1 but maps to " + to_string(y) + ", not in Q2\\P2"};
  }

  for (const auto& x : q1) {
    const Tuple& sx = c.sigma.at(x);
    for (int i = 0; i < c.source.arity(); ++i) {
      Tuple y = x;
      for (int v = x[static_cast<std::size_t>(i)] + 1; v < d1; ++v) {
        y[static_cast<std::size_t>(i)] = v;
        auto it = c.sigma.find(y);
        if (it == c.sigma.end() || !c.source.ambient().contains(y)) continue;
        for (std::size_t j = 0; j < c.family.size(); ++j) {
          if (c.family.contains(j, i)) continue;
          if (sx[j] != it->second[j])
            return {false, SubstructureCondition::kCoordinate,
                    to_string(x) + " and " + to_string(y) + " differ only in coordinate " + std::to_string(i + 1) +
                        ", outside I_" + std::to_string(j + 1) + ", but disagree at output " + std::to_string(j + 1)};
        }
      }
    }
  }

  for (std::size_t j = 0; j < c.family.size(); ++j) {
    std::map<Tuple, std::pair<Value, const Tuple*>> seen;
    for (const auto& x : q1) {
      Value out = c.sigma.at(x)[j];
      auto [it, fresh] = seen.emplace(project_tuple(x, c.family[j]), std::make_pair(out, &x));
      if (!fresh && it->second.first != out)
        return {false, SubstructureCondition::kFiber,
                to_string(*it->second.second) + " and " + to_string(x) + " agree on I_" + std::to_string(j + 1) +
                    " but disagree at output " + std::to_string(j + 1)};
    }
  }
  return {};
}

/// The witnessing maps g_j as lookup tables keyed by pi_{I_j} x. Requires a
/// certificate that passes verify_certificate.
inline std::vector<std::map<Tuple, Value>> witnessing_maps(const SubstructureCertificate& c) {
  std::vector<std::map<Tuple, Value>> g(c.family.size());
  for (const auto& [x, y] : c.sigma) {
    if (!c.source.ambient().contains(x)) continue;
    for (std::size_t j = 0; j < c.family.size(); ++j) {
      auto [it, fresh] = g[j].emplace(project_tuple(x, c.family[j]), y[j]);
      if (!fresh && it->second != y[j]) throw std::invalid_argument("witnessing_maps: sigma is not constant on a fiber");
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// SAT encoding

/// How the per-coordinate independence requirement is encoded.
enum class IndependenceEncoding {
  /// Equalities only between tuples differing in one coordinate outside I_j.
  kSingleCoordinate,
  /// Equalities across whole fibers of pi_{I_j}; exactly the existence of g_j.
  kFiber,
};

struct Encoding {
  sat::CnfFormula formula;
  std::vector<Tuple> q1;  // source ambient tuples, in order
  std::vector<Tuple> q2;  // target ambient tuples, in order
  int r2 = 0;
  int d2 = 0;
  /// x(q, j, d) and y(q, q') variable indices.
  int x(std::size_t q, int j, int d) const {
    return 1 + static_cast<int>((q * static_cast<std::size_t>(r2) + static_cast<std::size_t>(j)) * static_cast<std::size_t>(d2)) + d;
  }
  int y(std::size_t q, std::size_t q2i) const {
    return 1 + static_cast<int>(q1.size() * static_cast<std::size_t>(r2) * static_cast<std::size_t>(d2) + q * q2.size() + q2i);
  }
};

namespace detail {

inline void add_equal(sat::CnfFormula& f, int a, int b) {
  f.add_clause({a, -b});
  f.add_clause({-a, b});
}

/// Variables and all clauses except those tying outputs to the family.
inline Encoding encode_core(const ConditionalPredicate& source, const ConditionalPredicate& target) {
  Encoding enc;
  enc.q1 = source.ambient().tuples();
  enc.q2 = target.ambient().tuples();
  enc.r2 = target.arity();
  enc.d2 = target.domain_size();
  auto& f = enc.formula;
  for (const auto& q : enc.q1)
    for (int j = 0; j < enc.r2; ++j)
      for (int d = 0; d < enc.d2; ++d)
        f.new_var("x[" + to_digits(q) + "," + std::to_string(j + 1) + "," + std::to_string(d) + "]");
  for (const auto& q : enc.q1)
    for (const auto& q2 : enc.q2) f.new_var("y[" + to_digits(q) + "," + to_digits(q2) + "]");

  for (std::size_t a = 0; a < enc.q1.size(); ++a) {
    bool in_p1 = source.base().contains(enc.q1[a]);
    std::vector<int> some;
    for (std::size_t b = 0; b < enc.q2.size(); ++b) {
      int yv = enc.y(a, b);
      for (int j = 0; j < enc.r2; ++j)
        for (int d = 0; d < enc.d2; ++d)
          f.add_clause({-yv, d == enc.q2[b][static_cast<std::size_t>(j)] ? enc.x(a, j, d) : -enc.x(a, j, d)});
      bool in_p2 = target.base().contains(enc.q2[b]);
      if (in_p1 != in_p2) f.add_clause({-yv});
      some.push_back(yv);
    }
    f.add_clause(some);
    for (int j = 0; j < enc.r2; ++j)
      for (int d = 0; d < enc.d2; ++d)
        for (int e = d + 1; e < enc.d2; ++e) f.add_clause({-enc.x(a, j, d), -enc.x(a, j, e)});
  }
  return enc;
}

/// Index pairs (a, b, i) with q1[a], q1[b] differing exactly in coordinate i.
inline std::vector<std::tuple<std::size_t, std::size_t, int>> neighbour_pairs(const std::vector<Tuple>& q1) {
  std::vector<std::tuple<std::size_t, std::size_t, int>> out;
  for (std::size_t a = 0; a < q1.size(); ++a)
    for (std::size_t b = a + 1; b < q1.size(); ++b) {
      int diff = -1, count = 0;
      for (std::size_t k = 0; k < q1[a].size(); ++k)
        if (q1[a][k] != q1[b][k]) {
          diff = static_cast<int>(k);
          ++count;
        }
      if (count == 1) out.emplace_back(a, b, diff);
    }
  return out;
}

}  // namespace detail

/// The SAT encoding for a fixed family. Variables x[q,j,d] say Sigma_j(q) = d
/// and y[q,q'] say Sigma(q) = q'.
inline Encoding encode(const ConditionalPredicate& source, const ConditionalPredicate& target, const IndexFamily& family,
                       IndependenceEncoding mode = IndependenceEncoding::kFiber) {
  detail::check_shapes(source, target, family);
  Encoding enc = detail::encode_core(source, target);
  auto& f = enc.formula;
  if (mode == IndependenceEncoding::kSingleCoordinate) {
    for (auto [a, b, i] : detail::neighbour_pairs(enc.q1))
      for (int j = 0; j < enc.r2; ++j) {
        if (family.contains(static_cast<std::size_t>(j), i)) continue;
        for (int d = 0; d < enc.d2; ++d) detail::add_equal(f, enc.x(a, j, d), enc.x(b, j, d));
      }
  } else {
    for (int j = 0; j < enc.r2; ++j) {
      std::map<Tuple, std::size_t> anchor;
      for (std::size_t a = 0; a < enc.q1.size(); ++a) {
        auto [it, fresh] = anchor.emplace(project_tuple(enc.q1[a], family[static_cast<std::size_t>(j)]), a);
        if (fresh) continue;
        for (int d = 0; d < enc.d2; ++d) detail::add_equal(f, enc.x(it->second, j, d), enc.x(a, j, d));
      }
    }
  }
  return enc;
}

/// Reads Sigma from the y variables and cross-checks the x variables.
inline SubstructureCertificate decode(const Encoding& enc, const std::vector<bool>& model, const ConditionalPredicate& source,
                                      const ConditionalPredicate& target, const IndexFamily& family) {
  if (model.size() < static_cast<std::size_t>(enc.formula.num_vars()) + 1)
    throw std::invalid_argument("decode: model is shorter than the formula");
  TupleMap sigma;
  for (std::size_t a = 0; a < enc.q1.size(); ++a) {
    std::optional<std::size_t> pick;
    for (std::size_t b = 0; b < enc.q2.size() && !pick; ++b)
      if (model[static_cast<std::size_t>(enc.y(a, b))]) pick = b;
    if (!pick) throw InternalError("decode: no image selected for " + to_string(enc.q1[a]));
    const Tuple& image = enc.q2[*pick];
    for (int j = 0; j < enc.r2; ++j)
      for (int d = 0; d < enc.d2; ++d)
        if (model[static_cast<std::size_t>(enc.x(a, j, d))] != (image[static_cast<std::size_t>(j)] == d))
          throw InternalError("decode: x and y variables disagree at " + to_string(enc.q1[a]));
    sigma.emplace(enc.q1[a], image);
  }
  return SubstructureCertificate{source, target, family, std::move(sigma)};
}

struct FindResult {
  std::optional<SubstructureCertificate> certificate;
  std::uint64_t conflicts = 0;
  std::size_t variables = 0;
  std::size_t clauses = 0;
};

/// Encodes, solves and decodes. The decoded certificate is verified.
inline FindResult find_substructure(const ConditionalPredicate& source, const ConditionalPredicate& target,
                                    const IndexFamily& family, sat::SolverOptions opt = {}) {
  auto enc = encode(source, target, family);
  FindResult res;
  res.variables = static_cast<std::size_t>(enc.formula.num_vars());
  res.clauses = enc.formula.num_clauses();
  auto sol = sat::solve(enc.formula, opt);
  res.conflicts = sol.conflicts;
  if (sol.status == sat::Status::kUnsat) return res;
  auto cert = decode(enc, sol.model, source, target, family);
  auto check = verify_certificate(cert);
  if (!check.ok) throw InternalError("find_substructure: decoded certificate fails: " + check.detail);
  res.certificate = std::move(cert);
  return res;
}

// ---------------------------------------------------------------------------
// Family search

struct FamilySearchOptions {
  /// Maximum |I_j|.
  int size_bound = 3;
  /// First list every family with |I_j| = size_bound for all j, then the
  /// inclusion-minimal families not already listed.
  bool fixed_size_first = true;
  /// Stop after this many minimal families (0 = no limit).
  std::size_t max_families = 0;
  /// Total solver calls allowed (0 = no limit).
  std::uint64_t max_solver_calls = 0;
  std::uint64_t conflict_budget = 0;
  /// Permutations of the source coordinates under which source and target
  /// are known to be invariant; images of found families are skipped.
  std::vector<std::vector<int>> source_symmetries;
};

struct FamilySearchResult {
  std::vector<std::pair<IndexFamily, SubstructureCertificate>> families;
  /// True if the search stopped on a budget instead of exhausting the space.
  bool partial = false;
  std::uint64_t solver_calls = 0;
  /// Minimal families satisfying the single-coordinate rule whose fibers
  /// admit no consistent Sigma; reported and skipped.
  std::size_t rejected_by_fiber_check = 0;
};

namespace detail {

/// Sequential-counter encoding of sum(lits) <= k.
inline void at_most_k(sat::CnfFormula& f, const std::vector<int>& lits, int k, const std::string& tag) {
  const int n = static_cast<int>(lits.size());
  if (k >= n) return;
  if (k == 0) {
    for (int l : lits) f.add_clause({-l});
    return;
  }
  // s[i][c]: among the first i+1 literals at least c+1 are true.
  std::vector<std::vector<int>> s(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(k)));
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < k; ++c)
      s[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
          f.new_var(tag + "[" + std::to_string(i) + "," + std::to_string(c) + "]");
  auto S = [&](int i, int c) { return s[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]; };
  for (int i = 0; i < n; ++i) {
    int x = lits[static_cast<std::size_t>(i)];
    f.add_clause({-x, S(i, 0)});
    if (i > 0) {
      for (int c = 0; c < k; ++c) f.add_clause({-S(i - 1, c), S(i, c)});
      for (int c = 1; c < k; ++c) f.add_clause({-x, -S(i - 1, c - 1), S(i, c)});
      f.add_clause({-x, -S(i - 1, k - 1)});
    }
  }
}

}  // namespace detail

/// Enumerates families (I_1, ..., I_r2) with |I_j| <= size_bound for which a
/// Sigma exists. Selector variables s[j,i] ("i in I_j") gate the
/// single-coordinate equalities. With fixed_size_first, families with every
/// |I_j| = size_bound come first, each blocked exactly. Then each model is
/// shrunk to a minimal family under assumptions, checked with the exact fiber
/// encoding, and all its supersets are blocked.
inline FamilySearchResult search_families(const ConditionalPredicate& source, const ConditionalPredicate& target,
                                          const FamilySearchOptions& opt = {}) {
  const int r1 = source.arity();
  const int r2 = target.arity();
  if (opt.size_bound < 0 || opt.size_bound > r1)
    throw std::invalid_argument("search_families: size bound must lie in [0, source arity]");
  for (const auto& perm : opt.source_symmetries) detail::check_permutation(perm, r1);

  Encoding enc = detail::encode_core(source, target);
  auto& f = enc.formula;
  std::vector<std::vector<int>> sel(static_cast<std::size_t>(r2), std::vector<int>(static_cast<std::size_t>(r1)));
  for (int j = 0; j < r2; ++j)
    for (int i = 0; i < r1; ++i)
      sel[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          f.new_var("s[" + std::to_string(j + 1) + "," + std::to_string(i + 1) + "]");
  for (auto [a, b, i] : detail::neighbour_pairs(enc.q1))
    for (int j = 0; j < r2; ++j) {
      int s = sel[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      for (int d = 0; d < enc.d2; ++d) {
        f.add_clause({s, enc.x(a, j, d), -enc.x(b, j, d)});
        f.add_clause({s, -enc.x(a, j, d), enc.x(b, j, d)});
      }
    }
  for (int j = 0; j < r2; ++j) detail::at_most_k(f, sel[static_cast<std::size_t>(j)], opt.size_bound, "card" + std::to_string(j + 1));

  FamilySearchResult res;
  sat::SolverOptions sopt{opt.conflict_budget};
  std::vector<std::vector<int>> blocks;
  std::set<std::vector<Coords>> listed;

  auto family_of = [&](const std::vector<bool>& model) {
    std::vector<Coords> sets(static_cast<std::size_t>(r2));
    for (int j = 0; j < r2; ++j)
      for (int i = 0; i < r1; ++i)
        if (model[static_cast<std::size_t>(sel[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])])
          sets[static_cast<std::size_t>(j)].push_back(i);
    return sets;
  };
  auto block = [&](const std::vector<Coords>& sets) {
    std::vector<int> clause;
    for (int j = 0; j < r2; ++j)
      for (int i : sets[static_cast<std::size_t>(j)]) clause.push_back(-sel[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
    blocks.push_back(clause);
  };
  auto run = [&](const std::vector<int>& assumptions) -> std::optional<std::vector<bool>> {
    if (opt.max_solver_calls && res.solver_calls >= opt.max_solver_calls) throw ResourceError("search_families: call budget");
    ++res.solver_calls;
    sat::CnfFormula g = f;
    for (const auto& c : blocks) g.add_clause(c);
    auto sol = sat::Solver(g, sopt).solve(assumptions);
    if (sol.status == sat::Status::kUnsat) return std::nullopt;
    return sol.model;
  };

  auto images = [&](const std::vector<Coords>& sets) {
    std::vector<std::vector<Coords>> out;
    for (const auto& perm : opt.source_symmetries) {
      std::vector<Coords> image(sets.size());
      for (std::size_t j = 0; j < sets.size(); ++j) {
        for (int i : sets[j]) image[j].push_back(perm[static_cast<std::size_t>(i)]);
        std::sort(image[j].begin(), image[j].end());
      }
      out.push_back(std::move(image));
    }
    return out;
  };
  auto block_with_images = [&](const std::vector<Coords>& sets) {
    block(sets);
    for (const auto& image : images(sets)) block(image);
  };
  // Returns true once max_families is reached.
  auto report = [&](const std::vector<Coords>& sets) {
    if (!listed.insert(sets).second) return false;
    for (auto& image : images(sets)) listed.insert(std::move(image));
    IndexFamily family(r1, sets);
    auto exact = find_substructure(source, target, family, sopt);
    if (!exact.certificate) {
      ++res.rejected_by_fiber_check;
      return false;
    }
    res.families.emplace_back(family, std::move(*exact.certificate));
    return opt.max_families && res.families.size() >= opt.max_families;
  };

  try {
    if (opt.fixed_size_first && opt.size_bound > 0) {
      const auto free_blocks = blocks.size();
      sat::CnfFormula base = f;
      for (int j = 0; j < r2; ++j) {
        std::vector<int> negated;
        for (int v : sel[static_cast<std::size_t>(j)]) negated.push_back(-v);
        detail::at_most_k(f, negated, r1 - opt.size_bound, "fill" + std::to_string(j + 1));
      }
      bool done = false;
      while (!done) {
        auto model = run({});
        if (!model) break;
        auto sets = family_of(*model);
        block_with_images(sets);
        done = report(sets);
      }
      f = std::move(base);
      blocks.resize(free_blocks);
      if (done) {
        res.partial = true;
        return res;
      }
    }
    for (;;) {
      auto model = run({});
      if (!model) break;
      auto sets = family_of(*model);
      // Shrink to an inclusion-minimal family.
      for (bool changed = true; changed;) {
        changed = false;
        for (int j = 0; j < r2 && !changed; ++j)
          for (int i : sets[static_cast<std::size_t>(j)]) {
            std::vector<int> assume;
            for (int jj = 0; jj < r2; ++jj)
              for (int ii = 0; ii < r1; ++ii) {
                const auto& cur = sets[static_cast<std::size_t>(jj)];
                bool keep = std::find(cur.begin(), cur.end(), ii) != cur.end() && !(jj == j && ii == i);
                if (!keep) assume.push_back(-sel[static_cast<std::size_t>(jj)][static_cast<std::size_t>(ii)]);
              }
            auto smaller = run(assume);
            if (smaller) {
              sets = family_of(*smaller);
              changed = true;
              break;
            }
          }
      }
      block_with_images(sets);
      if (report(sets)) {
        res.partial = run({}).has_value();
        break;
      }
    }
  } catch (const ResourceError&) {
    res.partial = true;
  }
  return res;
}

/// Whether some Sigma exists for this exact family.
inline bool family_satisfiable(const ConditionalPredicate& source, const ConditionalPredicate& target, const IndexFamily& family,
                               sat::SolverOptions opt = {}) {
  return find_substructure(source, target, family, opt).certificate.has_value();
}

// ---------------------------------------------------------------------------
// Dependency analysis

/// For each output coordinate j: all inclusion-minimal S in [r1] such that
/// Sigma_j is constant on the fibers of pi_S over the domain of sigma.
inline std::vector<std::vector<Coords>> dependency_analysis(const TupleMap& sigma) {
  if (sigma.empty()) throw std::invalid_argument("dependency_analysis: empty map");
  const int r1 = static_cast<int>(sigma.begin()->first.size());
  const std::size_t r2 = sigma.begin()->second.size();
  if (r1 > 20) throw std::invalid_argument("dependency_analysis: source arity too large");
  for (const auto& [x, y] : sigma)
    if (static_cast<int>(x.size()) != r1 || y.size() != r2) throw std::invalid_argument("dependency_analysis: ragged map");

  std::vector<std::uint32_t> masks(std::size_t{1} << r1);
  for (std::uint32_t m = 0; m < masks.size(); ++m) masks[m] = m;
  std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });

  std::vector<std::vector<Coords>> out(r2);
  for (std::size_t j = 0; j < r2; ++j) {
    std::vector<std::uint32_t> minimal;
    for (std::uint32_t m : masks) {
      if (std::any_of(minimal.begin(), minimal.end(), [&](std::uint32_t s) { return (s & m) == s; })) continue;
      Coords coords;
      for (int i = 0; i < r1; ++i)
        if ((m >> i) & 1u) coords.push_back(i);
      std::map<Tuple, Value> seen;
      bool ok = true;
      for (const auto& [x, y] : sigma) {
        auto [it, fresh] = seen.emplace(project_tuple(x, coords), y[j]);
        if (!fresh && it->second != y[j]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      minimal.push_back(m);
      out[j].push_back(std::move(coords));
    }
  }
  return out;
}

}  // namespace nrd
