#pragma once

// Independent brute-force oracles and random generators for the test suites.
// None of these share code with the library routines they check.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "nrd/hypergraph.hpp"
#include "nrd/predicate.hpp"

namespace oracle {

using Rng = std::mt19937_64;

inline bool member(const std::set<std::vector<int>>& s, const std::vector<int>& t) { return s.count(t) > 0; }

inline std::set<std::vector<int>> as_set(const nrd::Predicate& p) {
  return {p.tuples().begin(), p.tuples().end()};
}

/// Calls fn on every assignment of n variables over {0..d-1}; fn returns
/// false to stop early.
inline void for_each_assignment(int n, int d, const std::function<bool(const std::vector<int>&)>& fn) {
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  for (;;) {
    if (!fn(a)) return;
    int i = n - 1;
    while (i >= 0 && a[static_cast<std::size_t>(i)] == d - 1) a[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return;
    ++a[static_cast<std::size_t>(i)];
  }
}

/// Non-redundancy by exhaustive assignment enumeration.
inline bool non_redundant(int n_vertices, const std::vector<std::vector<int>>& edges, const nrd::Predicate& p,
                          const nrd::Predicate& q) {
  auto ps = as_set(p), qs = as_set(q);
  const int d = p.domain_size();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    bool found = false;
    for_each_assignment(n_vertices, d, [&](const std::vector<int>& a) {
      auto image = [&](const std::vector<int>& edge) {
        std::vector<int> t;
        for (int v : edge) t.push_back(a[static_cast<std::size_t>(v)]);
        return t;
      };
      auto te = image(edges[e]);
      if (!member(qs, te) || member(ps, te)) return true;
      for (std::size_t k = 0; k < edges.size(); ++k)
        if (k != e && !member(ps, image(edges[k]))) return true;
      found = true;
      return false;
    });
    if (!found) return false;
  }
  return true;
}

inline bool non_redundant(const nrd::Hypergraph& h, const nrd::ConditionalPredicate& pq) {
  return non_redundant(h.vertex_count(), h.edges(), pq.base(), pq.ambient());
}

/// A bipartite graph has girth >= 6 iff no two left vertices share two
/// right neighbours.
inline bool bipartite_c4_free(int left, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::set<int>> nb(static_cast<std::size_t>(left));
  for (auto [a, b] : edges) nb[static_cast<std::size_t>(a)].insert(b);
  for (int a = 0; a < left; ++a)
    for (int b = a + 1; b < left; ++b) {
      int common = 0;
      for (int x : nb[static_cast<std::size_t>(a)]) common += nb[static_cast<std::size_t>(b)].count(x);
      if (common >= 2) return false;
    }
  return true;
}

/// Brute-force CNF satisfiability over at most ~22 variables.
inline bool cnf_satisfiable(int vars, const std::vector<std::vector<int>>& clauses) {
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << vars); ++m) {
    bool all = true;
    for (const auto& c : clauses) {
      bool sat = false;
      for (int l : c) {
        bool v = (m >> (std::abs(l) - 1)) & 1u;
        if ((l > 0) == v) {
          sat = true;
          break;
        }
      }
      if (!sat) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

/// Boolean tuples reachable as alternating sums t1 - t2 + ... + t_len of
/// tuples of p, for odd len up to max_len, by plain recursion.
inline std::set<std::vector<int>> alternating_reach(const nrd::Predicate& p, int max_len) {
  const auto& ts = p.tuples();
  const std::size_t r = static_cast<std::size_t>(p.arity());
  std::set<std::vector<int>> out;
  std::set<std::vector<int>> level(ts.begin(), ts.end());  // partial sums of odd length
  for (int len = 1; len <= max_len; len += 2) {
    for (const auto& s : level)
      if (std::all_of(s.begin(), s.end(), [](int v) { return v == 0 || v == 1; })) out.insert(s);
    if (len + 2 > max_len) break;
    std::set<std::vector<int>> next;
    for (const auto& s : level)
      for (const auto& a : ts)
        for (const auto& b : ts) {
          std::vector<int> t(r);
          bool bounded = true;
          for (std::size_t i = 0; i < r; ++i) {
            t[i] = s[i] - a[i] + b[i];
            if (std::abs(t[i]) > max_len) bounded = false;
          }
          if (bounded) next.insert(t);
        }
    level = std::move(next);
  }
  return out;
}

inline nrd::Predicate random_predicate(Rng& rng, int d, int r, double density) {
  std::vector<nrd::Tuple> ts;
  std::bernoulli_distribution keep(density);
  for_each_assignment(r, d, [&](const std::vector<int>& t) {
    if (keep(rng)) ts.push_back(t);
    return true;
  });
  if (ts.empty()) ts.push_back(nrd::Tuple(static_cast<std::size_t>(r), 0));
  return nrd::Predicate(d, r, ts);
}

/// Random P strictly inside random Q, both nonempty and Q != P.
inline nrd::ConditionalPredicate random_pair(Rng& rng, int d, int r) {
  for (;;) {
    auto q = random_predicate(rng, d, r, 0.6);
    if (q.size() < 2) continue;
    std::vector<nrd::Tuple> base;
    std::bernoulli_distribution keep(0.6);
    for (const auto& t : q.tuples())
      if (keep(rng)) base.push_back(t);
    if (base.empty() || base.size() == q.size()) continue;
    return nrd::ConditionalPredicate(nrd::Predicate(d, r, base), q);
  }
}

inline std::vector<int> random_permutation(Rng& rng, int n) {
  std::vector<int> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = i;
  std::shuffle(s.begin(), s.end(), rng);
  return s;
}

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace oracle
