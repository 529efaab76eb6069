#pragma once

// Balance of Boolean predicates: closure under odd alternating sums
// t1 - t2 + t3 - ... + t_{2k+1} computed over the integers.
//
// The exact decision goes through the integer affine lattice spanned by the
// tuples (integer combinations whose coefficients sum to 1); the bounded
// enumerator is an independent cross-check.

#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrd/errors.hpp"
#include "nrd/predicate.hpp"

namespace nrd {

enum class BalanceMethod { kLattice, kBoundedClosure };

inline const char* to_string(BalanceMethod m) {
  return m == BalanceMethod::kLattice ? "lattice" : "bounded-closure";
}

struct AlternatingWitness {
  std::vector<Tuple> terms;  // t1, t2, ..., t_{2k+1}; odd positions added
  Tuple result;
};

struct BalanceReport {
  bool balanced = true;
  std::optional<AlternatingWitness> witness;
  BalanceMethod method = BalanceMethod::kLattice;
  /// For the bounded method: sums up to 2*k_max+1 terms were examined.
  int k_max = 0;
};

/// t1 - t2 + t3 - ... over the integers.
inline Tuple alternating_sum(const std::vector<Tuple>& terms) {
  if (terms.empty()) throw std::invalid_argument("alternating_sum: no terms");
  Tuple sum(terms.front().size(), 0);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (terms[k].size() != sum.size()) throw std::invalid_argument("alternating_sum: ragged terms");
    int sign = (k % 2 == 0) ? 1 : -1;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += sign * terms[k][i];
  }
  return sum;
}

/// True iff the witness is an odd-length alternating sum of tuples of p that
/// lands in {0,1}^r outside p.
inline bool verify_witness(const Predicate& p, const AlternatingWitness& w) {
  if (w.terms.size() % 2 == 0) return false;
  for (const auto& t : w.terms)
    if (!p.contains(t)) return false;
  Tuple sum = alternating_sum(w.terms);
  if (sum != w.result) return false;
  for (Value v : sum)
    if (v != 0 && v != 1) return false;
  return !p.contains(sum);
}

namespace detail {

inline void require_boolean(const Predicate& p, const char* who) {
  if (p.empty()) throw std::invalid_argument(std::string(who) + ": empty predicate");
  if (p.domain_size() != 2)
    throw std::invalid_argument(std::string(who) + ": balance is only defined for Boolean predicates");
  if (p.arity() > 20) throw std::invalid_argument(std::string(who) + ": arity too large for cube enumeration");
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw ResourceError("lattice: integer overflow");
  return r;
}
inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw ResourceError("lattice: integer overflow");
  return r;
}
inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw ResourceError("lattice: integer overflow");
  return r;
}

/// Row echelon form H = U * G over the integers, with U unimodular.
class IntegerEchelon {
 public:
  using Row = std::vector<std::int64_t>;

  explicit IntegerEchelon(std::vector<Row> generators) : h_(std::move(generators)) {
    const std::size_t m = h_.size();
    u_.assign(m, Row(m, 0));
    for (std::size_t i = 0; i < m; ++i) u_[i][i] = 1;
    if (m == 0) return;
    const std::size_t cols = h_.front().size();
    std::size_t top = 0;
    for (std::size_t c = 0; c < cols && top < m; ++c) {
      for (;;) {
        std::size_t best = m;
        for (std::size_t i = top; i < m; ++i)
          if (h_[i][c] != 0 && (best == m || llabs(h_[i][c]) < llabs(h_[best][c]))) best = i;
        if (best == m) break;
        swap_rows(top, best);
        bool clean = true;
        for (std::size_t i = top + 1; i < m; ++i) {
          if (h_[i][c] == 0) continue;
          std::int64_t q = h_[i][c] / h_[top][c];
          axpy(i, top, q);
          if (h_[i][c] != 0) clean = false;
        }
        if (clean) break;
      }
      if (h_[top][c] == 0) continue;
      if (h_[top][c] < 0) negate(top);
      pivots_.push_back({top, c});
      ++top;
    }
  }

  /// Coefficients lambda with v = sum_i lambda_i * generator_i, if any exist.
  std::optional<Row> solve(Row v) const {
    Row coeff(h_.size(), 0);
    for (auto [row, col] : pivots_) {
      std::int64_t p = h_[row][col];
      if (v[col] % p != 0) return std::nullopt;
      std::int64_t q = v[col] / p;
      coeff[row] = q;
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = checked_sub(v[k], checked_mul(q, h_[row][k]));
    }
    for (auto x : v)
      if (x != 0) return std::nullopt;
    Row lambda(h_.size(), 0);
    for (std::size_t r = 0; r < h_.size(); ++r) {
      if (coeff[r] == 0) continue;
      for (std::size_t i = 0; i < h_.size(); ++i)
        lambda[i] = checked_add(lambda[i], checked_mul(coeff[r], u_[r][i]));
    }
    return lambda;
  }

 private:
  void swap_rows(std::size_t a, std::size_t b) {
    std::swap(h_[a], h_[b]);
    std::swap(u_[a], u_[b]);
  }
  void negate(std::size_t a) {
    for (auto& x : h_[a]) x = -x;
    for (auto& x : u_[a]) x = -x;
  }
  // row[i] -= q * row[j]
  void axpy(std::size_t i, std::size_t j, std::int64_t q) {
    for (std::size_t k = 0; k < h_[i].size(); ++k) h_[i][k] = checked_sub(h_[i][k], checked_mul(q, h_[j][k]));
    for (std::size_t k = 0; k < u_[i].size(); ++k) u_[i][k] = checked_sub(u_[i][k], checked_mul(q, u_[j][k]));
  }

  std::vector<Row> h_;
  std::vector<Row> u_;
  std::vector<std::pair<std::size_t, std::size_t>> pivots_;
};

/// Expands integer coefficients summing to 1 into +,-,+,...,+ order.
inline std::vector<Tuple> expand_coefficients(const std::vector<Tuple>& tuples, const std::vector<std::int64_t>& mu) {
  std::vector<const Tuple*> plus, minus;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    for (std::int64_t k = 0; k < mu[i]; ++k) plus.push_back(&tuples[i]);
    for (std::int64_t k = 0; k < -mu[i]; ++k) minus.push_back(&tuples[i]);
  }
  if (plus.size() != minus.size() + 1) throw InternalError("expand_coefficients: coefficients do not sum to 1");
  std::vector<Tuple> terms;
  terms.reserve(plus.size() + minus.size());
  for (std::size_t k = 0; k < minus.size(); ++k) {
    terms.push_back(*plus[k]);
    terms.push_back(*minus[k]);
  }
  terms.push_back(*plus.back());
  return terms;
}

}  // namespace detail

/// Exact balance decision for a Boolean predicate. When imbalanced, the
/// witness is rebuilt from lattice coefficients; it is valid but not
/// necessarily the shortest one.
inline BalanceReport is_balanced_lattice(const Predicate& p) {
  detail::require_boolean(p, "is_balanced_lattice");
  const auto& ts = p.tuples();
  const std::size_t r = static_cast<std::size_t>(p.arity());
  std::vector<detail::IntegerEchelon::Row> gens;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    detail::IntegerEchelon::Row g(r);
    for (std::size_t k = 0; k < r; ++k) g[k] = ts[i][k] - ts[0][k];
    gens.push_back(std::move(g));
  }
  detail::IntegerEchelon lattice(gens);

  BalanceReport report;
  report.method = BalanceMethod::kLattice;
  Tuple x(r, 0);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << r); ++code) {
    for (std::size_t k = 0; k < r; ++k) x[k] = static_cast<Value>((code >> (r - 1 - k)) & 1u);
    if (p.contains(x)) continue;
    detail::IntegerEchelon::Row rhs(r);
    for (std::size_t k = 0; k < r; ++k) rhs[k] = x[k] - ts[0][k];
    auto lambda = lattice.solve(rhs);
    if (!lambda) continue;
    std::vector<std::int64_t> mu(ts.size(), 0);
    std::int64_t rest = 1;
    for (std::size_t i = 0; i < lambda->size(); ++i) {
      mu[i + 1] = (*lambda)[i];
      rest = detail::checked_sub(rest, (*lambda)[i]);
    }
    mu[0] = rest;
    AlternatingWitness w{detail::expand_coefficients(ts, mu), x};
    if (!verify_witness(p, w)) throw InternalError("is_balanced_lattice: reconstructed witness does not verify");
    report.balanced = false;
    report.witness = std::move(w);
    return report;
  }
  return report;
}

/// Breadth-first closure over alternating sums of up to 2*k_max+1 terms.
/// "balanced" in the result means no witness of that length exists.
inline BalanceReport is_balanced_bounded(const Predicate& p, int k_max) {
  detail::require_boolean(p, "is_balanced_bounded");
  if (k_max < 1) throw std::invalid_argument("is_balanced_bounded: k_max must be positive");

  struct Node {
    Tuple parent;
    const Tuple* minus = nullptr;
    const Tuple* plus = nullptr;
    bool root = true;
  };
  std::map<Tuple, Node> seen;
  std::vector<Tuple> frontier;
  for (const auto& t : p.tuples()) {
    seen.emplace(t, Node{});
    frontier.push_back(t);
  }

  BalanceReport report;
  report.method = BalanceMethod::kBoundedClosure;
  report.k_max = k_max;
  const std::size_t r = static_cast<std::size_t>(p.arity());

  auto rebuild = [&](Tuple state) {
    std::vector<Tuple> rev;
    for (;;) {
      const Node& n = seen.at(state);
      if (n.root) {
        rev.push_back(state);
        break;
      }
      rev.push_back(*n.plus);
      rev.push_back(*n.minus);
      state = n.parent;
    }
    return std::vector<Tuple>(rev.rbegin(), rev.rend());
  };

  for (int step = 1; step <= k_max; ++step) {
    const int remaining = k_max - step;
    std::vector<Tuple> next;
    for (const auto& s : frontier) {
      for (const auto& a : p.tuples()) {
        for (const auto& b : p.tuples()) {
          Tuple t(r);
          bool in_range = true, boolean = true;
          for (std::size_t k = 0; k < r; ++k) {
            t[k] = s[k] - a[k] + b[k];
            if (t[k] < -remaining || t[k] > 1 + remaining) in_range = false;
            if (t[k] != 0 && t[k] != 1) boolean = false;
          }
          if (!in_range || seen.count(t)) continue;
          seen.emplace(t, Node{s, &a, &b, false});
          if (boolean && !p.contains(t)) {
            AlternatingWitness w{rebuild(t), t};
            if (!verify_witness(p, w)) throw InternalError("is_balanced_bounded: witness does not verify");
            report.balanced = false;
            report.witness = std::move(w);
            return report;
          }
          next.push_back(std::move(t));
        }
      }
    }
    frontier = std::move(next);
  }
  return report;
}

}  // namespace nrd
