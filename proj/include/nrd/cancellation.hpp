#pragma once

// The cancellation game on words over a finite domain and the Catalan-style
// matrix checks built on it.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nrd/parallel.hpp"
#include "nrd/predicate.hpp"

namespace nrd {

using Word = std::vector<Value>;

/// Repeatedly deletes adjacent equal symbols. The game is confluent, so the
/// stack reduction yields the unique fully reduced word.
inline Word cancel(const Word& w) {
  Word stack;
  stack.reserve(w.size());
  for (Value s : w) {
    if (!stack.empty() && stack.back() == s)
      stack.pop_back();
    else
      stack.push_back(s);
  }
  return stack;
}

struct MatrixCheck {
  /// Per-row residual word after cancellation.
  std::vector<Word> rows;
  /// The residual tuple when every row reduces to a single symbol.
  std::optional<Tuple> residual;
  bool member = false;
};

/// Plays the cancellation game on each row of the r x n matrix whose columns
/// are the given tuples of p_plus.
inline MatrixCheck catalan_matrix_check(const Predicate& p_plus, const std::vector<Tuple>& columns) {
  if (columns.empty() || columns.size() % 2 == 0)
    throw std::invalid_argument("catalan_matrix_check: need an odd number of columns");
  for (const auto& c : columns)
    if (!p_plus.contains(c)) throw std::invalid_argument("catalan_matrix_check: column " + to_string(c) + " not in predicate");
  MatrixCheck out;
  const std::size_t r = static_cast<std::size_t>(p_plus.arity());
  Tuple residual;
  bool single = true;
  for (std::size_t i = 0; i < r; ++i) {
    Word row;
    row.reserve(columns.size());
    for (const auto& c : columns) row.push_back(c[i]);
    Word reduced = cancel(row);
    if (reduced.size() == 1)
      residual.push_back(reduced.front());
    else
      single = false;
    out.rows.push_back(std::move(reduced));
  }
  if (single) {
    out.member = p_plus.contains(residual);
    out.residual = std::move(residual);
  }
  return out;
}

struct CatalanViolation {
  std::vector<Tuple> columns;
  Tuple residual;
};

/// All column sequences of odd length <= max_len drawn from p (with
/// repetition) whose rows all reduce to single symbols forming a tuple
/// outside p. Sequences are enumerated in lexicographic order of tuple
/// indices; only exact duplicates are excluded.
inline std::vector<CatalanViolation> catalan_search(const Predicate& p, int max_len, unsigned workers = 1) {
  if (max_len < 1 || max_len % 2 == 0) throw std::invalid_argument("catalan_search: max_len must be odd and positive");
  const auto& ts = p.tuples();
  const std::size_t n = ts.size();
  const std::size_t r = static_cast<std::size_t>(p.arity());
  std::vector<std::vector<CatalanViolation>> per_first(n);

  // Length-1 games are identities, so start at 3.
  parallel_for(n, workers, [&](std::size_t first) {
    std::vector<std::size_t> idx;
    std::vector<Word> stacks(r);
    auto& found = per_first[first];
    // Depth-first over sequences; row stacks are rebuilt incrementally.
    std::vector<std::vector<Word>> saved;
    auto push = [&](std::size_t t) {
      saved.push_back(stacks);
      idx.push_back(t);
      for (std::size_t i = 0; i < r; ++i) {
        auto& st = stacks[i];
        Value s = ts[t][i];
        if (!st.empty() && st.back() == s)
          st.pop_back();
        else
          st.push_back(s);
      }
    };
    auto pop = [&] {
      stacks = std::move(saved.back());
      saved.pop_back();
      idx.pop_back();
    };
    auto inspect = [&] {
      Tuple residual(r);
      for (std::size_t i = 0; i < r; ++i) {
        if (stacks[i].size() != 1) return;
        residual[i] = stacks[i].front();
      }
      if (p.contains(residual)) return;
      CatalanViolation v;
      for (auto k : idx) v.columns.push_back(ts[k]);
      v.residual = std::move(residual);
      found.push_back(std::move(v));
    };
    auto rec = [&](auto&& self) -> void {
      if (idx.size() >= 3 && idx.size() % 2 == 1) inspect();
      if (static_cast<int>(idx.size()) == max_len) return;
      for (std::size_t t = 0; t < n; ++t) {
        push(t);
        self(self);
        pop();
      }
    };
    push(first);
    rec(rec);
  });

  std::vector<CatalanViolation> all;
  for (auto& v : per_first)
    for (auto& x : v) all.push_back(std::move(x));
  return all;
}

}  // namespace nrd
