#pragma once

// Finite-domain predicates and the algebra performed on them.
//
// Coordinates are 0-indexed throughout the C++ API. Text and JSON I/O (see
// json_io.hpp and the CLI) use 1-indexed coordinates; conversion happens only
// at that boundary.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nrd {

using Value = int;
using Tuple = std::vector<Value>;
using Coords = std::vector<int>;

/// Paper-style digit string, e.g. (0,1,0) -> "010". Values must be < 10.
inline std::string to_digits(std::span<const Value> t) {
  std::string s;
  s.reserve(t.size());
  for (Value v : t) {
    if (v < 0 || v > 9) throw std::invalid_argument("to_digits: value out of digit range");
    s.push_back(static_cast<char>('0' + v));
  }
  return s;
}

inline Tuple parse_digits(std::string_view s) {
  Tuple t;
  t.reserve(s.size());
  for (char c : s) {
    if (c < '0' || c > '9') throw std::invalid_argument("parse_digits: not a digit string: " + std::string(s));
    t.push_back(c - '0');
  }
  return t;
}

/// "(0,1,2)"
inline std::string to_string(std::span<const Value> t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(t[i]);
  }
  return s + ")";
}

inline std::string format_tuple(std::span<const Value> t, int domain_size) {
  return domain_size <= 10 ? to_digits(t) : to_string(t);
}

inline Tuple project_tuple(std::span<const Value> t, std::span<const int> coords) {
  Tuple out;
  out.reserve(coords.size());
  for (int c : coords) out.push_back(t[static_cast<std::size_t>(c)]);
  return out;
}

/// A relation P over {0,...,d-1}^r, stored sorted and deduplicated so that
/// equality of predicates is equality of fields.
class Predicate {
 public:
  static constexpr std::size_t kTableLimit = std::size_t{1} << 20;

  Predicate(int domain_size, int arity, std::vector<Tuple> tuples)
      : domain_size_(domain_size), arity_(arity), tuples_(std::move(tuples)) {
    if (domain_size_ < 1) throw std::invalid_argument("Predicate: domain size must be positive");
    if (arity_ < 1) throw std::invalid_argument("Predicate: arity must be positive");
    for (const auto& t : tuples_) {
      if (static_cast<int>(t.size()) != arity_)
        throw std::invalid_argument("Predicate: tuple " + to_string(t) + " has wrong arity");
      for (Value v : t)
        if (v < 0 || v >= domain_size_)
          throw std::invalid_argument("Predicate: tuple " + to_string(t) + " leaves the domain");
    }
    std::sort(tuples_.begin(), tuples_.end());
    tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
    build_table();
  }

  /// Convenience for paper-notation literals such as {"010", "101"}.
  static Predicate from_digits(int domain_size, const std::vector<std::string_view>& rows) {
    if (rows.empty()) throw std::invalid_argument("from_digits: arity unknown for an empty list");
    std::vector<Tuple> ts;
    for (auto r : rows) ts.push_back(parse_digits(r));
    const int arity = static_cast<int>(ts.front().size());
    return Predicate(domain_size, arity, std::move(ts));
  }

  static Predicate full(int domain_size, int arity) {
    std::vector<Tuple> ts;
    Tuple t(static_cast<std::size_t>(arity), 0);
    for (;;) {
      ts.push_back(t);
      int i = arity - 1;
      while (i >= 0 && t[static_cast<std::size_t>(i)] == domain_size - 1) t[static_cast<std::size_t>(i--)] = 0;
      if (i < 0) break;
      ++t[static_cast<std::size_t>(i)];
    }
    return Predicate(domain_size, arity, std::move(ts));
  }

  int domain_size() const { return domain_size_; }
  int arity() const { return arity_; }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }

  /// Number of tuples in the full relation, or nullopt if it overflows.
  std::optional<std::size_t> universe_size() const {
    std::size_t n = 1;
    for (int i = 0; i < arity_; ++i) {
      if (n > (std::size_t{1} << 40) / static_cast<std::size_t>(domain_size_)) return std::nullopt;
      n *= static_cast<std::size_t>(domain_size_);
    }
    return n;
  }
  bool is_full() const {
    auto u = universe_size();
    return u && *u == tuples_.size();
  }

  bool contains(std::span<const Value> t) const {
    if (static_cast<int>(t.size()) != arity_) return false;
    if (!table_.empty()) {
      std::size_t code = 0;
      for (Value v : t) {
        if (v < 0 || v >= domain_size_) return false;
        code = code * static_cast<std::size_t>(domain_size_) + static_cast<std::size_t>(v);
      }
      return table_[code] != 0;
    }
    return std::binary_search(tuples_.begin(), tuples_.end(), t,
                              [](const auto& a, const auto& b) {
                                return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
                              });
  }
  bool contains(const Tuple& t) const { return contains(std::span<const Value>(t)); }

  bool is_subset_of(const Predicate& other) const {
    if (other.domain_size_ != domain_size_ || other.arity_ != arity_) return false;
    return std::all_of(tuples_.begin(), tuples_.end(), [&](const Tuple& t) { return other.contains(t); });
  }

  Predicate minus(const Predicate& other) const {
    std::vector<Tuple> out;
    for (const auto& t : tuples_)
      if (!other.contains(t)) out.push_back(t);
    return Predicate(domain_size_, arity_, std::move(out));
  }

  Predicate united(const Predicate& other) const {
    if (other.domain_size_ != domain_size_ || other.arity_ != arity_)
      throw std::invalid_argument("Predicate::united: shape mismatch");
    auto ts = tuples_;
    ts.insert(ts.end(), other.tuples_.begin(), other.tuples_.end());
    return Predicate(domain_size_, arity_, std::move(ts));
  }

  /// Same tuple set, reinterpreted over a larger domain.
  Predicate with_domain(int domain_size) const {
    return Predicate(domain_size, arity_, tuples_);
  }

  friend bool operator==(const Predicate& a, const Predicate& b) {
    return a.domain_size_ == b.domain_size_ && a.arity_ == b.arity_ && a.tuples_ == b.tuples_;
  }

  std::string str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < tuples_.size(); ++i) {
      if (i) s += ", ";
      s += format_tuple(tuples_[i], domain_size_);
    }
    return s + "}";
  }

 private:
  void build_table() {
    auto u = universe_size();
    if (!u || *u > kTableLimit) return;
    table_.assign(*u, 0);
    for (const auto& t : tuples_) {
      std::size_t code = 0;
      for (Value v : t) code = code * static_cast<std::size_t>(domain_size_) + static_cast<std::size_t>(v);
      table_[code] = 1;
    }
  }

  int domain_size_;
  int arity_;
  std::vector<Tuple> tuples_;
  std::vector<std::uint8_t> table_;
};

/// P | Q with P a strict subset of Q.
class ConditionalPredicate {
 public:
  ConditionalPredicate(Predicate base, Predicate ambient)
      : base_(std::move(base)), ambient_(std::move(ambient)), gap_(base_.domain_size(), base_.arity(), {}) {
    if (base_.domain_size() != ambient_.domain_size() || base_.arity() != ambient_.arity())
      throw std::invalid_argument("ConditionalPredicate: base and ambient shapes differ");
    if (!base_.is_subset_of(ambient_))
      throw std::invalid_argument("ConditionalPredicate: base is not contained in ambient");
    if (base_.size() == ambient_.size())
      throw std::invalid_argument("ConditionalPredicate: base must be a strict subset of ambient");
    gap_ = ambient_.minus(base_);
  }

  /// P | D^r, the plain non-redundancy setting.
  static ConditionalPredicate plain(const Predicate& p) {
    return ConditionalPredicate(p, Predicate::full(p.domain_size(), p.arity()));
  }

  const Predicate& base() const { return base_; }
  const Predicate& ambient() const { return ambient_; }
  /// Q minus P.
  const Predicate& gap() const { return gap_; }
  int domain_size() const { return base_.domain_size(); }
  int arity() const { return base_.arity(); }

  friend bool operator==(const ConditionalPredicate& a, const ConditionalPredicate& b) {
    return a.base_ == b.base_ && a.ambient_ == b.ambient_;
  }

 private:
  Predicate base_;
  Predicate ambient_;
  Predicate gap_;
};

/// Sequence (I_1, ..., I_l) of subsets of the source coordinates. Sets may
/// repeat and may be empty.
class IndexFamily {
 public:
  IndexFamily(int source_arity, std::vector<Coords> sets) : source_arity_(source_arity), sets_(std::move(sets)) {
    if (source_arity_ < 1) throw std::invalid_argument("IndexFamily: source arity must be positive");
    for (auto& s : sets_) {
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      for (int c : s)
        if (c < 0 || c >= source_arity_) throw std::invalid_argument("IndexFamily: coordinate out of range");
    }
  }

  static IndexFamily from_one_based(int source_arity, std::vector<Coords> sets) {
    for (auto& s : sets)
      for (auto& c : s) --c;
    return IndexFamily(source_arity, std::move(sets));
  }

  /// ({1},{2},...,{r})
  static IndexFamily singletons(int arity) {
    std::vector<Coords> sets;
    for (int i = 0; i < arity; ++i) sets.push_back({i});
    return IndexFamily(arity, std::move(sets));
  }

  /// I_j = [r] minus {i_j} for each entry of `dropped` (0-indexed).
  static IndexFamily complements(int source_arity, const std::vector<int>& dropped) {
    std::vector<Coords> sets;
    for (int d : dropped) {
      Coords s;
      for (int c = 0; c < source_arity; ++c)
        if (c != d) s.push_back(c);
      sets.push_back(std::move(s));
    }
    return IndexFamily(source_arity, std::move(sets));
  }

  int source_arity() const { return source_arity_; }
  std::size_t size() const { return sets_.size(); }
  const std::vector<Coords>& sets() const { return sets_; }
  const Coords& operator[](std::size_t j) const { return sets_[j]; }

  bool contains(std::size_t j, int coord) const {
    return std::binary_search(sets_[j].begin(), sets_[j].end(), coord);
  }

  std::vector<Coords> one_based() const {
    auto out = sets_;
    for (auto& s : out)
      for (auto& c : s) ++c;
    return out;
  }

  /// "({1,2},{1,3},{})"
  std::string str() const {
    std::string s = "(";
    for (std::size_t j = 0; j < sets_.size(); ++j) {
      if (j) s += ',';
      s += '{';
      for (std::size_t k = 0; k < sets_[j].size(); ++k) {
        if (k) s += ',';
        s += std::to_string(sets_[j][k] + 1);
      }
      s += '}';
    }
    return s + ")";
  }

  friend bool operator==(const IndexFamily&, const IndexFamily&) = default;
  friend auto operator<=>(const IndexFamily&, const IndexFamily&) = default;

 private:
  int source_arity_;
  std::vector<Coords> sets_;
};

namespace detail {

inline Coords normalize_coords(Coords coords, int arity, const char* who) {
  if (coords.empty()) throw std::invalid_argument(std::string(who) + ": coordinate set is empty");
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  if (coords.front() < 0 || coords.back() >= arity)
    throw std::invalid_argument(std::string(who) + ": coordinate out of range");
  return coords;
}

inline void check_permutation(std::span<const int> sigma, int arity) {
  if (static_cast<int>(sigma.size()) != arity) throw std::invalid_argument("permute: permutation has wrong length");
  std::vector<char> seen(static_cast<std::size_t>(arity), 0);
  for (int s : sigma) {
    if (s < 0 || s >= arity || seen[static_cast<std::size_t>(s)])
      throw std::invalid_argument("permute: not a bijection");
    seen[static_cast<std::size_t>(s)] = 1;
  }
}

}  // namespace detail

/// pi_J P. Output coordinates follow ascending J.
inline Predicate project(const Predicate& p, Coords coords) {
  coords = detail::normalize_coords(std::move(coords), p.arity(), "project");
  std::vector<Tuple> out;
  out.reserve(p.size());
  for (const auto& t : p.tuples()) out.push_back(project_tuple(t, coords));
  return Predicate(p.domain_size(), static_cast<int>(coords.size()), std::move(out));
}

/// Projects both sides; throws if the projection collapses Q onto P.
inline ConditionalPredicate project(const ConditionalPredicate& pq, const Coords& coords) {
  return ConditionalPredicate(project(pq.base(), coords), project(pq.ambient(), coords));
}

/// P^sigma = {(x_sigma(0), ..., x_sigma(r-1)) : x in P}.
inline Predicate permute(const Predicate& p, std::span<const int> sigma) {
  detail::check_permutation(sigma, p.arity());
  std::vector<Tuple> out;
  out.reserve(p.size());
  for (const auto& t : p.tuples()) out.push_back(project_tuple(t, sigma));
  return Predicate(p.domain_size(), p.arity(), std::move(out));
}

inline ConditionalPredicate permute(const ConditionalPredicate& pq, std::span<const int> sigma) {
  return ConditionalPredicate(permute(pq.base(), sigma), permute(pq.ambient(), sigma));
}

inline std::vector<int> inverse_permutation(std::span<const int> sigma) {
  detail::check_permutation(sigma, static_cast<int>(sigma.size()));
  std::vector<int> inv(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) inv[static_cast<std::size_t>(sigma[i])] = static_cast<int>(i);
  return inv;
}

/// A x B as a relation of arity r_a + r_b.
inline Predicate cartesian(const Predicate& a, const Predicate& b) {
  if (a.domain_size() != b.domain_size()) throw std::invalid_argument("cartesian: domain sizes differ");
  std::vector<Tuple> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a.tuples())
    for (const auto& y : b.tuples()) {
      Tuple t = x;
      t.insert(t.end(), y.begin(), y.end());
      out.push_back(std::move(t));
    }
  return Predicate(a.domain_size(), a.arity() + b.arity(), std::move(out));
}

/// (P1|Q1) box (P2|Q2): ambient Q1 x Q2, base (P1 x Q2) u (Q1 x P2).
inline ConditionalPredicate box_product(const ConditionalPredicate& a, const ConditionalPredicate& b) {
  if (a.domain_size() != b.domain_size()) throw std::invalid_argument("box_product: domain sizes differ");
  Predicate ambient = cartesian(a.ambient(), b.ambient());
  Predicate base = cartesian(a.base(), b.ambient()).united(cartesian(a.ambient(), b.base()));
  return ConditionalPredicate(std::move(base), std::move(ambient));
}

}  // namespace nrd
