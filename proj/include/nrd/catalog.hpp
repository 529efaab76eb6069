#pragma once

// Named predicates used throughout the library and its tests.

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nrd/predicate.hpp"

namespace nrd {

using CatalogEntry = std::variant<Predicate, ConditionalPredicate>;

namespace fixtures {

inline Predicate eq(int domain_size) {
  std::vector<Tuple> ts;
  for (int v = 0; v < domain_size; ++v) ts.push_back({v, v});
  return Predicate(domain_size, 2, std::move(ts));
}

/// {0,1}^k minus 0^k.
inline Predicate or_k(int k) {
  auto all = Predicate::full(2, k);
  return all.minus(Predicate(2, k, {Tuple(static_cast<std::size_t>(k), 0)}));
}

inline Predicate one_in_three() { return Predicate::from_digits(2, {"001", "010", "100"}); }

inline Predicate c6() { return Predicate(3, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 2}}); }
inline Predicate c6_star() { return Predicate(3, 2, {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 2}}); }
inline ConditionalPredicate c6_pair() { return ConditionalPredicate(c6_star(), c6()); }

/// 3x3 permutation matrices in row-major order, identity excluded.
inline Predicate boolbck() {
  return Predicate::from_digits(2, {"010100001", "001010100", "100001010", "001100010", "010001100"});
}
inline Predicate boolbck_plus() { return boolbck().united(Predicate::from_digits(2, {"100010001"})); }
inline ConditionalPredicate boolbck_pair() { return ConditionalPredicate(boolbck(), boolbck_plus()); }

inline Predicate cat5() { return Predicate::from_digits(3, {"01012", "11111", "12201", "22222", "20120"}); }
inline Predicate cat5_plus() { return cat5().united(Predicate::from_digits(3, {"00000"})); }
inline ConditionalPredicate cat5_pair() { return ConditionalPredicate(cat5(), cat5_plus()); }

/// Punctured solutions of x+y+z = 0 over F_3.
inline Predicate lin3_star() {
  return Predicate::from_digits(3, {"012", "021", "102", "111", "120", "201", "210", "222"});
}
inline Predicate lin3_star_ambient() { return lin3_star().united(Predicate::from_digits(3, {"000"})); }
inline ConditionalPredicate lin3_star_pair() { return ConditionalPredicate(lin3_star(), lin3_star_ambient()); }

/// (C6*|C6) box ({1,2}|{0,1,2}).
inline ConditionalPredicate r1s1() {
  ConditionalPredicate unary(Predicate(3, 1, {{1}, {2}}), Predicate::full(3, 1));
  return box_product(c6_pair(), unary);
}
/// (C6*|C6) box (C6*|C6).
inline ConditionalPredicate r2s2() { return box_product(c6_pair(), c6_pair()); }

/// pi_J BoolBCK | pi_J BoolBCK+ with J = [9] minus {dropped} (0-indexed).
inline ConditionalPredicate boolbck_drop(int dropped) {
  Coords keep;
  for (int c = 0; c < 9; ++c)
    if (c != dropped) keep.push_back(c);
  return project(boolbck_pair(), keep);
}

/// Arity-3 and arity-4 projections of Cat5 | Cat5+.
inline ConditionalPredicate cat5_p1q1() { return project(cat5_pair(), Coords{0, 2, 3}); }
inline ConditionalPredicate cat5_p2q2() { return project(cat5_pair(), Coords{0, 1, 3}); }
inline ConditionalPredicate cat5_p3q3() { return project(cat5_pair(), Coords{0, 1, 2, 3}); }

/// The four-ary predicate whose OR2 projection uses an empty index set.
inline Predicate four_ary_example() { return Predicate::from_digits(2, {"0000", "0001", "0110", "1111"}); }

}  // namespace fixtures

namespace detail {

inline const std::map<std::string, CatalogEntry>& catalog_table() {
  static const std::map<std::string, CatalogEntry> table = [] {
    using namespace fixtures;
    std::map<std::string, CatalogEntry> t;
    t.emplace("EQ", eq(2));
    t.emplace("EQ3", eq(3));
    t.emplace("OR2", or_k(2));
    t.emplace("OR3", or_k(3));
    t.emplace("1in3SAT", one_in_three());
    t.emplace("C6", c6());
    t.emplace("C6*", c6_star());
    t.emplace("BoolBCK", boolbck());
    t.emplace("BoolBCK+", boolbck_plus());
    t.emplace("Cat5", cat5());
    t.emplace("Cat5+", cat5_plus());
    t.emplace("3LIN*R", lin3_star());
    t.emplace("3LIN*S", lin3_star_ambient());
    t.emplace("FOUR", four_ary_example());
    auto r1 = r1s1();
    auto r2 = r2s2();
    t.emplace("R1", r1.base());
    t.emplace("S1", r1.ambient());
    t.emplace("R2", r2.base());
    t.emplace("S2", r2.ambient());
    auto p1 = cat5_p1q1(), p2 = cat5_p2q2(), p3 = cat5_p3q3();
    t.emplace("P1", p1.base());
    t.emplace("Q1", p1.ambient());
    t.emplace("P2", p2.base());
    t.emplace("Q2", p2.ambient());
    t.emplace("P3", p3.base());
    t.emplace("Q3", p3.ambient());
    t.emplace("C6*|C6", c6_pair());
    t.emplace("BoolBCK|BoolBCK+", boolbck_pair());
    t.emplace("Cat5|Cat5+", cat5_pair());
    t.emplace("3LIN*", lin3_star_pair());
    t.emplace("R1|S1", r1);
    t.emplace("R2|S2", r2);
    t.emplace("P1|Q1", p1);
    t.emplace("P2|Q2", p2);
    t.emplace("P3|Q3", p3);
    for (int i = 0; i < 9; ++i) t.emplace("BoolBCK|BoolBCK+/J" + std::to_string(i + 1), boolbck_drop(i));
    return t;
  }();
  return table;
}

}  // namespace detail

inline std::vector<std::string> catalog_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : detail::catalog_table()) names.push_back(k);
  return names;
}

/// Looks up a fixture. Besides the registered names, "ORk" builds k-SAT and
/// "A|B" pairs any two registered predicates, with "full" standing for D^r.
inline CatalogEntry catalog(const std::string& name) {
  const auto& table = detail::catalog_table();
  if (auto it = table.find(name); it != table.end()) return it->second;
  if (name.size() > 2 && name.rfind("OR", 0) == 0 && name.find('|') == std::string::npos) {
    try {
      std::size_t used = 0;
      int k = std::stoi(name.substr(2), &used);
      if (used == name.size() - 2 && k >= 1 && k <= 16) return fixtures::or_k(k);
    } catch (const std::logic_error&) {
    }
  }
  if (auto bar = name.find('|'); bar != std::string::npos) {
    auto left = catalog(name.substr(0, bar));
    if (!std::holds_alternative<Predicate>(left)) throw std::out_of_range("catalog: not a predicate: " + name.substr(0, bar));
    const auto& base = std::get<Predicate>(left);
    std::string right_name = name.substr(bar + 1);
    if (right_name == "full") return ConditionalPredicate::plain(base);
    auto right = catalog(right_name);
    if (!std::holds_alternative<Predicate>(right)) throw std::out_of_range("catalog: not a predicate: " + right_name);
    return ConditionalPredicate(base, std::get<Predicate>(right));
  }
  throw std::out_of_range("catalog: unknown name '" + name + "'");
}

inline Predicate catalog_predicate(const std::string& name) {
  auto e = catalog(name);
  if (auto* p = std::get_if<Predicate>(&e)) return *p;
  throw std::out_of_range("catalog: '" + name + "' is a conditional predicate");
}

/// Conditional fixture; a plain predicate name yields P | D^r.
inline ConditionalPredicate catalog_conditional(const std::string& name) {
  auto e = catalog(name);
  if (auto* p = std::get_if<Predicate>(&e)) return ConditionalPredicate::plain(*p);
  return std::get<ConditionalPredicate>(e);
}

}  // namespace nrd
