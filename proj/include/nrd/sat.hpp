#pragma once

// CNF formulas with a variable registry, a small CDCL solver, and DIMACS I/O.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrd/errors.hpp"

namespace nrd::sat {

/// Clauses over variables 1..n; a literal is +v or -v.
class CnfFormula {
 public:
  int num_vars() const { return static_cast<int>(registry_.size()); }
  const std::vector<std::vector<int>>& clauses() const { return clauses_; }
  std::size_t num_clauses() const { return clauses_.size(); }

  /// Registers a fresh variable with a meaning tag and returns its index.
  int new_var(std::string tag) {
    registry_.push_back(std::move(tag));
    return num_vars();
  }
  const std::string& tag(int var) const { return registry_.at(static_cast<std::size_t>(var - 1)); }
  const std::vector<std::string>& registry() const { return registry_; }

  void add_clause(std::vector<int> lits) {
    for (int l : lits)
      if (l == 0 || std::abs(l) > num_vars()) throw std::invalid_argument("CnfFormula: literal references an unregistered variable");
    clauses_.push_back(std::move(lits));
  }

 private:
  std::vector<std::string> registry_;
  std::vector<std::vector<int>> clauses_;
};

enum class Status { kSat, kUnsat };

struct SolveResult {
  Status status = Status::kUnsat;
  /// model[v] for v in 1..n (index 0 unused).
  std::vector<bool> model;
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
};

struct SolverOptions {
  /// 0 means unlimited.
  std::uint64_t conflict_budget = 0;
};

/// Conflict-driven clause learning with two watched literals, first-UIP
/// learning, VSIDS activities (ties broken by lowest variable index), phase
/// saving and Luby restarts. Fully deterministic.
class Solver {
 public:
  explicit Solver(const CnfFormula& f, SolverOptions opt = {}) : opt_(opt), n_(f.num_vars()) {
    value_.assign(static_cast<std::size_t>(n_), kUndef);
    level_.assign(static_cast<std::size_t>(n_), 0);
    reason_.assign(static_cast<std::size_t>(n_), -1);
    activity_.assign(static_cast<std::size_t>(n_), 0.0);
    phase_.assign(static_cast<std::size_t>(n_), 0);
    seen_.assign(static_cast<std::size_t>(n_), 0);
    watches_.assign(2 * static_cast<std::size_t>(n_), {});
    for (const auto& c : f.clauses()) {
      std::vector<int> lits;
      for (int l : c) lits.push_back(encode(l));
      std::sort(lits.begin(), lits.end());
      lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
      bool taut = false;
      for (std::size_t i = 1; i < lits.size(); ++i)
        if ((lits[i] ^ 1) == lits[i - 1]) taut = true;
      if (taut) continue;
      add_clause(std::move(lits));
      if (inconsistent_) break;
    }
  }

  /// Solves under the given assumption literals (DIMACS signs).
  SolveResult solve(const std::vector<int>& assumptions = {}) {
    SolveResult res;
    if (inconsistent_) return res;
    backtrack(0);
    if (propagate() != -1) {
      inconsistent_ = true;
      return res;
    }
    std::vector<int> assume;
    for (int a : assumptions) {
      if (a == 0 || std::abs(a) > n_) throw std::invalid_argument("Solver: assumption out of range");
      assume.push_back(encode(a));
    }

    std::uint64_t restart_index = 0;
    std::uint64_t conflicts_until_restart = 100 * luby(restart_index);
    for (;;) {
      int conflict = propagate();
      if (conflict != -1) {
        ++res.conflicts;
        ++conflicts_;
        if (opt_.conflict_budget && res.conflicts > opt_.conflict_budget)
          throw ResourceError("solver: conflict budget exhausted", static_cast<long long>(res.conflicts));
        if (decision_level() == 0) {
          inconsistent_ = true;
          return finish(res, Status::kUnsat);
        }
        int backjump = 0;
        std::vector<int> learnt = analyze(conflict, backjump);
        backtrack(backjump);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          int idx = add_clause(learnt);
          enqueue(learnt[0], idx);
        }
        decay();
        if (--conflicts_until_restart == 0) {
          conflicts_until_restart = 100 * luby(++restart_index);
          backtrack(0);
        }
        continue;
      }
      // Assumptions occupy the first decision levels.
      int next = -1;
      while (decision_level() < static_cast<int>(assume.size())) {
        int a = assume[static_cast<std::size_t>(decision_level())];
        if (lit_value(a) == kTrue) {
          trail_lim_.push_back(trail_.size());
        } else if (lit_value(a) == kFalse) {
          return finish(res, Status::kUnsat);
        } else {
          next = a;
          break;
        }
      }
      if (next == -1) {
        int v = pick_branch();
        if (v == -1) {
          res.model.assign(static_cast<std::size_t>(n_) + 1, false);
          for (int i = 0; i < n_; ++i) res.model[static_cast<std::size_t>(i) + 1] = value_[static_cast<std::size_t>(i)] == kTrue;
          return finish(res, Status::kSat);
        }
        next = 2 * v + (phase_[static_cast<std::size_t>(v)] ? 0 : 1);
      }
      ++res.decisions;
      trail_lim_.push_back(trail_.size());
      enqueue(next, -1);
    }
  }

 private:
  static constexpr std::int8_t kUndef = -1, kFalse = 0, kTrue = 1;

  // Literal encoding: 2*(v-1) for +v, 2*(v-1)+1 for -v.
  static int encode(int l) { return l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1; }
  static int var_of(int lit) { return lit >> 1; }

  std::int8_t lit_value(int lit) const {
    auto v = value_[static_cast<std::size_t>(var_of(lit))];
    if (v == kUndef) return kUndef;
    return (lit & 1) ? static_cast<std::int8_t>(1 - v) : v;
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  SolveResult& finish(SolveResult& r, Status s) {
    r.status = s;
    backtrack(0);
    return r;
  }

  int add_clause(std::vector<int> lits) {
    if (lits.empty()) {
      inconsistent_ = true;
      return -1;
    }
    if (lits.size() == 1) {
      auto v = lit_value(lits[0]);
      if (v == kFalse) inconsistent_ = true;
      if (v == kUndef) enqueue(lits[0], -1);
      return -1;
    }
    int idx = static_cast<int>(clauses_.size());
    watches_[static_cast<std::size_t>(lits[0] ^ 1)].push_back(idx);
    watches_[static_cast<std::size_t>(lits[1] ^ 1)].push_back(idx);
    clauses_.push_back(std::move(lits));
    return idx;
  }

  void enqueue(int lit, int reason) {
    auto v = static_cast<std::size_t>(var_of(lit));
    value_[v] = (lit & 1) ? kFalse : kTrue;
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(lit);
  }

  /// Returns a conflicting clause index or -1.
  int propagate() {
    while (qhead_ < trail_.size()) {
      int p = trail_[qhead_++];  // p became true; clauses watching ~p... stored under p
      auto& ws = watches_[static_cast<std::size_t>(p)];
      std::size_t keep = 0;
      for (std::size_t i = 0; i < ws.size(); ++i) {
        int ci = ws[i];
        auto& c = clauses_[static_cast<std::size_t>(ci)];
        int false_lit = p ^ 1;
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        if (lit_value(c[0]) == kTrue) {
          ws[keep++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (lit_value(c[k]) != kFalse) {
            std::swap(c[1], c[k]);
            watches_[static_cast<std::size_t>(c[1] ^ 1)].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[keep++] = ci;
        if (lit_value(c[0]) == kFalse) {
          for (std::size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
          ws.resize(keep);
          qhead_ = trail_.size();
          return ci;
        }
        enqueue(c[0], ci);
      }
      ws.resize(keep);
    }
    return -1;
  }

  std::vector<int> analyze(int conflict, int& backjump) {
    std::vector<int> learnt{-1};
    int counter = 0;
    int p = -1;
    std::size_t index = trail_.size();
    int ci = conflict;
    do {
      const auto& c = clauses_[static_cast<std::size_t>(ci)];
      for (std::size_t k = (p == -1 ? 0 : 1); k < c.size(); ++k) {
        int q = c[k];
        auto v = static_cast<std::size_t>(var_of(q));
        if (seen_[v] || level_[v] == 0) continue;
        seen_[v] = 1;
        bump(var_of(q));
        if (level_[v] == decision_level())
          ++counter;
        else
          learnt.push_back(q);
      }
      do {
        p = trail_[--index];
      } while (!seen_[static_cast<std::size_t>(var_of(p))]);
      seen_[static_cast<std::size_t>(var_of(p))] = 0;
      ci = reason_[static_cast<std::size_t>(var_of(p))];
      --counter;
      if (counter > 0 && ci == -1) throw InternalError("solver: missing reason during analysis");
      if (counter > 0) {
        // Reason clauses keep their implied literal first.
        auto& rc = clauses_[static_cast<std::size_t>(ci)];
        if (rc[0] != p) {
          auto it = std::find(rc.begin(), rc.end(), p);
          std::iter_swap(rc.begin(), it);
        }
      }
    } while (counter > 0);
    learnt[0] = p ^ 1;
    for (std::size_t k = 1; k < learnt.size(); ++k) seen_[static_cast<std::size_t>(var_of(learnt[k]))] = 0;

    backjump = 0;
    if (learnt.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k)
        if (level_[static_cast<std::size_t>(var_of(learnt[k]))] > level_[static_cast<std::size_t>(var_of(learnt[max_i]))]) max_i = k;
      std::swap(learnt[1], learnt[max_i]);
      backjump = level_[static_cast<std::size_t>(var_of(learnt[1]))];
    }
    return learnt;
  }

  void backtrack(int level) {
    if (decision_level() <= level) return;
    for (std::size_t i = trail_.size(); i > trail_lim_[static_cast<std::size_t>(level)]; --i) {
      int lit = trail_[i - 1];
      auto v = static_cast<std::size_t>(var_of(lit));
      phase_[v] = (lit & 1) ? 0 : 1;
      value_[v] = kUndef;
      reason_[v] = -1;
    }
    trail_.resize(trail_lim_[static_cast<std::size_t>(level)]);
    trail_lim_.resize(static_cast<std::size_t>(level));
    qhead_ = trail_.size();
  }

  int pick_branch() const {
    int best = -1;
    for (int v = 0; v < n_; ++v) {
      if (value_[static_cast<std::size_t>(v)] != kUndef) continue;
      if (best == -1 || activity_[static_cast<std::size_t>(v)] > activity_[static_cast<std::size_t>(best)]) best = v;
    }
    return best;
  }

  void bump(int v) {
    activity_[static_cast<std::size_t>(v)] += increment_;
    if (activity_[static_cast<std::size_t>(v)] > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      increment_ *= 1e-100;
    }
  }
  void decay() { increment_ /= 0.95; }

  static std::uint64_t luby(std::uint64_t i) {
    // Luby sequence 1,1,2,1,1,2,4,... (0-indexed).
    std::uint64_t size = 1, seq = 0;
    while (size < i + 1) {
      ++seq;
      size = 2 * size + 1;
    }
    while (size - 1 != i) {
      size = (size - 1) >> 1;
      --seq;
      i %= size;
    }
    return std::uint64_t{1} << seq;
  }

  SolverOptions opt_;
  int n_;
  bool inconsistent_ = false;
  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<int>> watches_;  // watches_[lit]: clauses to visit when lit becomes true
  std::vector<std::int8_t> value_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<double> activity_;
  std::vector<char> phase_;
  std::vector<char> seen_;
  std::vector<int> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  double increment_ = 1.0;
  std::uint64_t conflicts_ = 0;
};

inline SolveResult solve(const CnfFormula& f, SolverOptions opt = {}) { return Solver(f, opt).solve(); }

/// True iff the model satisfies every clause.
inline bool satisfies(const CnfFormula& f, const std::vector<bool>& model) {
  if (model.size() != static_cast<std::size_t>(f.num_vars()) + 1) return false;
  for (const auto& c : f.clauses()) {
    bool sat = false;
    for (int l : c)
      if (model[static_cast<std::size_t>(std::abs(l))] == (l > 0)) sat = true;
    if (!sat) return false;
  }
  return true;
}

/// DIMACS with one "c var <index> <tag>" comment per registered variable.
inline std::string to_dimacs(const CnfFormula& f) {
  std::ostringstream out;
  for (int v = 1; v <= f.num_vars(); ++v) out << "c var " << v << ' ' << f.tag(v) << '\n';
  out << "p cnf " << f.num_vars() << ' ' << f.num_clauses() << '\n';
  for (const auto& c : f.clauses()) {
    for (int l : c) out << l << ' ';
    out << "0\n";
  }
  return out.str();
}

inline CnfFormula parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> tags;
  int declared_vars = -1;
  std::vector<std::vector<int>> clauses;
  std::vector<int> current;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == 'c') {
      std::istringstream ls(line);
      std::string c, kw;
      int idx = 0;
      std::string tag;
      if (ls >> c >> kw >> idx && kw == "var" && (ls >> tag)) {
        if (idx < 1) throw std::invalid_argument("dimacs: bad registry comment");
        if (tags.size() < static_cast<std::size_t>(idx)) tags.resize(static_cast<std::size_t>(idx));
        tags[static_cast<std::size_t>(idx - 1)] = tag;
      }
      continue;
    }
    if (line[0] == 'p') {
      std::istringstream ls(line);
      std::string p, cnf;
      std::size_t nc = 0;
      if (!(ls >> p >> cnf >> declared_vars >> nc) || cnf != "cnf") throw std::invalid_argument("dimacs: bad header");
      continue;
    }
    std::istringstream ls(line);
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        clauses.push_back(current);
        current.clear();
      } else {
        current.push_back(lit);
      }
    }
  }
  if (declared_vars < 0) throw std::invalid_argument("dimacs: missing header");
  if (!current.empty()) throw std::invalid_argument("dimacs: unterminated clause");
  CnfFormula f;
  for (int v = 1; v <= declared_vars; ++v) {
    std::string tag = static_cast<std::size_t>(v) <= tags.size() && !tags[static_cast<std::size_t>(v - 1)].empty()
                          ? tags[static_cast<std::size_t>(v - 1)]
                          : "v" + std::to_string(v);
    f.new_var(tag);
  }
  for (auto& c : clauses) f.add_clause(std::move(c));
  return f;
}

/// Reads a model in solver-output form ("v 1 -2 3 ... 0", optional "s" line)
/// or as bare signed literals.
inline std::vector<bool> parse_model(const std::string& text, int num_vars) {
  std::vector<bool> model(static_cast<std::size_t>(num_vars) + 1, false);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == 's') continue;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      if (tok == "v") continue;
      int lit = std::stoi(tok);
      if (lit == 0) continue;
      if (std::abs(lit) > num_vars) throw std::invalid_argument("model: literal out of range");
      model[static_cast<std::size_t>(std::abs(lit))] = lit > 0;
    }
  }
  return model;
}

}  // namespace nrd::sat
