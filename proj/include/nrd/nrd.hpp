#pragma once

// Non-redundancy witnesses: search, checking, and exact NRD at toy scale.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrd/errors.hpp"
#include "nrd/hypergraph.hpp"
#include "nrd/parallel.hpp"
#include "nrd/predicate.hpp"

namespace nrd {

/// psi : V -> D, indexed by vertex id.
using Assignment = std::vector<int>;

/// Produces psi_e for edge index e into `out` (resized by the callee).
using WitnessFn = std::function<void(std::size_t edge, Assignment& out)>;

struct NrdCertificate {
  /// psi_e per edge; empty when witnesses were not kept.
  std::vector<Assignment> witnesses;
  std::vector<bool> verified;
};

struct NrdResult {
  bool non_redundant = false;
  std::optional<std::size_t> failed_edge;
  std::string reason;
  NrdCertificate certificate;
};

struct VerifyOptions {
  unsigned workers = 1;
  bool keep_witnesses = true;
  /// Search nodes per edge before giving up with a ResourceError.
  std::uint64_t max_assignments = 50'000'000;
};

namespace detail {

inline void require_shape(const Hypergraph& h, const ConditionalPredicate& pq, const char* who) {
  if (h.arity() != pq.arity())
    throw std::invalid_argument(std::string(who) + ": instance arity " + std::to_string(h.arity()) +
                                " does not match predicate arity " + std::to_string(pq.arity()));
}

/// Flat lookup: 0 outside Q, 1 in P, 2 in Q \ P.
class MembershipTable {
 public:
  explicit MembershipTable(const ConditionalPredicate& pq) : d_(pq.domain_size()), r_(pq.arity()) {
    auto u = pq.ambient().universe_size();
    if (!u || *u > (std::size_t{1} << 26)) return;
    table_.assign(*u, 0);
    for (const auto& t : pq.base().tuples()) table_[code(t)] = 1;
    for (const auto& t : pq.gap().tuples()) table_[code(t)] = 2;
  }
  bool flat() const { return !table_.empty(); }

  template <typename Get>
  std::uint8_t classify(Get&& value_at) const {
    std::size_t c = 0;
    for (int k = 0; k < r_; ++k) c = c * static_cast<std::size_t>(d_) + static_cast<std::size_t>(value_at(k));
    return table_[c];
  }

  std::size_t code(const Tuple& t) const {
    std::size_t c = 0;
    for (Value v : t) c = c * static_cast<std::size_t>(d_) + static_cast<std::size_t>(v);
    return c;
  }

 private:
  int d_, r_;
  std::vector<std::uint8_t> table_;
};

}  // namespace detail

/// Checks a single witness: psi P-satisfies every edge but `edge`, and puts
/// `edge` into Q \ P. Returns an explanation on failure.
inline std::optional<std::string> check_witness(const Hypergraph& h, const ConditionalPredicate& pq, std::size_t edge,
                                                const Assignment& psi) {
  detail::require_shape(h, pq, "check_witness");
  if (psi.size() != static_cast<std::size_t>(h.vertex_count())) return "assignment is not total on the vertex set";
  for (int v : psi)
    if (v < 0 || v >= pq.domain_size()) return "assignment leaves the domain";
  Tuple t(static_cast<std::size_t>(h.arity()));
  for (std::size_t k = 0; k < h.edge_count(); ++k) {
    const auto& e = h.edge(k);
    for (std::size_t i = 0; i < e.size(); ++i) t[i] = psi[static_cast<std::size_t>(e[i])];
    if (k == edge) {
      if (!pq.gap().contains(t)) return "excluded edge " + std::to_string(k) + " maps to " + to_string(t) + ", not in Q\\P";
    } else if (!pq.base().contains(t)) {
      return "edge " + std::to_string(k) + " maps to " + to_string(t) + ", not in P";
    }
  }
  return std::nullopt;
}

/// Check-given mode: verifies psi_e for every edge, in parallel over edges.
inline NrdResult check_nrd(const Hypergraph& h, const ConditionalPredicate& pq, const WitnessFn& witness,
                           unsigned workers = 1) {
  detail::require_shape(h, pq, "check_nrd");
  detail::MembershipTable table(pq);
  const std::size_t m = h.edge_count();
  const int r = h.arity();
  std::vector<int> flat_edges;
  flat_edges.reserve(m * static_cast<std::size_t>(r));
  for (const auto& e : h.edges()) flat_edges.insert(flat_edges.end(), e.begin(), e.end());

  std::vector<char> ok(m, 0);
  std::vector<std::string> why(m);
  std::atomic<bool> stop{false};
  parallel_for(m, workers, [&](std::size_t e) {
    if (stop.load(std::memory_order_relaxed)) return;
    Assignment psi;
    witness(e, psi);
    std::optional<std::string> err;
    if (!table.flat()) {
      err = check_witness(h, pq, e, psi);
    } else if (psi.size() != static_cast<std::size_t>(h.vertex_count())) {
      err = "assignment is not total on the vertex set";
    } else if (std::any_of(psi.begin(), psi.end(), [&](int v) { return v < 0 || v >= pq.domain_size(); })) {
      err = "assignment leaves the domain";
    } else {
      for (std::size_t k = 0; k < m; ++k) {
        const int* ek = flat_edges.data() + k * static_cast<std::size_t>(r);
        std::uint8_t c = table.classify([&](int i) { return psi[static_cast<std::size_t>(ek[i])]; });
        if (c != (k == e ? 2 : 1)) {
          err = check_witness(h, pq, e, psi);
          if (!err) err = "edge " + std::to_string(k) + " not satisfied";
          break;
        }
      }
    }
    if (err) {
      why[e] = *err;
      stop = true;
    } else {
      ok[e] = 1;
    }
  });

  NrdResult res;
  res.non_redundant = true;
  res.certificate.verified.assign(ok.begin(), ok.end());
  for (std::size_t e = 0; e < m; ++e)
    if (!ok[e] && !why[e].empty()) {
      res.non_redundant = false;
      res.failed_edge = e;
      res.reason = why[e];
      break;
    }
  if (res.non_redundant && std::find(ok.begin(), ok.end(), 0) != ok.end()) throw InternalError("check_nrd: lost result");
  return res;
}

inline NrdResult check_nrd(const Hypergraph& h, const ConditionalPredicate& pq, const std::vector<Assignment>& witnesses,
                           unsigned workers = 1) {
  if (witnesses.size() != h.edge_count()) throw std::invalid_argument("check_nrd: need one witness per edge");
  auto res = check_nrd(h, pq, [&](std::size_t e, Assignment& out) { out = witnesses[e]; }, workers);
  if (res.non_redundant) res.certificate.witnesses = witnesses;
  return res;
}

namespace detail {

/// Backtracking search for psi_e with generalized arc consistency on every
/// constraint.
class WitnessSearch {
 public:
  using Mask = std::uint64_t;

  WitnessSearch(const Hypergraph& h, const ConditionalPredicate& pq, std::uint64_t budget)
      : h_(h), pq_(pq), budget_(budget), n_(static_cast<std::size_t>(h.vertex_count())) {
    if (pq.domain_size() > 64) throw std::invalid_argument("verify_nrd: domain size above 64 is unsupported");
    incident_.resize(n_);
    for (std::size_t k = 0; k < h.edge_count(); ++k) {
      const auto& e = h.edge(k);
      for (std::size_t i = 0; i < e.size(); ++i) {
        bool first = std::find(e.begin(), e.begin() + static_cast<long>(i), e[i]) == e.begin() + static_cast<long>(i);
        if (first) incident_[static_cast<std::size_t>(e[i])].push_back(k);
      }
    }
    full_ = pq.domain_size() == 64 ? ~Mask{0} : ((Mask{1} << pq.domain_size()) - 1);
    default_value_ = pq.base().empty() ? 0 : pq.base().tuples().front().front();
  }

  std::optional<Assignment> find(std::size_t excluded) {
    excluded_ = excluded;
    nodes_ = 0;
    std::vector<Mask> dom(n_, full_);
    std::vector<std::size_t> queue(h_.edge_count());
    for (std::size_t k = 0; k < queue.size(); ++k) queue[k] = k;
    // Vertices of the excluded edge are branched on first.
    priority_.clear();
    for (int v : h_.edge(excluded))
      if (std::find(priority_.begin(), priority_.end(), v) == priority_.end()) priority_.push_back(v);
    if (!propagate(dom, queue)) return std::nullopt;
    if (!search(dom)) return std::nullopt;
    Assignment psi(n_);
    for (std::size_t v = 0; v < n_; ++v) {
      if (incident_[v].empty()) {
        psi[v] = default_value_;
      } else {
        psi[v] = std::countr_zero(dom[v]);
      }
    }
    return psi;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  const Predicate& relation(std::size_t k) const { return k == excluded_ ? pq_.gap() : pq_.base(); }

  bool revise(std::vector<Mask>& dom, std::size_t k, std::vector<std::size_t>& queue) {
    const auto& e = h_.edge(k);
    const std::size_t r = e.size();
    Mask support[64] = {};
    for (const auto& t : relation(k).tuples()) {
      bool fits = true;
      for (std::size_t i = 0; i < r && fits; ++i) {
        if (!((dom[static_cast<std::size_t>(e[i])] >> t[i]) & 1u)) fits = false;
        for (std::size_t j = 0; j < i && fits; ++j)
          if (e[j] == e[i] && t[j] != t[i]) fits = false;
      }
      if (!fits) continue;
      for (std::size_t i = 0; i < r; ++i) support[i] |= Mask{1} << t[i];
    }
    for (std::size_t i = 0; i < r; ++i) {
      auto v = static_cast<std::size_t>(e[i]);
      Mask next = dom[v] & support[i];
      if (next == dom[v]) continue;
      if (next == 0) return false;
      dom[v] = next;
      for (auto c : incident_[v])
        if (c != k) queue.push_back(c);
    }
    return true;
  }

  bool propagate(std::vector<Mask>& dom, std::vector<std::size_t>& queue) {
    while (!queue.empty()) {
      std::size_t k = queue.back();
      queue.pop_back();
      if (!revise(dom, k, queue)) return false;
    }
    return true;
  }

  bool search(std::vector<Mask>& dom) {
    if (++nodes_ > budget_) throw ResourceError("verify_nrd: search budget exhausted");
    std::size_t pick = n_;
    for (int v : priority_)
      if (std::popcount(dom[static_cast<std::size_t>(v)]) > 1) {
        pick = static_cast<std::size_t>(v);
        break;
      }
    if (pick == n_) {
      int best_size = 65;
      for (std::size_t v = 0; v < n_; ++v) {
        if (incident_[v].empty()) continue;
        int s = std::popcount(dom[v]);
        if (s <= 1) continue;
        if (s < best_size || (s == best_size && incident_[v].size() > incident_[pick].size())) {
          best_size = s;
          pick = v;
        }
      }
    }
    if (pick == n_) return true;
    Mask options = dom[pick];
    while (options) {
      int value = std::countr_zero(options);
      options &= options - 1;
      std::vector<Mask> trial = dom;
      trial[pick] = Mask{1} << value;
      std::vector<std::size_t> queue(incident_[pick].begin(), incident_[pick].end());
      if (propagate(trial, queue) && search(trial)) {
        dom = std::move(trial);
        return true;
      }
    }
    return false;
  }

  const Hypergraph& h_;
  const ConditionalPredicate& pq_;
  std::uint64_t budget_;
  std::size_t n_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<int> priority_;
  Mask full_ = 0;
  int default_value_ = 0;
  std::size_t excluded_ = 0;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// Searches psi_e for one edge; nullopt means the edge is redundant.
inline std::optional<Assignment> find_witness(const Hypergraph& h, const ConditionalPredicate& pq, std::size_t edge,
                                              std::uint64_t max_assignments = 50'000'000) {
  detail::require_shape(h, pq, "find_witness");
  if (edge >= h.edge_count()) throw std::invalid_argument("find_witness: edge index out of range");
  detail::WitnessSearch s(h, pq, max_assignments);
  return s.find(edge);
}

/// Find-witnesses mode: searches psi_e for every edge. On failure reports the
/// first (lowest-index) edge without a witness.
inline NrdResult verify_nrd(const Hypergraph& h, const ConditionalPredicate& pq, const VerifyOptions& opt = {}) {
  detail::require_shape(h, pq, "verify_nrd");
  const std::size_t m = h.edge_count();
  std::vector<std::optional<Assignment>> found(m);
  std::vector<char> done(m, 0);
  std::atomic<std::size_t> first_failure{m};
  parallel_for(m, opt.workers, [&](std::size_t e) {
    if (e > first_failure.load()) return;
    detail::WitnessSearch s(h, pq, opt.max_assignments);
    found[e] = s.find(e);
    done[e] = 1;
    if (!found[e]) {
      std::size_t cur = first_failure.load();
      while (e < cur && !first_failure.compare_exchange_weak(cur, e)) {
      }
    }
  });
  NrdResult res;
  res.certificate.verified.assign(m, false);
  for (std::size_t e = 0; e < m; ++e) {
    if (done[e] && found[e]) {
      auto err = check_witness(h, pq, e, *found[e]);
      if (err) throw InternalError("verify_nrd: search produced an invalid witness: " + *err);
      res.certificate.verified[e] = true;
    }
  }
  if (first_failure.load() < m) {
    res.non_redundant = false;
    res.failed_edge = first_failure.load();
    res.reason = "no assignment violates edge " + std::to_string(*res.failed_edge) + " alone";
    return res;
  }
  res.non_redundant = true;
  if (opt.keep_witnesses) {
    res.certificate.witnesses.reserve(m);
    for (auto& w : found) res.certificate.witnesses.push_back(std::move(*w));
  }
  return res;
}

struct NrdExactResult {
  long long value = 0;
  Hypergraph witness_instance;
  std::uint64_t nodes = 0;
};

struct NrdExactOptions {
  /// Sizes of V_1..V_r; when empty the candidates are all of V^r.
  std::vector<int> part_sizes;
  std::uint64_t node_budget = 200'000'000;
};

namespace detail {

/// Dynamic bitset over all assignments V -> D.
class AssignmentSet {
 public:
  AssignmentSet() = default;
  explicit AssignmentSet(std::size_t bits) : words_((bits + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void fill(std::size_t bits) {
    std::fill(words_.begin(), words_.end(), ~std::uint64_t{0});
    if (bits % 64) words_.back() = (std::uint64_t{1} << (bits % 64)) - 1;
  }
  void intersect(const AssignmentSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  }
  bool intersects(const AssignmentSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }
  /// Whether (this & a & b) is nonempty.
  bool intersects(const AssignmentSet& a, const AssignmentSet& b) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & a.words_[i] & b.words_[i]) return true;
    return false;
  }
  bool any() const {
    return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
  }

 private:
  std::vector<std::uint64_t> words_;
};

struct ExactProblem {
  int n = 0;
  std::vector<std::string> labels;
  std::vector<Edge> candidates;
  std::vector<AssignmentSet> sat;  // psi with e in P
  std::vector<AssignmentSet> gap;  // psi with e in Q \ P
  std::size_t bits = 0;
};

inline ExactProblem build_exact_problem(const ConditionalPredicate& pq, int n, const std::vector<int>& part_sizes) {
  const int r = pq.arity();
  const int d = pq.domain_size();
  ExactProblem prob;
  std::vector<std::vector<int>> choices(static_cast<std::size_t>(r));
  if (part_sizes.empty()) {
    if (n < 1) throw std::invalid_argument("nrd_exact: need at least one vertex");
    prob.n = n;
    for (int v = 0; v < n; ++v) prob.labels.push_back("v" + std::to_string(v + 1));
    for (auto& c : choices)
      for (int v = 0; v < n; ++v) c.push_back(v);
  } else {
    if (static_cast<int>(part_sizes.size()) != r) throw std::invalid_argument("nrd_exact: need one part size per coordinate");
    int next = 0;
    for (int i = 0; i < r; ++i) {
      if (part_sizes[static_cast<std::size_t>(i)] < 1) throw std::invalid_argument("nrd_exact: part sizes must be positive");
      for (int k = 0; k < part_sizes[static_cast<std::size_t>(i)]; ++k) {
        choices[static_cast<std::size_t>(i)].push_back(next++);
        prob.labels.push_back("p" + std::to_string(i + 1) + "_" + std::to_string(k + 1));
      }
    }
    prob.n = next;
  }
  double space = std::pow(static_cast<double>(d), prob.n);
  if (space > static_cast<double>(std::size_t{1} << 22))
    throw std::invalid_argument("nrd_exact: d^n = " + std::to_string(static_cast<long long>(space)) + " assignments is too many");
  prob.bits = static_cast<std::size_t>(space);

  // Candidate edges in lexicographic order.
  std::vector<std::size_t> idx(static_cast<std::size_t>(r), 0);
  for (;;) {
    Edge e;
    for (int i = 0; i < r; ++i) e.push_back(choices[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]]);
    prob.candidates.push_back(std::move(e));
    int i = r - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] + 1 == choices[static_cast<std::size_t>(i)].size())
      idx[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
  }

  prob.sat.assign(prob.candidates.size(), AssignmentSet(prob.bits));
  prob.gap.assign(prob.candidates.size(), AssignmentSet(prob.bits));
  std::vector<int> psi(static_cast<std::size_t>(prob.n), 0);
  Tuple t(static_cast<std::size_t>(r));
  for (std::size_t a = 0; a < prob.bits; ++a) {
    std::size_t code = a;
    for (int v = prob.n - 1; v >= 0; --v) {
      psi[static_cast<std::size_t>(v)] = static_cast<int>(code % static_cast<std::size_t>(d));
      code /= static_cast<std::size_t>(d);
    }
    for (std::size_t c = 0; c < prob.candidates.size(); ++c) {
      for (int i = 0; i < r; ++i) t[static_cast<std::size_t>(i)] = psi[static_cast<std::size_t>(prob.candidates[c][static_cast<std::size_t>(i)])];
      if (pq.base().contains(t))
        prob.sat[c].set(a);
      else if (pq.gap().contains(t))
        prob.gap[c].set(a);
    }
  }
  return prob;
}

inline Hypergraph exact_instance(const ConditionalPredicate& pq, const ExactProblem& prob, const std::vector<std::size_t>& chosen) {
  std::vector<Edge> edges;
  for (auto c : chosen) edges.push_back(prob.candidates[c]);
  return Hypergraph(pq.arity(), prob.labels, std::move(edges));
}

}  // namespace detail

/// Largest non-redundant instance on n vertices by branch and bound over
/// candidate edge sets. Non-redundancy is hereditary, so a branch dies as
/// soon as an added edge leaves some chosen edge (or itself) without a
/// witness.
inline NrdExactResult nrd_exact(const ConditionalPredicate& pq, int n, const NrdExactOptions& opt = {}) {
  auto prob = detail::build_exact_problem(pq, n, opt.part_sizes);
  const std::size_t m = prob.candidates.size();

  using detail::AssignmentSet;
  std::vector<std::size_t> best, current;
  std::uint64_t nodes = 0;

  // state: all_sat = intersection of sat over chosen; windows[k] = witnesses
  // available for chosen[k].
  std::function<void(const AssignmentSet&, std::vector<AssignmentSet>&, const std::vector<std::size_t>&)> dfs =
      [&](const AssignmentSet& all_sat, std::vector<AssignmentSet>& windows, const std::vector<std::size_t>& options) {
        if (++nodes > opt.node_budget)
          throw ResourceError("nrd_exact: node budget exhausted", static_cast<long long>(best.size()));
        if (current.size() > best.size()) best = current;
        if (current.size() + options.size() <= best.size()) return;
        for (std::size_t oi = 0; oi < options.size(); ++oi) {
          if (current.size() + (options.size() - oi) <= best.size()) return;
          std::size_t c = options[oi];
          // Extend with c.
          std::vector<AssignmentSet> next_windows = windows;
          for (auto& w : next_windows) w.intersect(prob.sat[c]);
          AssignmentSet own = prob.gap[c];
          own.intersect(all_sat);
          next_windows.push_back(own);
          AssignmentSet next_sat = all_sat;
          next_sat.intersect(prob.sat[c]);
          current.push_back(c);
          // Later options that keep every window alive.
          std::vector<std::size_t> next_options;
          for (std::size_t oj = oi + 1; oj < options.size(); ++oj) {
            std::size_t c2 = options[oj];
            bool ok = prob.gap[c2].intersects(next_sat);
            for (std::size_t k = 0; ok && k < next_windows.size(); ++k) ok = next_windows[k].intersects(prob.sat[c2]);
            if (ok) next_options.push_back(c2);
          }
          dfs(next_sat, next_windows, next_options);
          current.pop_back();
        }
      };

  AssignmentSet all(prob.bits);
  all.fill(prob.bits);
  std::vector<std::size_t> options;
  for (std::size_t c = 0; c < m; ++c)
    if (prob.gap[c].any()) options.push_back(c);
  std::vector<AssignmentSet> windows;
  dfs(all, windows, options);
  return NrdExactResult{static_cast<long long>(best.size()), detail::exact_instance(pq, prob, best), nodes};
}

/// Oracle for nrd_exact: checks every subset of the candidate edges. Limited
/// to at most 24 candidates.
inline long long nrd_exhaustive(const ConditionalPredicate& pq, int n, const std::vector<int>& part_sizes = {}) {
  auto prob = detail::build_exact_problem(pq, n, part_sizes);
  const std::size_t m = prob.candidates.size();
  if (m > 24) throw std::invalid_argument("nrd_exhaustive: too many candidate edges");
  long long best = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    long long size = std::popcount(mask);
    if (size <= best) continue;
    bool ok = true;
    for (std::size_t e = 0; e < m && ok; ++e) {
      if (!((mask >> e) & 1u)) continue;
      detail::AssignmentSet w = prob.gap[e];
      for (std::size_t f = 0; f < m; ++f)
        if (f != e && ((mask >> f) & 1u)) w.intersect(prob.sat[f]);
      ok = w.any();
    }
    if (ok) best = size;
  }
  return best;
}

}  // namespace nrd
