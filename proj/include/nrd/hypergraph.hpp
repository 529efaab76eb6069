#pragma once

// Instances as ordered hypergraphs, their r-partite form, projections and
// projection hypergraphs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "nrd/predicate.hpp"

namespace nrd {

using Edge = std::vector<int>;

/// An r-uniform instance H = (V, E) with E a set of ordered r-tuples of
/// vertex ids. Vertex ids are dense in [0, |V|).
class Hypergraph {
 public:
  Hypergraph(int arity, std::vector<std::string> labels, std::vector<Edge> edges)
      : arity_(arity), labels_(std::move(labels)), edges_(std::move(edges)) {
    if (arity_ < 1) throw std::invalid_argument("Hypergraph: arity must be positive");
    for (std::size_t v = 0; v < labels_.size(); ++v)
      if (!index_.emplace(labels_[v], static_cast<int>(v)).second)
        throw std::invalid_argument("Hypergraph: duplicate vertex label '" + labels_[v] + "'");
    std::set<Edge> seen;
    for (const auto& e : edges_) {
      if (static_cast<int>(e.size()) != arity_) throw std::invalid_argument("Hypergraph: edge has wrong arity");
      for (int v : e)
        if (v < 0 || v >= vertex_count()) throw std::invalid_argument("Hypergraph: edge references unknown vertex");
      if (!seen.insert(e).second) throw std::invalid_argument("Hypergraph: duplicate edge");
    }
  }

  static Hypergraph from_labels(int arity, std::vector<std::string> labels,
                                const std::vector<std::vector<std::string>>& edges) {
    std::unordered_map<std::string, int> ix;
    for (std::size_t v = 0; v < labels.size(); ++v) ix.emplace(labels[v], static_cast<int>(v));
    std::vector<Edge> es;
    for (const auto& e : edges) {
      Edge out;
      for (const auto& l : e) {
        auto it = ix.find(l);
        if (it == ix.end()) throw std::invalid_argument("Hypergraph: unknown vertex '" + l + "'");
        out.push_back(it->second);
      }
      es.push_back(std::move(out));
    }
    return Hypergraph(arity, std::move(labels), std::move(es));
  }

  int arity() const { return arity_; }
  int vertex_count() const { return static_cast<int>(labels_.size()); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t i) const { return edges_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int v) const { return labels_[static_cast<std::size_t>(v)]; }

  std::optional<int> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Same vertex set, a subset of the edges (given by index).
  Hypergraph with_edges(const std::vector<std::size_t>& keep) const {
    std::vector<Edge> es;
    es.reserve(keep.size());
    for (auto i : keep) es.push_back(edges_.at(i));
    return Hypergraph(arity_, labels_, std::move(es));
  }

 private:
  int arity_;
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, int> index_;
};

/// H = (V_1, ..., V_r, E) with E a subset of V_1 x ... x V_r. Vertex ids are
/// global; part i occupies the id range [offset(i), offset(i) + part_size(i)).
class PartiteHypergraph {
 public:
  PartiteHypergraph(std::vector<std::vector<std::string>> parts, std::vector<Edge> edges)
      : parts_(std::move(parts)), graph_(build(parts_, std::move(edges))) {
    for (const auto& e : graph_.edges())
      for (std::size_t i = 0; i < e.size(); ++i)
        if (part_of(e[i]) != static_cast<int>(i))
          throw std::invalid_argument("PartiteHypergraph: edge coordinate " + std::to_string(i + 1) + " outside its part");
  }

  static PartiteHypergraph from_labels(std::vector<std::vector<std::string>> parts,
                                       const std::vector<std::vector<std::string>>& edges) {
    std::unordered_map<std::string, int> ix;
    int next = 0;
    for (const auto& p : parts)
      for (const auto& l : p) ix.emplace(l, next++);
    std::vector<Edge> es;
    for (const auto& e : edges) {
      Edge out;
      for (const auto& l : e) {
        auto it = ix.find(l);
        if (it == ix.end()) throw std::invalid_argument("PartiteHypergraph: unknown vertex '" + l + "'");
        out.push_back(it->second);
      }
      es.push_back(std::move(out));
    }
    return PartiteHypergraph(std::move(parts), std::move(es));
  }

  int arity() const { return static_cast<int>(parts_.size()); }
  const Hypergraph& graph() const { return graph_; }
  operator const Hypergraph&() const { return graph_; }  // NOLINT
  const std::vector<Edge>& edges() const { return graph_.edges(); }
  std::size_t edge_count() const { return graph_.edge_count(); }
  int vertex_count() const { return graph_.vertex_count(); }
  const std::vector<std::vector<std::string>>& parts() const { return parts_; }
  int part_size(int i) const { return static_cast<int>(parts_[static_cast<std::size_t>(i)].size()); }
  int offset(int i) const {
    int o = 0;
    for (int k = 0; k < i; ++k) o += part_size(k);
    return o;
  }
  int part_of(int v) const {
    int o = 0;
    for (int k = 0; k < arity(); ++k) {
      o += part_size(k);
      if (v < o) return k;
    }
    return -1;
  }

 private:
  static Hypergraph build(const std::vector<std::vector<std::string>>& parts, std::vector<Edge> edges) {
    if (parts.empty()) throw std::invalid_argument("PartiteHypergraph: no parts");
    std::vector<std::string> labels;
    for (const auto& p : parts) labels.insert(labels.end(), p.begin(), p.end());
    return Hypergraph(static_cast<int>(parts.size()), std::move(labels), std::move(edges));
  }

  std::vector<std::vector<std::string>> parts_;
  Hypergraph graph_;
};

/// pi_J H: the parts indexed by J (ascending) with projected, deduplicated
/// edges.
inline PartiteHypergraph project_instance(const PartiteHypergraph& h, Coords coords) {
  coords = detail::normalize_coords(std::move(coords), h.arity(), "project_instance");
  std::vector<std::vector<std::string>> parts;
  std::vector<int> shift;  // old global id -> new global id for kept parts
  int next = 0;
  for (int c : coords) {
    parts.push_back(h.parts()[static_cast<std::size_t>(c)]);
    shift.push_back(next - h.offset(c));
    next += h.part_size(c);
  }
  std::set<Edge> seen;
  std::vector<Edge> edges;
  for (const auto& e : h.edges()) {
    Edge out;
    for (std::size_t k = 0; k < coords.size(); ++k) out.push_back(e[static_cast<std::size_t>(coords[k])] + shift[k]);
    if (seen.insert(out).second) edges.push_back(std::move(out));
  }
  return PartiteHypergraph(std::move(parts), std::move(edges));
}

/// Number of distinct projections pi_J e over the edges.
inline std::size_t projected_edge_count(const Hypergraph& h, const Coords& coords) {
  std::set<Edge> seen;
  for (const auto& e : h.edges()) seen.insert(project_tuple(e, coords));
  return seen.size();
}

struct ProjectionHypergraph {
  PartiteHypergraph graph;
  /// For part j and local vertex k: the source vertex ids pi_{I_j} e it stands for.
  std::vector<std::vector<Edge>> part_tuples;
  /// Source edge index -> target edge index.
  std::vector<std::size_t> edge_map;
  /// Source edges that collided with an earlier one.
  std::size_t merged = 0;
};

/// pr_I H. Part j's vertices are the distinct projections pi_{I_j} e, one
/// edge (pi_{I_1} e, ..., pi_{I_l} e) per source edge. An empty I_j gives a
/// single constant vertex in part j.
inline ProjectionHypergraph projection_hypergraph(const PartiteHypergraph& h, const IndexFamily& family) {
  if (family.source_arity() != h.arity())
    throw std::invalid_argument("projection_hypergraph: family arity does not match instance");
  const std::size_t l = family.size();
  if (l == 0) throw std::invalid_argument("projection_hypergraph: empty family");
  std::vector<std::map<Edge, int>> index(l);
  for (std::size_t j = 0; j < l; ++j)
    for (const auto& e : h.edges()) index[j].emplace(project_tuple(e, family[j]), 0);

  std::vector<std::vector<std::string>> parts(l);
  std::vector<std::vector<Edge>> part_tuples(l);
  std::vector<int> offsets(l, 0);
  int next = 0;
  for (std::size_t j = 0; j < l; ++j) {
    offsets[j] = next;
    for (auto& [tuple, id] : index[j]) {
      id = next++;
      std::string label = std::to_string(j + 1) + "(";
      for (std::size_t k = 0; k < tuple.size(); ++k) {
        if (k) label += ',';
        label += h.graph().label(tuple[k]);
      }
      parts[j].push_back(label + ")");
      part_tuples[j].push_back(tuple);
    }
  }

  std::map<Edge, std::size_t> target_index;
  std::vector<Edge> edges;
  std::vector<std::size_t> edge_map;
  std::size_t merged = 0;
  for (const auto& e : h.edges()) {
    Edge out(l);
    for (std::size_t j = 0; j < l; ++j) out[j] = index[j].at(project_tuple(e, family[j]));
    auto [it, fresh] = target_index.emplace(out, edges.size());
    if (fresh)
      edges.push_back(std::move(out));
    else
      ++merged;
    edge_map.push_back(it->second);
  }
  return ProjectionHypergraph{PartiteHypergraph(std::move(parts), std::move(edges)), std::move(part_tuples),
                              std::move(edge_map), merged};
}

struct ShrinkingEntry {
  Coords coords;
  std::size_t projected = 0;
  double factor = 0.0;  // |E| / |pi_I E|
};

struct ShrinkingReport {
  std::size_t edges = 0;
  std::vector<ShrinkingEntry> entries;
  /// min over the family of the factors: the instance is (lambda, I)-shrinking.
  double lambda = 0.0;
};

/// All nonempty proper subsets of [r], ordered by size then lexicographically.
inline std::vector<Coords> proper_subsets(int arity) {
  std::vector<Coords> out;
  for (int size = 1; size < arity; ++size) {
    std::vector<int> pick(static_cast<std::size_t>(arity), 0);
    std::fill(pick.begin(), pick.begin() + size, 1);
    do {
      Coords s;
      for (int i = 0; i < arity; ++i)
        if (pick[static_cast<std::size_t>(i)]) s.push_back(i);
      out.push_back(std::move(s));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return out;
}

inline ShrinkingReport shrinking_report(const Hypergraph& h, std::vector<Coords> family) {
  ShrinkingReport rep;
  rep.edges = h.edge_count();
  rep.lambda = std::numeric_limits<double>::infinity();
  for (auto& c : family) {
    std::sort(c.begin(), c.end());
    ShrinkingEntry e;
    e.projected = projected_edge_count(h, c);
    e.factor = e.projected == 0 ? 0.0 : static_cast<double>(rep.edges) / static_cast<double>(e.projected);
    e.coords = std::move(c);
    rep.lambda = std::min(rep.lambda, e.factor);
    rep.entries.push_back(std::move(e));
  }
  if (rep.entries.empty()) rep.lambda = 0.0;
  return rep;
}

inline ShrinkingReport shrinking_report(const Hypergraph& h) { return shrinking_report(h, proper_subsets(h.arity())); }

enum class PartitionMode {
  /// Edges keep their coordinate order; parts are colour classes.
  kPositional,
  /// Any rainbow edge is kept with coordinates reordered by colour. Only
  /// meaningful for predicates invariant under coordinate permutations.
  kSymmetric,
};

struct PartitionResult {
  PartiteHypergraph graph;
  std::vector<std::size_t> kept;  // source edge indices
  double retained_fraction = 0.0;
  /// Analytic expectation for one random colouring: r!/r^r for symmetric
  /// mode, a lower bound of r^-r for positional mode.
  double expected_fraction = 0.0;
  bool reordered = false;
};

/// Random r-colourings of V, keeping the best of `retries` attempts.
inline PartitionResult to_r_partite(const Hypergraph& h, std::uint64_t seed, int retries = 16,
                                    PartitionMode mode = PartitionMode::kPositional) {
  const int r = h.arity();
  const int n = h.vertex_count();
  double rr = std::pow(static_cast<double>(r), r);
  double rfact = 1;
  for (int i = 2; i <= r; ++i) rfact *= i;

  // Input that is already partite with respect to positions is kept as is.
  {
    std::vector<int> pos(static_cast<std::size_t>(n), -1);
    bool partite = true;
    for (const auto& e : h.edges())
      for (int i = 0; i < r && partite; ++i) {
        int& p = pos[static_cast<std::size_t>(e[static_cast<std::size_t>(i)])];
        if (p != -1 && p != i) partite = false;
        p = i;
      }
    if (partite && h.edge_count() > 0) {
      std::vector<std::vector<std::string>> parts(static_cast<std::size_t>(r));
      std::vector<int> newid(static_cast<std::size_t>(n), -1);
      std::vector<std::vector<int>> members(static_cast<std::size_t>(r));
      for (int v = 0; v < n; ++v) members[static_cast<std::size_t>(std::max(0, pos[static_cast<std::size_t>(v)]))].push_back(v);
      int next = 0;
      for (int i = 0; i < r; ++i)
        for (int v : members[static_cast<std::size_t>(i)]) {
          newid[static_cast<std::size_t>(v)] = next++;
          parts[static_cast<std::size_t>(i)].push_back(h.label(v));
        }
      std::vector<Edge> edges;
      std::vector<std::size_t> kept;
      for (std::size_t k = 0; k < h.edge_count(); ++k) {
        Edge out;
        for (int v : h.edge(k)) out.push_back(newid[static_cast<std::size_t>(v)]);
        edges.push_back(std::move(out));
        kept.push_back(k);
      }
      double expected = mode == PartitionMode::kSymmetric ? rfact / rr : 1.0 / rr;
      return PartitionResult{PartiteHypergraph(std::move(parts), std::move(edges)), std::move(kept), 1.0, expected, false};
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> colour_dist(0, r - 1);
  std::optional<PartitionResult> best;
  for (int attempt = 0; attempt < std::max(1, retries); ++attempt) {
    std::vector<int> colour(static_cast<std::size_t>(n));
    for (auto& c : colour) c = colour_dist(rng);

    // Rainbow edges grouped by their colour pattern.
    std::map<std::vector<int>, std::vector<std::size_t>> classes;
    std::vector<std::size_t> rainbow;
    for (std::size_t k = 0; k < h.edge_count(); ++k) {
      std::vector<int> pattern;
      for (int v : h.edge(k)) pattern.push_back(colour[static_cast<std::size_t>(v)]);
      auto sorted = pattern;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
      rainbow.push_back(k);
      classes[pattern].push_back(k);
    }

    std::vector<int> part_colour(static_cast<std::size_t>(r));
    std::vector<std::size_t> kept;
    if (mode == PartitionMode::kSymmetric) {
      std::iota(part_colour.begin(), part_colour.end(), 0);
      kept = rainbow;
    } else if (!classes.empty()) {
      auto it = std::max_element(classes.begin(), classes.end(),
                                 [](const auto& a, const auto& b) { return a.second.size() < b.second.size(); });
      part_colour = it->first;
      kept = it->second;
    } else {
      std::iota(part_colour.begin(), part_colour.end(), 0);
    }
    if (best && kept.size() <= best->kept.size()) continue;

    std::vector<int> part_of_colour(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) part_of_colour[static_cast<std::size_t>(part_colour[static_cast<std::size_t>(i)])] = i;
    std::vector<std::vector<std::string>> parts(static_cast<std::size_t>(r));
    std::vector<int> newid(static_cast<std::size_t>(n));
    std::vector<int> counts(static_cast<std::size_t>(r), 0);
    std::vector<std::vector<int>> members(static_cast<std::size_t>(r));
    for (int v = 0; v < n; ++v) members[static_cast<std::size_t>(part_of_colour[static_cast<std::size_t>(colour[static_cast<std::size_t>(v)])])].push_back(v);
    int next = 0;
    for (int i = 0; i < r; ++i)
      for (int v : members[static_cast<std::size_t>(i)]) {
        newid[static_cast<std::size_t>(v)] = next++;
        parts[static_cast<std::size_t>(i)].push_back(h.label(v));
      }
    std::vector<Edge> edges;
    std::set<Edge> seen;
    std::vector<std::size_t> really_kept;
    for (auto k : kept) {
      Edge out(static_cast<std::size_t>(r));
      for (int v : h.edge(k))
        out[static_cast<std::size_t>(part_of_colour[static_cast<std::size_t>(colour[static_cast<std::size_t>(v)])])] =
            newid[static_cast<std::size_t>(v)];
      if (mode == PartitionMode::kPositional) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = newid[static_cast<std::size_t>(h.edge(k)[i])];
      }
      if (!seen.insert(out).second) continue;  // reordering can merge edges
      edges.push_back(std::move(out));
      really_kept.push_back(k);
    }
    double fraction = h.edge_count() ? static_cast<double>(really_kept.size()) / static_cast<double>(h.edge_count()) : 0.0;
    best = PartitionResult{PartiteHypergraph(std::move(parts), std::move(edges)), std::move(really_kept), fraction,
                           mode == PartitionMode::kSymmetric ? rfact / rr : 1.0 / rr,
                           mode == PartitionMode::kSymmetric};
  }
  return std::move(*best);
}

/// Edges whose projection onto `coords` equals `s` (vertex ids).
inline Hypergraph slice_by_projection(const Hypergraph& h, const Coords& coords, const Edge& s) {
  if (coords.size() != s.size()) throw std::invalid_argument("slice_by_projection: key length mismatch");
  for (int c : coords)
    if (c < 0 || c >= h.arity()) throw std::invalid_argument("slice_by_projection: coordinate out of range");
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < h.edge_count(); ++k)
    if (project_tuple(h.edge(k), coords) == s) keep.push_back(k);
  return h.with_edges(keep);
}

struct SliceSummary {
  Edge key;
  std::size_t size = 0;
  /// Number of distinct keys (the projected image).
  std::size_t distinct_keys = 0;
  std::size_t total = 0;  // sum of slice sizes, equals |E|
};

/// The slice maximizing |E_s| over s in pi_coords E (first in key order on ties).
inline SliceSummary argmax_slice(const Hypergraph& h, const Coords& coords) {
  std::map<Edge, std::size_t> counts;
  for (const auto& e : h.edges()) ++counts[project_tuple(e, coords)];
  SliceSummary out;
  out.distinct_keys = counts.size();
  for (const auto& [k, c] : counts) {
    out.total += c;
    if (c > out.size) {
      out.size = c;
      out.key = k;
    }
  }
  return out;
}

}  // namespace nrd
