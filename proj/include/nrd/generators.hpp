#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nrd/catalog.hpp"
#include "nrd/errors.hpp"
#include "nrd/hypergraph.hpp"
#include "nrd/nrd.hpp"

namespace nrd {

/// Simple bipartite graph. Left vertex i has combined index i, right vertex j
/// has combined index left + j.
struct BipartiteGraph {
  int left = 0;
  int right = 0;
  std::vector<std::pair<int, int>> edges;

  int vertex_count() const { return left + right; }

  void validate() const {
    if (left < 0 || right < 0) throw std::invalid_argument("BipartiteGraph: negative side size");
    std::vector<std::pair<int, int>> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("BipartiteGraph: duplicate edge");
    for (auto [a, b] : edges)
      if (a < 0 || a >= left || b < 0 || b >= right) throw std::invalid_argument("BipartiteGraph: endpoint out of range");
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(vertex_count()));
    for (auto [a, b] : edges) {
      adj[static_cast<std::size_t>(a)].push_back(left + b);
      adj[static_cast<std::size_t>(left + b)].push_back(a);
    }
    return adj;
  }
};

/// Shortest cycle length of a simple undirected graph; nullopt for a forest.
inline std::optional<int> girth(const std::vector<std::vector<int>>& adj) {
  const std::size_t n = adj.size();
  int best = std::numeric_limits<int>::max();
  std::vector<int> dist(n), parent(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    parent[s] = -1;
    std::deque<int> queue{static_cast<int>(s)};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      if (2 * dist[static_cast<std::size_t>(u)] + 1 >= best) break;
      for (int w : adj[static_cast<std::size_t>(u)]) {
        if (dist[static_cast<std::size_t>(w)] < 0) {
          dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
          parent[static_cast<std::size_t>(w)] = u;
          queue.push_back(w);
        } else if (w != parent[static_cast<std::size_t>(u)]) {
          best = std::min(best, dist[static_cast<std::size_t>(u)] + dist[static_cast<std::size_t>(w)] + 1);
        }
      }
    }
  }
  if (best == std::numeric_limits<int>::max()) return std::nullopt;
  return best;
}

inline std::optional<int> girth(const BipartiteGraph& g) { return girth(g.adjacency()); }

inline bool is_prime(int q) {
  if (q < 2) return false;
  for (int k = 2; k * k <= q; ++k)
    if (q % k == 0) return false;
  return true;
}

struct Girth6Graph {
  int q = 0;
  /// Points on the left, lines on the right.
  BipartiteGraph graph;
  int n_vertices = 0;
  int n_edges = 0;
  int measured_girth = 0;
};

/// Point-line incidence graph of the projective plane over F_q.
inline Girth6Graph gen_girth6(int q) {
  if (!is_prime(q)) throw std::invalid_argument("gen_girth6: q = " + std::to_string(q) + " is not prime");
  // Projective points in normal form: first nonzero coordinate equal to 1.
  std::vector<std::array<int, 3>> pts;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) pts.push_back({1, a, b});
  for (int b = 0; b < q; ++b) pts.push_back({0, 1, b});
  pts.push_back({0, 0, 1});
  const int n = static_cast<int>(pts.size());

  Girth6Graph out;
  out.q = q;
  out.graph.left = n;
  out.graph.right = n;
  for (int p = 0; p < n; ++p)
    for (int l = 0; l < n; ++l) {
      const auto& x = pts[static_cast<std::size_t>(p)];
      const auto& y = pts[static_cast<std::size_t>(l)];
      if ((x[0] * y[0] + x[1] * y[1] + x[2] * y[2]) % q == 0) out.graph.edges.emplace_back(p, l);
    }
  out.n_vertices = 2 * n;
  out.n_edges = static_cast<int>(out.graph.edges.size());
  if (out.n_vertices != 2 * (q * q + q + 1) || out.n_edges != (q + 1) * (q * q + q + 1))
    throw InternalError("gen_girth6: parameter identities violated");
  auto g = girth(out.graph);
  if (!g || *g < 6) throw InternalError("gen_girth6: incidence graph has girth below 6");
  out.measured_girth = *g;
  return out;
}

/// Assignment over {0,1,2} sending the excluded edge to (0,0) and every other
/// edge into C6*. Built from BFS distances to the right endpoint in G - e.
inline Assignment girth6_witness(const BipartiteGraph& g, std::size_t excluded) {
  if (excluded >= g.edges.size()) throw std::invalid_argument("girth6_witness: edge index out of range");
  auto adj = g.adjacency();
  const auto [u, vr] = g.edges[excluded];
  const int v = g.left + vr;
  std::vector<int> dist(adj.size(), -1);
  dist[static_cast<std::size_t>(v)] = 0;
  std::deque<int> queue{v};
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (int w : adj[static_cast<std::size_t>(x)]) {
      if ((x == v && w == u) || (x == u && w == v)) continue;
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(x)] + 1;
        queue.push_back(w);
      }
    }
  }
  const int du = dist[static_cast<std::size_t>(u)];
  if (du >= 0 && du < 5)
    throw InternalError("girth6_witness: a cycle of length " + std::to_string(du + 1) + " passes through the edge");

  // Walk the 6-cycle 0 -(1,0)- ... : left layers 1,3,5+ and right layers 0,2,4+.
  static constexpr int kLeft[6] = {0, 1, 0, 2, 0, 0};
  static constexpr int kRight[5] = {0, 0, 2, 0, 1};
  Assignment psi(adj.size());
  for (int x = 0; x < g.vertex_count(); ++x) {
    int d = dist[static_cast<std::size_t>(x)];
    if (x < g.left)
      psi[static_cast<std::size_t>(x)] = kLeft[d < 0 ? 5 : std::min(d, 5)];
    else
      psi[static_cast<std::size_t>(x)] = kRight[d < 0 ? 4 : std::min(d, 4)];
  }

  const Predicate star = fixtures::c6_star();
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    Tuple t{psi[static_cast<std::size_t>(g.edges[k].first)], psi[static_cast<std::size_t>(g.left + g.edges[k].second)]};
    bool in_star = star.contains(t);
    if (k == excluded ? (t != Tuple{0, 0}) : !in_star)
      throw InternalError("girth6_witness: layering produced an invalid value on edge " + std::to_string(k));
  }
  return psi;
}

/// The graph as an arity-2 partite instance; labels default to "a<i>"/"b<j>".
inline PartiteHypergraph bipartite_instance(const BipartiteGraph& g, const std::string& left_prefix = "a",
                                            const std::string& right_prefix = "b") {
  g.validate();
  std::vector<std::vector<std::string>> parts(2);
  for (int i = 0; i < g.left; ++i) parts[0].push_back(left_prefix + std::to_string(i + 1));
  for (int j = 0; j < g.right; ++j) parts[1].push_back(right_prefix + std::to_string(j + 1));
  std::vector<Edge> edges;
  for (auto [a, b] : g.edges) edges.push_back({a, g.left + b});
  return PartiteHypergraph(std::move(parts), std::move(edges));
}

struct ShrinkingInstance {
  std::string lemma;
  int q = 0;
  std::vector<std::string> part_roles;
  PartiteHypergraph graph;
  ConditionalPredicate predicate;
  WitnessFn witness;

  std::vector<Assignment> witnesses() const {
    std::vector<Assignment> out(graph.edge_count());
    for (std::size_t e = 0; e < out.size(); ++e) witness(e, out[e]);
    return out;
  }
};

namespace detail {

inline std::vector<std::string> numbered(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

inline std::shared_ptr<const std::vector<Assignment>> all_girth6_witnesses(const BipartiteGraph& g) {
  auto out = std::make_shared<std::vector<Assignment>>();
  for (std::size_t k = 0; k < g.edges.size(); ++k) out->push_back(girth6_witness(g, k));
  return out;
}

}  // namespace detail

/// E = E12 x V3 over a girth-6 incidence graph. With `target_edges` set, the
/// highest-index edges are deleted until exactly that many remain.
inline ShrinkingInstance build_R1S1_instance(int q, int third_part_size,
                                             std::optional<std::size_t> target_edges = std::nullopt) {
  if (third_part_size < 1) throw std::invalid_argument("build_R1S1_instance: third part must be nonempty");
  Girth6Graph g6 = gen_girth6(q);
  const int n = g6.graph.left;
  const int n3 = third_part_size;
  std::vector<std::vector<std::string>> parts{detail::numbered("p", n), detail::numbered("l", n),
                                              detail::numbered("w", n3)};
  std::vector<Edge> edges;
  for (auto [a, b] : g6.graph.edges)
    for (int w = 0; w < n3; ++w) edges.push_back({a, n + b, 2 * n + w});
  if (target_edges) {
    if (*target_edges == 0 || *target_edges > edges.size())
      throw std::invalid_argument("build_R1S1_instance: target edge count must lie in [1, " +
                                  std::to_string(edges.size()) + "]");
    edges.resize(*target_edges);
  }

  auto gw = detail::all_girth6_witnesses(g6.graph);
  WitnessFn witness = [gw, n, n3](std::size_t e, Assignment& out) {
    const auto& base = (*gw)[e / static_cast<std::size_t>(n3)];
    out.assign(base.begin(), base.end());
    out.resize(static_cast<std::size_t>(2 * n + n3), 1);
    out[static_cast<std::size_t>(2 * n) + e % static_cast<std::size_t>(n3)] = 0;
  };
  return ShrinkingInstance{"R1|S1", q, {"points", "lines", "third"},
                           PartiteHypergraph(std::move(parts), std::move(edges)), fixtures::r1s1(), std::move(witness)};
}

/// E = E12 x E34 over two copies of the girth-6 incidence graph.
inline ShrinkingInstance build_R2S2_instance(int q) {
  Girth6Graph g6 = gen_girth6(q);
  const int n = g6.graph.left;
  const std::size_t m = g6.graph.edges.size();
  std::vector<std::vector<std::string>> parts{detail::numbered("p", n), detail::numbered("l", n),
                                              detail::numbered("p'", n), detail::numbered("l'", n)};
  std::vector<Edge> edges;
  edges.reserve(m * m);
  for (auto [a, b] : g6.graph.edges)
    for (auto [c, d] : g6.graph.edges) edges.push_back({a, n + b, 2 * n + c, 3 * n + d});

  auto gw = detail::all_girth6_witnesses(g6.graph);
  WitnessFn witness = [gw, m](std::size_t e, Assignment& out) {
    const auto& first = (*gw)[e / m];
    const auto& second = (*gw)[e % m];
    out.assign(first.begin(), first.end());
    out.insert(out.end(), second.begin(), second.end());
  };
  return ShrinkingInstance{"R2|S2", q, {"points", "lines", "points'", "lines'"},
                           PartiteHypergraph(std::move(parts), std::move(edges)), fixtures::r2s2(), std::move(witness)};
}

}  // namespace nrd
