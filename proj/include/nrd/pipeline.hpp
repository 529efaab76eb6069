#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nrd/catalog.hpp"
#include "nrd/errors.hpp"
#include "nrd/generators.hpp"
#include "nrd/hypergraph.hpp"
#include "nrd/nrd.hpp"
#include "nrd/substructure.hpp"

namespace nrd {

struct ReductionOutput {
  ProjectionHypergraph projection;
  /// phi_e for the produced instance, indexed by produced edge.
  WitnessFn witness;
  /// Check-given result; empty when verification was skipped.
  std::optional<NrdResult> check;

  std::size_t vertices() const { return static_cast<std::size_t>(projection.graph.vertex_count()); }
  std::size_t edges() const { return projection.graph.edge_count(); }
};

namespace detail {

/// g_j as a dense table over D1^{|I_j|}; -1 where g_j is undefined.
struct DenseMaps {
  int d1 = 0;
  std::vector<std::vector<int>> table;

  DenseMaps(const SubstructureCertificate& cert) : d1(cert.source.domain_size()) {
    auto maps = witnessing_maps(cert);
    for (std::size_t j = 0; j < maps.size(); ++j) {
      std::size_t size = 1;
      for (std::size_t k = 0; k < cert.family[j].size(); ++k) size *= static_cast<std::size_t>(d1);
      std::vector<int> t(size, -1);
      for (const auto& [key, value] : maps[j]) t[code(key.begin(), key.end())] = value;
      table.push_back(std::move(t));
    }
  }

  template <typename It>
  std::size_t code(It first, It last) const {
    std::size_t c = 0;
    for (; first != last; ++first) c = c * static_cast<std::size_t>(d1) + static_cast<std::size_t>(*first);
    return c;
  }
};

}  // namespace detail

/// pr_I H for the certificate's family, with phi_e(t) = g_j(psi_e(t)) on part j.
/// The transferred witnesses are checked unless `verify` is false; a failure
/// there means the input certificate or source witnesses were invalid.
inline ReductionOutput apply_reduction(const PartiteHypergraph& h, const WitnessFn& source_witness,
                                       const SubstructureCertificate& cert, unsigned workers = 1, bool verify = true) {
  if (h.arity() != cert.source.arity())
    throw std::invalid_argument("apply_reduction: instance arity " + std::to_string(h.arity()) +
                                " does not match certificate source arity " + std::to_string(cert.source.arity()));
  if (auto chk = verify_certificate(cert); !chk.ok)
    throw std::invalid_argument(std::string("apply_reduction: certificate fails the ") + to_string(chk.violated) +
                                " condition: " + chk.detail);

  ReductionOutput out{projection_hypergraph(h, cert.family), {}, std::nullopt};
  if (out.projection.merged != 0)
    throw InternalError("apply_reduction: " + std::to_string(out.projection.merged) +
                        " source edges collapsed under the projection");

  auto maps = std::make_shared<const detail::DenseMaps>(cert);
  auto tuples = std::make_shared<const std::vector<std::vector<Edge>>>(out.projection.part_tuples);
  std::vector<std::size_t> source_of(out.projection.graph.edge_count());
  for (std::size_t e = 0; e < out.projection.edge_map.size(); ++e) source_of[out.projection.edge_map[e]] = e;
  auto source = std::make_shared<const std::vector<std::size_t>>(std::move(source_of));
  WitnessFn psi_fn = source_witness;

  out.witness = [maps, tuples, source, psi_fn](std::size_t e, Assignment& phi) {
    Assignment psi;
    psi_fn((*source)[e], psi);
    phi.clear();
    for (std::size_t j = 0; j < tuples->size(); ++j) {
      const auto& table = maps->table[j];
      for (const auto& t : (*tuples)[j]) {
        std::size_t c = 0;
        bool in_domain = true;
        for (int v : t) {
          int x = psi[static_cast<std::size_t>(v)];
          if (x < 0 || x >= maps->d1) in_domain = false;
          c = c * static_cast<std::size_t>(maps->d1) + static_cast<std::size_t>(x < 0 ? 0 : x);
        }
        phi.push_back(in_domain && c < table.size() ? table[c] : -1);
      }
    }
  };

  if (verify) {
    out.check = check_nrd(out.projection.graph, cert.target, out.witness, workers);
    if (!out.check->non_redundant)
      throw InternalError("apply_reduction: transferred witness fails on edge " +
                          std::to_string(out.check->failed_edge.value_or(0)) + ": " + out.check->reason);
  }
  return out;
}

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double epsilon = 0.0;
  double exponent = 0.0;
  std::vector<double> residuals;
  /// m_{i+1} / m_i for consecutive points.
  std::vector<double> ratios;
  double max_ratio = 0.0;
};

/// Least-squares fit of log m against log n over (n_i, m_i) points.
inline ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("fit_exponent: need at least 2 data points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].first > 0.0) || !(points[i].second > 0.0))
      throw std::invalid_argument("fit_exponent: n and m must be positive");
    if (i > 0 && !(points[i].second > points[i - 1].second))
      throw std::invalid_argument("fit_exponent: m must be strictly increasing");
  }
  const double k = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (auto [n, m] : points) {
    sx += std::log(n);
    sy += std::log(m);
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (auto [n, m] : points) {
    sxx += (std::log(n) - mx) * (std::log(n) - mx);
    sxy += (std::log(n) - mx) * (std::log(m) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_exponent: all n values coincide");

  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.exponent = fit.slope;
  fit.epsilon = 1.0 - 1.0 / fit.slope;
  for (auto [n, m] : points) fit.residuals.push_back(std::log(m) - (fit.intercept + fit.slope * std::log(n)));
  for (std::size_t i = 1; i < points.size(); ++i) {
    fit.ratios.push_back(points[i].second / points[i - 1].second);
    fit.max_ratio = std::max(fit.max_ratio, fit.ratios.back());
  }
  return fit;
}

/// Measured shrinkage exponent: fit log lambda = eps * log |E| + c.
inline double fit_shrinking_epsilon(const std::vector<std::pair<double, double>>& edges_lambda) {
  if (edges_lambda.size() < 2) throw std::invalid_argument("fit_shrinking_epsilon: need at least 2 data points");
  std::vector<std::pair<double, double>> pts;
  for (auto [m, lambda] : edges_lambda) pts.emplace_back(m, lambda);
  double k = static_cast<double>(pts.size()), sx = 0, sy = 0;
  for (auto [x, y] : pts) {
    if (!(x > 0) || !(y > 0)) throw std::invalid_argument("fit_shrinking_epsilon: values must be positive");
    sx += std::log(x);
    sy += std::log(y);
  }
  double sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sxx += (std::log(x) - sx / k) * (std::log(x) - sx / k);
    sxy += (std::log(x) - sx / k) * (std::log(y) - sy / k);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_shrinking_epsilon: all edge counts coincide");
  return sxy / sxx;
}

struct PipelineStep {
  int q = 0;
  std::size_t source_edges = 0;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  double lambda = 0.0;
  bool verified = false;
};

struct ReductionRun {
  std::vector<PipelineStep> steps;
  ExponentFit fit;
};

/// Pushes each shrinking instance through the certificate and fits the
/// resulting (vertices, edges) points.
inline ReductionRun run_reduction(const std::vector<ShrinkingInstance>& family, const SubstructureCertificate& cert,
                                  unsigned workers = 1, bool verify = true) {
  ReductionRun run;
  std::vector<std::pair<double, double>> points;
  for (const auto& inst : family) {
    if (!(inst.predicate == cert.source))
      throw std::invalid_argument("run_reduction: instance predicate differs from the certificate source");
    auto out = apply_reduction(inst.graph, inst.witness, cert, workers, verify);
    PipelineStep step;
    step.q = inst.q;
    step.source_edges = inst.graph.edge_count();
    step.vertices = out.vertices();
    step.edges = out.edges();
    step.lambda = shrinking_report(inst.graph, cert.family.sets()).lambda;
    step.verified = out.check && out.check->non_redundant;
    run.steps.push_back(step);
    points.emplace_back(static_cast<double>(step.vertices), static_cast<double>(step.edges));
  }
  run.fit = fit_exponent(points);
  return run;
}

/// Base of (P|Q) box (OR_r | {0,1}^r), the OR part lifted to P's domain.
inline Predicate conditional_to_plain(const ConditionalPredicate& pq) {
  const int d = pq.domain_size();
  const int r = pq.arity();
  if (d < 2) throw std::invalid_argument("conditional_to_plain: domain must contain both 0 and 1");
  if (pq.base().empty()) throw std::invalid_argument("conditional_to_plain: P is empty");
  std::vector<Tuple> cube, ors;
  for (std::uint32_t bits = 0; bits < (1u << r); ++bits) {
    Tuple t(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) t[static_cast<std::size_t>(i)] = static_cast<Value>((bits >> (r - 1 - i)) & 1u);
    cube.push_back(t);
    if (bits != 0) ors.push_back(t);
  }
  ConditionalPredicate or_pair(Predicate(d, r, std::move(ors)), Predicate(d, r, std::move(cube)));
  return box_product(pq, or_pair).base();
}

struct PlainLbInstance {
  Hypergraph graph;
  ConditionalPredicate predicate;
  WitnessFn witness;
  std::size_t subsets = 0;
};

namespace detail {

inline std::vector<std::vector<int>> ascending_subsets(int n, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == r) {
      out.push_back(cur);
      return;
    }
    for (int v = start; v <= n - (r - static_cast<int>(cur.size())); ++v) {
      cur.push_back(v);
      self(self, v + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace detail

/// H' = (V u V', E x (V' choose r)) for CSP(R) with R = conditional_to_plain(pq).
/// V' is shared by the last r coordinates, so the result is not r-partite.
inline PlainLbInstance build_plain_lb_instance(const Hypergraph& h, const WitnessFn& source_witness,
                                               const ConditionalPredicate& pq, int v_prime_size) {
  const int r = pq.arity();
  if (h.arity() != r) throw std::invalid_argument("build_plain_lb_instance: arity mismatch");
  if (v_prime_size < r)
    throw std::invalid_argument("build_plain_lb_instance: |V'| = " + std::to_string(v_prime_size) + " < r = " +
                                std::to_string(r));
  const int n = h.vertex_count();
  std::vector<std::string> labels = h.labels();
  for (int i = 0; i < v_prime_size; ++i) {
    std::string label = "z" + std::to_string(i + 1);
    while (h.find(label)) label += "'";
    labels.push_back(label);
  }
  auto subsets = detail::ascending_subsets(v_prime_size, r);
  std::vector<Edge> edges;
  for (const auto& e : h.edges())
    for (const auto& s : subsets) {
      Edge out = e;
      for (int v : s) out.push_back(n + v);
      edges.push_back(std::move(out));
    }

  auto subs = std::make_shared<const std::vector<std::vector<int>>>(subsets);
  WitnessFn psi_fn = source_witness;
  const std::size_t count = subsets.size();
  WitnessFn witness = [subs, psi_fn, count, n, v_prime_size](std::size_t e, Assignment& out) {
    psi_fn(e / count, out);
    out.resize(static_cast<std::size_t>(n));
    out.resize(static_cast<std::size_t>(n + v_prime_size), 1);
    for (int v : (*subs)[e % count]) out[static_cast<std::size_t>(n + v)] = 0;
  };
  return PlainLbInstance{Hypergraph(2 * r, std::move(labels), std::move(edges)),
                         ConditionalPredicate::plain(conditional_to_plain(pq)), std::move(witness), count};
}

}  // namespace nrd
