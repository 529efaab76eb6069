#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "nrd/audit.hpp"
#include "nrd/balance.hpp"
#include "nrd/hypergraph.hpp"
#include "nrd/nrd.hpp"
#include "nrd/pipeline.hpp"
#include "nrd/predicate.hpp"
#include "nrd/substructure.hpp"

namespace nrd::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Predicates

inline Tuple tuple_from_json(const Json& j, int arity, int domain) {
  Tuple t;
  if (j.is_string()) {
    t = parse_digits(j.get<std::string>());
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number_integer()) throw std::invalid_argument("tuple entries must be integers");
      t.push_back(v.get<int>());
    }
  } else {
    throw std::invalid_argument("tuple must be an array or a digit string");
  }
  if (arity >= 0 && static_cast<int>(t.size()) != arity)
    throw std::invalid_argument("tuple " + to_string(t) + " does not have arity " + std::to_string(arity));
  for (int v : t)
    if (domain >= 0 && (v < 0 || v >= domain)) throw std::invalid_argument("tuple " + to_string(t) + " leaves the domain");
  return t;
}

inline Json tuple_to_json(const Tuple& t, int domain) {
  if (domain <= 10) return to_digits(t);
  return Json(t);
}

inline Json to_json(const Predicate& p) {
  Json j;
  j["domain"] = p.domain_size();
  j["arity"] = p.arity();
  Json ts = Json::array();
  for (const auto& t : p.tuples()) ts.push_back(tuple_to_json(t, p.domain_size()));
  j["tuples"] = std::move(ts);
  return j;
}

inline Predicate predicate_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("domain") || !j.contains("tuples"))
    throw std::invalid_argument("predicate JSON needs \"domain\" and \"tuples\"");
  const int d = j.at("domain").get<int>();
  int r = j.contains("arity") ? j.at("arity").get<int>() : -1;
  std::vector<Tuple> ts;
  for (const auto& t : j.at("tuples")) {
    ts.push_back(tuple_from_json(t, r, d));
    if (r < 0) r = static_cast<int>(ts.back().size());
  }
  if (r < 0) throw std::invalid_argument("predicate JSON: arity missing and no tuples to infer it from");
  return Predicate(d, r, std::move(ts));
}

inline Json to_json(const ConditionalPredicate& pq) {
  Json j;
  j["base"] = to_json(pq.base());
  j["ambient"] = to_json(pq.ambient());
  return j;
}

/// Accepts {"base", "ambient"} or a bare predicate (read as P | D^r).
inline ConditionalPredicate conditional_from_json(const Json& j) {
  if (j.is_object() && j.contains("base"))
    return ConditionalPredicate(predicate_from_json(j.at("base")), predicate_from_json(j.at("ambient")));
  return ConditionalPredicate::plain(predicate_from_json(j));
}

// ---------------------------------------------------------------------------
// Instances

inline Json to_json(const PartiteHypergraph& h) {
  Json j;
  j["parts"] = h.parts();
  Json edges = Json::array();
  for (const auto& e : h.edges()) {
    Json row = Json::array();
    for (int v : e) row.push_back(h.graph().label(v));
    edges.push_back(std::move(row));
  }
  j["edges"] = std::move(edges);
  return j;
}

/// Non-partite instances carry a flat vertex list instead of parts.
inline Json to_json(const Hypergraph& h) {
  Json j;
  j["arity"] = h.arity();
  j["vertices"] = h.labels();
  Json edges = Json::array();
  for (const auto& e : h.edges()) {
    Json row = Json::array();
    for (int v : e) row.push_back(h.label(v));
    edges.push_back(std::move(row));
  }
  j["edges"] = std::move(edges);
  return j;
}

inline std::vector<std::vector<std::string>> label_edges(const Json& j) {
  std::vector<std::vector<std::string>> out;
  for (const auto& e : j.at("edges")) out.push_back(e.get<std::vector<std::string>>());
  return out;
}

inline PartiteHypergraph partite_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("parts") || !j.contains("edges"))
    throw std::invalid_argument("instance JSON needs \"parts\" and \"edges\"");
  return PartiteHypergraph::from_labels(j.at("parts").get<std::vector<std::vector<std::string>>>(), label_edges(j));
}

/// Reads either instance shape as a plain hypergraph.
inline Hypergraph hypergraph_from_json(const Json& j) {
  if (j.contains("parts")) return partite_from_json(j).graph();
  if (!j.contains("vertices") || !j.contains("edges"))
    throw std::invalid_argument("instance JSON needs \"parts\" or \"vertices\", and \"edges\"");
  auto edges = label_edges(j);
  int arity = j.contains("arity") ? j.at("arity").get<int>() : (edges.empty() ? 0 : static_cast<int>(edges[0].size()));
  return Hypergraph::from_labels(arity, j.at("vertices").get<std::vector<std::string>>(), edges);
}

/// {"1": {"a1": 0, ...}, ...} with 1-based edge indices.
inline Json witnesses_to_json(const Hypergraph& h, const std::vector<Assignment>& ws) {
  Json j = Json::object();
  for (std::size_t e = 0; e < ws.size(); ++e) {
    Json psi = Json::object();
    for (int v = 0; v < h.vertex_count(); ++v) psi[h.label(v)] = ws[e][static_cast<std::size_t>(v)];
    j[std::to_string(e + 1)] = std::move(psi);
  }
  return j;
}

inline std::vector<Assignment> witnesses_from_json(const Hypergraph& h, const Json& j) {
  std::vector<Assignment> out(h.edge_count());
  std::vector<bool> seen(h.edge_count(), false);
  for (const auto& [key, psi] : j.items()) {
    std::size_t e = 0;
    try {
      e = std::stoul(key);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("witness key '" + key + "' is not an edge index");
    }
    if (e < 1 || e > h.edge_count()) throw std::invalid_argument("witness for unknown edge " + key);
    Assignment a(static_cast<std::size_t>(h.vertex_count()), -1);
    for (const auto& [label, value] : psi.items()) {
      auto v = h.find(label);
      if (!v) throw std::invalid_argument("witness mentions unknown vertex '" + label + "'");
      a[static_cast<std::size_t>(*v)] = value.get<int>();
    }
    out[e - 1] = std::move(a);
    seen[e - 1] = true;
  }
  for (std::size_t e = 0; e < seen.size(); ++e)
    if (!seen[e]) throw std::invalid_argument("no witness for edge " + std::to_string(e + 1));
  return out;
}

// ---------------------------------------------------------------------------
// Substructure certificates

inline Json to_json(const IndexFamily& f) { return Json(f.one_based()); }

inline Json to_json(const SubstructureCertificate& c) {
  Json j;
  j["source"] = to_json(c.source);
  j["target"] = to_json(c.target);
  j["family"] = to_json(c.family);
  Json sigma = Json::object();
  for (const auto& [x, y] : c.sigma) sigma[to_digits(x)] = to_digits(y);
  j["sigma"] = std::move(sigma);
  return j;
}

inline IndexFamily family_from_json(const Json& j, int source_arity) {
  return IndexFamily::from_one_based(source_arity, j.get<std::vector<Coords>>());
}

inline SubstructureCertificate certificate_from_json(const Json& j) {
  for (const char* key : {"source", "target", "family", "sigma"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("certificate JSON needs \"") + key + "\"");
  auto source = conditional_from_json(j.at("source"));
  auto target = conditional_from_json(j.at("target"));
  TupleMap sigma;
  for (const auto& [x, y] : j.at("sigma").items())
    sigma.emplace(tuple_from_json(x, source.arity(), source.domain_size()),
                  tuple_from_json(y, target.arity(), target.domain_size()));
  return {source, target, family_from_json(j.at("family"), source.arity()), std::move(sigma)};
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const BalanceReport& r) {
  Json j;
  j["balanced"] = r.balanced;
  j["method"] = to_string(r.method);
  if (r.method == BalanceMethod::kBoundedClosure) j["k_max"] = r.k_max;
  if (r.witness) {
    Json terms = Json::array();
    for (const auto& t : r.witness->terms) terms.push_back(to_digits(t));
    j["witness"] = {{"terms", terms}, {"result", to_digits(r.witness->result)}};
  }
  return j;
}

inline Json to_json(const ShrinkingReport& r) {
  Json j;
  j["edges"] = r.edges;
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    Coords one;
    for (int c : e.coords) one.push_back(c + 1);
    entries.push_back({{"coords", one}, {"projected", e.projected}, {"factor", e.factor}});
  }
  j["entries"] = std::move(entries);
  j["lambda"] = r.lambda;
  return j;
}

inline Json to_json(const ExponentFit& f) {
  Json j;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["epsilon"] = f.epsilon;
  j["exponent"] = f.exponent;
  j["residuals"] = f.residuals;
  j["ratios"] = f.ratios;
  j["max_ratio"] = f.max_ratio;
  return j;
}

inline Json to_json(const AuditReport& r) {
  Json items = Json::array();
  for (const auto& i : r.items)
    items.push_back({{"group", i.group}, {"name", i.name}, {"status", to_string(i.status)}, {"detail", i.detail}});
  Json j;
  j["items"] = std::move(items);
  j["summary"] = {{"pass", r.count(AuditStatus::kPass)},
                  {"anomaly", r.count(AuditStatus::kAnomaly)},
                  {"fail", r.count(AuditStatus::kFail)},
                  {"ok", r.ok()}};
  return j;
}

}  // namespace nrd::io
