#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nrd/audit.hpp"
#include "nrd/balance.hpp"
#include "nrd/cancellation.hpp"
#include "nrd/catalog.hpp"
#include "nrd/errors.hpp"
#include "nrd/generators.hpp"
#include "nrd/hypergraph.hpp"
#include "nrd/json_io.hpp"
#include "nrd/nrd.hpp"
#include "nrd/pipeline.hpp"
#include "nrd/sat.hpp"
#include "nrd/substructure.hpp"
#include "nrd/tables.hpp"

namespace nrd::cli {

using io::Json;

struct Config {
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::uint64_t conflict_budget = 0;
  std::uint64_t search_budget = 0;
  bool json = false;
  bool verbose = false;
};

namespace detail {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("malformed JSON in '" + path + "': " + e.what());
  }
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

inline bool looks_like_file(const std::string& spec) {
  return spec.size() > 5 && spec.compare(spec.size() - 5, 5, ".json") == 0;
}

using AnyPredicate = std::variant<Predicate, ConditionalPredicate>;

/// A catalog name, or a path to predicate JSON.
inline AnyPredicate load_any(const std::string& spec) {
  if (looks_like_file(spec) || std::filesystem::is_regular_file(spec)) {
    Json j = read_json_file(spec);
    if (j.contains("base")) return io::conditional_from_json(j);
    return io::predicate_from_json(j);
  }
  auto entry = catalog(spec);
  if (auto* p = std::get_if<Predicate>(&entry)) return *p;
  return std::get<ConditionalPredicate>(entry);
}

inline Predicate load_predicate(const std::string& spec) {
  auto any = load_any(spec);
  if (auto* p = std::get_if<Predicate>(&any)) return *p;
  throw std::invalid_argument("'" + spec + "' is a conditional predicate; a plain predicate is needed");
}

inline ConditionalPredicate load_conditional(const std::string& spec) {
  auto any = load_any(spec);
  if (auto* p = std::get_if<Predicate>(&any)) return ConditionalPredicate::plain(*p);
  return std::get<ConditionalPredicate>(any);
}

inline std::vector<int> zero_based(const std::vector<int>& one) {
  std::vector<int> out;
  for (int c : one) {
    if (c < 1) throw std::invalid_argument("coordinates are 1-based");
    out.push_back(c - 1);
  }
  return out;
}

/// "1,2;1,3;2,3" with 1-based coordinates; an empty field is an empty set.
inline IndexFamily parse_family(const std::string& text, int source_arity) {
  std::vector<Coords> sets;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ';')) {
    Coords set;
    std::stringstream fs(field);
    std::string num;
    while (std::getline(fs, num, ',')) {
      if (num.empty()) continue;
      try {
        set.push_back(std::stoi(num));
      } catch (const std::logic_error&) {
        throw std::invalid_argument("family: '" + num + "' is not an index");
      }
    }
    sets.push_back(std::move(set));
  }
  if (!text.empty() && text.back() == ';') sets.emplace_back();
  return IndexFamily::from_one_based(source_arity, std::move(sets));
}

inline std::optional<SubstructureCertificate> table_certificate(const std::string& name) {
  for (auto& named : tables::all_certificates())
    if (named.name == name) return named.certificate;
  return std::nullopt;
}

inline std::string table_names() {
  std::string s;
  for (const auto& named : tables::all_certificates()) s += (s.empty() ? "" : ", ") + named.name;
  return s;
}

inline SubstructureCertificate load_certificate(const std::string& table, const std::string& file) {
  if (!table.empty()) {
    auto c = table_certificate(table);
    if (!c) throw std::invalid_argument("unknown table '" + table + "' (known: " + table_names() + ")");
    return *c;
  }
  if (file.empty()) throw UsageError("give --table or --certificate");
  return io::certificate_from_json(read_json_file(file));
}

inline std::string alternating(const std::vector<Tuple>& terms) {
  std::string s;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (k) s += (k % 2 ? " - " : " + ");
    s += to_digits(terms[k]);
  }
  return s;
}

inline ShrinkingInstance build_lemma(const std::string& lemma, int q, int third, std::optional<std::size_t> edges) {
  if (lemma == "r1s1") return build_R1S1_instance(q, third > 0 ? third : q + 1, edges);
  if (lemma == "r2s2") {
    if (edges) throw std::invalid_argument("--edges applies to r1s1 only");
    return build_R2S2_instance(q);
  }
  throw std::invalid_argument("unknown lemma '" + lemma + "' (use r1s1 or r2s2)");
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace detail

/// Runs the command line; returns 0 on success, 1 on a failed check and 2 on
/// usage or input errors. Results go to `out`, diagnostics to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  Config cfg;
  CLI::App app{"Conditional non-redundancy toolkit: predicates, instances, substructure search and reductions", "nrd"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", cfg.seed, "Seed for randomized steps")->envname("NRD_SEED");
  app.add_option("--workers", cfg.workers, "Worker threads for per-edge verification")
      ->envname("NRD_WORKERS")
      ->check(CLI::Range(1u, 1024u));
  app.add_option("--conflict-budget", cfg.conflict_budget, "SAT conflict budget (0 = unlimited)")
      ->envname("NRD_CONFLICT_BUDGET");
  app.add_option("--search-budget", cfg.search_budget, "Node / solver-call budget for searches (0 = default)")
      ->envname("NRD_SEARCH_BUDGET");
  app.add_flag("--json", cfg.json, "Emit JSON on standard output")->envname("NRD_JSON");
  app.add_flag("-v,--verbose", cfg.verbose, "Progress messages on standard error")->envname("NRD_VERBOSE");

  std::function<int()> action;
  auto log = [&](const std::string& msg) {
    if (cfg.verbose) err << "nrd: " << msg << "\n";
  };
  auto emit = [&](const Json& j) { out << j.dump(2) << "\n"; };

  // project ------------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("project", "Project a predicate onto coordinates [anchor: projections pi_J]");
    auto pred = std::make_shared<std::string>();
    auto coords = std::make_shared<std::vector<int>>();
    sub->add_option("-p,--predicate", *pred, "Catalog name or predicate JSON file")->required();
    sub->add_option("-c,--coords", *coords, "1-based coordinates, e.g. 1,3")->required()->delimiter(',');
    sub->callback([&, pred, coords] {
      action = [&, pred, coords] {
        auto any = load_any(*pred);
        Coords c = zero_based(*coords);
        if (auto* p = std::get_if<Predicate>(&any)) {
          auto r = project(*p, c);
          cfg.json ? emit(io::to_json(r)) : void(out << r.str() << "\n");
        } else {
          auto r = project(std::get<ConditionalPredicate>(any), c);
          cfg.json ? emit(io::to_json(r)) : void(out << r.base().str() << " | " << r.ambient().str() << "\n");
        }
        return 0;
      };
    });
  }

  // permute ------------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("permute", "Permute coordinates, P^sigma [anchor: symmetry-breaking lemma]");
    auto pred = std::make_shared<std::string>();
    auto sigma = std::make_shared<std::vector<int>>();
    sub->add_option("-p,--predicate", *pred, "Catalog name or predicate JSON file")->required();
    sub->add_option("-s,--sigma", *sigma, "1-based permutation: output i takes input sigma(i)")
        ->required()
        ->delimiter(',');
    sub->callback([&, pred, sigma] {
      action = [&, pred, sigma] {
        auto any = load_any(*pred);
        auto s = zero_based(*sigma);
        if (auto* p = std::get_if<Predicate>(&any)) {
          auto r = permute(*p, s);
          cfg.json ? emit(io::to_json(r)) : void(out << r.str() << "\n");
        } else {
          auto r = permute(std::get<ConditionalPredicate>(any), s);
          cfg.json ? emit(io::to_json(r)) : void(out << r.base().str() << " | " << r.ambient().str() << "\n");
        }
        return 0;
      };
    });
  }

  // boxprod ------------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("boxprod", "Box product of two conditional predicates [anchor: box product definition]");
    auto a = std::make_shared<std::string>(), b = std::make_shared<std::string>();
    sub->add_option("left", *a, "Left conditional predicate")->required();
    sub->add_option("right", *b, "Right conditional predicate")->required();
    sub->callback([&, a, b] {
      action = [&, a, b] {
        auto r = box_product(load_conditional(*a), load_conditional(*b));
        if (cfg.json)
          emit(io::to_json(r));
        else
          out << "|base| = " << r.base().size() << ", |ambient| = " << r.ambient().size() << "\n"
              << "ambient minus base: " << r.gap().str() << "\n";
        return 0;
      };
    });
  }

  // balance ------------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("balance", "Decide whether a Boolean predicate is balanced [anchor: balanced predicates]");
    auto pred = std::make_shared<std::string>();
    auto method = std::make_shared<std::string>("lattice");
    auto kmax = std::make_shared<int>(3);
    sub->add_option("-p,--predicate,--catalog", *pred, "Catalog name or predicate JSON file")->required();
    sub->add_option("-m,--method", *method, "lattice or bounded")->check(CLI::IsMember({"lattice", "bounded"}));
    sub->add_option("-k,--k-max", *kmax, "Bounded method: sums of up to 2k+1 tuples")->check(CLI::PositiveNumber);
    sub->callback([&, pred, method, kmax] {
      action = [&, pred, method, kmax] {
        auto p = load_predicate(*pred);
        auto rep = *method == "lattice" ? is_balanced_lattice(p) : is_balanced_bounded(p, *kmax);
        if (cfg.json) {
          emit(io::to_json(rep));
        } else {
          out << (rep.balanced ? "balanced" : "imbalanced") << "\n";
          if (rep.witness) out << "witness: " << alternating(rep.witness->terms) << " = " << to_digits(rep.witness->result) << "\n";
        }
        return 0;
      };
    });
  }

  // cancel -------------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("cancel", "Play the cancellation game on a digit word [anchor: Catalan identities]");
    auto word = std::make_shared<std::string>();
    sub->add_option("word", *word, "Digit word, e.g. 0221221")->required();
    sub->callback([&, word] {
      action = [&, word] {
        auto w = cancel(parse_digits(*word));
        if (cfg.json)
          emit(Json{{"word", *word}, {"residual", to_digits(w)}});
        else
          out << to_digits(w) << "\n";
        return 0;
      };
    });
  }

  // catalan-search -----------------------------------------------------------
  {
    auto* sub = app.add_subcommand("catalan-search",
                                   "Search for Catalan-identity violations [anchor: cancellation matrix]");
    auto pred = std::make_shared<std::string>();
    auto len = std::make_shared<int>(5);
    sub->add_option("-p,--predicate", *pred, "Catalog name or predicate JSON file")->required();
    sub->add_option("-l,--max-len", *len, "Largest odd number of columns");
    sub->callback([&, pred, len] {
      action = [&, pred, len] {
        auto v = catalan_search(load_predicate(*pred), *len, cfg.workers);
        if (cfg.json) {
          Json arr = Json::array();
          for (const auto& x : v) {
            Json cols = Json::array();
            for (const auto& c : x.columns) cols.push_back(to_digits(c));
            arr.push_back({{"columns", cols}, {"residual", to_digits(x.residual)}});
          }
          emit(Json{{"violations", arr}});
        } else {
          out << v.size() << " violations\n";
          for (const auto& x : v) {
            for (const auto& c : x.columns) out << to_digits(c) << " ";
            out << "-> " << to_digits(x.residual) << "\n";
          }
        }
        return 0;
      };
    });
  }

  // verify-nrd ---------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("verify-nrd",
                                   "Check that an instance is (conditionally) non-redundant [anchor: conditional non-redundancy]");
    struct Opts {
      std::string instance, pred, witnesses, save;
      std::uint64_t max_assignments = 50'000'000;
      bool partition = false;
      int retries = 16;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("-i,--instance", o->instance, "Instance JSON file")->required();
    sub->add_option("-p,--predicate", o->pred, "Catalog name or (conditional) predicate JSON file")->required();
    sub->add_option("-w,--witnesses", o->witnesses, "Check these witnesses instead of searching");
    sub->add_option("--save-witnesses", o->save, "Write the found witnesses here");
    sub->add_option("--max-assignments", o->max_assignments, "Search nodes per edge");
    sub->add_flag("--partition", o->partition, "First extract an r-partite subinstance (uses --seed)");
    sub->add_option("--retries", o->retries, "Colouring attempts for --partition");
    sub->callback([&, o] {
      action = [&, o] {
        auto pq = load_conditional(o->pred);
        Hypergraph h = io::hypergraph_from_json(read_json_file(o->instance));
        if (o->partition) {
          auto part = to_r_partite(h, cfg.seed, o->retries);
          log("partition kept " + std::to_string(part.kept.size()) + " of " + std::to_string(h.edge_count()) + " edges");
          h = part.graph.graph();
        }
        NrdResult res;
        if (!o->witnesses.empty()) {
          auto ws = io::witnesses_from_json(h, read_json_file(o->witnesses));
          res = check_nrd(h, pq, ws, cfg.workers);
        } else {
          VerifyOptions vo;
          vo.workers = cfg.workers;
          vo.max_assignments = o->max_assignments;
          res = verify_nrd(h, pq, vo);
        }
        if (!o->save.empty() && res.non_redundant)
          write_file(o->save, io::witnesses_to_json(h, res.certificate.witnesses).dump(2) + "\n");
        if (cfg.json) {
          Json j{{"non_redundant", res.non_redundant}, {"edges", h.edge_count()}};
          if (res.failed_edge) j["failed_edge"] = *res.failed_edge + 1;
          if (!res.reason.empty()) j["reason"] = res.reason;
          emit(j);
        } else if (res.non_redundant) {
          out << "non-redundant (" << h.edge_count() << " edges)\n";
        } else {
          out << "redundant: edge " << res.failed_edge.value_or(0) + 1 << ": " << res.reason << "\n";
        }
        return res.non_redundant ? 0 : 1;
      };
    });
  }

  // nrd-exact ----------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("nrd-exact", "Exact NRD value at toy scale [anchor: definition of NRD(P | Q, n)]");
    auto pred = std::make_shared<std::string>();
    auto n = std::make_shared<int>(0);
    auto parts = std::make_shared<std::vector<int>>();
    auto brute = std::make_shared<bool>(false);
    sub->add_option("-p,--predicate", *pred, "Catalog name or predicate JSON file")->required();
    sub->add_option("-n", *n, "Number of vertices")->required();
    sub->add_option("--parts", *parts, "Part sizes for r-partite candidates, e.g. 2,2")->delimiter(',');
    sub->add_flag("--exhaustive", *brute, "Also run the exhaustive subset oracle");
    sub->callback([&, pred, n, parts, brute] {
      action = [&, pred, n, parts, brute] {
        auto pq = load_conditional(*pred);
        NrdExactOptions opt;
        opt.part_sizes = *parts;
        if (cfg.search_budget) opt.node_budget = cfg.search_budget;
        auto res = nrd_exact(pq, *n, opt);
        std::optional<long long> oracle;
        if (*brute) oracle = nrd_exhaustive(pq, *n, *parts);
        if (cfg.json) {
          Json j{{"value", res.value}, {"nodes", res.nodes}, {"instance", io::to_json(res.witness_instance)}};
          if (oracle) j["exhaustive"] = *oracle;
          emit(j);
        } else {
          out << res.value << "\n";
          if (oracle) out << "exhaustive: " << *oracle << "\n";
        }
        return oracle && *oracle != res.value ? 1 : 0;
      };
    });
  }

  // find-substructure --------------------------------------------------------
  {
    auto* sub = app.add_subcommand("find-substructure",
                                   "SAT search for an I-substructure [anchor: SAT encoding of substructures]");
    struct Opts {
      std::string source, target, family, dimacs, output;
      int max_set_size = -1;
      std::size_t max_families = 0;
      bool minimal_only = false;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("-s,--source", o->source, "Source conditional predicate")->required();
    sub->add_option("-t,--target", o->target, "Target conditional predicate")->required();
    sub->add_option("-f,--family", o->family, "Fixed family, e.g. \"1,2;1,3;2,3\"");
    sub->add_option("-k,--max-set-size", o->max_set_size, "Search all families with |I_j| <= k");
    sub->add_option("--max-families", o->max_families, "Stop after this many families");
    sub->add_flag("--minimal-only", o->minimal_only, "Skip the pass over families with every |I_j| = k");
    sub->add_option("--export-dimacs", o->dimacs, "Write the CNF for --family to this path");
    sub->add_option("-o,--output", o->output, "Write the first certificate as JSON");
    sub->callback([&, o] {
      action = [&, o] {
        auto source = load_conditional(o->source), target = load_conditional(o->target);
        sat::SolverOptions so{cfg.conflict_budget};
        if (!o->family.empty()) {
          auto fam = parse_family(o->family, source.arity());
          if (!o->dimacs.empty()) write_file(o->dimacs, sat::to_dimacs(encode(source, target, fam).formula));
          auto res = find_substructure(source, target, fam, so);
          if (res.certificate && !o->output.empty()) write_file(o->output, io::to_json(*res.certificate).dump(2) + "\n");
          if (cfg.json) {
            Json j{{"satisfiable", res.certificate.has_value()},
                   {"variables", res.variables},
                   {"clauses", res.clauses},
                   {"conflicts", res.conflicts}};
            if (res.certificate) j["certificate"] = io::to_json(*res.certificate);
            emit(j);
          } else {
            out << (res.certificate ? "satisfiable" : "unsatisfiable") << " (" << res.variables << " variables, "
                << res.clauses << " clauses)\n";
          }
          return res.certificate ? 0 : 1;
        }
        if (o->max_set_size < 0) throw UsageError("give --family or --max-set-size");
        if (!o->dimacs.empty()) throw UsageError("--export-dimacs needs --family");
        FamilySearchOptions fo;
        fo.size_bound = o->max_set_size;
        fo.max_families = o->max_families;
        fo.fixed_size_first = !o->minimal_only;
        fo.max_solver_calls = cfg.search_budget;
        fo.conflict_budget = cfg.conflict_budget;
        auto res = search_families(source, target, fo);
        if (!res.families.empty() && !o->output.empty())
          write_file(o->output, io::to_json(res.families.front().second).dump(2) + "\n");
        if (cfg.json) {
          Json fams = Json::array();
          for (const auto& [f, c] : res.families) fams.push_back(io::to_json(f));
          emit(Json{{"families", fams},
                    {"partial", res.partial},
                    {"solver_calls", res.solver_calls},
                    {"rejected_by_fiber_check", res.rejected_by_fiber_check}});
        } else {
          for (const auto& [f, c] : res.families) out << f.str() << "\n";
          out << res.families.size() << " families" << (res.partial ? " (partial: budget reached)" : "") << "\n";
        }
        return res.families.empty() ? 1 : 0;
      };
    });
  }

  // verify-substructure ------------------------------------------------------
  {
    auto* sub = app.add_subcommand("verify-substructure",
                                   "Check a Sigma table against the substructure conditions [anchor: characterisation of I-substructures]");
    auto table = std::make_shared<std::string>(), file = std::make_shared<std::string>();
    auto repair = std::make_shared<bool>(false);
    sub->add_option("--table", *table, "Built-in table: " + table_names());
    sub->add_option("-c,--certificate", *file, "Certificate JSON file");
    sub->add_flag("--repair", *repair, "On failure, search for an output-coordinate permutation that repairs it");
    sub->callback([&, table, file, repair] {
      action = [&, table, file, repair] {
        auto cert = load_certificate(*table, *file);
        auto chk = verify_certificate(cert);
        std::optional<CertificateRepair> fix;
        if (!chk.ok && *repair) fix = repair_certificate(cert);
        if (cfg.json) {
          Json j{{"ok", chk.ok}};
          if (!chk.ok) j["violated"] = to_string(chk.violated), j["detail"] = chk.detail;
          if (fix) j["repair"] = {{"permutation", fix->permutation}, {"certificate", io::to_json(fix->certificate)}};
          emit(j);
        } else {
          out << (chk.ok ? "ok" : std::string("fails ") + to_string(chk.violated) + ": " + chk.detail) << "\n";
          if (fix) out << "repair: output order permuted, family " << fix->certificate.family.str() << "\n";
        }
        return chk.ok ? 0 : 1;
      };
    });
  }

  // deps ---------------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("deps", "Minimal input coordinates each output of Sigma depends on [anchor: coordinate dependencies of a map]");
    auto table = std::make_shared<std::string>(), file = std::make_shared<std::string>();
    sub->add_option("--table", *table, "Built-in table: " + table_names() + ", cat5-into-boolbck");
    sub->add_option("-c,--certificate", *file, "Certificate JSON file");
    sub->callback([&, table, file] {
      action = [&, table, file] {
        TupleMap sigma = *table == "cat5-into-boolbck" ? tables::to_map(tables::kCat5IntoBoolBCK)
                                                       : load_certificate(*table, *file).sigma;
        auto deps = dependency_analysis(sigma);
        if (cfg.json) {
          Json arr = Json::array();
          for (const auto& sets : deps) {
            Json s = Json::array();
            for (const auto& c : sets) s.push_back(IndexFamily(static_cast<int>(sigma.begin()->first.size()), {c}).one_based()[0]);
            arr.push_back(s);
          }
          emit(Json{{"dependencies", arr}});
        } else {
          for (std::size_t j = 0; j < deps.size(); ++j) {
            out << j + 1 << ":";
            for (const auto& c : deps[j]) {
              out << " {";
              for (std::size_t k = 0; k < c.size(); ++k) out << (k ? "," : "") << c[k] + 1;
              out << "}";
            }
            out << "\n";
          }
        }
        return 0;
      };
    });
  }

  // gen-girth6 ---------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("gen-girth6", "Projective-plane incidence graph of girth 6 [anchor: girth-6 bipartite graphs]");
    auto q = std::make_shared<int>(2);
    auto emit_graph = std::make_shared<std::string>();
    sub->add_option("-q", *q, "Prime order")->required();
    sub->add_option("--emit-graph", *emit_graph, "Write the edge list (point line, 1-based) here");
    sub->callback([&, q, emit_graph] {
      action = [&, q, emit_graph] {
        auto g = gen_girth6(*q);
        if (!emit_graph->empty()) {
          std::ostringstream os;
          for (auto [p, l] : g.graph.edges) os << p + 1 << " " << l + 1 << "\n";
          write_file(*emit_graph, os.str());
        }
        if (cfg.json)
          emit(Json{{"q", g.q}, {"vertices", g.n_vertices}, {"edges", g.n_edges}, {"girth", g.measured_girth}});
        else
          out << g.n_vertices << " vertices, " << g.n_edges << " edges, girth " << g.measured_girth << "\n";
        return 0;
      };
    });
  }

  // build-instance -----------------------------------------------------------
  {
    auto* sub = app.add_subcommand("build-instance",
                                   "Shrinking instance over girth-6 graphs [anchor: shrinking instances for R1|S1 and R2|S2]");
    struct Opts {
      std::string lemma, output, witnesses;
      int q = 2, third = 0;
      std::size_t edges = 0;
      bool verify = false, search = false;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("-l,--lemma", o->lemma, "r1s1 (E12 x V3) or r2s2 (E12 x E34)")->required();
    sub->add_option("-q", o->q, "Prime order of the plane")->required();
    sub->add_option("--third", o->third, "r1s1: size of V3 (default q+1)");
    sub->add_option("--edges", o->edges, "r1s1: delete highest-index edges down to this count");
    sub->add_option("-o,--output", o->output, "Write the instance JSON here");
    sub->add_option("-w,--witnesses", o->witnesses, "Write the constructed witnesses here");
    sub->add_flag("--verify", o->verify, "Check the constructed witnesses");
    sub->add_flag("--search", o->search, "Also verify by independent witness search");
    sub->callback([&, o] {
      action = [&, o] {
        auto inst = build_lemma(o->lemma, o->q, o->third,
                                o->edges ? std::optional<std::size_t>(o->edges) : std::nullopt);
        if (!o->output.empty()) write_file(o->output, io::to_json(inst.graph).dump(2) + "\n");
        if (!o->witnesses.empty())
          write_file(o->witnesses, io::witnesses_to_json(inst.graph.graph(), inst.witnesses()).dump(2) + "\n");
        auto rep = shrinking_report(inst.graph);
        bool ok = true;
        Json j{{"lemma", inst.lemma}, {"q", inst.q}, {"edges", inst.graph.edge_count()},
               {"vertices", inst.graph.vertex_count()}, {"lambda", rep.lambda}};
        if (o->verify) {
          auto r = check_nrd(inst.graph, inst.predicate, inst.witness, cfg.workers);
          ok = ok && r.non_redundant;
          j["constructed_witnesses_verify"] = r.non_redundant;
        }
        if (o->search) {
          VerifyOptions vo;
          vo.workers = cfg.workers;
          vo.keep_witnesses = false;
          log("searching witnesses for " + std::to_string(inst.graph.edge_count()) + " edges");
          auto r = verify_nrd(inst.graph, inst.predicate, vo);
          ok = ok && r.non_redundant;
          j["search_verifies"] = r.non_redundant;
        }
        if (cfg.json) {
          j["shrinking"] = io::to_json(rep);
          emit(j);
        } else {
          out << inst.lemma << " q=" << inst.q << ": " << inst.graph.edge_count() << " edges, "
              << inst.graph.vertex_count() << " vertices, lambda " << fmt(rep.lambda) << "\n";
          if (j.contains("constructed_witnesses_verify"))
            out << "constructed witnesses: " << (j["constructed_witnesses_verify"].get<bool>() ? "verify" : "FAIL") << "\n";
          if (j.contains("search_verifies"))
            out << "independent search: " << (j["search_verifies"].get<bool>() ? "verifies" : "FAIL") << "\n";
        }
        return ok ? 0 : 1;
      };
    });
  }

  // reduce -------------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("reduce",
                                   "Push shrinking instances through a substructure certificate [anchor: projection-hypergraph lemma]");
    struct Opts {
      std::string lemma, table, certificate, output;
      std::vector<int> qs;
      bool no_verify = false;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("-l,--lemma", o->lemma, "r1s1 or r2s2")->required();
    sub->add_option("-q", o->qs, "Prime orders, e.g. -q 2 -q 3 -q 5")->required();
    sub->add_option("--table", o->table, "Built-in certificate: " + table_names());
    sub->add_option("-c,--certificate", o->certificate, "Certificate JSON file");
    sub->add_option("-o,--output", o->output, "Write the last produced instance here");
    sub->add_flag("--no-verify", o->no_verify, "Skip checking the transferred witnesses");
    sub->callback([&, o] {
      action = [&, o] {
        auto cert = load_certificate(o->table, o->certificate);
        std::vector<std::pair<double, double>> points;
        Json steps = Json::array();
        for (int q : o->qs) {
          auto inst = build_lemma(o->lemma, q, 0, std::nullopt);
          log("reducing q=" + std::to_string(q) + " (" + std::to_string(inst.graph.edge_count()) + " edges)");
          auto res = apply_reduction(inst.graph, inst.witness, cert, cfg.workers, !o->no_verify);
          points.emplace_back(static_cast<double>(res.vertices()), static_cast<double>(res.edges()));
          steps.push_back({{"q", q}, {"vertices", res.vertices()}, {"edges", res.edges()},
                           {"verified", res.check.has_value() && res.check->non_redundant}});
          if (!cfg.json)
            out << "q=" << q << ": n=" << res.vertices() << " m=" << res.edges()
                << (res.check ? " verified" : " (not verified)") << "\n";
          if (!o->output.empty()) write_file(o->output, io::to_json(res.projection.graph).dump(2) + "\n");
        }
        Json j{{"steps", steps}};
        if (points.size() >= 2) {
          auto fit = fit_exponent(points);
          j["fit"] = io::to_json(fit);
          if (!cfg.json) out << "exponent " << fmt(fit.exponent) << " (epsilon " << fmt(fit.epsilon) << ")\n";
        }
        if (cfg.json) emit(j);
        return 0;
      };
    });
  }

  // shrink-report ------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("shrink-report", "Projected edge counts and shrinking factors [anchor: shrinking instances]");
    struct Opts {
      std::string instance, lemma, family;
      int q = 2, third = 0;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("-i,--instance", o->instance, "Instance JSON file");
    sub->add_option("-l,--lemma", o->lemma, "Build r1s1 or r2s2 instead");
    sub->add_option("-q", o->q, "Prime order for --lemma");
    sub->add_option("--third", o->third, "r1s1: size of V3");
    sub->add_option("-f,--family", o->family, "Index sets to report, e.g. \"1,2;1,3\" (default: all proper subsets)");
    sub->callback([&, o] {
      action = [&, o] {
        std::optional<Hypergraph> h;
        if (!o->instance.empty())
          h = io::hypergraph_from_json(read_json_file(o->instance));
        else if (!o->lemma.empty())
          h = build_lemma(o->lemma, o->q, o->third, std::nullopt).graph.graph();
        else
          throw UsageError("give --instance or --lemma");
        auto rep = o->family.empty() ? shrinking_report(*h)
                                     : shrinking_report(*h, parse_family(o->family, h->arity()).sets());
        if (cfg.json) {
          emit(io::to_json(rep));
        } else {
          out << rep.edges << " edges, lambda " << fmt(rep.lambda) << "\n";
          for (const auto& e : rep.entries) {
            out << "{";
            for (std::size_t k = 0; k < e.coords.size(); ++k) out << (k ? "," : "") << e.coords[k] + 1;
            out << "}: " << e.projected << " (factor " << fmt(e.factor) << ")\n";
          }
        }
        return 0;
      };
    });
  }

  // fit ----------------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("fit", "Fit m ~ n^alpha over instance families [anchor: shrinking lower-bound theorem]");
    auto points = std::make_shared<std::vector<std::string>>();
    auto input = std::make_shared<std::string>();
    sub->add_option("points", *points, "n:m pairs");
    sub->add_option("--input", *input, "JSON file with [[n, m], ...]");
    sub->callback([&, points, input] {
      action = [&, points, input] {
        std::vector<std::pair<double, double>> pts;
        if (!input->empty()) {
          for (const auto& p : read_json_file(*input)) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        }
        for (const auto& s : *points) {
          auto colon = s.find(':');
          if (colon == std::string::npos) throw UsageError("point '" + s + "' is not n:m");
          try {
            pts.emplace_back(std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1)));
          } catch (const std::logic_error&) {
            throw UsageError("point '" + s + "' is not numeric");
          }
        }
        auto fit = fit_exponent(pts);
        if (cfg.json)
          emit(io::to_json(fit));
        else
          out << "exponent " << fmt(fit.exponent) << "\nepsilon " << fmt(fit.epsilon) << "\nmax ratio "
              << fmt(fit.max_ratio) << "\n";
        return 0;
      };
    });
  }

  // cond2plain ---------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("cond2plain",
                                   "Plain predicate R with (P|Q) box (OR_r|{0,1}^r) [anchor: conditional-to-plain equivalence]");
    struct Opts {
      std::string pred, instance, witnesses, output;
      int v_prime = 0;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("-p,--predicate", o->pred, "Conditional predicate")->required();
    sub->add_option("-i,--instance", o->instance, "Also lift this non-redundant P|Q instance");
    sub->add_option("-w,--witnesses", o->witnesses, "Witnesses of --instance");
    sub->add_option("--v-prime", o->v_prime, "Number of fresh vertices for the lift");
    sub->add_option("-o,--output", o->output, "Write the lifted instance here");
    sub->callback([&, o] {
      action = [&, o] {
        auto pq = load_conditional(o->pred);
        auto r = conditional_to_plain(pq);
        Json j{{"predicate", io::to_json(r)}, {"size", r.size()}};
        int code = 0;
        if (!o->instance.empty()) {
          if (o->witnesses.empty()) throw UsageError("--instance needs --witnesses");
          Hypergraph h = io::hypergraph_from_json(read_json_file(o->instance));
          auto ws = std::make_shared<std::vector<Assignment>>(io::witnesses_from_json(h, read_json_file(o->witnesses)));
          auto lifted = build_plain_lb_instance(h, [ws](std::size_t e, Assignment& a) { a = (*ws)[e]; }, pq, o->v_prime);
          auto chk = check_nrd(lifted.graph, lifted.predicate, lifted.witness, cfg.workers);
          if (!o->output.empty()) write_file(o->output, io::to_json(lifted.graph).dump(2) + "\n");
          j["lifted"] = {{"edges", lifted.graph.edge_count()}, {"verified", chk.non_redundant}};
          code = chk.non_redundant ? 0 : 1;
          if (!cfg.json)
            out << "lifted instance: " << lifted.graph.edge_count() << " edges, witnesses "
                << (chk.non_redundant ? "verify" : "FAIL") << "\n";
        }
        if (cfg.json)
          emit(j);
        else
          out << "|R| = " << r.size() << "\n" << r.str() << "\n";
        return code;
      };
    });
  }

  // paper-verify -------------------------------------------------------------
  {
    auto* sub = app.add_subcommand("paper-verify",
                                   "Re-check every explicit table, example and construction [anchor: all worked artifacts]");
    auto only = std::make_shared<std::vector<std::string>>();
    auto thorough = std::make_shared<bool>(false);
    std::string groups;
    for (const auto& g : audit_groups()) groups += (groups.empty() ? "" : ", ") + g;
    sub->add_option("--only", *only, "Restrict to groups: " + groups);
    sub->add_flag("--thorough", *thorough, "Verify the largest instances too");
    sub->callback([&, only, thorough] {
      action = [&, only, thorough] {
        AuditOptions ao;
        ao.only.insert(only->begin(), only->end());
        ao.workers = cfg.workers;
        ao.thorough = *thorough;
        auto rep = paper_verify(ao);
        if (cfg.json) {
          emit(io::to_json(rep));
        } else {
          for (const auto& i : rep.items)
            out << "[" << to_string(i.status) << "] " << i.group << ": " << i.name << ": " << i.detail << "\n";
          out << rep.count(AuditStatus::kPass) << " pass, " << rep.count(AuditStatus::kAnomaly) << " anomaly, "
              << rep.count(AuditStatus::kFail) << " fail\n";
        }
        return rep.ok() ? 0 : 1;
      };
    });
  }

  std::vector<const char*> argv{"nrd"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  // CLI11 drops an environment value that fails conversion or validation and
  // keeps the default, so a set variable with no recorded result was rejected.
  for (const CLI::Option* opt : app.get_options()) {
    const std::string& name = opt->get_envname();
    if (name.empty() || opt->count() > 0) continue;
    if (const char* value = std::getenv(name.c_str()); value != nullptr) {
      err << "nrd: invalid value '" << value << "' in " << name << "\n";
      return 2;
    }
  }
  try {
    return action ? action() : 2;
  } catch (const UsageError& e) {
    err << "nrd: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "nrd: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "nrd: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    err << "nrd: budget exhausted: " << e.what();
    if (e.partial() >= 0) err << " (best so far " << e.partial() << ")";
    err << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "nrd: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace nrd::cli
