// Command-line front end: refinement, closure, initial class, isomorphism, decomposition, witnesses, corpora.
#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "mfiso/closure.hpp"
#include "mfiso/corpus.hpp"
#include "mfiso/graph.hpp"
#include "mfiso/initial_color.hpp"
#include "mfiso/io.hpp"
#include "mfiso/iso.hpp"
#include "mfiso/perm.hpp"
#include "mfiso/refinement.hpp"
#include "mfiso/witness.hpp"

using json = nlohmann::json;
using namespace mfiso;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitInternal = 70;

struct Config {
  int h = 5;
  double a = 4.0;
  double log_base = 2.0;
  long t = 0;
  uint64_t seed = 1;
};

bool log_enabled() {
  const char* v = std::getenv("MFISO_LOG");
  return v && std::string(v) != "off" && std::string(v) != "0";
}

IsoParams iso_params(const Config& c) { return {c.h, c.t, c.a, c.log_base}; }

VertexSet parse_vertices(const std::string& s) {
  VertexSet r;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ','))
    if (!tok.empty()) {
      try {
        r.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw DataFormatError("bad vertex id '" + tok + "'");
      }
    }
  return sorted_set(r);
}

std::vector<int> class_sizes(const std::vector<int>& colors, int k) {
  std::vector<int> s(k, 0);
  for (int c : colors) ++s[c];
  return s;
}

json group_json(int n, const std::vector<Perm>& gens) {
  PermGroup g(n, gens);
  return {{"order", g.order().str()}, {"generators", gens}};
}

void emit(const json& j) { std::cout << j.dump() << "\n"; }

std::string dot_decomposition(const TreeDecomposition& td) {
  std::ostringstream o;
  o << "graph decomposition {\n";
  for (size_t i = 0; i < td.bags.size(); ++i) {
    o << "  n" << i << " [label=\"";
    for (size_t k = 0; k < td.bags[i].size(); ++k) o << (k ? "," : "") << td.bags[i][k];
    o << "\"];\n";
  }
  for (auto [a, b] : td.edges) o << "  n" << a << " -- n" << b << ";\n";
  o << "}\n";
  return o.str();
}

std::string dot_witness(const TopologicalWitness& w) {
  std::ostringstream o;
  o << "graph witness {\n";
  for (int b : w.branch) o << "  " << b << " [shape=box];\n";
  for (auto& p : w.paths)
    for (size_t i = 0; i + 1 < p.size(); ++i) o << "  " << p[i] << " -- " << p[i + 1] << ";\n";
  o << "}\n";
  return o.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isomorphism of graphs excluding a fixed minor"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  app.add_option("--h", cfg.h, "excluded clique minor size")->check(CLI::Range(2, 1000));
  app.add_option("--a", cfg.a, "constant in the closure threshold")->check(CLI::PositiveNumber);
  app.add_option("--log-base", cfg.log_base, "logarithm base in the closure threshold")->check(CLI::Range(1.0001, 1e9));
  app.add_option("--t", cfg.t, "closure threshold override")->check(CLI::Range(1L, 1L << 40));
  app.add_option("--seed", cfg.seed, "corpus seed");

  std::string g1, g2, xs, v1s, kind = "planar", format = "json";
  bool emit_aut = false;
  int n = 20, count = 10, k = 3, petals = 400, len = 2, cores = 1;
  double keep = 0.6;

  auto* refine = app.add_subcommand("refine", "1-WL stable coloring");
  refine->add_option("graph", g1)->required();
  auto* w2 = app.add_subcommand("wl2", "2-WL stable pair coloring");
  w2->add_option("graph", g1)->required();
  auto* cl = app.add_subcommand("closure", "t-CR closure of a seed set");
  cl->add_option("graph", g1)->required();
  cl->add_option("--x", xs, "comma-separated seed vertices")->required();
  auto* ic = app.add_subcommand("initial-color", "isomorphism-invariant initial class");
  ic->add_option("graph", g1)->required();
  auto* iso = app.add_subcommand("iso", "decide isomorphism (exit 0 iso, 1 non-iso, 2 minor found)");
  iso->add_option("g1", g1)->required();
  iso->add_option("g2", g2)->required();
  iso->add_flag("--emit-aut", emit_aut, "print automorphism generators of g1");
  auto* aut = app.add_subcommand("aut", "automorphism group");
  aut->add_option("graph", g1)->required();
  auto* dec = app.add_subcommand("decompose", "tree decomposition from the recursion");
  dec->add_option("graph", g1)->required();
  dec->add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
  auto* wit = app.add_subcommand("witness", "topological clique from individualized vertices");
  wit->add_option("graph", g1)->required();
  wit->add_option("--v1", v1s, "comma-separated branch candidates")->required();
  wit->add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
  auto* gen = app.add_subcommand("gen-corpus", "random graphs as graph6 lines");
  gen->add_option("--kind", kind)->check(CLI::IsMember({"planar", "maxplanar", "ktree", "random", "tree", "sunflower", "grid"}));
  gen->add_option("--n", n)->check(CLI::Range(1, 100000));
  gen->add_option("--count", count)->check(CLI::Range(1, 1000000));
  gen->add_option("--k", k, "treewidth for ktree")->check(CLI::Range(1, 100));
  gen->add_option("--keep", keep, "edge keep probability")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--petals", petals)->check(CLI::Range(1, 100000));
  gen->add_option("--len", len)->check(CLI::Range(1, 1000));
  gen->add_option("--cores", cores)->check(CLI::Range(1, 2));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    const IsoParams ip = iso_params(cfg);
    if (*refine) {
      auto cg = read_graph_file(g1);
      auto r = color_refine_trace(cg.graph, normalize_colors(cg.colors));
      emit({{"n", cg.graph.n()},
            {"num_colors", r.coloring.num_colors},
            {"rounds", r.rounds},
            {"colors", r.coloring.colors},
            {"classes", color_classes(r.coloring)},
            {"class_sizes", class_sizes(r.coloring.colors, r.coloring.num_colors)}});
    } else if (*w2) {
      auto cg = read_graph_file(g1);
      auto r = wl2_trace(cg.graph, normalize_colors(cg.colors));
      auto diag = diagonal_coloring(r.coloring);
      emit({{"n", cg.graph.n()},
            {"num_colors", r.coloring.num_colors},
            {"rounds", r.rounds},
            {"class_sizes", class_sizes(r.coloring.colors, r.coloring.num_colors)},
            {"diagonal", diag.colors}});
    } else if (*cl) {
      auto cg = read_graph_file(g1);
      auto r = closure_t(cg.graph, normalize_colors(cg.colors), parse_vertices(xs), ip.threshold());
      json steps = json::array();
      for (auto& s : r.trace)
        steps.push_back({{"kind", s.kind == ClosureStep::Refine ? "refine" : "individualize"}, {"classes", s.classes}});
      json seps = json::array();
      for (auto& cs : components_and_separators(cg.graph, r.d)) seps.push_back({{"z", cs.z}, {"s", cs.s}});
      emit({{"t", ip.threshold()},
            {"d", r.d},
            {"partition", color_classes(r.final_coloring)},
            {"separators", seps},
            {"trace", steps}});
    } else if (*ic) {
      auto cg = read_graph_file(g1);
      auto r = find_initial_class(cg.graph, normalize_colors(cg.colors), ip.initial());
      json j{{"minor", r.minor_found}, {"restarts", r.restarts}, {"nonregular_fallbacks", r.nonregular_fallbacks}};
      if (r.minor_found) {
        j["reason"] = r.reason;
      } else {
        j.update({{"x", r.x},
                  {"x_prime", r.x_prime},
                  {"color", r.color},
                  {"gprime", {{"n", r.gprime.n()}, {"edges", r.gprime.edges()}}},
                  {"chiprime", color_classes(diagonal_coloring(r.chiprime))},
                  {"to_input", r.to_input}});
      }
      emit(j);
      return r.minor_found ? 2 : 0;
    } else if (*iso) {
      auto a = read_graph_file(g1);
      auto b = read_graph_file(g2);
      IsoStats st;
      auto r = is_isomorphic(a.graph, a.colors, b.graph, b.colors, ip, &st);
      json j{{"decision", to_string(r.decision)}};
      if (r.decision == Decision::MinorFound) j["reason"] = r.reason;
      if (r.isomorphic()) {
        j["rep"] = r.rep;
        if (emit_aut) j["aut"] = group_json(a.graph.n(), r.aut);
      }
      if (log_enabled())
        std::cerr << "calls=" << st.calls << " base_cases=" << st.base_cases << " searches=" << st.searches
                  << " search_nodes=" << st.search_nodes << " max_depth=" << st.max_depth << "\n";
      emit(j);
      return r.decision == Decision::Isomorphic ? 0 : r.decision == Decision::NonIsomorphic ? 1 : 2;
    } else if (*aut) {
      auto a = read_graph_file(g1);
      auto r = is_isomorphic(a.graph, a.colors, a.graph, a.colors, ip);
      json j{{"decision", to_string(r.decision)}};
      if (r.isomorphic()) j.update(group_json(a.graph.n(), r.aut));
      else j["reason"] = r.reason;
      emit(j);
      return r.isomorphic() ? 0 : 2;
    } else if (*dec) {
      auto a = read_graph_file(g1);
      auto td = tree_decomposition(a.graph, a.colors, ip);
      if (td.minor_found) {
        emit({{"decision", "minor-found"}, {"reason", td.reason}});
        return 2;
      }
      auto chk = check_tree_decomposition(a.graph, td);
      if (!chk.ok()) throw InvariantError("decomposition failed validation");
      if (format == "dot") {
        std::cout << dot_decomposition(td);
      } else {
        json nodes = json::array();
        for (size_t i = 0; i < td.bags.size(); ++i) nodes.push_back({{"id", i}, {"bag", td.bags[i]}});
        emit({{"nodes", nodes}, {"edges", td.edges}, {"adhesion", chk.adhesion}, {"width", chk.width}});
      }
    } else if (*wit) {
      auto a = read_graph_file(g1);
      VertexSet v1 = parse_vertices(v1s);
      check_vertex_set(a.graph, v1);
      VertexSet all(a.graph.n());
      std::iota(all.begin(), all.end(), 0);
      VertexSet v2 = set_difference(all, v1);
      std::vector<int> init(a.graph.n(), 0);
      for (size_t i = 0; i < v1.size(); ++i) init[v1[i]] = static_cast<int>(i) + 1;
      auto chi = color_refine(a.graph, normalize_colors(init)).colors;
      auto r = extract_topological_clique(a.graph, chi, v1, v2, cfg.h);
      if (!r.witness) {
        emit({{"witness", nullptr}, {"small_class", r.small_class}});
        return 1;
      }
      if (format == "dot") std::cout << dot_witness(*r.witness);
      else emit({{"branch", r.witness->branch}, {"paths", r.witness->paths}});
    } else if (*gen) {
      Rng rng(cfg.seed);
      for (int i = 0; i < count; ++i) {
        Graph g;
        if (kind == "planar") g = random_planar(n, rng, keep);
        else if (kind == "maxplanar") g = random_maximal_planar(n, rng);
        else if (kind == "ktree") g = random_partial_ktree(n, k, rng, keep);
        else if (kind == "random") g = random_connected_graph(n, keep, rng);
        else if (kind == "tree") g = random_tree(n, rng);
        else if (kind == "sunflower") g = planar_sunflower(petals, len, cores);
        else g = grid_graph(n, n);
        std::cout << to_graph6(g) << "\n";
      }
    }
  } catch (const DataFormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitData;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const CapacityError& e) {
    std::cerr << "capacity exceeded: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
