// Acceptance suite: one PASS/FAIL line per criterion. Usage: acceptance [criterion ...] (default: all).
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mfiso/closure.hpp"
#include "mfiso/corpus.hpp"
#include "mfiso/initial_color.hpp"
#include "mfiso/io.hpp"
#include "mfiso/iso.hpp"
#include "mfiso/perm.hpp"
#include "mfiso/refinement.hpp"
#include "mfiso/witness.hpp"
#include "oracles.hpp"

using namespace mfiso;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<int> zeros(int n) { return std::vector<int>(n, 0); }

// K_h minor by brute force: h disjoint connected branch sets, pairwise adjacent. Small graphs only.
bool has_clique_minor(const Graph& g, int h) {
  const int n = g.n();
  if (n < h) return false;
  std::vector<int> lab(n, 0);  // 0 = unused, 1..h = branch set
  std::function<bool(int)> rec = [&](int v) -> bool {
    if (v == n) {
      std::vector<VertexSet> sets(h + 1);
      for (int u = 0; u < n; ++u) sets[lab[u]].push_back(u);
      for (int i = 1; i <= h; ++i)
        if (sets[i].empty() || !is_connected_subset(g, sets[i])) return false;
      for (int i = 1; i <= h; ++i)
        for (int j = i + 1; j <= h; ++j) {
          bool adj = false;
          for (int a : sets[i])
            for (int b : sets[j]) adj |= g.has_edge(a, b);
          if (!adj) return false;
        }
      return true;
    }
    int maxl = 0;
    for (int u = 0; u < v; ++u) maxl = std::max(maxl, lab[u]);
    for (int l = 0; l <= std::min(h, maxl + 1); ++l) {
      lab[v] = l;
      if (rec(v + 1)) return true;
    }
    lab[v] = 0;
    return false;
  };
  return rec(0);
}

// Agreement with the stack tree checked from scratch: one vertex per class, adjacency exactly on tree edges.
bool oracle_agrees(const TreeStack& ts, const std::vector<int>& member) {
  const int k = ts.tree.k;
  if (static_cast<int>(member.size()) != k) return false;
  for (int c = 0; c < k; ++c)
    if (member[c] < 0 || member[c] >= ts.g.n() || ts.color[member[c]] != c) return false;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      bool tree_edge = false;
      for (auto [x, y] : ts.tree.edges) tree_edge |= (x == a && y == b) || (x == b && y == a);
      if (ts.g.has_edge(member[a], member[b]) != tree_edge) return false;
    }
  return true;
}

// 1. Decisions on all connected graphs up to 7 vertices against brute force.
Outcome criterion1() {
  auto t0 = Clock::now();
  const IsoParams p{5, 0, 4.0, 2.0};
  Rng rng(101);
  long pairs = 0, wrong = 0, minors = 0, bad_minor = 0, bad_rep = 0;
  std::map<std::string, bool> minor_cache;
  auto check = [&](const Graph& a, const Graph& b) {
    ++pairs;
    auto r = is_isomorphic(a, zeros(a.n()), b, zeros(b.n()), p);
    if (r.decision == Decision::MinorFound) {
      ++minors;
      auto key = to_graph6(a);
      if (!minor_cache.count(key)) minor_cache[key] = has_clique_minor(a, 5);
      if (!minor_cache[key]) ++bad_minor;
      return;
    }
    bool truth = oracle::isomorphic(a, b);
    if (r.isomorphic() != truth) ++wrong;
    if (r.isomorphic() && !is_isomorphism(a, b, r.rep)) ++bad_rep;
  };
  long graphs = 0;
  for (int n = 1; n <= 7; ++n) {
    auto gs = oracle::connected_graphs(n);
    graphs += static_cast<long>(gs.size());
    for (size_t i = 0; i < gs.size(); ++i) {
      check(gs[i], relabel(gs[i], random_permutation(n, rng)));
      for (size_t j = i + 1; j < gs.size(); ++j)
        if (gs[i].m() == gs[j].m()) check(gs[i], gs[j]);
    }
  }
  double s = seconds_since(t0);
  bool ok = wrong == 0 && bad_minor == 0 && bad_rep == 0 && s <= 600;
  return {ok, fmt("graphs=%ld pairs=%ld disagreements=%ld minor_found=%ld unverified_minor=%ld bad_rep=%ld time=%.1fs (limit 600s)",
                  graphs, pairs, wrong, minors, bad_minor, bad_rep, s)};
}

// 2. Planar graphs against random relabelings: always isomorphic with a verified map.
Outcome criterion2() {
  auto t0 = Clock::now();
  Rng rng(202);
  int fails = 0;
  for (int i = 0; i < 500; ++i) {
    int n = uniform_int(rng, 4, 40);
    Graph g = random_planar(n, rng, 0.4 + 0.6 * (i % 5) / 4.0);
    auto pi = random_permutation(n, rng);
    Graph pg = relabel(g, pi);
    auto r = is_isomorphic(g, zeros(n), pg, zeros(n), IsoParams{5, 0, 4.0, 2.0});
    if (!r.isomorphic() || !is_isomorphism(g, pg, r.rep)) ++fails;
  }
  double s = seconds_since(t0);
  return {fails == 0 && s <= 300, fmt("pairs=500 failures=%d time=%.1fs (limit 300s)", fails, s)};
}

// 3. Separators of closures in planar graphs with t = 375 have at most 4 vertices.
Outcome criterion3() {
  auto t0 = Clock::now();
  Rng rng(303);
  const long t = 375;
  int graphs = 0, closures = 0, violations = 0, max_sep = 0;
  auto run = [&](const Graph& g, int seeds) {
    ++graphs;
    for (int k = 0; k < seeds; ++k) {
      VertexSet x;
      int size = uniform_int(rng, 1, 3);
      for (int j = 0; j < size; ++j) x.push_back(uniform_int(rng, 0, g.n() - 1));
      auto r = closure_t(g, uniform_coloring(g.n()), sorted_set(x), t);
      ++closures;
      for (auto& cs : components_and_separators(g, r.d)) {
        max_sep = std::max(max_sep, static_cast<int>(cs.s.size()));
        if (cs.s.size() > 4) ++violations;
      }
    }
  };
  for (int i = 0; i < 190; ++i) {
    int n = uniform_int(rng, 10, 120);
    run(i % 3 == 0 ? random_maximal_planar(n, rng) : random_planar(n, rng), 3);
  }
  for (int i = 0; i < 10; ++i) run(planar_sunflower(376 + 20 * i, 1 + i % 3, 1 + i % 2), 2);
  double s = seconds_since(t0);
  return {violations == 0 && s <= 120,
          fmt("graphs=%d closures=%d violations=%d max_separator=%d time=%.1fs (limit 120s)", graphs, closures,
              violations, max_sep, s)};
}

// 4. Tree packing reaches floor(m / ell) verified disjoint agreeing trees.
Outcome criterion4() {
  Rng rng(404);
  int shortfalls = 0, invalid = 0, min_slack = 1 << 30;
  for (int i = 0; i < 100; ++i) {
    int k = uniform_int(rng, 1, 7), m = uniform_int(rng, 4, 24), d = uniform_int(rng, 1, std::min(3, m));
    auto ts = random_tree_stack(k, m, d, rng);
    ColoredInstance inst{&ts.g, ts.color, k};
    auto f = pack_agreeing_trees(inst, ts.tree);
    int need = m / ts.tree.ell();
    int got = static_cast<int>(f.family.size());
    min_slack = std::min(min_slack, got - need);
    if (got < need) ++shortfalls;
    for (auto& mem : f.family)
      if (!oracle_agrees(ts, mem)) ++invalid;
    if (!family_disjoint(f.family)) ++invalid;
  }
  return {shortfalls == 0 && invalid == 0,
          fmt("instances=100 shortfalls=%d invalid=%d min_slack=%d", shortfalls, invalid, min_slack)};
}


// 5. Stable 1-WL and 2-WL colorings commute with relabeling exactly.
Outcome criterion5() {
  Rng rng(505);
  int bad1 = 0, bad2 = 0;
  for (int i = 0; i < 1000; ++i) {
    int n = uniform_int(rng, 3, 18);
    Graph g;
    switch (i % 4) {
      case 0: g = random_planar(n, rng); break;
      case 1: g = random_partial_ktree(n, 2, rng); break;
      case 2: g = random_connected_graph(n, 0.25, rng); break;
      default: g = random_tree(n, rng);
    }
    std::vector<int> col(n);
    for (int& c : col) c = uniform_int(rng, 0, i % 3);
    auto pi = random_permutation(n, rng);
    Graph pg = relabel(g, pi);
    auto pcol = permute_colors(col, pi);
    auto a = color_refine(g, normalize_colors(col)), b = color_refine(pg, normalize_colors(pcol));
    for (int v = 0; v < n; ++v) bad1 += a[v] != b[pi[v]];
    auto a2 = wl2(g, normalize_colors(col)), b2 = wl2(pg, normalize_colors(pcol));
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) bad2 += a2(u, v) != b2(pi[u], pi[v]);
  }
  return {bad1 == 0 && bad2 == 0, fmt("pairs=1000 vertex_mismatches=%d pair_mismatches=%d", bad1, bad2)};
}

// 6. Factor graphs by an edge color: the quotient coloring is 2-WL stable and block multisets are equal or disjoint.
Outcome criterion6() {
  Rng rng(606);
  int instances = 0, unstable = 0, overlap = 0, misnamed = 0;
  int attempt = 0;
  while (instances < 100) {
    ++attempt;
    int n = uniform_int(rng, 6, 18);
    Graph g;
    switch (attempt % 5) {
      case 0: g = random_planar(n, rng); break;
      case 1: g = random_partial_ktree(n, 2, rng); break;
      case 2: g = cycle_graph(n); break;
      case 3: {
        int k = uniform_int(rng, 2, 5);
        std::vector<std::pair<int, int>> e;
        for (int b = 0; b < k; ++b)
          for (int x = 0; x < 3; ++x)
            for (int y = x + 1; y < 3; ++y) e.emplace_back(3 * b + x, 3 * b + y);
        for (int b = 0; b + 1 < k; ++b) e.emplace_back(3 * b, 3 * b + 3);
        g = Graph::from_edges(3 * k, e);
        break;
      }
      default: g = grid_graph(uniform_int(rng, 2, 4), uniform_int(rng, 2, 4));
    }
    auto pc = wl2(g, uniform_coloring(g.n()));
    std::set<int> ecols;
    for (auto [u, v] : g.edges()) ecols.insert(pc(u, v));
    for (int c : ecols) {
      if (instances >= 100) break;
      ++instances;
      auto f = factor_by_edge_color(g, pc, c);
      if (!partitions_equivalent(f.pc, wl2(f.graph, f.pc))) ++unstable;
      const int b = static_cast<int>(f.blocks.size());
      std::map<std::vector<int>, int> ms_id;
      std::vector<std::vector<int>> ms(static_cast<size_t>(b) * b);
      for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j) {
          auto& m = ms[static_cast<size_t>(i) * b + j];
          for (int v1 : f.blocks[i])
            for (int v2 : f.blocks[j]) m.push_back(pc(v1, v2));
          std::sort(m.begin(), m.end());
          ms_id.emplace(m, 0);
        }
      std::vector<std::set<int>> sets;
      for (auto& [m, id] : ms_id) sets.emplace_back(m.begin(), m.end());
      for (size_t x = 0; x < sets.size(); ++x)
        for (size_t y = x + 1; y < sets.size(); ++y)
          for (int v : sets[x])
            if (sets[y].count(v)) {
              ++overlap;
              break;
            }
      for (int i = 0; i < b * b; ++i)
        for (int j = 0; j < b * b; ++j)
          if ((ms[i] == ms[j]) != (f.pc.colors[i] == f.pc.colors[j])) ++misnamed;
    }
  }
  return {unstable == 0 && overlap == 0 && misnamed == 0,
          fmt("instances=%d unstable=%d overlapping_multisets=%d naming_mismatches=%d", instances, unstable, overlap,
              misnamed)};
}

// 7. Group engine against explicit closure for groups of order at most 10^4.
Outcome criterion7() {
  Rng rng(707);
  struct Named {
    std::string name;
    int n;
    std::vector<Perm> gens;
  };
  std::vector<Named> suite;
  auto cyc = [](int n, int off, int len) {
    Perm p = identity_perm(n);
    for (int i = 0; i < len; ++i) p[off + i] = off + (i + 1) % len;
    return p;
  };
  auto swap2 = [](int n, int a, int b) { return from_cycles(n, {{a, b}}); };
  for (int n = 2; n <= 7; ++n) suite.push_back({"S" + std::to_string(n), n, {swap2(n, 0, 1), cyc(n, 0, n)}});
  for (int n = 3; n <= 7; ++n) {
    std::vector<Perm> g;
    for (int i = 2; i < n; ++i) g.push_back(from_cycles(n, {{0, 1, i}}));
    suite.push_back({"A" + std::to_string(n), n, g});
  }
  for (int n : {3, 4, 5, 6, 8, 12, 20, 50}) {
    Perm r(n);
    for (int i = 0; i < n; ++i) r[i] = (n - i) % n;
    suite.push_back({"D" + std::to_string(n), n, {cyc(n, 0, n), r}});
  }
  // Wreath-like products: blocks of size b permuted by a top group on k blocks.
  auto wreath = [&](int b, int k, bool full_base, bool full_top) {
    int n = b * k;
    std::vector<Perm> g;
    g.push_back(cyc(n, 0, b));
    if (full_base && b > 2) g.push_back(swap2(n, 0, 1));
    Perm shift(n), sw = identity_perm(n);
    for (int i = 0; i < n; ++i) shift[i] = (i + b) % n;
    g.push_back(shift);
    if (full_top && k > 2) {
      for (int i = 0; i < b; ++i) std::swap(sw[i], sw[b + i]);
      g.push_back(sw);
    }
    return Named{"W" + std::to_string(b) + "x" + std::to_string(k) + (full_base ? "S" : "C") + (full_top ? "S" : "C"),
                 n, g};
  };
  suite.push_back(wreath(2, 3, true, true));
  suite.push_back(wreath(3, 2, true, true));
  suite.push_back(wreath(4, 2, true, true));
  suite.push_back(wreath(2, 4, true, true));
  suite.push_back(wreath(3, 3, false, true));
  suite.push_back(wreath(2, 5, false, false));
  suite.push_back(wreath(3, 3, true, false));
  suite.push_back({"C2xC3xC5", 10, {cyc(10, 0, 2), cyc(10, 2, 3), cyc(10, 5, 5)}});
  int groups = 0, bad_order = 0, bad_member = 0, bad_stab = 0;
  uint64_t max_order = 0;
  for (auto& s : suite) {
    auto closure = oracle::group_closure(s.n, s.gens);
    if (closure.size() > 10000) continue;
    ++groups;
    max_order = std::max<uint64_t>(max_order, closure.size());
    PermGroup g(s.n, s.gens);
    if (g.order_u64() != closure.size()) ++bad_order;
    for (auto& p : closure) bad_member += !g.contains(p);
    for (int k = 0; k < 300; ++k) {
      auto p = random_permutation(s.n, rng);
      bad_member += g.contains(p) != static_cast<bool>(closure.count(p));
    }
    for (int k = 0; k < 3; ++k) {
      VertexSet a;
      for (int v = 0; v < s.n; ++v)
        if (uniform_int(rng, 0, 2) == 0) a.push_back(v);
      auto st = g.pointwise_stabilizer(a);
      uint64_t fix = 0;
      for (auto& p : closure) {
        bool f = true;
        for (int v : a) f &= p[v] == v;
        fix += f;
      }
      if (st.order_u64() != fix) ++bad_stab;
      for (auto& p : st.generators())
        for (int v : a) bad_stab += p[v] != v;
    }
  }
  return {bad_order == 0 && bad_member == 0 && bad_stab == 0,
          fmt("groups=%d max_order=%llu order_mismatches=%d membership_mismatches=%d stabilizer_mismatches=%d", groups,
              static_cast<unsigned long long>(max_order), bad_order, bad_member, bad_stab)};
}

// Corpus shared by criteria 8 and 9: graph, excluded clique size.
std::vector<std::pair<Graph, int>> corpus(uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<Graph, int>> c;
  for (int i = 0; i < 30; ++i) c.emplace_back(random_planar(uniform_int(rng, 5, 40), rng), 5);
  for (int i = 0; i < 10; ++i) c.emplace_back(random_maximal_planar(uniform_int(rng, 5, 30), rng), 5);
  for (int i = 0; i < 15; ++i) c.emplace_back(random_partial_ktree(uniform_int(rng, 5, 35), 3, rng), 5);
  for (int i = 0; i < 10; ++i) c.emplace_back(random_partial_ktree(uniform_int(rng, 5, 30), 2, rng), 4);
  for (int i = 0; i < 10; ++i) c.emplace_back(random_tree(uniform_int(rng, 2, 40), rng), 3);
  for (int n : {5, 12, 30}) c.emplace_back(cycle_graph(n), 4);
  for (int r : {3, 5, 6}) c.emplace_back(grid_graph(r, r + 1), 5);
  c.emplace_back(wheel_graph(12), 5);
  c.emplace_back(planar_sunflower(60, 2, 2), 5);
  return c;
}

// 8. Tree decompositions from the recursion: (T.1), (T.2) and adhesion at most h - 1.
Outcome criterion8() {
  int runs = 0, minor = 0, violations = 0, max_adh = 0;
  for (auto& [g, h] : corpus(808))
    for (long t : {0L, 2L, 3L, 6L}) {
      auto td = tree_decomposition(g, zeros(g.n()), IsoParams{h, t, 4.0, 2.0});
      if (td.minor_found) {
        ++minor;
        continue;
      }
      ++runs;
      auto chk = check_tree_decomposition(g, td);
      max_adh = std::max(max_adh, chk.adhesion);
      if (!chk.ok() || chk.adhesion > h - 1) ++violations;
    }
  return {violations == 0 && runs > 0,
          fmt("completed=%d minor_found=%d violations=%d max_adhesion=%d", runs, minor, violations, max_adh)};
}

// 9. Initial class: one diagonal class, inside V(G), contained in the closure of each of its vertices.
// Graded at the default t. Small overrides fall below the threshold the closure property needs
// (a star-shaped G' with n - 1 twin leaves needs t >= n - 1), so they are only reported.
Outcome criterion9() {
  int runs = 0, minor = 0, violations = 0, small_runs = 0, small_violations = 0;
  for (auto& [g, h] : corpus(909))
    for (long t : {0L, 3L, 8L}) {
      long tt = t ? t : t_for_h(h);
      auto r = find_initial_class(g, uniform_coloring(g.n()), InitialColorParams{h, tt, 4.0, 2.0});
      if (r.minor_found) {
        ++minor;
        continue;
      }
      bool ok = !r.x.empty() && r.restarts <= g.n();
      VertexSet cls;
      for (int v = 0; v < r.gprime.n(); ++v)
        if (r.chiprime(v, v) == r.color) cls.push_back(v);
      ok &= cls == r.x_prime;
      VertexSet mapped;
      for (int v : r.x_prime) {
        int w = r.to_input[v];
        ok &= w >= 0 && w < g.n();
        mapped.push_back(w);
      }
      ok &= sorted_set(mapped) == r.x;
      for (int v : r.x_prime) ok &= is_subset(r.x_prime, closure_t_pair(r.gprime, r.chiprime, {v}, tt).d);
      if (t == 0) {
        ++runs;
        violations += !ok;
      } else {
        ++small_runs;
        small_violations += !ok;
      }
    }
  return {violations == 0 && runs > 0,
          fmt("completed=%d minor_found=%d violations=%d small_t_runs=%d small_t_violations=%d (not graded)", runs,
              minor, violations, small_runs, small_violations)};
}

// 10. Engineered instances with h = 3 and classes of at least 81 vertices always yield a valid witness.
Outcome criterion10() {
  Rng rng(1010);
  int instances = 0, missing = 0, invalid = 0;
  for (int i = 0; i < 20; ++i) {
    int classes = uniform_int(rng, 3, 5), size = uniform_int(rng, 81, 100), d = uniform_int(rng, 1, 3);
    auto wi = random_witness_instance(3, classes, size, d, rng);
    auto r = extract_topological_clique(wi.g, wi.chi, wi.v1, wi.v2, wi.h);
    ++instances;
    if (!r.witness) {
      ++missing;
      continue;
    }
    if (!validate_witness(wi.g, *r.witness)) ++invalid;
  }
  return {missing == 0 && invalid == 0, fmt("instances=%d missing=%d invalid=%d", instances, missing, invalid)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> all{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                  criterion6, criterion7, criterion8, criterion9, criterion10};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    int k = std::atoi(argv[i]);
    if (k < 1 || k > static_cast<int>(all.size())) {
      std::fprintf(stderr, "usage: acceptance [criterion 1..%zu ...]\n", all.size());
      return 64;
    }
    which.push_back(k);
  }
  if (which.empty())
    for (size_t k = 1; k <= all.size(); ++k) which.push_back(static_cast<int>(k));
  int failed = 0;
  for (int k : which) {
    Outcome o;
    try {
      o = all[k - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
