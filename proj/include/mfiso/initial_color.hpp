#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/max_cardinality_matching.hpp>

#include "closure.hpp"
#include "graph.hpp"
#include "refinement.hpp"

namespace mfiso {

// G/c: components of G[c] contracted, every other vertex kept as a singleton block.
struct FactorGraph {
  Graph graph;
  PairColoring pc;                 // χ/c, ranked by sorted multiset contents
  std::vector<VertexSet> blocks;   // block i of the input = vertex i of the factor graph
  std::vector<int> block_of;       // input vertex -> block
};

namespace detail {

// Undirected edges whose color in either orientation is c.
inline std::vector<std::pair<int, int>> edges_of_color(const Graph& g, const PairColoring& pc, int c) {
  std::vector<std::pair<int, int>> e;
  for (auto [u, v] : g.edges())
    if (pc(u, v) == c || pc(v, u) == c) e.emplace_back(u, v);
  return e;
}

inline std::vector<int> edge_colors(const Graph& g, const PairColoring& pc) {
  std::vector<int> cs;
  for (auto [u, v] : g.edges()) {
    cs.push_back(pc(u, v));
    cs.push_back(pc(v, u));
  }
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  return cs;
}

}  // namespace detail

inline FactorGraph factor_by_edge_color(const Graph& g, const PairColoring& pc, int c) {
  const int n = g.n();
  if (pc.n != n) throw InputError("pair coloring size mismatch");
  auto ec = detail::edges_of_color(g, pc, c);
  if (ec.empty()) throw InputError("not an edge color");
  Graph gc = Graph::from_edges(n, ec);
  FactorGraph f;
  std::vector<char> in_gc(n, 0);
  for (auto [u, v] : ec) in_gc[u] = in_gc[v] = 1;
  std::vector<char> seen(n, 0);
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    VertexSet b;
    if (!in_gc[s]) {
      b.push_back(s);
      seen[s] = 1;
    } else {
      std::vector<int> st{s};
      seen[s] = 1;
      while (!st.empty()) {
        int x = st.back();
        st.pop_back();
        b.push_back(x);
        for (int y : gc.adj(x))
          if (!seen[y]) {
            seen[y] = 1;
            st.push_back(y);
          }
      }
    }
    f.blocks.push_back(sorted_set(std::move(b)));
  }
  Contraction con = contract_partition(g, f.blocks);
  f.graph = std::move(con.graph);
  f.block_of = std::move(con.block_of);
  const int k = static_cast<int>(f.blocks.size());
  std::vector<std::vector<int>> ms(static_cast<size_t>(k) * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      auto& m = ms[static_cast<size_t>(a) * k + b];
      for (int v : f.blocks[a])
        for (int w : f.blocks[b]) m.push_back(pc(v, w));
      std::sort(m.begin(), m.end());
    }
  int num = 0;
  auto ids = rank_keys(ms, &num);
  f.pc = PairColoring{k, ids, num};
  // Distinct multisets must be disjoint as sets.
  std::vector<int> owner(pc.num_colors, -1);
  for (size_t i = 0; i < ms.size(); ++i)
    for (int x : ms[i]) {
      if (owner[x] == -1) owner[x] = ids[i];
      else if (owner[x] != ids[i]) throw InvariantError("factor multisets are neither equal nor disjoint");
    }
  return f;
}

struct CrossColorLift {
  std::vector<int> colors;                        // c_1..c_r
  std::vector<std::vector<std::pair<int, int>>> h_edges;  // H_i as unordered pairs of V1 vertices
  std::vector<std::vector<std::pair<int, int>>> matchings;  // (V2 vertex, index into h_edges[i])
  std::vector<char> certified;                    // H_i realized as a minor through the matching
  bool minor_found = false;                       // some |E_i| exceeded |V2|
};

namespace detail {

// Maximum matching of a bipartite graph given as left adjacency lists.
inline std::vector<int> max_bipartite_matching(int left, int right, const std::vector<std::vector<int>>& adj) {
  using BG = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
  BG bg(left + right);
  for (int u = 0; u < left; ++u)
    for (int w : adj[u]) boost::add_edge(u, left + w, bg);
  std::vector<boost::graph_traits<BG>::vertex_descriptor> mate(left + right);
  boost::edmonds_maximum_cardinality_matching(bg, &mate[0]);
  std::vector<int> r(left, -1);
  for (int u = 0; u < left; ++u)
    if (mate[u] != boost::graph_traits<BG>::null_vertex()) r[u] = static_cast<int>(mate[u]) - left;
  return r;
}

}  // namespace detail

// Pairs of V1 with a common V2 neighbour, split by pair color; each color graph is certified as a minor.
inline CrossColorLift cross_color_minor_lift(const Graph& g, VertexSet v1, VertexSet v2, const PairColoring& pc,
                                             double ratio) {
  v1 = sorted_set(std::move(v1));
  v2 = sorted_set(std::move(v2));
  check_vertex_set(g, v1);
  check_vertex_set(g, v2);
  if (pc.n != g.n()) throw InputError("pair coloring size mismatch");
  if (!set_intersection(v1, v2).empty() || static_cast<int>(v1.size() + v2.size()) != g.n())
    throw InputError("(V1, V2) is not a bipartition");
  if (!is_connected(g)) throw InputError("graph is not connected");
  int cross = -1;
  for (auto [u, w] : g.edges()) {
    if (contains(v1, u) == contains(v1, w)) throw InputError("edge inside one side");
    int a = contains(v1, u) ? u : w, b = contains(v1, u) ? w : u;
    if (cross == -1) cross = pc(a, b);
    else if (pc(a, b) != cross) throw InputError("more than one cross edge color");
  }
  if (!(static_cast<double>(v2.size()) > ratio * static_cast<double>(v1.size())))
    throw InputError("|V2| does not exceed the degree bound times |V1|");
  CrossColorLift res;
  std::vector<std::pair<int, int>> estar;
  for (size_t i = 0; i < v1.size(); ++i)
    for (size_t j = i + 1; j < v1.size(); ++j) {
      bool common = false;
      for (int w : g.adj(v1[i]))
        if (g.has_edge(w, v1[j])) common = true;
      if (common) estar.emplace_back(v1[i], v1[j]);
    }
  for (auto [a, b] : estar) {
    res.colors.push_back(pc(a, b));
    res.colors.push_back(pc(b, a));
  }
  std::sort(res.colors.begin(), res.colors.end());
  res.colors.erase(std::unique(res.colors.begin(), res.colors.end()), res.colors.end());
  // E* must be exactly the union of the chosen color classes on V1.
  for (size_t i = 0; i < v1.size(); ++i)
    for (size_t j = i + 1; j < v1.size(); ++j) {
      bool colored = std::binary_search(res.colors.begin(), res.colors.end(), pc(v1[i], v1[j]));
      bool in = std::binary_search(estar.begin(), estar.end(), std::make_pair(v1[i], v1[j]));
      if (colored != in) throw InvariantError("E* is not a union of pair color classes");
    }
  for (int c : res.colors) {
    std::vector<std::pair<int, int>> ei;
    for (auto [a, b] : estar)
      if (pc(a, b) == c || pc(b, a) == c) ei.emplace_back(a, b);
    std::vector<std::vector<int>> adj(v2.size());
    for (size_t u = 0; u < v2.size(); ++u)
      for (size_t e = 0; e < ei.size(); ++e)
        if (g.has_edge(v2[u], ei[e].first) && g.has_edge(v2[u], ei[e].second)) adj[u].push_back(static_cast<int>(e));
    auto mate = detail::max_bipartite_matching(static_cast<int>(v2.size()), static_cast<int>(ei.size()), adj);
    std::vector<std::pair<int, int>> m;
    for (size_t u = 0; u < v2.size(); ++u)
      if (mate[u] >= 0) m.emplace_back(v2[u], mate[u]);
    if (m.size() != std::min(v2.size(), ei.size())) throw InvariantError("incidence graph has no Hall matching");
    bool ok = v2.size() >= ei.size();
    if (!ok) res.minor_found = true;
    res.h_edges.push_back(ei);
    res.matchings.push_back(m);
    res.certified.push_back(ok);
  }
  return res;
}

// True iff V1 lies in the closure of every vertex.
inline bool bipartite_closure_check(const Graph& g, VertexSet v1, VertexSet v2, const PairColoring& pc, long t) {
  v1 = sorted_set(std::move(v1));
  v2 = sorted_set(std::move(v2));
  for (const VertexSet* side : {&v1, &v2})
    for (int v : *side)
      if (!is_subset(v1, closure_t_pair(g, pc, {v}, t).d)) return false;
  return true;
}

struct InitialColorOutput {
  bool minor_found = false;
  std::string reason;           // step that concluded a K_h minor
  Graph gprime;
  PairColoring chiprime;
  VertexSet x;                  // X as vertices of the input graph
  VertexSet x_prime;            // X as vertices of G'
  std::vector<int> to_input;    // G' vertex -> input vertex, or -1
  int color = -1;               // diagonal color of X in chiprime
  int restarts = 0;             // restarts over all recursion levels
  int nonregular_fallbacks = 0; // refinements because G_P was not regular
};

struct InitialColorParams {
  int h = 5;
  long t = 0;  // 0 selects t_for_h(h, a, log_base)
  double a = 4.0;
  double log_base = 2.0;
};

namespace detail {

class InitialColorFinder {
 public:
  explicit InitialColorFinder(const InitialColorParams& p) : p_(p) {
    small_bound_ = p.a * p.h * p.h * p.h;
    deg_bound_ = p.h < 2 ? 0.0 : p.a * p.h * std::log(static_cast<double>(p.h)) / std::log(p.log_base);
    t_ = p.t > 0 ? p.t : t_for_h(p.h, p.a, p.log_base);
  }

  int restarts = 0;
  int nonregular = 0;

  InitialColorOutput run(const Graph& g, const PairColoring& init) {
    const int n = g.n();
    PairColoring chi = wl2(g, init);
    int local_restarts = 0;
    while (true) {
      std::vector<int64_t> refined;
      InitialColorOutput out = step(g, chi, refined);
      if (refined.empty()) return out;
      // Restart on the strictly finer vertex coloring.
      VertexColoring old_diag = diagonal_coloring(chi);
      VertexColoring cv = normalize_colors(refined);
      if (cv.num_colors <= old_diag.num_colors) throw InvariantError("restart without progress");
      if (++local_restarts > n) throw InvariantError("restart bound exceeded");
      ++restarts;
      std::vector<int64_t> raw(static_cast<size_t>(n) * n);
      const int64_t k = cv.num_colors;
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
          raw[static_cast<size_t>(u) * n + v] = (static_cast<int64_t>(chi(u, v)) * k + cv[u]) * k + cv[v];
      chi = wl2(g, normalize_pairs(n, raw));
    }
  }

 private:
  InitialColorParams p_;
  double small_bound_, deg_bound_;
  long t_;

  static InitialColorOutput minor(const std::string& why) {
    InitialColorOutput o;
    o.minor_found = true;
    o.reason = why;
    return o;
  }

  static InitialColorOutput accept(const Graph& g, const PairColoring& chi, int c) {
    InitialColorOutput o;
    o.gprime = g;
    o.chiprime = chi;
    o.color = c;
    o.to_input.resize(g.n());
    for (int v = 0; v < g.n(); ++v) {
      o.to_input[v] = v;
      if (chi(v, v) == c) o.x_prime.push_back(v);
    }
    o.x = o.x_prime;
    return o;
  }

  struct View {
    int color;
    VertexSet vertices;
    std::vector<VertexSet> comps;
    int diag_colors;
    int s;
  };

  static View make_view(const Graph& g, const PairColoring& chi, int c) {
    View v{c, {}, {}, 0, 0};
    Graph gc = Graph::from_edges(g.n(), edges_of_color(g, chi, c));
    std::vector<char> mask(g.n(), 0);
    for (int x = 0; x < g.n(); ++x)
      if (gc.degree(x) > 0) {
        mask[x] = 1;
        v.vertices.push_back(x);
      }
    v.comps = components_masked(gc, mask);
    std::vector<int> dc;
    for (int x : v.vertices) dc.push_back(chi(x, x));
    std::sort(dc.begin(), dc.end());
    dc.erase(std::unique(dc.begin(), dc.end()), dc.end());
    v.diag_colors = static_cast<int>(dc.size());
    if (v.diag_colors < 1 || v.diag_colors > 2) throw InvariantError("edge color with more than two end colors");
    int s0 = -1;
    for (auto& comp : v.comps) {
      std::map<int, int> cnt;
      for (int x : comp) ++cnt[chi(x, x)];
      int s = comp.size();
      for (int d : dc) s = std::min(s, cnt[d]);
      if (s0 == -1) s0 = s;
      else if (s != s0) throw InvariantError("components of an edge color differ in size");
    }
    v.s = s0;
    return v;
  }

  VertexSet closure_of(const Graph& g, const PairColoring& chi, int v) const {
    if (t_ >= g.n()) {
      VertexSet all(g.n());
      for (int i = 0; i < g.n(); ++i) all[i] = i;
      return all;
    }
    return closure_t_pair(g, chi, {v}, t_).d;
  }

  // One pass; either returns a result or fills `refined` with a finer vertex coloring.
  InitialColorOutput step(const Graph& g, const PairColoring& chi, std::vector<int64_t>& refined) {
    const int n = g.n();
    if (n == 1) return accept(g, chi, chi(0, 0));
    std::vector<View> views;
    for (int c : edge_colors(g, chi)) views.push_back(make_view(g, chi, c));
    for (auto& v : views)
      if (v.s <= small_bound_) return small_branch(g, chi, v);
    return large_branch(g, chi, views, refined);
  }

  InitialColorOutput small_branch(const Graph& g, const PairColoring& chi, const View& view) {
    FactorGraph f = factor_by_edge_color(g, chi, view.color);
    InitialColorOutput sub = run(f.graph, f.pc);
    if (sub.minor_found) return sub;
    bool singletons = true;
    for (int xp : sub.x_prime)
      if (f.blocks[sub.to_input[xp]].size() != 1) singletons = false;
    InitialColorOutput out;
    if (singletons) {
      out = sub;
      for (auto& v : out.to_input)
        if (v >= 0) v = f.blocks[v].size() == 1 ? f.blocks[v][0] : -1;
      out.x.clear();
      for (int xp : out.x_prime) out.x.push_back(out.to_input[xp]);
      out.x = sorted_set(std::move(out.x));
      return out;
    }
    // d = the argmin diagonal color inside a component, ties by color id.
    const VertexSet& a0 = view.comps.front();
    std::map<int, int> cnt;
    for (int x : a0) ++cnt[chi(x, x)];
    int d = -1, best = n_max();
    for (auto [col, c] : cnt)
      if (c < best) {
        best = c;
        d = col;
      }
    const int nf = sub.gprime.n();
    std::vector<std::pair<int, int>> e = sub.gprime.edges();
    std::vector<int> to_input(nf);
    for (int v = 0; v < nf; ++v) {
      int fv = sub.to_input[v];
      to_input[v] = (fv >= 0 && f.blocks[fv].size() == 1) ? f.blocks[fv][0] : -1;
    }
    VertexSet newv_prime, newv;
    for (int xp : sub.x_prime) {
      for (int v : f.blocks[sub.to_input[xp]])
        if (chi(v, v) == d) {
          int id = static_cast<int>(to_input.size());
          to_input.push_back(v);
          e.emplace_back(xp, id);
          newv_prime.push_back(id);
          newv.push_back(v);
        }
    }
    const int np = static_cast<int>(to_input.size());
    std::vector<int64_t> raw(static_cast<size_t>(np) * np);
    for (int u = 0; u < np; ++u)
      for (int v = 0; v < np; ++v) {
        int64_t code;
        if (u < nf && v < nf) code = 2 * static_cast<int64_t>(sub.chiprime(u, v));  // (χF', 0)
        else if (u == v) code = 1;                                                  // (0, 1)
        else code = 3;                                                              // (1, 1)
        raw[static_cast<size_t>(u) * np + v] = code;
      }
    out.gprime = Graph::from_edges(np, e);
    out.chiprime = normalize_pairs(np, raw);
    out.to_input = std::move(to_input);
    out.x_prime = newv_prime;
    out.x = sorted_set(newv);
    out.color = out.chiprime(newv_prime.front(), newv_prime.front());
    return out;
  }

  static int n_max() { return std::numeric_limits<int>::max(); }

  InitialColorOutput large_branch(const Graph& g, const PairColoring& chi, const std::vector<View>& views,
                                  std::vector<int64_t>& refined) {
    const int n = g.n();
    VertexColoring diag = diagonal_coloring(chi);
    std::vector<int> diag_raw(n);
    for (int v = 0; v < n; ++v) diag_raw[v] = chi(v, v);
    // Smallest class, ties by color.
    std::map<int, VertexSet> classes;
    for (int v = 0; v < n; ++v) classes[diag_raw[v]].push_back(v);
    int c = -1;
    size_t best = SIZE_MAX;
    for (auto& [col, cls] : classes)
      if (cls.size() < best) {
        best = cls.size();
        c = col;
      }
    const VertexSet& vc = classes[c];
    const View* ce = nullptr;
    for (auto& v : views)
      if (v.vertices == vc) {
        ce = &v;
        break;
      }
    if (!ce)
      for (auto& v : views)
        if (is_subset(vc, v.vertices)) {
          ce = &v;
          break;
        }
    if (!ce) throw InvariantError("no edge color covers the smallest class");

    if (ce->comps.size() == 1) {
      if (t_ < n)
        for (int v : vc)
          if (!is_subset(vc, closure_of(g, chi, v))) return minor("closure of a connected edge color misses its class");
      return accept(g, chi, c);
    }

    const auto& comps = ce->comps;
    const int l = static_cast<int>(comps.size());
    std::vector<VertexSet> avc(l), dset(l);
    for (int i = 0; i < l; ++i) {
      avc[i] = set_intersection(comps[i], vc);
      dset[i] = closure_of(g, chi, avc[i].front());
      if (!is_subset(avc[i], dset[i])) return minor("component closure misses its own class part");
    }
    auto refine_on_vc = [&](auto key_of) {
      std::vector<std::vector<int64_t>> keys(n);
      for (int v = 0; v < n; ++v) keys[v] = {diag_raw[v], 0};
      for (int i = 0; i < l; ++i)
        for (int v : avc[i]) {
          keys[v] = {diag_raw[v], 1};
          for (int64_t x : key_of(i)) keys[v].push_back(x);
        }
      auto r = rank_keys(keys);
      refined.assign(r.begin(), r.end());
    };
    // Class counts of the D_i.
    std::vector<std::vector<int64_t>> counts(l);
    for (int i = 0; i < l; ++i) {
      std::vector<int64_t> cnt(diag.num_colors, 0);
      for (int v : dset[i]) ++cnt[diag[v]];
      counts[i] = cnt;
    }
    for (int i = 1; i < l; ++i)
      if (counts[i] != counts[0]) {
        refine_on_vc([&](int j) { return counts[j]; });
        return {};
      }
    // R and the cover property.
    std::vector<std::vector<char>> rel(l, std::vector<char>(l, 0));
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) {
        rel[i][j] = is_subset(avc[j], dset[i]);
        if (!rel[i][j] && !set_intersection(comps[j], dset[i]).empty())
          return minor("closure meets a component without covering its class part");
      }
    bool symmetric = true;
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j)
        if (rel[i][j] != rel[j][i]) symmetric = false;
    if (!symmetric) {
      refine_on_vc([&](int i) {
        int64_t out = 0, in = 0;
        for (int j = 0; j < l; ++j) {
          out += rel[i][j];
          in += rel[j][i];
        }
        return std::vector<int64_t>{out, in};
      });
      return {};
    }
    std::vector<int> cls(l, -1);
    int r = 0;
    for (int i = 0; i < l; ++i)
      if (cls[i] < 0) {
        for (int j = 0; j < l; ++j)
          if (rel[i][j]) cls[j] = r;
        ++r;
      }
    if (r == 1) return accept(g, chi, c);

    // Partition claim: parts of [l] and the graph G_P on them.
    std::vector<int> part;
    std::vector<std::vector<char>> gp;
    partition_claim(g, chi, ce->color, comps, cls, part, gp);
    const int q = static_cast<int>(gp.size());
    std::vector<int> deg(q, 0);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) deg[a] += gp[a][b];
    for (int a = 1; a < q; ++a)
      if (deg[a] != deg[0]) {
        ++nonregular;
        refine_on_vc([&](int i) { return std::vector<int64_t>{deg[part[i]]}; });
        return {};
      }
    if (deg[0] > deg_bound_) return minor("part graph degree exceeds the average-degree bound");
    // Components of G - D_i.
    std::vector<std::vector<VertexSet>> zs(l);
    std::vector<std::vector<int>> comp_of(l);
    for (int i = 0; i < l; ++i) {
      std::vector<char> mask(n, 1);
      for (int v : dset[i]) mask[v] = 0;
      zs[i] = components_masked(g, mask);
      comp_of[i].assign(n, -1);
      for (size_t j = 0; j < zs[i].size(); ++j)
        for (int v : zs[i][j]) comp_of[i][v] = static_cast<int>(j);
    }
    for (int i = 1; i < l; ++i)
      if (zs[i].size() != zs[0].size()) {
        refine_on_vc([&](int j) { return std::vector<int64_t>{static_cast<int64_t>(zs[j].size())}; });
        return {};
      }
    // Q: (D_i, component) pairs reached through G_P edges.
    std::vector<VertexSet> seps;
    std::vector<std::vector<char>> taken(l);
    for (int i = 0; i < l; ++i) taken[i].assign(zs[i].size(), 0);
    for (int i = 0; i < l; ++i) {
      int rep = i;
      for (int j = 0; j < l; ++j)
        if (rel[i][j] && rel[j][i]) {
          rep = j;
          break;
        }
      if (rep != i) continue;  // D_i equals D_rep
      for (int j = 0; j < l; ++j) {
        bool linked = false;
        for (int i2 = 0; i2 < l; ++i2)
          if (rel[i][i2] && rel[i2][i] && gp[part[i2]][part[j]]) linked = true;
        if (!linked || !set_intersection(comps[j], dset[i]).empty()) continue;
        int z = comp_of[i][comps[j].front()];
        if (taken[i][z]) continue;
        taken[i][z] = 1;
        seps.push_back(neighborhood(g, zs[i][z]));
      }
    }
    VertexSet x;
    for (auto& [col, members] : classes) {
      x.clear();
      for (auto& s : seps)
        for (int v : s)
          if (diag_raw[v] == col) x.push_back(v);
      x = sorted_set(std::move(x));
      if (!x.empty()) {
        if (x.size() == members.size()) return minor("separator set covers a whole color class");
        std::vector<std::vector<int64_t>> keys(n);
        for (int v = 0; v < n; ++v) keys[v] = {diag_raw[v], contains(x, v) ? 1 : 0};
        auto rk = rank_keys(keys);
        refined.assign(rk.begin(), rk.end());
        return {};
      }
    }
    throw InvariantError("empty separator set in the partition step");
  }

  // Computes P (part[i] for each component index) and adjacency of G_P.
  void partition_claim(const Graph& g, const PairColoring& chi, int ce, const std::vector<VertexSet>& comps,
                       const std::vector<int>& cls, std::vector<int>& part, std::vector<std::vector<char>>& gp) {
    const int l = static_cast<int>(comps.size());
    FactorGraph f = factor_by_edge_color(g, chi, ce);
    Graph fg = f.graph;
    PairColoring fc = f.pc;
    std::vector<int> fv(l);
    for (int i = 0; i < l; ++i) fv[i] = f.block_of[comps[i].front()];
    while (true) {
      const int nf = fg.n();
      std::vector<int> cls_of_fv(nf, -1);
      for (int i = 0; i < l; ++i) cls_of_fv[fv[i]] = cls[i];
      std::vector<char> is_a(nf, 0);
      for (int i = 0; i < l; ++i) is_a[fv[i]] = 1;
      int cp = -1;
      for (int cf : edge_colors(fg, fc)) {
        View v = make_view(fg, fc, cf);
        bool mixed = false;
        for (auto& comp : v.comps) {
          int seen = -1;
          for (int x : comp)
            if (is_a[x]) {
              if (seen == -1) seen = cls_of_fv[x];
              else if (seen != cls_of_fv[x]) mixed = true;
            }
        }
        if (!mixed) continue;
        Graph fcg = Graph::from_edges(nf, edges_of_color(fg, fc, cf));
        // Pairs of A-vertices from different classes, adjacent (1.1) or sharing a U-neighbour (1.2).
        for (int x = 0; x < nf; ++x) {
          if (!is_a[x]) continue;
          std::vector<int> partners;
          if (v.diag_colors == 1) {
            partners.assign(fcg.adj(x).begin(), fcg.adj(x).end());
          } else {
            for (int u : fcg.adj(x))
              if (!is_a[u])
                for (int y : fcg.adj(u))
                  if (is_a[y] && y != x) partners.push_back(y);
          }
          for (int y : partners)
            if (is_a[y] && cls_of_fv[y] != cls_of_fv[x] && (cp == -1 || fc(x, y) < cp)) cp = fc(x, y);
        }
        if (cp == -1) throw InvariantError("mixed component without a qualifying pair");
        break;
      }
      if (cp >= 0) {
        std::vector<int> fv_part(nf, -1);
        int q = 0;
        for (int x = 0; x < nf; ++x)
          if (is_a[x]) fv_part[x] = q++;
        part.assign(l, -1);
        for (int i = 0; i < l; ++i) part[i] = fv_part[fv[i]];
        gp.assign(q, std::vector<char>(q, 0));
        for (int x = 0; x < nf; ++x)
          for (int y = 0; y < nf; ++y)
            if (x != y && is_a[x] && is_a[y] && (fc(x, y) == cp || fc(y, x) == cp)) gp[fv_part[x]][fv_part[y]] = 1;
        return;
      }
      // Case 2: contract the smallest edge color covering all A-vertices.
      int next = -1;
      for (int cf : edge_colors(fg, fc)) {
        View v = make_view(fg, fc, cf);
        bool covers = true;
        for (int i = 0; i < l; ++i)
          if (!contains(v.vertices, fv[i])) covers = false;
        if (covers) {
          next = cf;
          break;
        }
      }
      if (next < 0) throw InvariantError("no edge color covers the contracted components");
      FactorGraph f2 = factor_by_edge_color(fg, fc, next);
      for (int i = 0; i < l; ++i) fv[i] = f2.block_of[fv[i]];
      fg = std::move(f2.graph);
      fc = std::move(f2.pc);
    }
  }
};

}  // namespace detail

// Isomorphism-invariant initial class for a connected vertex-colored graph.
inline InitialColorOutput find_initial_class(const Graph& g, const VertexColoring& vcol,
                                             const InitialColorParams& params) {
  if (params.h < 2) throw InputError("h must be at least 2");
  if (params.t < 0) throw InputError("t must be positive");
  if (static_cast<int>(vcol.colors.size()) != g.n()) throw InputError("vertex coloring size mismatch");
  if (g.n() == 0 || !is_connected(g)) throw InputError("find_initial_class needs a connected graph");
  detail::InitialColorFinder finder(params);
  InitialColorOutput out = finder.run(g, wl2_initial(g, normalize_colors(vcol.colors)));
  out.restarts = finder.restarts;
  out.nonregular_fallbacks = finder.nonregular;
  return out;
}

}  // namespace mfiso
