#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "graph.hpp"

namespace mfiso {

// A tree over colors 0..k-1 given by its edge list.
struct ColorTree {
  int k = 0;
  std::vector<std::pair<int, int>> edges;

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> a(k);
    for (auto [x, y] : edges) {
      a[x].push_back(y);
      a[y].push_back(x);
    }
    for (auto& l : a) std::sort(l.begin(), l.end());
    return a;
  }

  // ℓ = 2|V≤1(T)| + |V≥3(T)|.
  int ell() const {
    auto a = adjacency();
    int r = 0;
    for (auto& l : a) r += l.size() <= 1 ? 2 : (l.size() >= 3 ? 1 : 0);
    return r;
  }
};

// Member i of a family picks vertex members[i][c] of color c (or -1 for colors outside the subtree).
using TreeFamily = std::vector<std::vector<int>>;

struct ColoredInstance {
  const Graph* g;
  std::vector<int> color;  // vertex -> tree color, or -1 for vertices outside the instance
  int k;                   // number of colors
};

inline bool agrees_with(const ColoredInstance& inst, const ColorTree& t, const std::vector<int>& member) {
  if (static_cast<int>(member.size()) != t.k) return false;
  for (int c = 0; c < t.k; ++c)
    if (member[c] < 0 || inst.color[member[c]] != c) return false;
  std::set<std::pair<int, int>> tedges;
  for (auto [x, y] : t.edges) tedges.insert({std::min(x, y), std::max(x, y)});
  for (int a = 0; a < t.k; ++a)
    for (int b = a + 1; b < t.k; ++b) {
      bool adj = inst.g->has_edge(member[a], member[b]);
      if (adj != static_cast<bool>(tedges.count({a, b}))) return false;
    }
  return true;
}

inline bool family_disjoint(const TreeFamily& f) {
  std::set<int> seen;
  for (auto& m : f)
    for (int v : m)
      if (v >= 0 && !seen.insert(v).second) return false;
  return true;
}

namespace detail {

// Colors of the instance restricted to a subset of tree colors.
inline std::vector<int> members_of_color(const ColoredInstance& inst, int c) {
  std::vector<int> r;
  for (int v = 0; v < inst.g->n(); ++v)
    if (inst.color[v] == c) r.push_back(v);
  return r;
}

}  // namespace detail

struct PathAugmentResult {
  TreeFamily family;  // members indexed by path position
  int start = -1;     // the new c_1 vertex
};

namespace detail {

// Residual search over split vertices: in(u)=2u, out(u)=2u+1. Returns the node sequence of
// a shortest augmenting path from some x in xs to `target` (or to any free end vertex when target < 0).
struct PathSearch {
  const ColoredInstance& inst;
  const std::vector<int>& path;  // colors c_1..c_s
  std::vector<int> pos;          // tree color -> position on path or -1
  std::set<std::pair<int, int>> fam_edges;  // ordered (lower position vertex, higher position vertex)
  std::vector<char> used;

  PathSearch(const ColoredInstance& in, const std::vector<int>& p, const TreeFamily& fam)
      : inst(in), path(p), pos(in.k, -1), used(in.g->n(), 0) {
    for (size_t i = 0; i < p.size(); ++i) pos[p[i]] = static_cast<int>(i);
    for (auto& m : fam) {
      for (size_t i = 0; i < p.size(); ++i) used[m[i]] = 1;
      for (size_t i = 0; i + 1 < p.size(); ++i) fam_edges.insert({m[i], m[i + 1]});
    }
  }

  int position(int v) const { return inst.color[v] < 0 ? -1 : pos[inst.color[v]]; }

  std::vector<int> bfs(const std::vector<int>& xs, int target) const {
    const int n = inst.g->n();
    const int s = static_cast<int>(path.size());
    std::vector<int> prev(2 * n, -2);
    std::deque<int> q;
    for (int x : xs) {
      prev[2 * x] = -1;
      q.push_back(2 * x);
    }
    auto push = [&](int from, int to) {
      if (prev[to] != -2) return;
      prev[to] = from;
      q.push_back(to);
    };
    int found = -1;
    while (!q.empty()) {
      int node = q.front();
      q.pop_front();
      int u = node / 2;
      bool out = node & 1;
      int pu = position(u);
      if (out && pu == s - 1 && !used[u] && (target < 0 || u == target)) {
        found = node;
        break;
      }
      if (!out) {
        if (!used[u]) push(node, 2 * u + 1);
        // Backward along a family edge into the predecessor.
        if (used[u] && pu > 0)
          for (int w : inst.g->adj(u))
            if (position(w) == pu - 1 && fam_edges.count({w, u})) push(node, 2 * w + 1);
      } else {
        if (used[u]) push(node, 2 * u);
        if (pu + 1 < s)
          for (int w : inst.g->adj(u))
            if (position(w) == pu + 1 && !fam_edges.count({u, w})) push(node, 2 * w);
      }
    }
    if (found < 0) return {};
    std::vector<int> seq;
    for (int node = found; node != -1; node = prev[node]) seq.push_back(node);
    std::reverse(seq.begin(), seq.end());
    return seq;
  }

  // Applies the augmenting node sequence and decomposes the result into paths.
  TreeFamily augment(const std::vector<int>& seq, const TreeFamily& fam) const {
    auto edges = fam_edges;
    for (size_t i = 0; i + 1 < seq.size(); ++i) {
      int a = seq[i], b = seq[i + 1];
      int u = a / 2, w = b / 2;
      if (u == w) continue;
      if (a & 1) edges.insert({u, w});   // forward: out(u) -> in(w)
      else edges.erase({w, u});          // backward: in(u) -> out(w)
    }
    std::map<int, int> next;
    for (auto [u, w] : edges) {
      if (next.count(u)) throw InvariantError("augmentation produced a branching path");
      next[u] = w;
    }
    std::vector<int> starts;
    for (auto& m : fam) starts.push_back(m[0]);
    starts.push_back(seq.front() / 2);
    std::sort(starts.begin(), starts.end());
    TreeFamily out;
    for (int x : starts) {
      std::vector<int> m{x};
      while (static_cast<int>(m.size()) < static_cast<int>(path.size())) {
        auto it = next.find(m.back());
        if (it == next.end()) throw InvariantError("augmentation produced a short path");
        m.push_back(it->second);
      }
      out.push_back(m);
    }
    return out;
  }
};

}  // namespace detail

// Enlarges a family of k disjoint paths agreeing with the colored path c_1..c_s by one, starting in x.
// Family members list their vertices in path order.
inline std::optional<PathAugmentResult> augment_path_family(const ColoredInstance& inst, const std::vector<int>& path,
                                                            const TreeFamily& family, const std::vector<int>& x,
                                                            int target = -1) {
  if (path.empty()) throw InputError("empty color path");
  for (auto& m : family)
    if (m.size() != path.size()) throw InputError("family member does not match the path length");
  for (int c : path)
    if (c < 0 || c >= inst.k) throw InputError("path color out of range");
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    VertexSet a = detail::members_of_color(inst, path[i]), b = detail::members_of_color(inst, path[i + 1]);
    auto br = check_biregular(*inst.g, a, b);
    if (!br || br->first == 0) throw InputError("path block is not a non-empty biregular graph");
  }
  detail::PathSearch ps(inst, path, family);
  std::vector<int> xs;
  for (int v : x) {
    if (inst.color[v] != path[0]) throw InputError("start vertex has the wrong color");
    if (!ps.used[v]) xs.push_back(v);
  }
  auto seq = ps.bfs(xs, target);
  if (seq.empty()) return std::nullopt;
  PathAugmentResult r;
  r.family = ps.augment(seq, family);
  r.start = seq.front() / 2;
  return r;
}

namespace detail {

struct Packer {
  const ColoredInstance& inst;
  ColorTree tree;
  std::vector<std::vector<int>> tadj;
  std::vector<std::vector<int>> by_color;

  Packer(const ColoredInstance& in, const ColorTree& t) : inst(in), tree(t), tadj(t.adjacency()) {
    by_color.resize(t.k);
    for (int v = 0; v < in.g->n(); ++v)
      if (in.color[v] >= 0) by_color[in.color[v]].push_back(v);
  }

  int degree_in(const std::vector<char>& sub, int c) const {
    int d = 0;
    for (int x : tadj[c])
      if (sub[x]) ++d;
    return d;
  }

  // Path c = p_s, ..., p_1 walking away from a degree-1 color until a color of degree != 2; returned as p_1..p_s.
  std::vector<int> leaf_path(const std::vector<char>& sub, int c) const {
    std::vector<int> p{c};
    int prev = -1, cur = c;
    while (true) {
      int nxt = -1;
      for (int x : tadj[cur])
        if (sub[x] && x != prev) nxt = x;
      p.push_back(nxt);
      prev = cur;
      cur = nxt;
      if (degree_in(sub, cur) != 2) break;
    }
    std::reverse(p.begin(), p.end());
    return p;
  }

  // Components of the subtree minus c, each together with c.
  std::vector<std::vector<char>> branches(const std::vector<char>& sub, int c) const {
    std::vector<std::vector<char>> out;
    for (int start : tadj[c]) {
      if (!sub[start]) continue;
      std::vector<char> b(tree.k, 0);
      b[c] = 1;
      std::vector<int> st{start};
      b[start] = 1;
      while (!st.empty()) {
        int x = st.back();
        st.pop_back();
        for (int y : tadj[x])
          if (sub[y] && !b[y]) {
            b[y] = 1;
            st.push_back(y);
          }
      }
      out.push_back(b);
    }
    return out;
  }

  static TreeFamily restrict(const TreeFamily& f, const std::vector<char>& sub) {
    TreeFamily r = f;
    for (auto& m : r)
      for (size_t c = 0; c < m.size(); ++c)
        if (!sub[c]) m[c] = -1;
    return r;
  }

  std::vector<char> used_vertices(const TreeFamily& f) const {
    std::vector<char> u(inst.g->n(), 0);
    for (auto& m : f)
      for (int v : m)
        if (v >= 0) u[v] = 1;
    return u;
  }

  ColoredInstance path_instance(const std::vector<int>& path) const {
    ColoredInstance pi{inst.g, std::vector<int>(inst.g->n(), -1), inst.k};
    for (int c : path)
      for (int v : by_color[c]) pi.color[v] = c;
    return pi;
  }

  static TreeFamily as_paths(const TreeFamily& f, const std::vector<int>& path) {
    TreeFamily r;
    for (auto& m : f) {
      std::vector<int> p;
      for (int c : path) p.push_back(m[c]);
      r.push_back(p);
    }
    return r;
  }

  // Extension set W_c of the family within the subtree.
  VertexSet ext_set(const std::vector<char>& sub, const TreeFamily& f, int c) const {
    int size = 0;
    for (char x : sub) size += x;
    if (size == 1) {
      auto used = used_vertices(f);
      VertexSet w;
      for (int v : by_color[c])
        if (!used[v]) w.push_back(v);
      return w;
    }
    int deg = degree_in(sub, c);
    if (deg == 1) {
      auto path = leaf_path(sub, c);
      std::vector<char> rest = sub;
      for (size_t i = 1; i < path.size(); ++i) rest[path[i]] = 0;
      VertexSet xs = ext_set(rest, restrict(f, rest), path[0]);
      if (xs.empty()) return {};
      auto pi = path_instance(path);
      detail::PathSearch ps(pi, path, as_paths(f, path));
      VertexSet w;
      // Every free end vertex reachable by an admissible path.
      for (int v : by_color[c]) {
        if (ps.used[v]) continue;
        if (!ps.bfs(xs, v).empty()) w.push_back(v);
      }
      return w;
    }
    VertexSet w;
    bool first = true;
    for (auto& b : branches(sub, c)) {
      VertexSet wi = ext_set(b, restrict(f, b), c);
      w = first ? wi : set_intersection(w, wi);
      first = false;
      if (w.empty()) break;
    }
    return w;
  }

  // A family of |f|+1 disjoint agreeing trees whose c-vertices are those of f plus v.
  TreeFamily realize(const std::vector<char>& sub, const TreeFamily& f, int c, int v) const {
    int size = 0;
    for (char x : sub) size += x;
    if (size == 1) {
      TreeFamily r = f;
      std::vector<int> m(tree.k, -1);
      m[c] = v;
      r.push_back(m);
      return r;
    }
    int deg = degree_in(sub, c);
    if (deg == 1) {
      auto path = leaf_path(sub, c);
      std::vector<char> rest = sub;
      for (size_t i = 1; i < path.size(); ++i) rest[path[i]] = 0;
      VertexSet xs = ext_set(rest, restrict(f, rest), path[0]);
      auto pi = path_instance(path);
      auto aug = augment_path_family(pi, path, as_paths(f, path), xs, v);
      if (!aug) throw InvariantError("extension vertex is not reachable");
      TreeFamily base = realize(rest, restrict(f, rest), path[0], aug->start);
      std::map<int, const std::vector<int>*> by_start;
      for (auto& p : aug->family) by_start[p[0]] = &p;
      for (auto& m : base) {
        auto it = by_start.find(m[path[0]]);
        if (it == by_start.end()) throw InvariantError("path family does not match the subtree family");
        for (size_t i = 1; i < path.size(); ++i) m[path[i]] = (*it->second)[i];
      }
      return base;
    }
    TreeFamily out;
    bool first = true;
    for (auto& b : branches(sub, c)) {
      TreeFamily part = realize(b, restrict(f, b), c, v);
      if (first) {
        out = part;
        first = false;
        continue;
      }
      std::map<int, const std::vector<int>*> by_c;
      for (auto& m : part) by_c[m[c]] = &m;
      for (auto& m : out) {
        auto it = by_c.find(m[c]);
        if (it == by_c.end()) throw InvariantError("branch families do not match");
        for (int x = 0; x < tree.k; ++x)
          if (b[x] && x != c) m[x] = (*it->second)[x];
      }
    }
    return out;
  }
};

}  // namespace detail

struct AgreeingTreeFamily {
  ColorTree tree;
  TreeFamily family;
};

// Greedily grows a family of disjoint trees agreeing with T through extension sets.
inline AgreeingTreeFamily pack_agreeing_trees(const ColoredInstance& inst, const ColorTree& t) {
  if (t.k != inst.k) throw InputError("tree and instance disagree on the number of colors");
  if (static_cast<int>(t.edges.size()) != t.k - 1) throw InputError("color graph is not a tree");
  detail::Packer pk(inst, t);
  for (int c = 0; c < t.k; ++c)
    if (pk.by_color[c].empty()) throw InputError("empty color class");
  for (auto [a, b] : t.edges) {
    auto br = check_biregular(*inst.g, pk.by_color[a], pk.by_color[b]);
    if (!br || br->first == 0) throw InputError("tree-edge block is not a non-empty biregular graph");
  }
  std::vector<char> all(t.k, 1);
  if (!pk.branches(all, 0).empty() || t.k == 1) {
    std::vector<char> seen(t.k, 0);
    auto adj = t.adjacency();
    std::vector<int> st{0};
    seen[0] = 1;
    while (!st.empty()) {
      int x = st.back();
      st.pop_back();
      for (int y : adj[x])
        if (!seen[y]) {
          seen[y] = 1;
          st.push_back(y);
        }
    }
    for (char s : seen)
      if (!s) throw InputError("color graph is not connected");
  }
  AgreeingTreeFamily res{t, {}};
  while (true) {
    bool grown = false;
    for (int c = 0; c < t.k && !grown; ++c) {
      VertexSet w = pk.ext_set(all, res.family, c);
      if (w.empty()) continue;
      res.family = pk.realize(all, res.family, c, w.front());
      grown = true;
    }
    if (!grown) break;
    for (auto& m : res.family)
      if (!agrees_with(inst, t, m)) throw InvariantError("packed tree does not agree with T");
    if (!family_disjoint(res.family)) throw InvariantError("packed trees intersect");
  }
  return res;
}

struct TreeSubgraph {
  VertexSet vertices;
  std::vector<std::pair<int, int>> edges;
};

// BFS tree over the terminals followed by iterative removal of non-terminal leaves.
inline TreeSubgraph steiner_tree(const Graph& h, VertexSet terminals) {
  terminals = sorted_set(std::move(terminals));
  check_vertex_set(h, terminals);
  if (!is_connected(h)) throw InputError("steiner_tree needs a connected graph");
  TreeSubgraph t;
  if (terminals.empty()) return t;
  const int n = h.n();
  std::vector<int> parent(n, -2);
  std::deque<int> q{terminals.front()};
  parent[terminals.front()] = -1;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int w : h.adj(u))
      if (parent[w] == -2) {
        parent[w] = u;
        q.push_back(w);
      }
  }
  std::vector<char> in(n, 0);
  for (int x : terminals)
    for (int v = x; v >= 0 && !in[v]; v = parent[v]) in[v] = 1;
  std::vector<int> deg(n, 0);
  for (int v = 0; v < n; ++v)
    if (in[v] && parent[v] >= 0) {
      ++deg[v];
      ++deg[parent[v]];
    }
  std::vector<int> leaves;
  for (int v = 0; v < n; ++v)
    if (in[v] && deg[v] <= 1 && !contains(terminals, v)) leaves.push_back(v);
  while (!leaves.empty()) {
    int v = leaves.back();
    leaves.pop_back();
    if (!in[v]) continue;
    in[v] = 0;
    int nb = -1;
    if (parent[v] >= 0 && in[parent[v]]) nb = parent[v];
    for (int w : h.adj(v))
      if (in[w] && parent[w] == v) nb = w;
    if (nb >= 0 && --deg[nb] <= 1 && !contains(terminals, nb)) leaves.push_back(nb);
  }
  for (int v = 0; v < n; ++v)
    if (in[v]) {
      t.vertices.push_back(v);
      if (parent[v] >= 0 && in[parent[v]]) t.edges.emplace_back(std::min(v, parent[v]), std::max(v, parent[v]));
    }
  std::sort(t.edges.begin(), t.edges.end());
  return t;
}

struct TopologicalWitness {
  std::vector<int> branch;
  std::vector<std::vector<int>> paths;  // one per pair i<j, in lexicographic pair order
};

// Independent check that the witness is a subdivision of K_h in g.
inline bool validate_witness(const Graph& g, const TopologicalWitness& w) {
  const int h = static_cast<int>(w.branch.size());
  if (static_cast<int>(w.paths.size()) != h * (h - 1) / 2) return false;
  std::set<int> branch(w.branch.begin(), w.branch.end());
  if (static_cast<int>(branch.size()) != h) return false;
  for (int b : w.branch)
    if (b < 0 || b >= g.n()) return false;
  std::set<int> internal;
  size_t p = 0;
  for (int i = 0; i < h; ++i)
    for (int j = i + 1; j < h; ++j, ++p) {
      const auto& path = w.paths[p];
      if (path.size() < 2 || path.front() != w.branch[i] || path.back() != w.branch[j]) return false;
      for (size_t q = 0; q + 1 < path.size(); ++q)
        if (path[q] < 0 || path[q] >= g.n() || path[q + 1] < 0 || path[q + 1] >= g.n() ||
            !g.has_edge(path[q], path[q + 1]))
          return false;
      for (size_t q = 1; q + 1 < path.size(); ++q) {
        if (branch.count(path[q])) return false;
        if (!internal.insert(path[q]).second) return false;
      }
    }
  return true;
}

struct WitnessResult {
  std::optional<TopologicalWitness> witness;
  VertexSet small_class;  // a class of V2 below 3h^3 when no witness is produced
};

// Given singleton classes V1 = N(V2) and a stable coloring whose classes inside V2 induce a connected
// class graph, builds a K_h subdivision with branch vertices in V1 when all V2 classes are large.
inline WitnessResult extract_topological_clique(const Graph& g, const std::vector<int>& chi, VertexSet v1,
                                                VertexSet v2, int h) {
  v1 = sorted_set(std::move(v1));
  v2 = sorted_set(std::move(v2));
  check_vertex_set(g, v1);
  check_vertex_set(g, v2);
  if (h < 1) throw InputError("h must be positive");
  if (static_cast<int>(v1.size()) < h) throw InputError("V1 has fewer than h vertices");
  if (!set_intersection(v1, v2).empty()) throw InputError("V1 and V2 intersect");
  if (neighborhood(g, v2) != v1) throw InputError("N(V2) differs from V1");
  std::map<int, VertexSet> classes;
  for (int v = 0; v < g.n(); ++v) classes[chi[v]].push_back(v);
  for (int v : v1)
    if (classes[chi[v]].size() != 1) throw InputError("V1 vertex is not a singleton class");
  std::vector<int> colors;
  for (int v : v2) {
    if (!is_subset(classes[chi[v]], v2)) throw InputError("V2 is not a union of color classes");
    colors.push_back(chi[v]);
  }
  colors.erase(std::unique(colors.begin(), colors.end()), colors.end());
  std::sort(colors.begin(), colors.end());
  colors.erase(std::unique(colors.begin(), colors.end()), colors.end());
  // Class graph G[[chi, V2]].
  std::map<int, int> cidx;
  for (size_t i = 0; i < colors.size(); ++i) cidx[colors[i]] = static_cast<int>(i);
  std::vector<std::pair<int, int>> ce;
  for (int v : v2)
    for (int w : g.adj(v))
      if (contains(v2, w) && cidx[chi[v]] != cidx[chi[w]]) ce.emplace_back(cidx[chi[v]], cidx[chi[w]]);
  Graph cg = Graph::from_edges(static_cast<int>(colors.size()), ce);
  if (!is_connected(cg)) throw InputError("class graph of V2 is not connected");

  WitnessResult res;
  const long big = 3L * h * h * h;
  for (int c : colors)
    if (static_cast<long>(classes[c].size()) < big) {
      res.small_class = classes[c];
      return res;
    }

  std::vector<int> bv(v1.begin(), v1.begin() + h);
  std::vector<int> term;
  for (int b : bv) {
    int w = -1;
    for (int x : g.adj(b))
      if (contains(v2, x)) {
        w = x;
        break;
      }
    if (w < 0) throw InputError("branch vertex without a neighbour in V2");
    term.push_back(cidx[chi[w]]);
  }
  TreeSubgraph st = steiner_tree(cg, term);
  // Re-index the Steiner tree colors densely and pack trees agreeing with it.
  std::map<int, int> tpos;
  for (size_t i = 0; i < st.vertices.size(); ++i) tpos[st.vertices[i]] = static_cast<int>(i);
  ColorTree t{static_cast<int>(st.vertices.size()), {}};
  for (auto [a, b] : st.edges) t.edges.emplace_back(tpos[a], tpos[b]);
  ColoredInstance inst{&g, std::vector<int>(g.n(), -1), t.k};
  for (int v : v2) {
    auto it = tpos.find(cidx[chi[v]]);
    if (it != tpos.end()) inst.color[v] = it->second;
  }
  // Restrict to the subgraph spanned by the tree's classes, where every tree-edge block is biregular.
  AgreeingTreeFamily fam = pack_agreeing_trees(inst, t);
  TopologicalWitness w;
  w.branch = bv;
  auto tadj = t.adjacency();
  size_t next_tree = 0;
  for (int i = 0; i < h; ++i)
    for (int j = i + 1; j < h; ++j) {
      if (g.has_edge(bv[i], bv[j])) {
        w.paths.push_back({bv[i], bv[j]});
        continue;
      }
      if (next_tree >= fam.family.size()) throw InvariantError("not enough disjoint trees for a K_h subdivision");
      const auto& m = fam.family[next_tree++];
      int ci = tpos[term[i]], cj = tpos[term[j]];
      // Tree path between colors ci and cj.
      std::vector<int> prev(t.k, -2);
      std::deque<int> q{ci};
      prev[ci] = -1;
      while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (int y : tadj[x])
          if (prev[y] == -2) {
            prev[y] = x;
            q.push_back(y);
          }
      }
      std::vector<int> cpath;
      for (int x = cj; x != -1; x = prev[x]) cpath.push_back(x);
      std::reverse(cpath.begin(), cpath.end());
      std::vector<int> path{bv[i]};
      for (int x : cpath) path.push_back(m[x]);
      path.push_back(bv[j]);
      w.paths.push_back(path);
    }
  if (!validate_witness(g, w)) throw InvariantError("constructed witness does not validate");
  res.witness = w;
  return res;
}

}  // namespace mfiso
