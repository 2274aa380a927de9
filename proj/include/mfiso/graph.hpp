#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mfiso {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

using VertexSet = std::vector<int>;  // always sorted, no duplicates

// Simple undirected graph on vertices 0..n-1 with sorted adjacency lists.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : adj_(n) {}

  // Duplicate edges are merged; self-loops are rejected.
  static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    Graph g(n);
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n) throw InputError("edge endpoint out of range");
      if (u == v) throw InputError("self-loop");
      g.adj_[u].push_back(v);
      g.adj_[v].push_back(u);
    }
    for (auto& a : g.adj_) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    g.build_offsets();
    return g;
  }

  int n() const { return static_cast<int>(adj_.size()); }
  int m() const { return offsets_.empty() ? 0 : offsets_.back() / 2; }
  const std::vector<int>& adj(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }

  bool has_edge(int u, int v) const {
    const auto& a = adj_[u];
    return std::binary_search(a.begin(), a.end(), v);
  }

  // Arcs are indexed in CSR order: arc (v, adj(v)[i]) has index arc_offset(v) + i.
  int num_arcs() const { return offsets_.empty() ? 0 : offsets_.back(); }
  int arc_offset(int v) const { return offsets_[v]; }
  int arc_index(int u, int v) const {
    const auto& a = adj_[u];
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it == a.end() || *it != v) return -1;
    return offsets_[u] + static_cast<int>(it - a.begin());
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < n(); ++u)
      for (int v : adj_[u])
        if (u < v) e.emplace_back(u, v);
    return e;
  }

  bool operator==(const Graph& o) const { return adj_ == o.adj_; }

 private:
  void build_offsets() {
    offsets_.assign(adj_.size() + 1, 0);
    for (size_t v = 0; v < adj_.size(); ++v) offsets_[v + 1] = offsets_[v] + static_cast<int>(adj_[v].size());
  }

  std::vector<std::vector<int>> adj_;
  std::vector<int> offsets_{0};
};

// Dense canonical color ids 0..num_colors-1.
struct VertexColoring {
  std::vector<int> colors;
  int num_colors = 0;
  int operator[](int v) const { return colors[v]; }
  size_t size() const { return colors.size(); }
  bool operator==(const VertexColoring&) const = default;
};

// One color per arc, indexed as in Graph::arc_index.
struct ArcColoring {
  std::vector<int> colors;
  int num_colors = 0;
};

// Row-major n x n matrix of colors.
struct PairColoring {
  int n = 0;
  std::vector<int> colors;
  int num_colors = 0;
  int operator()(int u, int v) const { return colors[static_cast<size_t>(u) * n + v]; }
  int& at(int u, int v) { return colors[static_cast<size_t>(u) * n + v]; }
  bool operator==(const PairColoring&) const = default;
};

using Partition = std::vector<VertexSet>;

// Rename arbitrary integer colors to dense ids ordered by value.
inline VertexColoring normalize_colors(const std::vector<int64_t>& raw) {
  std::vector<int64_t> vals(raw);
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  VertexColoring c;
  c.colors.resize(raw.size());
  for (size_t i = 0; i < raw.size(); ++i)
    c.colors[i] = static_cast<int>(std::lower_bound(vals.begin(), vals.end(), raw[i]) - vals.begin());
  c.num_colors = static_cast<int>(vals.size());
  return c;
}

inline VertexColoring normalize_colors(const std::vector<int>& raw) {
  return normalize_colors(std::vector<int64_t>(raw.begin(), raw.end()));
}

inline VertexColoring uniform_coloring(int n) {
  return VertexColoring{std::vector<int>(n, 0), n > 0 ? 1 : 0};
}

inline Partition color_classes(const std::vector<int>& colors, int num_colors) {
  Partition p(num_colors);
  for (size_t v = 0; v < colors.size(); ++v) p[colors[v]].push_back(static_cast<int>(v));
  return p;
}

inline Partition color_classes(const VertexColoring& c) { return color_classes(c.colors, c.num_colors); }

inline void check_vertex_set(const Graph& g, const VertexSet& a) {
  for (int v : a)
    if (v < 0 || v >= g.n()) throw InputError("vertex id out of range: " + std::to_string(v));
}

inline VertexSet sorted_set(VertexSet a) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

inline bool contains(const VertexSet& a, int v) { return std::binary_search(a.begin(), a.end(), v); }

inline bool is_subset(const VertexSet& a, const VertexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet r;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

inline VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
  VertexSet r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

inline VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
  VertexSet r;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

struct Subgraph {
  Graph graph;
  std::vector<int> to_parent;  // new id -> original id
};

inline Subgraph induced_subgraph(const Graph& g, VertexSet a) {
  a = sorted_set(std::move(a));
  check_vertex_set(g, a);
  std::vector<int> local(g.n(), -1);
  for (size_t i = 0; i < a.size(); ++i) local[a[i]] = static_cast<int>(i);
  std::vector<std::pair<int, int>> e;
  for (int u : a)
    for (int v : g.adj(u))
      if (u < v && local[v] >= 0) e.emplace_back(local[u], local[v]);
  return {Graph::from_edges(static_cast<int>(a.size()), e), a};
}

// G[A,B] on vertex set A ∪ B (reindexed in sorted order).
inline Subgraph bipartite_block(const Graph& g, VertexSet a, VertexSet b) {
  a = sorted_set(std::move(a));
  b = sorted_set(std::move(b));
  check_vertex_set(g, a);
  check_vertex_set(g, b);
  VertexSet all = set_union(a, b);
  std::vector<int> local(g.n(), -1);
  for (size_t i = 0; i < all.size(); ++i) local[all[i]] = static_cast<int>(i);
  std::vector<std::pair<int, int>> e;
  for (int u : a)
    for (int v : g.adj(u))
      if (contains(b, v)) e.emplace_back(local[u], local[v]);
  return {Graph::from_edges(static_cast<int>(all.size()), e), all};
}

// Components of g restricted to the vertices with mask[v] true.
inline std::vector<VertexSet> components_masked(const Graph& g, const std::vector<char>& mask) {
  std::vector<VertexSet> comps;
  std::vector<char> seen(g.n(), 0);
  std::vector<int> stack;
  for (int s = 0; s < g.n(); ++s) {
    if (!mask[s] || seen[s]) continue;
    VertexSet c;
    stack.push_back(s);
    seen[s] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      c.push_back(u);
      for (int v : g.adj(u))
        if (mask[v] && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
    std::sort(c.begin(), c.end());
    comps.push_back(std::move(c));
  }
  return comps;
}

inline std::vector<VertexSet> connected_components(const Graph& g) {
  return components_masked(g, std::vector<char>(g.n(), 1));
}

inline bool is_connected(const Graph& g) { return g.n() <= 1 || connected_components(g).size() == 1; }

inline bool is_connected_subset(const Graph& g, const VertexSet& a) {
  if (a.empty()) return true;
  std::vector<char> mask(g.n(), 0);
  for (int v : a) mask[v] = 1;
  return components_masked(g, mask).size() == 1;
}

struct Contraction {
  Graph graph;
  std::vector<int> block_of;  // original vertex -> block index
};

// G/B for a partition B of V(g) into connected blocks; block i becomes vertex i.
inline Contraction contract_partition(const Graph& g, const std::vector<VertexSet>& blocks) {
  std::vector<int> block_of(g.n(), -1);
  for (size_t i = 0; i < blocks.size(); ++i) {
    check_vertex_set(g, blocks[i]);
    if (blocks[i].empty()) throw InputError("empty block");
    for (int v : blocks[i]) {
      if (block_of[v] != -1) throw InputError("blocks overlap");
      block_of[v] = static_cast<int>(i);
    }
    if (!is_connected_subset(g, sorted_set(blocks[i]))) throw InputError("contraction block is not connected");
  }
  for (int v = 0; v < g.n(); ++v)
    if (block_of[v] == -1) throw InputError("blocks do not cover the vertex set");
  std::vector<std::pair<int, int>> e;
  for (int u = 0; u < g.n(); ++u)
    for (int v : g.adj(u))
      if (block_of[u] < block_of[v]) e.emplace_back(block_of[u], block_of[v]);
  return {Graph::from_edges(static_cast<int>(blocks.size()), e), block_of};
}

inline VertexSet neighborhood(const Graph& g, VertexSet x) {
  x = sorted_set(std::move(x));
  check_vertex_set(g, x);
  VertexSet r;
  for (int v : x)
    for (int w : g.adj(v))
      if (!contains(x, w)) r.push_back(w);
  return sorted_set(std::move(r));
}

// (d1, d2) if every vertex of a has d1 neighbours in b and every vertex of b has d2 in a.
inline std::optional<std::pair<int, int>> check_biregular(const Graph& g, VertexSet a, VertexSet b) {
  a = sorted_set(std::move(a));
  b = sorted_set(std::move(b));
  auto count_into = [&](int v, const VertexSet& s) {
    int c = 0;
    for (int w : g.adj(v))
      if (contains(s, w)) ++c;
    return c;
  };
  int d1 = -1, d2 = -1;
  for (int v : a) {
    int c = count_into(v, b);
    if (d1 == -1) d1 = c;
    else if (c != d1) return std::nullopt;
  }
  for (int v : b) {
    int c = count_into(v, a);
    if (d2 == -1) d2 = c;
    else if (c != d2) return std::nullopt;
  }
  return std::make_pair(std::max(d1, 0), std::max(d2, 0));
}

// Image graph under the vertex map v -> perm[v].
inline Graph relabel(const Graph& g, const std::vector<int>& perm) {
  std::vector<std::pair<int, int>> e;
  for (auto [u, v] : g.edges()) e.emplace_back(perm[u], perm[v]);
  return Graph::from_edges(g.n(), e);
}

inline std::vector<int> permute_colors(const std::vector<int>& colors, const std::vector<int>& perm) {
  std::vector<int> r(colors.size());
  for (size_t v = 0; v < colors.size(); ++v) r[perm[v]] = colors[v];
  return r;
}

inline bool is_isomorphism(const Graph& g1, const Graph& g2, const std::vector<int>& phi) {
  if (g1.n() != g2.n() || g1.m() != g2.m() || static_cast<int>(phi.size()) != g1.n()) return false;
  std::vector<char> hit(g2.n(), 0);
  for (int x : phi) {
    if (x < 0 || x >= g2.n() || hit[x]) return false;
    hit[x] = 1;
  }
  for (auto [u, v] : g1.edges())
    if (!g2.has_edge(phi[u], phi[v])) return false;
  return true;
}

inline bool is_colored_isomorphism(const Graph& g1, const std::vector<int>& c1, const Graph& g2,
                                   const std::vector<int>& c2, const std::vector<int>& phi) {
  if (!is_isomorphism(g1, g2, phi)) return false;
  for (int v = 0; v < g1.n(); ++v)
    if (c1[v] != c2[phi[v]]) return false;
  return true;
}

}  // namespace mfiso
