#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "refinement.hpp"
#include "witness.hpp"

namespace mfiso {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

inline Graph path_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edges(n, e);
}

inline Graph cycle_graph(int n) {
  if (n < 3) throw InputError("cycle needs at least 3 vertices");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, e);
}

inline Graph complete_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

// K_{1,m} with center 0.
inline Graph star_graph(int m) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= m; ++i) e.emplace_back(0, i);
  return Graph::from_edges(m + 1, e);
}

inline Graph grid_graph(int rows, int cols) {
  std::vector<std::pair<int, int>> e;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      int v = r * cols + c;
      if (c + 1 < cols) e.emplace_back(v, v + 1);
      if (r + 1 < rows) e.emplace_back(v, v + cols);
    }
  return Graph::from_edges(rows * cols, e);
}

// Hub 0 joined to the cycle 1..n-1.
inline Graph wheel_graph(int n) {
  if (n < 4) throw InputError("wheel needs at least 4 vertices");
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i < n; ++i) {
    e.emplace_back(0, i);
    e.emplace_back(i, i + 1 < n ? i + 1 : 1);
  }
  return Graph::from_edges(n, e);
}

inline Graph petersen_graph() {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);
    e.emplace_back(i, i + 5);
    e.emplace_back(5 + i, 5 + (i + 2) % 5);
  }
  return Graph::from_edges(10, e);
}

inline Graph random_tree(int n, Rng& rng) {
  std::vector<std::pair<int, int>> e;
  for (int v = 1; v < n; ++v) e.emplace_back(v, uniform_int(rng, 0, v - 1));
  return relabel(Graph::from_edges(n, e), random_permutation(n, rng));
}

// Random triangulation: stacked insertion into random faces followed by random edge flips.
inline Graph random_maximal_planar(int n, Rng& rng) {
  if (n < 3) throw InputError("maximal planar graph needs at least 3 vertices");
  using Tri = std::array<int, 3>;
  std::vector<Tri> faces{{0, 1, 2}, {0, 1, 2}};
  for (int v = 3; v < n; ++v) {
    int f = uniform_int(rng, 0, static_cast<int>(faces.size()) - 1);
    Tri t = faces[f];
    faces[f] = {t[0], t[1], v};
    faces.push_back({t[1], t[2], v});
    faces.push_back({t[0], t[2], v});
  }
  auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  if (n >= 5) {
    const int flips = 2 * n;
    for (int it = 0; it < flips; ++it) {
      std::map<std::pair<int, int>, std::vector<int>> by_edge;
      for (size_t f = 0; f < faces.size(); ++f)
        for (int i = 0; i < 3; ++i) by_edge[key(faces[f][i], faces[f][(i + 1) % 3])].push_back(static_cast<int>(f));
      auto it_e = by_edge.begin();
      std::advance(it_e, uniform_int(rng, 0, static_cast<int>(by_edge.size()) - 1));
      auto [u, v] = it_e->first;
      int f1 = it_e->second[0], f2 = it_e->second[1];
      auto other = [&](const Tri& t) {
        for (int x : t)
          if (x != u && x != v) return x;
        return -1;
      };
      int w = other(faces[f1]), x = other(faces[f2]);
      if (w == x || by_edge.count(key(w, x))) continue;
      faces[f1] = {w, x, u};
      faces[f2] = {w, x, v};
    }
  }
  std::vector<std::pair<int, int>> e;
  for (auto& t : faces)
    for (int i = 0; i < 3; ++i) e.emplace_back(t[i], t[(i + 1) % 3]);
  return relabel(Graph::from_edges(n, e), random_permutation(n, rng));
}

// Deletes each edge with probability 1 - keep unless that disconnects the graph.
inline Graph thin_edges(const Graph& g, double keep, Rng& rng) {
  auto edges = g.edges();
  std::shuffle(edges.begin(), edges.end(), rng);
  std::set<std::pair<int, int>> cur(edges.begin(), edges.end());
  std::bernoulli_distribution drop(1.0 - keep);
  for (auto e : edges) {
    if (!drop(rng)) continue;
    cur.erase(e);
    Graph h = Graph::from_edges(g.n(), {cur.begin(), cur.end()});
    if (!is_connected(h)) cur.insert(e);
  }
  return Graph::from_edges(g.n(), {cur.begin(), cur.end()});
}

inline Graph random_planar(int n, Rng& rng, double keep = 0.6) {
  if (n < 3) return path_graph(n);
  return thin_edges(random_maximal_planar(n, rng), keep, rng);
}

// Random k-tree thinned to a connected partial k-tree (treewidth <= k, hence K_{k+2}-minor-free).
inline Graph random_partial_ktree(int n, int k, Rng& rng, double keep = 0.7) {
  if (k < 1) throw InputError("k must be positive");
  if (n <= k + 1) return complete_graph(n);
  std::vector<std::pair<int, int>> e;
  std::vector<std::vector<int>> cliques;
  std::vector<int> first(k + 1);
  std::iota(first.begin(), first.end(), 0);
  for (int i = 0; i <= k; ++i)
    for (int j = i + 1; j <= k; ++j) e.emplace_back(i, j);
  cliques.push_back(first);
  for (int v = k + 1; v < n; ++v) {
    auto base = cliques[uniform_int(rng, 0, static_cast<int>(cliques.size()) - 1)];
    int drop = uniform_int(rng, 0, k);
    std::vector<int> nc;
    for (int i = 0; i <= k; ++i)
      if (i != drop) {
        e.emplace_back(base[i], v);
        nc.push_back(base[i]);
      }
    nc.push_back(v);
    cliques.push_back(nc);
  }
  Graph g = Graph::from_edges(n, e);
  return relabel(thin_edges(g, keep, rng), random_permutation(n, rng));
}

// G(n, p) plus a random spanning tree, so the result is connected.
inline Graph random_connected_graph(int n, double p, Rng& rng) {
  std::vector<std::pair<int, int>> e = random_tree(n, rng).edges();
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) e.emplace_back(i, j);
  return Graph::from_edges(n, e);
}

// `petals` copies of a path on `len` vertices hung from one or two core vertices (planar).
// With one core both path ends attach to it; with two cores the ends attach to different cores.
inline Graph planar_sunflower(int petals, int len, int cores) {
  if (cores < 1 || cores > 2 || len < 1 || petals < 1) throw InputError("bad sunflower parameters");
  std::vector<std::pair<int, int>> e;
  if (cores == 2) e.emplace_back(0, 1);
  int n = cores;
  for (int p = 0; p < petals; ++p) {
    int s = n;
    for (int i = 0; i + 1 < len; ++i) e.emplace_back(s + i, s + i + 1);
    e.emplace_back(0, s);
    if (len > 1 || cores == 2) e.emplace_back(cores - 1, s + len - 1);
    n += len;
  }
  return Graph::from_edges(n, e);
}

// A colored-tree stack: classes of size m or 2m, tree-edge blocks (d, d) or (d, 2d) biregular.
struct TreeStack {
  Graph g;
  ColorTree tree;
  std::vector<int> color;
  int m = 0;  // smallest class size
};

inline TreeStack random_tree_stack(int k, int m, int d, Rng& rng) {
  if (k < 1 || m < 1 || d < 1 || d > m) throw InputError("bad tree-stack parameters");
  TreeStack ts;
  ts.tree.k = k;
  for (int c = 1; c < k; ++c) ts.tree.edges.emplace_back(uniform_int(rng, 0, c - 1), c);
  std::vector<int> size(k), start(k);
  for (int c = 0; c < k; ++c) size[c] = uniform_int(rng, 0, 1) ? 2 * m : m;
  if (std::find(size.begin(), size.end(), m) == size.end()) size[0] = m;
  int n = 0;
  for (int c = 0; c < k; ++c) {
    start[c] = n;
    n += size[c];
  }
  std::vector<std::pair<int, int>> e;
  for (auto [a, b] : ts.tree.edges) {
    int big = size[a] >= size[b] ? a : b;
    int small = big == a ? b : a;
    auto perm = random_permutation(size[big], rng);
    for (int i = 0; i < size[big]; ++i)
      for (int j = 0; j < d; ++j) e.emplace_back(start[big] + i, start[small] + (perm[i] + j) % size[small]);
  }
  ts.color.resize(n);
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < size[c]; ++i) ts.color[start[c] + i] = c;
  ts.g = Graph::from_edges(n, e);
  ts.m = m;
  return ts;
}

// Instance for topological clique extraction: V1 = {0..h-1} singletons, V2 = classes of size `size`
// along a random class tree joined by d-regular blocks, branch vertex i fully adjacent to one class.
struct WitnessInstance {
  Graph g;
  std::vector<int> chi;  // stable coloring with V1 individualized
  VertexSet v1, v2;
  int h = 0;
};

inline WitnessInstance random_witness_instance(int h, int classes, int size, int d, Rng& rng) {
  if (classes < h || d < 1 || d > size) throw InputError("bad witness instance parameters");
  WitnessInstance wi;
  wi.h = h;
  std::vector<std::pair<int, int>> e;
  auto start = [&](int c) { return h + c * size; };
  for (int c = 1; c < classes; ++c) {
    int p = uniform_int(rng, 0, c - 1);
    auto perm = random_permutation(size, rng);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < d; ++j) e.emplace_back(start(c) + i, start(p) + (perm[i] + j) % size);
  }
  auto which = random_permutation(classes, rng);
  for (int i = 0; i < h; ++i)
    for (int x = 0; x < size; ++x) e.emplace_back(i, start(which[i]) + x);
  const int n = h + classes * size;
  wi.g = Graph::from_edges(n, e);
  for (int i = 0; i < h; ++i) wi.v1.push_back(i);
  for (int v = h; v < n; ++v) wi.v2.push_back(v);
  std::vector<int> init(n, 0);
  for (int i = 0; i < h; ++i) init[i] = i + 1;
  wi.chi = color_refine(wi.g, normalize_colors(init)).colors;
  return wi;
}

}  // namespace mfiso
