#pragma once
// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "mfiso/graph.hpp"
#include "mfiso/perm.hpp"

namespace oracle {

using mfiso::Graph;
using mfiso::Perm;

// All colored isomorphisms g1 -> g2 by backtracking on vertex order (stops after `cap`).
inline std::vector<std::vector<int>> all_isomorphisms(const Graph& g1, const std::vector<int>& c1, const Graph& g2,
                                                      const std::vector<int>& c2, size_t cap = SIZE_MAX) {
  std::vector<std::vector<int>> out;
  const int n = g1.n();
  if (n != g2.n() || g1.m() != g2.m()) return out;
  std::vector<int> phi(n, -1), used(n, 0);
  std::function<void(int)> rec = [&](int v) {
    if (out.size() >= cap) return;
    if (v == n) {
      out.push_back(phi);
      return;
    }
    for (int w = 0; w < n; ++w) {
      if (used[w] || c1[v] != c2[w] || g1.degree(v) != g2.degree(w)) continue;
      bool ok = true;
      for (int u = 0; u < v && ok; ++u) ok = g1.has_edge(u, v) == g2.has_edge(phi[u], w);
      if (!ok) continue;
      phi[v] = w;
      used[w] = 1;
      rec(v + 1);
      used[w] = 0;
      phi[v] = -1;
    }
  };
  rec(0);
  return out;
}

inline bool isomorphic(const Graph& g1, const std::vector<int>& c1, const Graph& g2, const std::vector<int>& c2) {
  return !all_isomorphisms(g1, c1, g2, c2, 1).empty();
}

inline bool isomorphic(const Graph& g1, const Graph& g2) {
  return isomorphic(g1, std::vector<int>(g1.n(), 0), g2, std::vector<int>(g2.n(), 0));
}

inline uint64_t automorphism_count(const Graph& g, const std::vector<int>& c) {
  return all_isomorphisms(g, c, g, c).size();
}

// Closure of a generating set under composition (explicit element set).
inline std::set<Perm> group_closure(int n, const std::vector<Perm>& gens) {
  std::set<Perm> seen{mfiso::identity_perm(n)};
  std::vector<Perm> frontier{mfiso::identity_perm(n)};
  while (!frontier.empty()) {
    std::vector<Perm> next;
    for (auto& p : frontier)
      for (auto& g : gens) {
        Perm q = mfiso::compose(p, g);
        if (seen.insert(q).second) next.push_back(q);
      }
    frontier.swap(next);
  }
  return seen;
}

// Naive 1-WL with canonical naming by sorted (old color, sorted neighbour colors) signatures.
inline std::vector<int> naive_refine(const Graph& g, std::vector<int> col) {
  const int n = g.n();
  auto rank = [&](const std::vector<std::vector<int>>& sig) {
    std::map<std::vector<int>, int> ids;
    for (auto& s : sig) ids[s];
    int k = 0;
    for (auto& [s, id] : ids) id = k++;
    std::vector<int> r(n);
    for (int v = 0; v < n; ++v) r[v] = ids[sig[v]];
    return r;
  };
  std::vector<std::vector<int>> s0(n);
  for (int v = 0; v < n; ++v) s0[v] = {col[v]};
  col = rank(s0);
  while (true) {
    std::vector<std::vector<int>> sig(n);
    for (int v = 0; v < n; ++v) {
      std::vector<int> nb;
      for (int w : g.adj(v)) nb.push_back(col[w]);
      std::sort(nb.begin(), nb.end());
      sig[v] = {col[v]};
      sig[v].insert(sig[v].end(), nb.begin(), nb.end());
    }
    auto next = rank(sig);
    std::set<int> a(col.begin(), col.end()), b(next.begin(), next.end());
    col = next;
    if (a.size() == b.size()) return col;
  }
}

// Partition of V induced by a coloring, as a sorted set of sorted classes.
inline std::set<std::vector<int>> partition_of(const std::vector<int>& col) {
  std::map<int, std::vector<int>> m;
  for (int v = 0; v < static_cast<int>(col.size()); ++v) m[col[v]].push_back(v);
  std::set<std::vector<int>> r;
  for (auto& [c, cls] : m) r.insert(cls);
  return r;
}

// Nonisomorphic connected graphs on n vertices (n <= 7), by brute-force canonical form.
inline std::vector<Graph> connected_graphs(int n) {
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  std::vector<int> perm(n);
  std::vector<std::vector<int>> perms;
  for (int i = 0; i < n; ++i) perm[i] = i;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  std::set<uint32_t> canon;
  std::vector<Graph> out;
  const uint32_t total = 1u << slots.size();
  std::vector<std::vector<int>> slot_of(n, std::vector<int>(n, -1));
  for (size_t s = 0; s < slots.size(); ++s) {
    slot_of[slots[s].first][slots[s].second] = static_cast<int>(s);
    slot_of[slots[s].second][slots[s].first] = static_cast<int>(s);
  }
  for (uint32_t mask = 0; mask < total; ++mask) {
    if (std::__popcount(mask) < n - 1) continue;
    std::vector<std::pair<int, int>> e;
    for (size_t s = 0; s < slots.size(); ++s)
      if (mask >> s & 1) e.push_back(slots[s]);
    Graph g = Graph::from_edges(n, e);
    if (!mfiso::is_connected(g)) continue;
    uint32_t best = UINT32_MAX;
    for (auto& p : perms) {
      uint32_t m2 = 0;
      for (auto [a, b] : e) m2 |= 1u << slot_of[p[a]][p[b]];
      best = std::min(best, m2);
    }
    if (canon.insert(best).second) out.push_back(g);
  }
  return out;
}

}  // namespace oracle
