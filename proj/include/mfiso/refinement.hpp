#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

#include "graph.hpp"

namespace mfiso {

// Assigns dense ids 0..k-1 to items by sorting them with `less`; equal items share an id.
template <class Less, class Equal>
std::vector<int> rank_items(size_t count, Less less, Equal equal, int* num_ids = nullptr) {
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return less(a, b); });
  std::vector<int> id(count);
  int next = -1;
  for (size_t i = 0; i < count; ++i) {
    if (i == 0 || !equal(order[i - 1], order[i])) ++next;
    id[order[i]] = next;
  }
  if (num_ids) *num_ids = next + 1;
  return id;
}

// Dense ranks of arbitrary comparable keys.
template <class Key>
std::vector<int> rank_keys(const std::vector<Key>& keys, int* num_ids = nullptr) {
  return rank_items(
      keys.size(), [&](int a, int b) { return keys[a] < keys[b]; },
      [&](int a, int b) { return keys[a] == keys[b]; }, num_ids);
}

struct RefineResult {
  VertexColoring coloring;
  int rounds = 0;  // number of rounds that split at least one class
};

// 1-WL with optional arc colors. Each round a vertex gets the rank of
// (old color, sorted multiset of (χ(w), χE(v,w), χE(w,v))).
inline RefineResult color_refine_trace(const Graph& g, const VertexColoring& vcol, const ArcColoring* acol = nullptr) {
  const int n = g.n();
  RefineResult res;
  res.coloring = normalize_colors(vcol.colors);
  if (n == 0) return res;
  std::vector<std::vector<int>> sig(n);
  auto arc = [&](int u, int i) { return acol ? acol->colors[g.arc_offset(u) + i] : 0; };
  // Reverse arc index for each arc, so χE(w,v) is O(1).
  std::vector<int> rev;
  if (acol) {
    rev.resize(g.num_arcs());
    for (int v = 0; v < n; ++v)
      for (int i = 0; i < g.degree(v); ++i) rev[g.arc_offset(v) + i] = g.arc_index(g.adj(v)[i], v);
  }
  while (true) {
    const auto& chi = res.coloring.colors;
    for (int v = 0; v < n; ++v) {
      std::vector<std::array<int, 3>> ms;
      ms.reserve(g.degree(v));
      for (int i = 0; i < g.degree(v); ++i) {
        int w = g.adj(v)[i];
        int fw = arc(v, i);
        int bw = acol ? acol->colors[rev[g.arc_offset(v) + i]] : 0;
        ms.push_back({chi[w], fw, bw});
      }
      std::sort(ms.begin(), ms.end());
      auto& s = sig[v];
      s.clear();
      s.push_back(chi[v]);
      for (auto& t : ms) s.insert(s.end(), t.begin(), t.end());
    }
    int k = 0;
    auto next = rank_keys(sig, &k);
    if (k == res.coloring.num_colors) break;
    res.coloring.colors = std::move(next);
    res.coloring.num_colors = k;
    ++res.rounds;
  }
  return res;
}

inline VertexColoring color_refine(const Graph& g, const VertexColoring& vcol, const ArcColoring* acol = nullptr) {
  return color_refine_trace(g, vcol, acol).coloring;
}

inline bool partitions_equivalent(const std::vector<int>& c1, const std::vector<int>& c2) {
  if (c1.size() != c2.size()) throw InputError("colorings have different domains");
  std::vector<int> f, r;
  int m1 = 0, m2 = 0;
  for (int x : c1) m1 = std::max(m1, x + 1);
  for (int x : c2) m2 = std::max(m2, x + 1);
  f.assign(m1, -1);
  r.assign(m2, -1);
  for (size_t i = 0; i < c1.size(); ++i) {
    int x = c1[i], y = c2[i];
    if (f[x] == -1 && r[y] == -1) {
      f[x] = y;
      r[y] = x;
    } else if (f[x] != y || r[y] != x) {
      return false;
    }
  }
  return true;
}

inline bool partitions_equivalent(const VertexColoring& c1, const VertexColoring& c2) {
  return partitions_equivalent(c1.colors, c2.colors);
}

inline bool partitions_equivalent(const PairColoring& c1, const PairColoring& c2) {
  return partitions_equivalent(c1.colors, c2.colors);
}

// True iff c1 refines c2 (every class of c1 lies inside a class of c2).
inline bool refines(const std::vector<int>& c1, const std::vector<int>& c2) {
  int m1 = 0;
  for (int x : c1) m1 = std::max(m1, x + 1);
  std::vector<int> f(m1, -1);
  for (size_t i = 0; i < c1.size(); ++i) {
    if (f[c1[i]] == -1) f[c1[i]] = c2[i];
    else if (f[c1[i]] != c2[i]) return false;
  }
  return true;
}

inline PairColoring normalize_pairs(int n, const std::vector<int64_t>& raw) {
  auto vc = normalize_colors(raw);
  return PairColoring{n, std::move(vc.colors), vc.num_colors};
}

// atp(v,w): 0 on the diagonal, 1 for edges, 2 for non-edges.
inline int atp(const Graph& g, int v, int w) { return v == w ? 0 : (g.has_edge(v, w) ? 1 : 2); }

// χ0(v1,v2) = (χ(v1), χ(v2), equality, adjacency), ranked.
inline PairColoring wl2_initial(const Graph& g, const VertexColoring& vcol) {
  const int n = g.n();
  const int64_t k = std::max(1, vcol.num_colors);
  std::vector<int64_t> raw(static_cast<size_t>(n) * n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) raw[static_cast<size_t>(u) * n + v] = ((vcol[u] * k) + vcol[v]) * 3 + atp(g, u, v);
  return normalize_pairs(n, raw);
}

// Caller-supplied pair colors combined with adjacency type.
inline PairColoring wl2_initial(const Graph& g, const PairColoring& pc) {
  const int n = g.n();
  if (pc.n != n) throw InputError("pair coloring size mismatch");
  std::vector<int64_t> raw(static_cast<size_t>(n) * n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) raw[static_cast<size_t>(u) * n + v] = static_cast<int64_t>(pc(u, v)) * 3 + atp(g, u, v);
  return normalize_pairs(n, raw);
}

struct Wl2Result {
  PairColoring coloring;
  int rounds = 0;
};

namespace detail {

// Multiset stored run-length encoded as (value, count) pairs; compared as the expanded sorted sequence.
using Rle = std::vector<std::pair<uint64_t, int>>;

inline int compare_expanded(const Rle& a, const Rle& b) {
  size_t i = 0, j = 0;
  int ra = a.empty() ? 0 : a[0].second, rb = b.empty() ? 0 : b[0].second;
  while (i < a.size() && j < b.size()) {
    if (a[i].first != b[j].first) return a[i].first < b[j].first ? -1 : 1;
    int step = std::min(ra, rb);
    ra -= step;
    rb -= step;
    if (ra == 0 && ++i < a.size()) ra = a[i].second;
    if (rb == 0 && ++j < b.size()) rb = b[j].second;
  }
  if (i == a.size() && j == b.size()) return 0;
  return i == a.size() ? -1 : 1;
}

}  // namespace detail

// 2-WL: (v1,v2) gets the rank of (χ(v1,v2), sorted multiset over w of (χ(v1,w), χ(w,v2))).
inline Wl2Result wl2_from_pairs(const Graph& g, const PairColoring& init) {
  const int n = g.n();
  Wl2Result res;
  res.coloring = wl2_initial(g, init);
  if (n == 0) return res;
  const size_t nn = static_cast<size_t>(n) * n;
  std::vector<detail::Rle> ms(nn);
  std::vector<uint64_t> buf(n);
  while (true) {
    const auto& c = res.coloring;
    const uint64_t k = static_cast<uint64_t>(c.num_colors);
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        for (int w = 0; w < n; ++w) buf[w] = static_cast<uint64_t>(c(u, w)) * k + static_cast<uint64_t>(c(w, v));
        std::sort(buf.begin(), buf.end());
        auto& r = ms[static_cast<size_t>(u) * n + v];
        r.clear();
        for (int w = 0; w < n; ++w) {
          if (!r.empty() && r.back().first == buf[w]) ++r.back().second;
          else r.emplace_back(buf[w], 1);
        }
      }
    int num = 0;
    auto next = rank_items(
        nn,
        [&](int a, int b) {
          if (c.colors[a] != c.colors[b]) return c.colors[a] < c.colors[b];
          return detail::compare_expanded(ms[a], ms[b]) < 0;
        },
        [&](int a, int b) { return c.colors[a] == c.colors[b] && detail::compare_expanded(ms[a], ms[b]) == 0; },
        &num);
    if (num == c.num_colors) break;
    res.coloring.colors = std::move(next);
    res.coloring.num_colors = num;
    ++res.rounds;
  }
  return res;
}

inline Wl2Result wl2_trace(const Graph& g, const VertexColoring& vcol) {
  return wl2_from_pairs(g, wl2_initial(g, vcol));
}

inline PairColoring wl2(const Graph& g, const VertexColoring& vcol) { return wl2_trace(g, vcol).coloring; }
inline PairColoring wl2(const Graph& g, const PairColoring& pc) { return wl2_from_pairs(g, pc).coloring; }

// Diagonal of a pair coloring, renamed densely in order of the pair color ids.
inline VertexColoring diagonal_coloring(const PairColoring& pc) {
  std::vector<int64_t> raw(pc.n);
  for (int v = 0; v < pc.n; ++v) raw[v] = pc(v, v);
  return normalize_colors(raw);
}

}  // namespace mfiso
