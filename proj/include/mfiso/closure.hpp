#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "graph.hpp"
#include "refinement.hpp"

namespace mfiso {

struct ClosureStep {
  enum Kind { Refine, Individualize } kind;
  std::vector<VertexSet> classes;  // classes split by a refine step, or individualized classes
};

struct ClosureResult {
  VertexSet d;
  VertexColoring final_coloring;
  std::vector<ClosureStep> trace;
};

// ceil((a·h·log_b h)^3), at least 1.
inline long t_for_h(int h, double a = 4.0, double log_base = 2.0) {
  if (h < 2) return 1;
  double x = a * h * (std::log(static_cast<double>(h)) / std::log(log_base));
  double t = std::ceil(x * x * x - 1e-9);
  return t < 1 ? 1 : static_cast<long>(t);
}

namespace detail {

// Alternates `refine` with individualization of every class of size <= t until nothing changes.
template <class Refine>
ClosureResult run_closure(int n, const std::vector<int>& vcol, const VertexSet& x, long t, Refine refine) {
  if (t < 1) throw InputError("closure threshold must be at least 1");
  std::vector<int64_t> raw(n);
  const int64_t base = n;
  for (int v = 0; v < n; ++v) raw[v] = vcol[v] + base;
  for (int v : x) {
    if (v < 0 || v >= n) throw InputError("closure seed out of range");
    raw[v] = v;
  }
  ClosureResult res;
  VertexColoring cur = normalize_colors(raw);
  while (true) {
    VertexColoring ref = refine(cur);
    if (ref.num_colors != cur.num_colors) {
      ClosureStep st{ClosureStep::Refine, {}};
      auto before = color_classes(cur);
      for (auto& c : before) {
        int first = ref[c.front()];
        for (int v : c)
          if (ref[v] != first) {
            st.classes.push_back(c);
            break;
          }
      }
      res.trace.push_back(std::move(st));
    }
    cur = std::move(ref);
    auto classes = color_classes(cur);
    ClosureStep ind{ClosureStep::Individualize, {}};
    std::vector<int64_t> next(n);
    for (int v = 0; v < n; ++v) next[v] = cur[v] + base;
    for (auto& c : classes)
      if (c.size() >= 2 && static_cast<long>(c.size()) <= t) {
        for (int v : c) next[v] = v;
        ind.classes.push_back(c);
      }
    if (ind.classes.empty()) break;
    res.trace.push_back(std::move(ind));
    cur = normalize_colors(next);
  }
  for (auto& c : color_classes(cur))
    if (c.size() == 1) res.d.push_back(c.front());
  res.d = sorted_set(std::move(res.d));
  res.final_coloring = std::move(cur);
  return res;
}

// 1-WL on the complete graph whose arc (v,w) carries colors[v][w].
inline VertexColoring refine_dense(int n, const VertexColoring& vcol, const std::vector<int>& arc) {
  VertexColoring cur = vcol;
  std::vector<std::vector<int>> sig(n);
  std::vector<std::array<int, 3>> ms;
  while (true) {
    for (int v = 0; v < n; ++v) {
      ms.clear();
      for (int w = 0; w < n; ++w)
        if (w != v) ms.push_back({cur[w], arc[static_cast<size_t>(v) * n + w], arc[static_cast<size_t>(w) * n + v]});
      std::sort(ms.begin(), ms.end());
      auto& s = sig[v];
      s.assign(1, cur[v]);
      for (auto& t : ms) s.insert(s.end(), t.begin(), t.end());
    }
    int k = 0;
    auto next = rank_keys(sig, &k);
    if (k == cur.num_colors) return cur;
    cur.colors = std::move(next);
    cur.num_colors = k;
  }
}

}  // namespace detail

inline ClosureResult closure_t(const Graph& g, const VertexColoring& vcol, const ArcColoring* acol, VertexSet x,
                               long t) {
  x = sorted_set(std::move(x));
  check_vertex_set(g, x);
  return detail::run_closure(g.n(), vcol.colors, x, t,
                             [&](const VertexColoring& c) { return color_refine(g, c, acol); });
}

inline ClosureResult closure_t(const Graph& g, const VertexColoring& vcol, VertexSet x, long t) {
  return closure_t(g, vcol, nullptr, std::move(x), t);
}

// Closure of the pair-colored graph: K_n with arc colors (atp(v,w), pc(v,w)), vertex colors pc(v,v).
inline ClosureResult closure_t_pair(const Graph& g, const PairColoring& pc, VertexSet x, long t) {
  const int n = g.n();
  if (pc.n != n) throw InputError("pair coloring size mismatch");
  x = sorted_set(std::move(x));
  check_vertex_set(g, x);
  std::vector<int64_t> raw(static_cast<size_t>(n) * n);
  for (int v = 0; v < n; ++v)
    for (int w = 0; w < n; ++w) raw[static_cast<size_t>(v) * n + w] = static_cast<int64_t>(pc(v, w)) * 3 + atp(g, v, w);
  std::vector<int> arc = normalize_colors(raw).colors;
  VertexColoring diag = diagonal_coloring(pc);
  return detail::run_closure(n, diag.colors, x, t,
                             [&](const VertexColoring& c) { return detail::refine_dense(n, c, arc); });
}

inline bool is_tcr_bounded(const Graph& g, const VertexColoring& vcol, const ArcColoring* acol, VertexSet x, long t) {
  return static_cast<int>(closure_t(g, vcol, acol, std::move(x), t).d.size()) == g.n();
}

struct ComponentSeparator {
  VertexSet z;
  VertexSet s;
};

// Components of g - d (ordered by minimum vertex) with their neighbourhoods.
inline std::vector<ComponentSeparator> components_and_separators(const Graph& g, VertexSet d) {
  d = sorted_set(std::move(d));
  check_vertex_set(g, d);
  std::vector<char> mask(g.n(), 1);
  for (int v : d) mask[v] = 0;
  std::vector<ComponentSeparator> out;
  for (auto& z : components_masked(g, mask)) out.push_back({z, neighborhood(g, z)});
  return out;
}

}  // namespace mfiso
