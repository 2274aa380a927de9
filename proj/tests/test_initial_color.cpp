#include <gtest/gtest.h>

#include "mfiso/corpus.hpp"
#include "mfiso/initial_color.hpp"

using namespace mfiso;

namespace {

Graph disjoint_triangles(int k) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < k; ++i) {
    e.emplace_back(3 * i, 3 * i + 1);
    e.emplace_back(3 * i + 1, 3 * i + 2);
    e.emplace_back(3 * i + 2, 3 * i);
  }
  return Graph::from_edges(3 * k, e);
}

Graph two_k33() {
  std::vector<std::pair<int, int>> e;
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < 3; ++i)
      for (int j = 3; j < 6; ++j) e.emplace_back(6 * b + i, 6 * b + j);
  return Graph::from_edges(12, e);
}

// Postconditions of the initial class: one diagonal class, inside V(G), closed under the pair closure.
void expect_postconditions(const Graph& g, const InitialColorOutput& r, long t) {
  ASSERT_FALSE(r.minor_found) << r.reason;
  ASSERT_FALSE(r.x.empty());
  VertexSet cls;
  for (int v = 0; v < r.gprime.n(); ++v)
    if (r.chiprime(v, v) == r.color) cls.push_back(v);
  EXPECT_EQ(cls, r.x_prime);
  for (int v : r.x) EXPECT_TRUE(v >= 0 && v < g.n());
  VertexSet mapped;
  for (int v : r.x_prime) mapped.push_back(r.to_input[v]);
  EXPECT_EQ(sorted_set(mapped), r.x);
  for (int v : r.x_prime) EXPECT_TRUE(is_subset(r.x_prime, closure_t_pair(r.gprime, r.chiprime, {v}, t).d));
  EXPECT_LE(r.restarts, g.n());
}

}  // namespace

TEST(FactorByEdgeColor, DisjointTriangles) {
  Graph g = disjoint_triangles(4);
  auto pc = wl2(g, uniform_coloring(12));
  auto f = factor_by_edge_color(g, pc, pc(0, 1));
  EXPECT_EQ(f.graph.n(), 4);
  EXPECT_EQ(f.graph.m(), 0);
}

TEST(FactorByEdgeColor, SixCycle) {
  Graph g = cycle_graph(6);
  auto pc = wl2(g, uniform_coloring(6));
  auto f = factor_by_edge_color(g, pc, pc(0, 1));
  EXPECT_EQ(f.graph.n(), 1);
}

TEST(FactorByEdgeColor, TwoBicliques) {
  Graph g = two_k33();
  auto pc = wl2(g, uniform_coloring(12));
  auto f = factor_by_edge_color(g, pc, pc(0, 3));
  ASSERT_EQ(f.graph.n(), 2);
  EXPECT_EQ(f.graph.m(), 0);
  EXPECT_EQ(f.pc(0, 0), f.pc(1, 1));
  EXPECT_TRUE(partitions_equivalent(f.pc, wl2(f.graph, f.pc)));
}

TEST(FactorByEdgeColor, NonEdgeColorThrows) {
  Graph g = cycle_graph(6);
  auto pc = wl2(g, uniform_coloring(6));
  EXPECT_THROW(factor_by_edge_color(g, pc, pc(0, 0)), InputError);
}

TEST(CrossColorLift, TwoCentres) {
  const int m = 6;
  std::vector<std::pair<int, int>> e;
  for (int v = 2; v < 2 + m; ++v) {
    e.emplace_back(0, v);
    e.emplace_back(1, v);
  }
  Graph g = Graph::from_edges(2 + m, e);
  auto pc = wl2(g, uniform_coloring(2 + m));
  VertexSet v2;
  for (int v = 2; v < 2 + m; ++v) v2.push_back(v);
  auto r = cross_color_minor_lift(g, {0, 1}, v2, pc, 1.0);
  ASSERT_EQ(r.colors.size(), 1u);
  EXPECT_EQ(r.h_edges[0], (std::vector<std::pair<int, int>>{{0, 1}}));
  EXPECT_TRUE(r.certified[0]);
}

TEST(CrossColorLift, NoSharedNeighbours) {
  // One V1 vertex has no partner to share a neighbour with.
  Graph g = star_graph(4);
  auto pc = wl2(g, uniform_coloring(5));
  auto r = cross_color_minor_lift(g, {0}, {1, 2, 3, 4}, pc, 1.0);
  EXPECT_TRUE(r.colors.empty());
  // Private neighbourhoods for several V1 vertices force a disconnected graph, which violates the hypotheses.
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e.emplace_back(i, 3 + 3 * i + j);
  Graph h = Graph::from_edges(12, e);
  VertexSet v2;
  for (int v = 3; v < 12; ++v) v2.push_back(v);
  EXPECT_THROW(cross_color_minor_lift(h, {0, 1, 2}, v2, wl2(h, uniform_coloring(12)), 1.0), InputError);
}

TEST(CrossColorLift, HypercubeLikeRegular) {
  // V1 = 4-cycle corners, V2 = one subdivision vertex per corner pair of the 4-cycle, repeated twice.
  std::vector<std::pair<int, int>> e;
  int next = 4;
  for (int rep = 0; rep < 2; ++rep)
    for (int i = 0; i < 4; ++i) {
      e.emplace_back(i, next);
      e.emplace_back((i + 1) % 4, next);
      ++next;
    }
  Graph g = Graph::from_edges(next, e);
  auto pc = wl2(g, uniform_coloring(next));
  VertexSet v2;
  for (int v = 4; v < next; ++v) v2.push_back(v);
  auto r = cross_color_minor_lift(g, {0, 1, 2, 3}, v2, pc, 1.0);
  ASSERT_FALSE(r.colors.empty());
  for (size_t i = 0; i < r.colors.size(); ++i) {
    EXPECT_TRUE(r.certified[i]);
    std::map<int, int> deg;
    for (auto [a, b] : r.h_edges[i]) {
      ++deg[a];
      ++deg[b];
    }
    std::set<int> degs;
    for (auto [v, d] : deg) degs.insert(d);
    EXPECT_EQ(degs.size(), 1u);
    std::set<int> v2_used;
    for (auto [w, idx] : r.matchings[i]) {
      EXPECT_TRUE(contains(v2, w));
      EXPECT_TRUE(v2_used.insert(w).second);
      auto [a, b] = r.h_edges[i][idx];
      EXPECT_TRUE(g.has_edge(w, a) && g.has_edge(w, b));
    }
  }
}

TEST(BipartiteClosureCheck, Examples) {
  Graph k11 = path_graph(2);
  EXPECT_TRUE(bipartite_closure_check(k11, {0}, {1}, wl2(k11, uniform_coloring(2)), 1));
  Graph k23 = Graph::from_edges(5, {{0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}});
  std::vector<int> side{0, 0, 1, 1, 1};
  EXPECT_TRUE(bipartite_closure_check(k23, {0, 1}, {2, 3, 4}, wl2(k23, normalize_colors(side)), 4));
  Graph c8 = cycle_graph(8);
  std::vector<int> alt{0, 1, 0, 1, 0, 1, 0, 1};
  EXPECT_TRUE(bipartite_closure_check(c8, {0, 2, 4, 6}, {1, 3, 5, 7}, wl2(c8, normalize_colors(alt)), 2));
}

TEST(FindInitialClass, LongCycleIsWholeVertexSet) {
  const int n = 120;
  Graph g = cycle_graph(n);
  InitialColorParams p{3, 0, 4.0, 2.0};
  auto r = find_initial_class(g, uniform_coloring(n), p);
  expect_postconditions(g, r, t_for_h(3));
  EXPECT_EQ(static_cast<int>(r.x.size()), n);
}

TEST(FindInitialClass, StarCentre) {
  const int m = 40;
  Graph g = star_graph(m);
  InitialColorParams p{3, 10, 4.0, 2.0};
  auto r = find_initial_class(g, uniform_coloring(m + 1), p);
  expect_postconditions(g, r, 10);
  EXPECT_EQ(r.x, (VertexSet{0}));
}

TEST(FindInitialClass, ContractedBlocksBranch) {
  // A ring of triangles: each triangle shares one vertex with the next, giving small edge-color components.
  const int k = 30;
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < k; ++i) {
    int a = 2 * i, b = 2 * i + 1, c = 2 * ((i + 1) % k);
    e.emplace_back(a, b);
    e.emplace_back(b, c);
    e.emplace_back(a, c);
  }
  Graph g = Graph::from_edges(2 * k, e);
  InitialColorParams p{4, 0, 4.0, 2.0};
  auto r = find_initial_class(g, uniform_coloring(2 * k), p);
  expect_postconditions(g, r, t_for_h(4));
}

TEST(FindInitialClass, PostconditionsOnCorpus) {
  Rng rng(17);
  for (int it = 0; it < 20; ++it) {
    Graph g = it % 2 ? random_planar(30, rng) : random_partial_ktree(30, 3, rng);
    for (long t : {0L, 4L}) {
      InitialColorParams p{5, t, 4.0, 2.0};
      auto r = find_initial_class(g, uniform_coloring(30), p);
      if (r.minor_found) continue;
      expect_postconditions(g, r, t ? t : t_for_h(5));
    }
  }
}

TEST(FindInitialClass, InvariantUnderRelabeling) {
  Rng rng(23);
  for (int it = 0; it < 15; ++it) {
    Graph g = random_planar(25, rng);
    auto pi = random_permutation(25, rng);
    InitialColorParams p{5, 6, 4.0, 2.0};
    auto a = find_initial_class(g, uniform_coloring(25), p);
    auto b = find_initial_class(relabel(g, pi), uniform_coloring(25), p);
    ASSERT_EQ(a.minor_found, b.minor_found);
    if (a.minor_found) continue;
    VertexSet img;
    for (int v : a.x) img.push_back(pi[v]);
    EXPECT_EQ(sorted_set(img), b.x);
    EXPECT_EQ(a.gprime.n(), b.gprime.n());
    EXPECT_EQ(a.gprime.m(), b.gprime.m());
    EXPECT_EQ(a.color, b.color);
  }
}

TEST(FindInitialClass, RejectsBadParameters) {
  EXPECT_THROW(find_initial_class(path_graph(3), uniform_coloring(3), InitialColorParams{1, 0, 4.0, 2.0}),
               InputError);
}
