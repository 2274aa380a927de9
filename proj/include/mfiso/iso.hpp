#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "closure.hpp"
#include "graph.hpp"
#include "initial_color.hpp"
#include "perm.hpp"
#include "refinement.hpp"

namespace mfiso {

// Hypergraph on 0..n-1 whose hyperedges carry a color and a labeling coset of themselves.
struct CosetLabeledHypergraph {
  int n = 0;
  std::vector<VertexSet> edges;
  std::vector<LabelingCoset> labels;  // labels[i].domain == edges[i]
  std::vector<int> colors;            // one per hyperedge
};

// Family of distinct labeling cosets of one set, each with a multiplicity multiset.
struct MultipleLabelingCoset {
  VertexSet v;
  std::vector<LabelingCoset> l;
  std::vector<std::vector<int>> p;  // sorted multiset attached to l[i]
};

namespace detail {

// Sorted element list of a small group; equal keys iff equal groups.
inline std::vector<int> group_key(const PermGroup& g) {
  std::vector<int> key{g.degree()};
  for (auto& e : g.elements(100000)) key.insert(key.end(), e.begin(), e.end());
  return key;
}

// Whether a, moved along a bijection of domains, equals b. pos[i] is the position in
// b.domain of the image of a.domain[i]; the caller has already checked Θ_a == Θ_b.
inline bool transported_matches(const LabelingCoset& a, const std::vector<int>& pos, const LabelingCoset& b,
                                const PermGroup& theta_b) {
  const size_t k = a.rho.size();
  if (k != b.rho.size() || pos.size() != k) return false;
  Perm f(k);
  for (size_t i = 0; i < k; ++i) f[pos[i]] = a.rho[i];
  return theta_b.contains(compose(inverse(b.rho), f));
}

inline void check_labels(const CosetLabeledHypergraph& h) {
  if (h.labels.size() != h.edges.size() || h.colors.size() != h.edges.size())
    throw InputError("hypergraph needs one label and color per hyperedge");
  for (size_t i = 0; i < h.edges.size(); ++i) {
    if (h.edges[i] != sorted_set(h.edges[i])) throw InputError("hyperedge must be a sorted set");
    for (int v : h.edges[i])
      if (v < 0 || v >= h.n) throw InputError("hyperedge vertex out of range");
    if (h.labels[i].domain != h.edges[i]) throw InputError("label domain differs from its hyperedge");
    if (h.labels[i].rho.size() != h.edges[i].size()) throw InputError("label size differs from its hyperedge");
  }
  auto e = h.edges;
  std::sort(e.begin(), e.end());
  if (std::adjacent_find(e.begin(), e.end()) != e.end()) throw InputError("duplicate hyperedge");
}

// Group generated by g·g0⁻¹ over a list of isomorphisms sharing a domain.
inline PermGroup group_from_isos(int degree, const std::vector<Perm>& isos) {
  std::vector<Perm> gens;
  PermGroup grp = PermGroup::trivial(degree);
  if (isos.empty()) return grp;
  Perm i0 = inverse(isos.front());
  for (auto& e : isos) {
    Perm g = compose(e, i0);
    if (grp.contains(g)) continue;
    gens.push_back(g);
    grp = PermGroup(degree, gens);
  }
  return grp;
}

}  // namespace detail

// All bijections in gd that map h1 onto h2 preserving colors and labeling cosets.
// Backtracks through the stabilizer chain of gd, checking hyperedges once all their vertices are placed.
inline Coset coset_labeled_hypergraph_iso(const CosetLabeledHypergraph& h1, const CosetLabeledHypergraph& h2,
                                          const Coset& gd, uint64_t node_cap = 20000000) {
  detail::check_labels(h1);
  detail::check_labels(h2);
  const int n = h1.n;
  if (h2.n != n || gd.group.degree() != n) throw InputError("hypergraph and coset degrees differ");
  Coset out{PermGroup::trivial(n), std::nullopt};
  if (gd.empty() || h1.edges.size() != h2.edges.size()) return out;
  std::map<VertexSet, int> index2;
  for (size_t i = 0; i < h2.edges.size(); ++i) index2[h2.edges[i]] = static_cast<int>(i);
  std::vector<PermGroup> theta2;
  std::vector<std::vector<int>> key1, key2;
  for (auto& l : h2.labels) theta2.push_back(l.theta());
  for (auto& t : theta2) key2.push_back(detail::group_key(t));
  for (auto& l : h1.labels) key1.push_back(detail::group_key(l.theta()));

  const PermGroup& g = gd.group;
  const Perm& rep = *gd.rep;
  const int levels = g.num_levels();
  std::vector<int> level_of(n, levels);
  for (int i = 0; i < levels; ++i) level_of[g.base()[i]] = i;
  std::vector<std::vector<int>> check_at(levels + 1);
  for (size_t e = 0; e < h1.edges.size(); ++e) {
    int lv = 0;
    for (int v : h1.edges[e]) lv = std::max(lv, level_of[v]);
    check_at[lv].push_back(static_cast<int>(e));
  }
  auto edge_ok = [&](int e, const Perm& img) {
    const VertexSet& s = h1.edges[e];
    VertexSet t;
    for (int v : s) t.push_back(img[v]);
    t = sorted_set(t);
    auto it = index2.find(t);
    if (it == index2.end()) return false;
    int f = it->second;
    if (h1.colors[e] != h2.colors[f] || key1[e] != key2[f]) return false;
    std::vector<int> pos(s.size());
    for (size_t i = 0; i < s.size(); ++i)
      pos[i] = static_cast<int>(std::lower_bound(t.begin(), t.end(), img[s[i]]) - t.begin());
    return detail::transported_matches(h1.labels[e], pos, h2.labels[f], theta2[f]);
  };

  std::vector<Perm> found;
  uint64_t nodes = 0;
  // outer maps x to u_0[u_1[...u_{i-1}[x]]]; the coset element is x -> rep[outer[x]] at full depth.
  std::function<void(int, const Perm&)> rec = [&](int i, const Perm& outer) {
    if (++nodes > node_cap) throw CapacityError("hypergraph isomorphism search exceeded its node budget");
    if (i == levels) {
      Perm img(n);
      for (int x = 0; x < n; ++x) img[x] = rep[outer[x]];
      for (int e : check_at[levels])
        if (!edge_ok(e, img)) return;
      found.push_back(img);
      return;
    }
    for (int y : g.fundamental_orbit(i)) {
      Perm next = compose(*g.transversal(i, y), outer);
      Perm im(n);
      for (int x = 0; x < n; ++x) im[x] = rep[next[x]];
      bool ok = true;
      for (int e : check_at[i])
        if (!edge_ok(e, im)) {
          ok = false;
          break;
        }
      if (ok) rec(i + 1, next);
    }
  };
  rec(0, identity_perm(n));
  if (found.empty()) return out;
  out.group = detail::group_from_isos(n, found);
  out.rep = found.front();
  return out;
}

// Bijections x1.v -> x2.v carrying every member of x1 to a member of x2 with the same multiset.
// Desk scale: enumerates all |v|! bijections.
inline SetCoset multiple_labeling_coset_iso(const MultipleLabelingCoset& x1, const MultipleLabelingCoset& x2) {
  for (auto* x : {&x1, &x2}) {
    if (x->l.size() != x->p.size()) throw InputError("multiple labeling coset needs one multiset per coset");
    for (auto& l : x->l)
      if (l.domain != x->v) throw InputError("labeling coset domain differs from the set");
  }
  const int k = static_cast<int>(x1.v.size());
  SetCoset out;
  out.src = x1.v;
  out.dst = x2.v;
  out.group = PermGroup::trivial(k);
  if (static_cast<int>(x2.v.size()) != k || x1.l.size() != x2.l.size()) return out;
  auto ps1 = x1.p, ps2 = x2.p;
  std::sort(ps1.begin(), ps1.end());
  std::sort(ps2.begin(), ps2.end());
  if (ps1 != ps2) return out;
  std::vector<std::vector<int>> key1, key2;
  std::vector<PermGroup> theta2;
  for (auto& l : x1.l) key1.push_back(detail::group_key(l.theta()));
  for (auto& l : x2.l) {
    theta2.push_back(l.theta());
    key2.push_back(detail::group_key(theta2.back()));
  }
  std::vector<Perm> found;
  Perm pos = identity_perm(k);
  do {
    bool ok = true;
    for (size_t a = 0; a < x1.l.size() && ok; ++a) {
      bool hit = false;
      for (size_t b = 0; b < x2.l.size() && !hit; ++b)
        hit = x1.p[a] == x2.p[b] && key1[a] == key2[b] && detail::transported_matches(x1.l[a], pos, x2.l[b], theta2[b]);
      ok = hit;
    }
    if (ok) found.push_back(pos);
  } while (std::next_permutation(pos.begin(), pos.end()));
  if (found.empty()) return out;
  out.group = detail::group_from_isos(k, found);
  out.rep = found.front();
  return out;
}

enum class Decision { Isomorphic, NonIsomorphic, MinorFound };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::Isomorphic: return "isomorphic";
    case Decision::NonIsomorphic: return "non-isomorphic";
    default: return "minor-found";
  }
}

struct IsoParams {
  int h = 5;
  long t = 0;  // 0 selects t_for_h(h, a, log_base)
  double a = 4.0;
  double log_base = 2.0;

  long threshold() const { return t > 0 ? t : t_for_h(h, a, log_base); }
  InitialColorParams initial() const { return {h, threshold(), a, log_base}; }
};

struct IsoStats {
  long calls = 0;
  long base_cases = 0;
  long reseeds = 0;
  long searches = 0;
  long search_nodes = 0;
  int max_depth = 0;
};

struct IsoResult {
  Decision decision = Decision::NonIsomorphic;
  std::string reason;       // why a minor was concluded
  SetCoset restricted;      // isomorphisms restricted to S1, as a coset S1 -> S2
  std::vector<int> rep;     // one full isomorphism V(G1) -> V(G2)
  std::vector<Perm> aut;    // generators of the automorphism group of (G1, χ1, S1)

  bool isomorphic() const { return decision == Decision::Isomorphic; }
};

// The set D of one recursion node, with the data needed to compare two graphs.
struct DSet {
  bool minor = false;
  std::string reason;
  VertexSet d;
  VertexSet x;                 // seed class used for D
  std::vector<int> entry;      // reseed round in which a vertex joined D, or -1
  std::vector<ComponentSeparator> comps;
  std::vector<int64_t> trace;  // invariants that isomorphic inputs share
  int reseeds = 0;
};

// D = closure of the initial class (and S), grown while G - D is connected and |D| < h.
inline DSet compute_d(const Graph& g, const std::vector<int>& colors, const VertexSet& s, const IsoParams& p) {
  DSet out;
  const long t = p.threshold();
  const int n = g.n();
  auto ic = find_initial_class(g, normalize_colors(colors), p.initial());
  if (ic.minor_found) {
    out.minor = true;
    out.reason = ic.reason;
    return out;
  }
  auto fingerprint = [&](const InitialColorOutput& o) {
    out.trace.insert(out.trace.end(), {static_cast<int64_t>(o.color), static_cast<int64_t>(o.x.size()),
                                       static_cast<int64_t>(o.gprime.n()), static_cast<int64_t>(o.chiprime.num_colors)});
  };
  fingerprint(ic);
  out.x = ic.x;
  out.entry.assign(n, -1);
  auto current = [&]() {
    std::vector<int64_t> raw(n);
    for (int v = 0; v < n; ++v) raw[v] = static_cast<int64_t>(colors[v]) * (n + 2) + out.entry[v] + 1;
    return normalize_colors(raw);
  };
  out.d = closure_t(g, current(), set_union(ic.x, s), t).d;
  while (true) {
    for (int v : out.d)
      if (out.entry[v] < 0) out.entry[v] = out.reseeds;
    out.comps = components_and_separators(g, out.d);
    out.trace.push_back(static_cast<int64_t>(out.d.size()));
    out.trace.push_back(static_cast<int64_t>(out.comps.size()));
    if (out.comps.size() != 1 || static_cast<int>(out.d.size()) >= p.h) break;
    ++out.reseeds;
    auto sub = induced_subgraph(g, out.comps[0].z);
    auto cur = current();
    std::vector<int> sc(sub.to_parent.size());
    for (size_t i = 0; i < sc.size(); ++i) sc[i] = cur[sub.to_parent[i]];
    auto ic1 = find_initial_class(sub.graph, normalize_colors(sc), p.initial());
    if (ic1.minor_found) {
      out.minor = true;
      out.reason = ic1.reason;
      return out;
    }
    fingerprint(ic1);
    VertexSet x1;
    for (int v : ic1.x) x1.push_back(sub.to_parent[v]);
    out.x = sorted_set(x1);
    out.d = closure_t(g, cur, set_union(set_union(out.d, out.x), s), t).d;
  }
  std::vector<std::pair<int, int>> sizes;
  for (auto& c : out.comps) sizes.emplace_back(static_cast<int>(c.z.size()), static_cast<int>(c.s.size()));
  std::sort(sizes.begin(), sizes.end());
  for (auto [a, b] : sizes) out.trace.insert(out.trace.end(), {a, b});
  return out;
}

namespace detail {

// Colored structure searched by individualization-refinement. Nodes 0..points-1 are the
// vertices whose bijection is reported; the others are determined by them.
struct SearchStructure {
  int n = 0;
  int points = 0;
  std::vector<int> color;                               // comparable across the two structures
  std::vector<std::vector<std::pair<int, int>>> arcs;   // (target, arc color)
};

// Isomorphism search between two structures on a jointly refined disjoint union.
class IRSearch {
 public:
  using Accept = std::function<bool(const Perm&)>;

  IRSearch(const SearchStructure& a, const SearchStructure& b, Accept accept, long* nodes)
      : a_(a), b_(b), accept_(std::move(accept)), nodes_(nodes) {
    if (a.n != b.n || a.points != b.points) throw InvariantError("search structures differ in size");
  }

  // Joint coloring with the prefix pairs individualized, or nullopt when the union is unbalanced.
  std::optional<std::vector<int>> start(const std::vector<std::pair<int, int>>& prefix) const {
    std::vector<int> raw(a_.color);
    raw.insert(raw.end(), b_.color.begin(), b_.color.end());
    std::vector<int> col = rank_keys(raw);
    if (!refine(col)) return std::nullopt;
    for (auto [x, y] : prefix)
      if (!individualize(col, x, y)) return std::nullopt;
    return col;
  }

  std::optional<Perm> find_one(const std::vector<int>& col) {
    ++*nodes_;
    int t = target(col);
    if (t < 0) {
      Perm m = leaf(col);
      if (accept_(m)) return m;
      return std::nullopt;
    }
    int x = first_in(col, t);
    for (int y = 0; y < b_.points; ++y) {
      if (col[a_.n + y] != t) continue;
      auto c2 = col;
      if (!individualize(c2, x, y)) continue;
      if (auto r = find_one(c2)) return r;
    }
    return std::nullopt;
  }

  // Generators of all accepted self-maps fixing the individualized prefix. Requires a == b.
  std::vector<Perm> automorphisms(const std::vector<int>& col) {
    std::vector<std::vector<int>> states{col};
    std::vector<int> chosen;
    while (true) {
      int t = target(states.back());
      if (t < 0) break;
      int x = first_in(states.back(), t);
      auto c2 = states.back();
      if (!individualize(c2, x, x)) throw InvariantError("self-individualization unbalanced");
      chosen.push_back(x);
      states.push_back(std::move(c2));
    }
    ++*nodes_;
    if (!accept_(identity_perm(a_.points))) throw InvariantError("identity rejected by the leaf check");
    std::vector<Perm> gens;
    const int pts = a_.points;
    for (int k = static_cast<int>(chosen.size()) - 1; k >= 0; --k) {
      const auto& st = states[k];
      int t = target(st);
      int x = chosen[k];
      std::vector<int> failed;
      for (int w = 0; w < pts; ++w) {
        if (w == x || st[w] != t) continue;
        std::vector<int> parent(pts);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
        for (auto& g : gens)
          for (int i = 0; i < pts; ++i) parent[find(i)] = find(g[i]);
        if (find(w) == find(x)) continue;
        bool dead = false;
        for (int f : failed) dead = dead || find(f) == find(w);
        if (dead) continue;
        auto c2 = st;
        std::optional<Perm> r;
        if (individualize(c2, x, w)) r = find_one(c2);
        if (r) gens.push_back(*r);
        else failed.push_back(w);
      }
    }
    return gens;
  }

 private:
  const std::vector<std::pair<int, int>>& arcs(int v) const {
    return v < a_.n ? a_.arcs[v] : b_.arcs[v - a_.n];
  }

  bool refine(std::vector<int>& col) const {
    const int total = a_.n + b_.n;
    int k = 0;
    for (int c : col) k = std::max(k, c + 1);
    std::vector<std::vector<int>> sig(total);
    std::vector<std::pair<int, int>> ms;
    while (true) {
      for (int v = 0; v < total; ++v) {
        int off = v < a_.n ? 0 : a_.n;
        ms.clear();
        for (auto [w, c] : arcs(v)) ms.emplace_back(c, col[w + off]);
        std::sort(ms.begin(), ms.end());
        auto& s = sig[v];
        s.assign(1, col[v]);
        for (auto [c, x] : ms) {
          s.push_back(c);
          s.push_back(x);
        }
      }
      int k2 = 0;
      auto next = rank_keys(sig, &k2);
      if (k2 == k) break;
      col = std::move(next);
      k = k2;
    }
    std::vector<int> bal(k, 0);
    for (int v = 0; v < a_.n; ++v) ++bal[col[v]];
    for (int v = 0; v < b_.n; ++v) --bal[col[a_.n + v]];
    return std::all_of(bal.begin(), bal.end(), [](int x) { return x == 0; });
  }

  bool individualize(std::vector<int>& col, int x, int y) const {
    int fresh = 0;
    for (int c : col) fresh = std::max(fresh, c + 1);
    col[x] = fresh;
    col[a_.n + y] = fresh;
    return refine(col);
  }

  // Smallest non-singleton point cell of the first structure, ties by color.
  int target(const std::vector<int>& col) const {
    std::map<int, int> cnt;
    for (int v = 0; v < a_.points; ++v) ++cnt[col[v]];
    int best = -1, size = 0;
    for (auto [c, s] : cnt)
      if (s > 1 && (best < 0 || s < size)) {
        best = c;
        size = s;
      }
    return best;
  }

  int first_in(const std::vector<int>& col, int t) const {
    for (int v = 0; v < a_.points; ++v)
      if (col[v] == t) return v;
    throw InvariantError("empty target cell");
  }

  Perm leaf(const std::vector<int>& col) const {
    std::map<int, int> at;
    for (int v = 0; v < b_.points; ++v) at[col[a_.n + v]] = v;
    Perm m(a_.points);
    for (int v = 0; v < a_.points; ++v) m[v] = at.at(col[v]);
    return m;
  }

  const SearchStructure& a_;
  const SearchStructure& b_;
  Accept accept_;
  long* nodes_;
};

// Elements of a small group generated by restricted generators, each with one full lift.
// gens_r[i] is the restriction of gens_f[i].
inline std::map<Perm, Perm> lift_table(const std::vector<Perm>& gens_r, const std::vector<Perm>& gens_f, int k,
                                       int n) {
  std::map<Perm, Perm> table;
  std::vector<Perm> queue{identity_perm(k)};
  table[queue[0]] = identity_perm(n);
  for (size_t q = 0; q < queue.size(); ++q) {
    Perm e = queue[q];
    Perm fe = table[e];
    for (size_t i = 0; i < gens_r.size(); ++i) {
      Perm ne = compose(e, gens_r[i]);
      if (table.count(ne)) continue;
      table[ne] = compose(fe, gens_f[i]);
      queue.push_back(ne);
      if (table.size() > 1000000) throw CapacityError("separator group too large");
    }
  }
  return table;
}

}  // namespace detail

// Recursive isomorphism engine over the D / component decomposition.
class IsoEngine {
 public:
  explicit IsoEngine(IsoParams p = {}) : p_(p) {
    if (p_.h < 2) throw InputError("h must be at least 2");
    if (p_.t < 0) throw InputError("t must be positive");
  }

  IsoStats stats;

  // Isomorphisms (G1, χ1) -> (G2, χ2) mapping S1 onto S2, for connected graphs with |Si| < h.
  IsoResult iso(const Graph& g1, const std::vector<int>& c1, const VertexSet& s1, const Graph& g2,
                const std::vector<int>& c2, const VertexSet& s2, int depth = 0) {
    ++stats.calls;
    stats.max_depth = std::max(stats.max_depth, depth);
    if (static_cast<int>(c1.size()) != g1.n() || static_cast<int>(c2.size()) != g2.n())
      throw InputError("vertex coloring size mismatch");
    check_vertex_set(g1, s1);
    check_vertex_set(g2, s2);
    if (s1 != sorted_set(s1) || s2 != sorted_set(s2)) throw InputError("restriction sets must be sorted");
    if (g1.n() == 0 || !is_connected(g1) || g2.n() == 0 || !is_connected(g2))
      throw InputError("restricted isomorphism needs connected graphs");
    if (static_cast<int>(s1.size()) >= p_.h) throw InputError("restriction set must have fewer than h vertices");
    const bool same = &g1 == &g2 && c1 == c2 && s1 == s2;

    IsoResult res;
    res.restricted.src = s1;
    res.restricted.dst = s2;
    res.restricted.group = PermGroup::trivial(static_cast<int>(s1.size()));
    if (g1.n() != g2.n() || g1.m() != g2.m() || s1.size() != s2.size()) return res;

    Call call;
    call.same = same;
    Side& A = call.side[0];
    Side& B = call.side[1];
    A.g = &g1;
    B.g = &g2;
    A.s = s1;
    B.s = s2;
    joint_colors(c1, s1, c2, s2, A.col, B.col);
    if (!same && (profile(g1, A.col) != profile(g2, B.col))) return res;

    if (g1.n() < p_.h) return base_case(A, B, res);

    A.dd = compute_d(g1, A.col, s1, p_);
    stats.reseeds += A.dd.reseeds;
    if (A.dd.minor) return minor(res, A.dd.reason);
    if (same) {
      B.dd = A.dd;
    } else {
      B.dd = compute_d(g2, B.col, s2, p_);
      if (B.dd.minor || A.dd.trace != B.dd.trace) return res;
    }
    for (auto* sd : {&A, &B}) {
      sd->ucol.resize(sd->g->n());
      for (int v = 0; v < sd->g->n(); ++v) sd->ucol[v] = {sd->col[v], sd->dd.entry[v]};
    }
    {
      std::vector<std::pair<int, int>> keys(A.ucol);
      keys.insert(keys.end(), B.ucol.begin(), B.ucol.end());
      auto r = rank_keys(keys);
      A.ucolor.assign(r.begin(), r.begin() + g1.n());
      B.ucolor.assign(r.begin() + g1.n(), r.end());
    }
    for (auto& c : A.dd.comps)
      if (static_cast<int>(c.s.size()) >= p_.h) return minor(res, "separator with at least h vertices");
    for (auto& c : B.dd.comps)
      if (static_cast<int>(c.s.size()) >= p_.h) return res;

    // Components and their isomorphism classes.
    if (!build_components(call, 0, depth, res)) return res;
    if (res.decision == Decision::MinorFound) return res;
    if (same) {
      B.comps = A.comps;
    } else if (!build_components(call, 1, depth, res)) {
      return res;
    }
    if (res.decision == Decision::MinorFound) return res;
    build_pgroups(call);
    if (!same) {
      auto cls_of = [&](const Side& s) {
        std::vector<int> v;
        for (int j : s.comps) v.push_back(call.comps[j].cls);
        std::sort(v.begin(), v.end());
        return v;
      };
      if (cls_of(A) != cls_of(B)) return res;
      auto pcls_of = [&](const Side& s) {
        std::vector<int> v;
        for (int j : s.pgroups) v.push_back(call.pgroups[j].cls);
        std::sort(v.begin(), v.end());
        return v;
      };
      if (pcls_of(A) != pcls_of(B)) return res;
    }

    // Hypergraph on D with edges, separator hyperedges and colored singletons.
    auto sa = structure(call, A);
    if (same) {
      B.dpos = A.dpos;
      B.dedges = A.dedges;
    }
    auto sb = same ? sa : structure(call, B);
    joint_search_colors(call, sa, A, sb, B);
    ++stats.searches;
    auto accept_ab = [&](const Perm& m) { return d_map_ok(call, A, B, m); };
    auto accept_aa = [&](const Perm& m) { return d_map_ok(call, A, A, m); };
    const int v1 = A.dpos[A.dd.x.front()];
    detail::IRSearch self(sa, sa, accept_aa, &stats.search_nodes);
    auto col0 = self.start({{v1, v1}});
    if (!col0) throw InvariantError("self search unbalanced");
    std::vector<Perm> dgens = self.automorphisms(*col0);
    std::optional<Perm> rep0;
    if (same) {
      rep0 = identity_perm(sa.points);
      for (int v2 : A.dd.x) {
        if (v2 == A.dd.x.front()) continue;
        if (in_orbit(dgens, *rep0, v1, A.dpos[v2])) continue;
        auto col = self.start({{v1, A.dpos[v2]}});
        if (!col) continue;
        if (auto phi = self.find_one(*col)) dgens.push_back(*phi);
      }
    } else {
      detail::IRSearch cross(sa, sb, accept_ab, &stats.search_nodes);
      for (int v2 : B.dd.x) {
        if (rep0 && in_orbit(dgens, *rep0, v1, B.dpos[v2])) continue;
        auto col = cross.start({{v1, B.dpos[v2]}});
        if (!col) continue;
        auto phi = cross.find_one(*col);
        if (!phi) continue;
        if (!rep0) rep0 = phi;
        else dgens.push_back(compose(*phi, inverse(*rep0)));
      }
    }
    if (!rep0) return res;

    // Lift the maps on D to full isomorphisms and add the automorphisms fixing D.
    std::vector<int> full_rep = same ? identity_perm(g1.n()) : lift(call, A, B, to_vertex_map(A, B, *rep0));
    std::vector<Perm> full_gens;
    for (auto& g : dgens) full_gens.push_back(lift(call, A, A, to_vertex_map(A, A, g)));
    kernel_generators(call, full_gens);
    return finish(res, s1, s2, full_rep, full_gens, g1, c1, g2, c2);
  }

 private:
  struct Comp {
    int side = 0;
    VertexSet z, s;
    Subgraph h;
    std::vector<int> color;  // local colors
    VertexSet s_local;
    std::vector<int64_t> key;
    int cls = -1;
    int rep_comp = -1;                 // class representative
    std::vector<int> psi;              // local -> representative local
    std::vector<Perm> aut;             // full local automorphism generators
    std::vector<Perm> aut_r;           // their restrictions to S positions
    LabelingCoset lc;
    PermGroup theta;
    std::vector<int> theta_key;
    std::optional<std::map<Perm, Perm>> table;
  };

  struct PGroup {
    int side = 0;
    VertexSet s;
    std::vector<int> members;  // comp indices
    MultipleLabelingCoset x;
    std::vector<int> member_classes;
    int cls = -1;
    LabelingCoset lc;
    PermGroup theta;
    std::vector<int> theta_key;
    int theta_id = -1;
  };

  struct Side {
    const Graph* g = nullptr;
    VertexSet s;
    std::vector<int> col;                     // joint effective colors
    std::vector<std::pair<int, int>> ucol;    // (color, reseed round)
    std::vector<int> ucolor;                  // ucol ranked jointly
    DSet dd;
    std::vector<int> dpos;                    // vertex -> position in D, or -1
    std::vector<int> comps;                   // indices into Call::comps
    std::vector<int> pgroups;                 // indices into Call::pgroups
    std::map<VertexSet, int> sep_to_p;
    std::vector<std::pair<int, int>> dedges;  // edges of G[D] on positions
  };

  struct Call {
    bool same = false;
    Side side[2];
    std::vector<Comp> comps;
    std::vector<int> class_rep;
    std::vector<PGroup> pgroups;
    std::vector<int> pclass_rep;
  };

  static IsoResult& minor(IsoResult& r, const std::string& why) {
    r.decision = Decision::MinorFound;
    r.reason = why;
    return r;
  }

  static void joint_colors(const std::vector<int>& c1, const VertexSet& s1, const std::vector<int>& c2,
                           const VertexSet& s2, std::vector<int>& o1, std::vector<int>& o2) {
    std::vector<std::pair<int, int>> keys;
    for (size_t v = 0; v < c1.size(); ++v) keys.emplace_back(c1[v], contains(s1, static_cast<int>(v)) ? 0 : 1);
    for (size_t v = 0; v < c2.size(); ++v) keys.emplace_back(c2[v], contains(s2, static_cast<int>(v)) ? 0 : 1);
    auto r = rank_keys(keys);
    o1.assign(r.begin(), r.begin() + c1.size());
    o2.assign(r.begin() + c1.size(), r.end());
  }

  // Sorted (color, degree) pairs.
  static std::vector<std::pair<int, int>> profile(const Graph& g, const std::vector<int>& col) {
    std::vector<std::pair<int, int>> p;
    for (int v = 0; v < g.n(); ++v) p.emplace_back(col[v], g.degree(v));
    std::sort(p.begin(), p.end());
    return p;
  }

  // Exhaustive search for graphs with fewer than h vertices.
  IsoResult& base_case(const Side& A, const Side& B, IsoResult& res) {
    ++stats.base_cases;
    const Graph& g1 = *A.g;
    const Graph& g2 = *B.g;
    const int n = g1.n();
    std::vector<Perm> all;
    Perm m(n, -1);
    std::vector<char> used(n, 0);
    std::function<void(int)> rec = [&](int v) {
      if (v == n) {
        all.push_back(m);
        return;
      }
      for (int w = 0; w < n; ++w) {
        if (used[w] || A.col[v] != B.col[w] || g1.degree(v) != g2.degree(w)) continue;
        bool ok = true;
        for (int u = 0; u < v && ok; ++u) ok = g1.has_edge(u, v) == g2.has_edge(m[u], w);
        if (!ok) continue;
        m[v] = w;
        used[w] = 1;
        rec(v + 1);
        used[w] = 0;
      }
    };
    rec(0);
    if (all.empty()) return res;
    PermGroup grp = detail::group_from_isos(n, all);
    std::vector<int> c1(A.col), c2(B.col);
    return finish(res, A.s, B.s, all.front(), grp.generators(), g1, c1, g2, c2);
  }

  static bool in_orbit(const std::vector<Perm>& gens, const Perm& rep, int v1, int target) {
    std::vector<int> orbit{v1};
    std::vector<char> seen(rep.size(), 0);
    seen[v1] = 1;
    for (size_t i = 0; i < orbit.size(); ++i)
      for (auto& g : gens)
        if (!seen[g[orbit[i]]]) {
          seen[g[orbit[i]]] = 1;
          orbit.push_back(g[orbit[i]]);
        }
    for (int o : orbit)
      if (rep[o] == target) return true;
    return false;
  }

  // Builds the components of one side and assigns isomorphism classes.
  // Returns false when the second side has a component matching no class.
  bool build_components(Call& call, int si, int depth, IsoResult& res) {
    Side& sd = call.side[si];
    const Graph& g = *sd.g;
    sd.dpos.assign(g.n(), -1);
    for (size_t i = 0; i < sd.dd.d.size(); ++i) sd.dpos[sd.dd.d[i]] = static_cast<int>(i);
    for (auto& cs : sd.dd.comps) {
      Comp c;
      c.side = si;
      c.z = cs.z;
      c.s = cs.s;
      c.h = induced_subgraph(g, set_union(cs.z, cs.s));
      c.color.resize(c.h.to_parent.size());
      for (size_t i = 0; i < c.color.size(); ++i) c.color[i] = sd.ucolor[c.h.to_parent[i]];
      for (size_t i = 0; i < c.h.to_parent.size(); ++i)
        if (contains(cs.s, c.h.to_parent[i])) c.s_local.push_back(static_cast<int>(i));
      c.key = {static_cast<int64_t>(c.z.size()), static_cast<int64_t>(c.s.size()), c.h.graph.m()};
      std::vector<std::pair<int, int>> prof;
      for (int v = 0; v < c.h.graph.n(); ++v)
        prof.emplace_back(c.color[v] * 2 + (contains(c.s_local, v) ? 0 : 1), c.h.graph.degree(v));
      std::sort(prof.begin(), prof.end());
      for (auto [a, b] : prof) c.key.insert(c.key.end(), {a, b});
      int idx = static_cast<int>(call.comps.size());
      call.comps.push_back(std::move(c));
      sd.comps.push_back(idx);
    }
    for (int idx : sd.comps) {
      bool found = false;
      for (size_t k = 0; k < call.class_rep.size() && !found; ++k) {
        int r = call.class_rep[k];
        if (call.comps[r].key != call.comps[idx].key) continue;
        Comp& c = call.comps[idx];
        const Comp& rc = call.comps[r];
        IsoResult sub = iso(c.h.graph, c.color, c.s_local, rc.h.graph, rc.color, rc.s_local, depth + 1);
        if (sub.decision == Decision::MinorFound) {
          if (si == 1) return false;
          minor(res, sub.reason);
          return true;
        }
        if (!sub.isomorphic()) continue;
        set_comp(c, static_cast<int>(k), r, sub);
        found = true;
      }
      if (found) continue;
      if (si == 1) return false;
      Comp& c = call.comps[idx];
      IsoResult sub = iso(c.h.graph, c.color, c.s_local, c.h.graph, c.color, c.s_local, depth + 1);
      if (sub.decision == Decision::MinorFound) {
        minor(res, sub.reason);
        return true;
      }
      if (!sub.isomorphic()) throw InvariantError("component not isomorphic to itself");
      call.class_rep.push_back(idx);
      set_comp(c, static_cast<int>(call.class_rep.size()) - 1, idx, sub);
    }
    // Labeling cosets need the representative's S positions.
    for (int idx : sd.comps) {
      Comp& c = call.comps[idx];
      const Comp& rc = call.comps[c.rep_comp];
      Perm rho(c.s_local.size());
      for (size_t i = 0; i < c.s_local.size(); ++i) {
        int img = c.psi[c.s_local[i]];
        rho[i] = static_cast<int>(std::lower_bound(rc.s_local.begin(), rc.s_local.end(), img) - rc.s_local.begin());
      }
      c.lc = LabelingCoset{c.s, PermGroup(static_cast<int>(c.s.size()), c.aut_r), rho};
      c.theta = c.lc.theta();
      c.theta_key = detail::group_key(c.theta);
    }
    return true;
  }

  static void set_comp(Comp& c, int cls, int rep_comp, const IsoResult& sub) {
    c.cls = cls;
    c.rep_comp = rep_comp;
    c.psi = sub.rep;
    c.aut = sub.aut;
    std::vector<int> pos(c.h.graph.n(), -1);
    for (size_t i = 0; i < c.s_local.size(); ++i) pos[c.s_local[i]] = static_cast<int>(i);
    for (auto& g : c.aut) {
      Perm r(c.s_local.size());
      for (size_t i = 0; i < c.s_local.size(); ++i) r[i] = pos[g[c.s_local[i]]];
      c.aut_r.push_back(r);
    }
  }

  void build_pgroups(Call& call) {
    for (int si = 0; si < 2; ++si) {
      Side& sd = call.side[si];
      if (call.same && si == 1) {
        sd.pgroups = call.side[0].pgroups;
        sd.sep_to_p = call.side[0].sep_to_p;
        continue;
      }
      std::map<VertexSet, std::vector<int>> by_sep;
      for (int j : sd.comps) by_sep[call.comps[j].s].push_back(j);
      for (auto& [s, members] : by_sep) {
        PGroup pg;
        pg.side = si;
        pg.s = s;
        pg.members = members;
        pg.x.v = s;
        for (int j : members) {
          const Comp& c = call.comps[j];
          pg.member_classes.push_back(c.cls);
          size_t k = 0;
          while (k < pg.x.l.size() && !(pg.x.l[k] == c.lc)) ++k;
          if (k == pg.x.l.size()) {
            pg.x.l.push_back(c.lc);
            pg.x.p.emplace_back();
          }
          pg.x.p[k].push_back(c.cls);
        }
        for (auto& q : pg.x.p) std::sort(q.begin(), q.end());
        std::sort(pg.member_classes.begin(), pg.member_classes.end());
        int idx = static_cast<int>(call.pgroups.size());
        sd.sep_to_p[s] = idx;
        sd.pgroups.push_back(idx);
        call.pgroups.push_back(std::move(pg));
      }
    }
    // Classes of separator groups and their labeling cosets.
    for (int si = 0; si < 2; ++si) {
      if (call.same && si == 1) break;
      for (int idx : call.side[si].pgroups) {
        PGroup& pg = call.pgroups[idx];
        SetCoset phi;
        for (size_t k = 0; k < call.pclass_rep.size(); ++k) {
          const PGroup& r = call.pgroups[call.pclass_rep[k]];
          if (r.s.size() != pg.s.size() || r.member_classes != pg.member_classes) continue;
          phi = multiple_labeling_coset_iso(pg.x, r.x);
          if (!phi.empty()) {
            pg.cls = static_cast<int>(k);
            break;
          }
        }
        if (pg.cls < 0) {
          phi = multiple_labeling_coset_iso(pg.x, pg.x);
          if (phi.empty()) throw InvariantError("separator group not isomorphic to itself");
          pg.cls = static_cast<int>(call.pclass_rep.size());
          call.pclass_rep.push_back(idx);
        }
        pg.lc = LabelingCoset{pg.s, phi.group, *phi.rep};
        pg.theta = pg.lc.theta();
        pg.theta_key = detail::group_key(pg.theta);
      }
    }
    std::vector<std::vector<int>> keys;
    for (auto& pg : call.pgroups) keys.push_back(pg.theta_key);
    auto ids = rank_keys(keys);
    for (size_t i = 0; i < call.pgroups.size(); ++i) call.pgroups[i].theta_id = ids[i];
  }

  static detail::SearchStructure structure(const Call& call, Side& sd) {
    const Graph& g = *sd.g;
    const int nd = static_cast<int>(sd.dd.d.size());
    detail::SearchStructure st;
    st.points = nd;
    st.n = nd + static_cast<int>(sd.pgroups.size());
    st.arcs.assign(st.n, {});
    sd.dedges.clear();
    for (int i = 0; i < nd; ++i)
      for (int w : g.adj(sd.dd.d[i])) {
        int j = sd.dpos[w];
        if (j < 0) continue;
        st.arcs[i].emplace_back(j, 0);
        if (i < j) sd.dedges.emplace_back(i, j);
      }
    for (size_t k = 0; k < sd.pgroups.size(); ++k) {
      const PGroup& pg = call.pgroups[sd.pgroups[k]];
      int node = nd + static_cast<int>(k);
      for (auto& orb : pg.lc.delta.orbits()) {
        int lab = static_cast<int>(pg.s.size());
        for (int i : orb) lab = std::min(lab, pg.lc.rho[i]);
        for (int i : orb) {
          int v = sd.dpos[pg.s[i]];
          st.arcs[node].emplace_back(v, 1 + lab);
          st.arcs[v].emplace_back(node, 1 + lab);
        }
      }
    }
    st.color.assign(st.n, 0);
    return st;
  }

  // Node colors of both structures from one joint ranking.
  static void joint_search_colors(const Call& call, detail::SearchStructure& sa, const Side& A,
                                  detail::SearchStructure& sb, const Side& B) {
    std::vector<std::array<int, 4>> keys;
    auto add = [&](const detail::SearchStructure& st, const Side& sd) {
      for (int i = 0; i < st.points; ++i) keys.push_back({0, sd.ucolor[sd.dd.d[i]], 0, 0});
      for (int idx : sd.pgroups) {
        const PGroup& pg = call.pgroups[idx];
        keys.push_back({1, pg.cls, static_cast<int>(pg.s.size()), pg.theta_id});
      }
    };
    add(sa, A);
    add(sb, B);
    auto r = rank_keys(keys);
    sa.color.assign(r.begin(), r.begin() + sa.n);
    sb.color.assign(r.begin() + sa.n, r.end());
  }

  // Exact check of a bijection D(X) -> D(Y) on positions.
  static bool d_map_ok(const Call& call, const Side& X, const Side& Y, const Perm& m) {
    const auto& dx = X.dd.d;
    const auto& dy = Y.dd.d;
    for (size_t i = 0; i < dx.size(); ++i)
      if (X.ucolor[dx[i]] != Y.ucolor[dy[m[i]]]) return false;
    if (X.dedges.size() != Y.dedges.size()) return false;
    for (auto [i, j] : X.dedges)
      if (!Y.g->has_edge(dy[m[i]], dy[m[j]])) return false;
    for (int idx : X.pgroups) {
      const PGroup& pg = call.pgroups[idx];
      VertexSet img;
      for (int v : pg.s) img.push_back(dy[m[X.dpos[v]]]);
      img = sorted_set(img);
      auto it = Y.sep_to_p.find(img);
      if (it == Y.sep_to_p.end()) return false;
      const PGroup& q = call.pgroups[it->second];
      if (q.cls != pg.cls || q.theta_id != pg.theta_id) return false;
      std::vector<int> pos(pg.s.size());
      for (size_t i = 0; i < pg.s.size(); ++i)
        pos[i] = static_cast<int>(std::lower_bound(img.begin(), img.end(), dy[m[X.dpos[pg.s[i]]]]) - img.begin());
      if (!detail::transported_matches(pg.lc, pos, q.lc, q.theta)) return false;
    }
    return true;
  }

  static std::vector<int> to_vertex_map(const Side& X, const Side& Y, const Perm& m) {
    std::vector<int> phi(X.g->n(), -1);
    for (size_t i = 0; i < X.dd.d.size(); ++i) phi[X.dd.d[i]] = Y.dd.d[m[i]];
    return phi;
  }

  static void ensure_table(Comp& c) {
    if (!c.table) c.table = detail::lift_table(c.aut_r, c.aut, static_cast<int>(c.s.size()), c.h.graph.n());
  }

  // Full isomorphism H_j1 -> H_j2 (local ids) agreeing with pos on the separator positions.
  static std::vector<int> comp_map(Call& call, int j1, int j2, const std::vector<int>& pos) {
    Comp& a = call.comps[j1];
    const Comp& b = call.comps[j2];
    Perm inv_b = inverse(b.psi);
    std::vector<int> base(a.psi.size());
    for (size_t x = 0; x < base.size(); ++x) base[x] = inv_b[a.psi[x]];
    const int k = static_cast<int>(a.s_local.size());
    Perm tau(k);
    for (int i = 0; i < k; ++i)
      tau[i] = static_cast<int>(std::lower_bound(b.s_local.begin(), b.s_local.end(), base[a.s_local[i]]) -
                                b.s_local.begin());
    Perm tau_inv = inverse(tau);
    Perm alpha(k);
    for (int i = 0; i < k; ++i) alpha[i] = tau_inv[pos[i]];
    ensure_table(a);
    auto it = a.table->find(alpha);
    if (it == a.table->end()) throw InvariantError("separator map outside the component's automorphism group");
    std::vector<int> m(base.size());
    for (size_t x = 0; x < m.size(); ++x) m[x] = base[it->second[x]];
    return m;
  }

  // Extends a bijection D(X) -> D(Y) over all components.
  static std::vector<int> lift(Call& call, const Side& X, const Side& Y, const std::vector<int>& phi) {
    std::vector<int> full = phi;
    for (int idx : X.pgroups) {
      const PGroup& pg = call.pgroups[idx];
      VertexSet img;
      for (int v : pg.s) img.push_back(phi[v]);
      img = sorted_set(img);
      auto it = Y.sep_to_p.find(img);
      if (it == Y.sep_to_p.end()) throw InvariantError("separator not mapped onto a separator");
      const PGroup& q = call.pgroups[it->second];
      std::vector<int> pos(pg.s.size());
      for (size_t i = 0; i < pg.s.size(); ++i)
        pos[i] = static_cast<int>(std::lower_bound(img.begin(), img.end(), phi[pg.s[i]]) - img.begin());
      std::vector<char> used(q.members.size(), 0);
      for (int j1 : pg.members) {
        bool done = false;
        for (size_t t = 0; t < q.members.size() && !done; ++t) {
          int j2 = q.members[t];
          const Comp& c1 = call.comps[j1];
          const Comp& c2 = call.comps[j2];
          if (used[t] || c1.cls != c2.cls || c1.theta_key != c2.theta_key ||
              !detail::transported_matches(c1.lc, pos, c2.lc, c2.theta))
            continue;
          auto m = comp_map(call, j1, j2, pos);
          for (size_t x = 0; x < m.size(); ++x) {
            int u = c1.h.to_parent[x], w = c2.h.to_parent[m[x]];
            if (full[u] >= 0 && full[u] != w) throw InvariantError("component map disagrees on the separator");
            full[u] = w;
          }
          used[t] = 1;
          done = true;
        }
        if (!done) throw InvariantError("map on D does not extend to a component");
      }
    }
    if (!is_permutation(full)) throw InvariantError("lifted map is not a bijection");
    return full;
  }

  // Automorphisms fixing D pointwise: separator stabilizers inside components and swaps of
  // interchangeable components.
  static void kernel_generators(Call& call, std::vector<Perm>& gens) {
    const Side& A = call.side[0];
    const int n = A.g->n();
    auto extend = [&](const Comp& c, const Perm& local) {
      Perm p = identity_perm(n);
      for (size_t x = 0; x < local.size(); ++x) p[c.h.to_parent[x]] = c.h.to_parent[local[x]];
      return p;
    };
    for (int j : A.comps) {
      Comp& c = call.comps[j];
      ensure_table(c);
      std::set<Perm> seen;
      for (auto& [e, fe] : *c.table)
        for (size_t i = 0; i < c.aut.size(); ++i) {
          const Perm& f = c.table->at(compose(e, c.aut_r[i]));
          Perm k = compose(compose(fe, c.aut[i]), inverse(f));
          if (!is_identity(k) && seen.insert(k).second) gens.push_back(extend(c, k));
        }
    }
    for (int idx : A.pgroups) {
      const PGroup& pg = call.pgroups[idx];
      std::vector<int> ident = identity_perm(static_cast<int>(pg.s.size()));
      for (size_t t = 1; t < pg.members.size(); ++t) {
        int j2 = pg.members[t];
        int j1 = -1;
        for (size_t u = 0; u < t; ++u) {
          const Comp& c = call.comps[pg.members[u]];
          if (c.cls == call.comps[j2].cls && c.lc == call.comps[j2].lc) j1 = pg.members[u];
        }
        if (j1 < 0) continue;
        auto m = comp_map(call, j1, j2, ident);
        const Comp& c1 = call.comps[j1];
        const Comp& c2 = call.comps[j2];
        Perm mi = inverse(m);
        Perm p = identity_perm(n);
        for (size_t x = 0; x < m.size(); ++x) {
          p[c1.h.to_parent[x]] = c2.h.to_parent[m[x]];
          p[c2.h.to_parent[x]] = c1.h.to_parent[mi[x]];
        }
        gens.push_back(p);
      }
    }
  }

  // Drops generators already generated by earlier ones.
  static std::vector<Perm> reduce_generators(int n, const std::vector<Perm>& gens) {
    std::vector<Perm> keep;
    PermGroup grp = PermGroup::trivial(n);
    for (auto& g : gens) {
      if (is_identity(g) || grp.contains(g)) continue;
      keep.push_back(g);
      grp = PermGroup(n, keep);
    }
    return keep;
  }

  static IsoResult& finish(IsoResult& res, const VertexSet& s1, const VertexSet& s2, const std::vector<int>& rep,
                           const std::vector<Perm>& gens, const Graph& g1, const std::vector<int>& c1, const Graph& g2,
                           const std::vector<int>& c2) {
    if (!is_colored_isomorphism(g1, c1, g2, c2, rep)) throw InvariantError("representative is not an isomorphism");
    for (auto& g : gens)
      if (!is_colored_isomorphism(g1, c1, g1, c1, g)) throw InvariantError("generator is not an automorphism");
    res.decision = Decision::Isomorphic;
    res.rep = rep;
    res.aut = reduce_generators(g1.n(), gens);
    std::vector<int> pos1(g1.n(), -1), pos2(g2.n(), -1);
    for (size_t i = 0; i < s1.size(); ++i) pos1[s1[i]] = static_cast<int>(i);
    for (size_t i = 0; i < s2.size(); ++i) pos2[s2[i]] = static_cast<int>(i);
    std::vector<Perm> rg;
    for (auto& g : res.aut) {
      Perm r(s1.size());
      for (size_t i = 0; i < s1.size(); ++i) {
        r[i] = pos1[g[s1[i]]];
        if (r[i] < 0) throw InvariantError("automorphism moves the restriction set");
      }
      rg.push_back(r);
    }
    res.restricted.group = PermGroup(static_cast<int>(s1.size()), rg);
    Perm r(s1.size());
    for (size_t i = 0; i < s1.size(); ++i) {
      r[i] = pos2[rep[s1[i]]];
      if (r[i] < 0) throw InvariantError("representative does not map S1 onto S2");
    }
    res.restricted.rep = r;
    return res;
  }

  IsoParams p_;
};

// Isomorphisms between connected colored graphs restricted to S1 -> S2.
inline IsoResult iso_restricted(const Graph& g1, const std::vector<int>& c1, const VertexSet& s1, const Graph& g2,
                                const std::vector<int>& c2, const VertexSet& s2, const IsoParams& p = {},
                                IsoStats* stats = nullptr) {
  IsoEngine eng(p);
  auto r = eng.iso(g1, c1, s1, g2, c2, s2);
  if (stats) *stats = eng.stats;
  return r;
}

// Isomorphism of arbitrary colored graphs; components are matched through the engine.
inline IsoResult is_isomorphic(const Graph& g1, const std::vector<int>& c1, const Graph& g2,
                               const std::vector<int>& c2, const IsoParams& p = {}, IsoStats* stats = nullptr) {
  if (static_cast<int>(c1.size()) != g1.n() || static_cast<int>(c2.size()) != g2.n())
    throw InputError("vertex coloring size mismatch");
  IsoEngine eng(p);
  IsoResult res;
  res.restricted.group = PermGroup::trivial(0);
  auto done = [&]() -> IsoResult& {
    if (stats) *stats = eng.stats;
    return res;
  };
  if (g1.n() != g2.n() || g1.m() != g2.m()) return done();

  struct Piece {
    int side;
    Subgraph h;
    std::vector<int> col;
    std::vector<int64_t> key;
    int cls = -1, rep = -1;
    std::vector<int> psi;
    std::vector<Perm> aut;
  };
  std::vector<Piece> pieces;
  std::vector<int> reps;
  std::vector<int> side_pieces[2];
  const Graph* gs[2] = {&g1, &g2};
  const std::vector<int>* cs[2] = {&c1, &c2};
  for (int si = 0; si < 2; ++si)
    for (auto& comp : connected_components(*gs[si])) {
      Piece pc;
      pc.side = si;
      pc.h = induced_subgraph(*gs[si], comp);
      for (int v : comp) pc.col.push_back((*cs[si])[v]);
      pc.key = {pc.h.graph.n(), pc.h.graph.m()};
      std::vector<std::pair<int, int>> prof;
      for (int v = 0; v < pc.h.graph.n(); ++v) prof.emplace_back(pc.col[v], pc.h.graph.degree(v));
      std::sort(prof.begin(), prof.end());
      for (auto [a, b] : prof) pc.key.insert(pc.key.end(), {a, b});
      side_pieces[si].push_back(static_cast<int>(pieces.size()));
      pieces.push_back(std::move(pc));
    }
  for (int si = 0; si < 2; ++si)
    for (int idx : side_pieces[si]) {
      Piece& pc = pieces[idx];
      for (size_t k = 0; k < reps.size() && pc.cls < 0; ++k) {
        const Piece& r = pieces[reps[k]];
        if (r.key != pc.key) continue;
        IsoResult sub = eng.iso(pc.h.graph, pc.col, {}, r.h.graph, r.col, {});
        if (sub.decision == Decision::MinorFound) {
          if (si == 0) {
            res.decision = Decision::MinorFound;
            res.reason = sub.reason;
          }
          return done();
        }
        if (!sub.isomorphic()) continue;
        pc.cls = static_cast<int>(k);
        pc.rep = reps[k];
        pc.psi = sub.rep;
        pc.aut = sub.aut;
      }
      if (pc.cls >= 0) continue;
      if (si == 1) return done();
      IsoResult sub = eng.iso(pc.h.graph, pc.col, {}, pc.h.graph, pc.col, {});
      if (sub.decision == Decision::MinorFound) {
        res.decision = Decision::MinorFound;
        res.reason = sub.reason;
        return done();
      }
      pc.cls = static_cast<int>(reps.size());
      pc.rep = idx;
      pc.psi = sub.rep;
      pc.aut = sub.aut;
      reps.push_back(idx);
    }
  std::vector<std::vector<int>> by_cls[2];
  for (int si = 0; si < 2; ++si) {
    by_cls[si].assign(reps.size(), {});
    for (int idx : side_pieces[si]) by_cls[si][pieces[idx].cls].push_back(idx);
  }
  for (size_t k = 0; k < reps.size(); ++k)
    if (by_cls[0][k].size() != by_cls[1][k].size()) return done();

  // a -> representative -> b, as a map between original vertex ids.
  auto piece_map = [&](const Piece& a, const Piece& b, std::vector<int>& out) {
    Perm ib = inverse(b.psi);
    for (size_t x = 0; x < a.psi.size(); ++x) out[a.h.to_parent[x]] = b.h.to_parent[ib[a.psi[x]]];
  };
  std::vector<int> rep(g1.n(), -1);
  std::vector<Perm> gens;
  for (size_t k = 0; k < reps.size(); ++k)
    for (size_t i = 0; i < by_cls[0][k].size(); ++i) {
      const Piece& a = pieces[by_cls[0][k][i]];
      piece_map(a, pieces[by_cls[1][k][i]], rep);
      for (auto& g : a.aut) {
        Perm p = identity_perm(g1.n());
        for (size_t x = 0; x < g.size(); ++x) p[a.h.to_parent[x]] = a.h.to_parent[g[x]];
        gens.push_back(p);
      }
      if (i > 0) {
        const Piece& prev = pieces[by_cls[0][k][i - 1]];
        Perm p = identity_perm(g1.n());
        piece_map(prev, a, p);
        piece_map(a, prev, p);
        gens.push_back(p);
      }
    }
  if (!is_colored_isomorphism(g1, c1, g2, c2, rep)) throw InvariantError("combined map is not an isomorphism");
  res.decision = Decision::Isomorphic;
  res.rep = rep;
  res.aut = gens;
  res.restricted.rep = Perm{};
  return done();
}

struct TreeDecomposition {
  std::vector<VertexSet> bags;
  std::vector<std::pair<int, int>> edges;  // (parent, child)
  bool minor_found = false;
  std::string reason;
};

namespace detail {

inline void td_node(const Graph& h, const std::vector<int>& to_root, const std::vector<int>& colors,
                    const VertexSet& s, int parent, const IsoParams& p, TreeDecomposition& out) {
  std::vector<std::pair<int, int>> keys;
  for (int v = 0; v < h.n(); ++v) keys.emplace_back(colors[v], contains(s, v) ? 0 : 1);
  std::vector<int> col = rank_keys(keys);
  int node = static_cast<int>(out.bags.size());
  out.bags.emplace_back();
  if (parent >= 0) out.edges.emplace_back(parent, node);
  auto to_root_set = [&](const VertexSet& a) {
    VertexSet r;
    for (int v : a) r.push_back(to_root[v]);
    return sorted_set(r);
  };
  if (h.n() < p.h) {
    VertexSet all(h.n());
    std::iota(all.begin(), all.end(), 0);
    out.bags[node] = to_root_set(all);
    return;
  }
  DSet dd = compute_d(h, col, s, p);
  if (dd.minor) {
    out.minor_found = true;
    out.reason = dd.reason;
    return;
  }
  out.bags[node] = to_root_set(dd.d);
  for (auto& c : dd.comps)
    if (static_cast<int>(c.s.size()) >= p.h) {
      out.minor_found = true;
      out.reason = "separator with at least h vertices";
      return;
    }
  std::vector<std::pair<int, int>> ukeys;
  for (int v = 0; v < h.n(); ++v) ukeys.emplace_back(col[v], dd.entry[v]);
  std::vector<int> ucol = rank_keys(ukeys);
  for (auto& c : dd.comps) {
    auto sub = induced_subgraph(h, set_union(c.z, c.s));
    std::vector<int> sc, tr;
    VertexSet sl;
    for (size_t i = 0; i < sub.to_parent.size(); ++i) {
      int v = sub.to_parent[i];
      sc.push_back(ucol[v]);
      tr.push_back(to_root[v]);
      if (contains(c.s, v)) sl.push_back(static_cast<int>(i));
    }
    td_node(sub.graph, tr, sc, sl, node, p, out);
    if (out.minor_found) return;
  }
}

}  // namespace detail

// Tree decomposition whose bags are the sets D of the isomorphism recursion on g.
inline TreeDecomposition tree_decomposition(const Graph& g, const std::vector<int>& colors, const IsoParams& p = {}) {
  if (static_cast<int>(colors.size()) != g.n()) throw InputError("vertex coloring size mismatch");
  TreeDecomposition out;
  int root = -1;
  for (auto& comp : connected_components(g)) {
    auto sub = induced_subgraph(g, comp);
    std::vector<int> sc;
    for (int v : comp) sc.push_back(colors[v]);
    int node = static_cast<int>(out.bags.size());
    detail::td_node(sub.graph, sub.to_parent, sc, {}, root, p, out);
    if (out.minor_found) return out;
    if (root < 0) root = node;
  }
  return out;
}

struct TreeDecompositionCheck {
  bool is_tree = false;
  bool covers_edges = false;    // every vertex and edge lies in some bag
  bool connected_occurrences = false;
  int adhesion = 0;             // max |bag(s) ∩ bag(t)| over tree edges
  int width = -1;               // max bag size minus one
  bool ok() const { return is_tree && covers_edges && connected_occurrences; }
};

inline TreeDecompositionCheck check_tree_decomposition(const Graph& g, const TreeDecomposition& td) {
  TreeDecompositionCheck r;
  const int k = static_cast<int>(td.bags.size());
  if (k == 0) {
    r.is_tree = r.covers_edges = r.connected_occurrences = g.n() == 0;
    return r;
  }
  std::vector<std::vector<int>> tadj(k);
  bool range_ok = true;
  for (auto [a, b] : td.edges) {
    if (a < 0 || b < 0 || a >= k || b >= k || a == b) {
      range_ok = false;
      continue;
    }
    tadj[a].push_back(b);
    tadj[b].push_back(a);
  }
  {
    std::vector<char> seen(k, 0);
    std::vector<int> st{0};
    seen[0] = 1;
    int cnt = 1;
    while (!st.empty()) {
      int x = st.back();
      st.pop_back();
      for (int y : tadj[x])
        if (!seen[y]) {
          seen[y] = 1;
          ++cnt;
          st.push_back(y);
        }
    }
    r.is_tree = range_ok && cnt == k && static_cast<int>(td.edges.size()) == k - 1;
  }
  std::vector<std::vector<int>> where(g.n());
  for (int i = 0; i < k; ++i) {
    r.width = std::max(r.width, static_cast<int>(td.bags[i].size()) - 1);
    for (int v : td.bags[i]) {
      if (v < 0 || v >= g.n()) return r;
      where[v].push_back(i);
    }
  }
  r.covers_edges = true;
  for (int v = 0; v < g.n(); ++v)
    if (where[v].empty()) r.covers_edges = false;
  for (auto [u, v] : g.edges()) {
    bool hit = false;
    for (int i : where[u]) hit = hit || contains(td.bags[i], v);
    if (!hit) r.covers_edges = false;
  }
  r.connected_occurrences = r.is_tree;
  for (int v = 0; v < g.n() && r.connected_occurrences; ++v) {
    int inside = 0;
    for (auto [a, b] : td.edges)
      if (contains(td.bags[a], v) && contains(td.bags[b], v)) ++inside;
    if (!where[v].empty() && inside != static_cast<int>(where[v].size()) - 1) r.connected_occurrences = false;
  }
  for (auto [a, b] : td.edges)
    if (range_ok) r.adhesion = std::max(r.adhesion, static_cast<int>(set_intersection(td.bags[a], td.bags[b]).size()));
  return r;
}

// Automorphism group of a colored graph.
inline PermGroup automorphism_group(const Graph& g, const std::vector<int>& colors, const IsoParams& p = {},
                                    Decision* decision = nullptr) {
  auto r = is_isomorphic(g, colors, g, colors, p);
  if (decision) *decision = r.decision;
  if (!r.isomorphic()) return PermGroup::trivial(g.n());
  return PermGroup(g.n(), r.aut);
}

}  // namespace mfiso
