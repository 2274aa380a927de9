#pragma once

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "graph.hpp"

namespace mfiso {

using Perm = std::vector<int>;  // image array: i -> p[i]
using BigInt = boost::multiprecision::cpp_int;

inline Perm identity_perm(int n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline bool is_identity(const Perm& p) {
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] != static_cast<int>(i)) return false;
  return true;
}

inline bool is_permutation(const Perm& p) {
  std::vector<char> seen(p.size(), 0);
  for (int x : p) {
    if (x < 0 || x >= static_cast<int>(p.size()) || seen[x]) return false;
    seen[x] = 1;
  }
  return true;
}

// First p, then q.
inline Perm compose(const Perm& p, const Perm& q) {
  Perm r(p.size());
  for (size_t i = 0; i < p.size(); ++i) r[i] = q[p[i]];
  return r;
}

inline Perm inverse(const Perm& p) {
  Perm r(p.size());
  for (size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<int>(i);
  return r;
}

// Permutation from disjoint cycles, e.g. {{0,1},{2,3,4}}.
inline Perm from_cycles(int n, const std::vector<std::vector<int>>& cycles) {
  Perm p = identity_perm(n);
  for (auto& c : cycles)
    for (size_t i = 0; i < c.size(); ++i) p[c[i]] = c[(i + 1) % c.size()];
  if (!is_permutation(p)) throw InputError("cycles are not disjoint");
  return p;
}

// Base and strong generating set built by deterministic Schreier-Sims.
class PermGroup {
 public:
  PermGroup() = default;

  PermGroup(int degree, std::vector<Perm> gens, const std::vector<int>& base_prefix = {}) : degree_(degree) {
    for (auto& g : gens) {
      if (static_cast<int>(g.size()) != degree || !is_permutation(g)) throw InputError("generator is not a permutation");
      if (!is_identity(g)) gens_.push_back(g);
    }
    std::sort(gens_.begin(), gens_.end());
    gens_.erase(std::unique(gens_.begin(), gens_.end()), gens_.end());
    for (int b : base_prefix) {
      if (b < 0 || b >= degree) throw InputError("base point out of range");
      if (std::find(base_.begin(), base_.end(), b) == base_.end()) add_level(b);
    }
    build();
  }

  static PermGroup trivial(int degree) { return PermGroup(degree, {}); }

  static PermGroup symmetric(int degree) {
    std::vector<Perm> g;
    if (degree >= 2) {
      g.push_back(from_cycles(degree, {{0, 1}}));
      std::vector<int> cyc(degree);
      std::iota(cyc.begin(), cyc.end(), 0);
      g.push_back(from_cycles(degree, {cyc}));
    }
    return PermGroup(degree, g);
  }

  int degree() const { return degree_; }
  const std::vector<Perm>& generators() const { return gens_; }
  const std::vector<int>& base() const { return base_; }
  int num_levels() const { return static_cast<int>(base_.size()); }
  const std::vector<int>& fundamental_orbit(int i) const { return levels_[i].orbit; }
  // u with u[base(i)] == point, or nullptr when point is outside the i-th fundamental orbit.
  const Perm* transversal(int i, int point) const {
    int k = levels_[i].index[point];
    return k < 0 ? nullptr : &levels_[i].trans[k];
  }

  BigInt order() const {
    BigInt r = 1;
    for (auto& l : levels_) r *= static_cast<unsigned>(l.orbit.size());
    return r;
  }

  uint64_t order_u64() const {
    BigInt o = order();
    if (o > BigInt(std::numeric_limits<int64_t>::max())) throw CapacityError("group order exceeds 64 bits");
    return static_cast<uint64_t>(o);
  }

  bool contains(const Perm& p) const {
    if (static_cast<int>(p.size()) != degree_ || !is_permutation(p)) return false;
    auto [r, lvl] = sift(p, 0);
    return lvl == num_levels() && is_identity(r);
  }

  Partition orbits() const {
    std::vector<int> parent(degree_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (auto& g : gens_)
      for (int i = 0; i < degree_; ++i) parent[find(i)] = find(g[i]);
    std::map<int, VertexSet> by_root;
    for (int i = 0; i < degree_; ++i) by_root[find(i)].push_back(i);
    Partition p;
    for (auto& [r, s] : by_root) p.push_back(s);
    std::sort(p.begin(), p.end());
    return p;
  }

  // Elements fixing every point of a.
  PermGroup pointwise_stabilizer(const VertexSet& a) const {
    PermGroup h(degree_, gens_, a);
    std::vector<Perm> st;
    for (auto& g : h.strong_) {
      bool fixes = true;
      for (int x : a)
        if (g[x] != x) fixes = false;
      if (fixes) st.push_back(g);
    }
    return PermGroup(degree_, st);
  }

  bool is_subgroup_of(const PermGroup& o) const {
    for (auto& g : gens_)
      if (!o.contains(g)) return false;
    return true;
  }

  bool operator==(const PermGroup& o) const {
    return degree_ == o.degree_ && order() == o.order() && is_subgroup_of(o);
  }

  // All elements, lexicographically sorted; throws when the order exceeds cap.
  std::vector<Perm> elements(uint64_t cap = 1000000) const {
    if (order() > BigInt(cap)) throw CapacityError("group too large to enumerate");
    std::vector<Perm> out{identity_perm(degree_)};
    for (int i = num_levels() - 1; i >= 0; --i) {
      std::vector<Perm> next;
      next.reserve(out.size() * levels_[i].trans.size());
      for (auto& u : levels_[i].trans)
        for (auto& x : out) next.push_back(compose(x, u));
      out.swap(next);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Returns (residue, level reached); the residue is identity at full depth iff p is a member.
  std::pair<Perm, int> sift(Perm p, int start) const {
    for (int i = start; i < num_levels(); ++i) {
      int x = p[base_[i]];
      int k = levels_[i].index[x];
      if (k < 0) return {p, i};
      p = compose(p, levels_[i].inv[k]);
    }
    return {p, num_levels()};
  }

 private:
  struct Level {
    std::vector<int> orbit;
    std::vector<int> index;  // point -> position in orbit or -1
    std::vector<Perm> trans, inv;
    std::vector<int> gens;  // indices into strong_ of generators first added at this level
  };

  void add_level(int b) {
    base_.push_back(b);
    levels_.emplace_back();
  }

  std::vector<int> gens_from(int i) const {
    std::vector<int> r;
    for (int j = i; j < num_levels(); ++j) r.insert(r.end(), levels_[j].gens.begin(), levels_[j].gens.end());
    std::sort(r.begin(), r.end());
    return r;
  }

  void rebuild_orbit(int i) {
    Level& l = levels_[i];
    l.orbit.assign(1, base_[i]);
    l.index.assign(degree_, -1);
    l.index[base_[i]] = 0;
    l.trans.assign(1, identity_perm(degree_));
    l.inv.assign(1, identity_perm(degree_));
    auto gs = gens_from(i);
    for (size_t q = 0; q < l.orbit.size(); ++q) {
      int x = l.orbit[q];
      for (int gi : gs) {
        const Perm& s = strong_[gi];
        int y = s[x];
        if (l.index[y] >= 0) continue;
        l.index[y] = static_cast<int>(l.orbit.size());
        l.orbit.push_back(y);
        Perm u = compose(l.trans[l.index[x]], s);
        l.inv.push_back(inverse(u));
        l.trans.push_back(std::move(u));
      }
    }
  }

  void add_strong(int lvl, const Perm& g) {
    if (lvl == num_levels()) {
      int b = 0;
      while (g[b] == b) ++b;
      add_level(b);
    }
    levels_[lvl].gens.push_back(static_cast<int>(strong_.size()));
    strong_.push_back(g);
  }

  void build() {
    for (auto& g : gens_) {
      int lvl = 0;
      while (lvl < num_levels() && g[base_[lvl]] == base_[lvl]) ++lvl;
      add_strong(lvl, g);
    }
    int i = num_levels() - 1;
    while (i >= 0) {
      rebuild_orbit(i);
      bool added = false;
      auto gs = gens_from(i);
      const Level& l = levels_[i];
      for (size_t q = 0; q < l.orbit.size() && !added; ++q) {
        for (int gi : gs) {
          const Perm& s = strong_[gi];
          int y = s[l.orbit[q]];
          Perm h = compose(compose(l.trans[q], s), l.inv[l.index[y]]);
          if (is_identity(h)) continue;
          auto [r, j] = sift(h, i + 1);
          if (j == num_levels() && is_identity(r)) continue;
          add_strong(j, r);
          for (int k = i + 1; k < j && k < num_levels(); ++k) rebuild_orbit(k);
          i = j;
          added = true;
          break;
        }
      }
      if (!added) --i;
    }
  }

  int degree_ = 0;
  std::vector<Perm> gens_;
  std::vector<Perm> strong_;
  std::vector<int> base_;
  std::vector<Level> levels_;
};

// group · rep, i.e. all maps x -> rep[g[x]].
struct Coset {
  PermGroup group;
  std::optional<Perm> rep;

  bool empty() const { return !rep.has_value(); }
  bool contains(const Perm& p) const { return rep && group.contains(compose(p, inverse(*rep))); }
};

inline std::vector<Perm> enumerate_small(const Coset& c, uint64_t cap = 1000000) {
  if (c.empty()) return {};
  auto els = c.group.elements(cap);
  for (auto& g : els) g = compose(g, *c.rep);
  std::sort(els.begin(), els.end());
  els.erase(std::unique(els.begin(), els.end()), els.end());
  return els;
}

// Bijections between two sorted vertex sets, stored on positions:
// the element for g in group maps src[i] to dst[rep[g[i]]].
struct SetCoset {
  VertexSet src, dst;
  PermGroup group;  // acts on positions 0..|src|-1
  std::optional<Perm> rep;

  bool empty() const { return !rep.has_value(); }

  // Map on original ids for a position permutation g of the group.
  std::vector<std::pair<int, int>> mapping(const Perm& g) const {
    std::vector<std::pair<int, int>> m;
    for (size_t i = 0; i < src.size(); ++i) m.emplace_back(src[i], dst[(*rep)[g[i]]]);
    return m;
  }

  // Position map of an explicit bijection src -> dst, or nullopt if it is not one.
  std::optional<Perm> to_positions(const std::vector<std::pair<int, int>>& m) const {
    if (m.size() != src.size()) return std::nullopt;
    Perm p(src.size(), -1);
    for (auto [a, b] : m) {
      auto ia = std::lower_bound(src.begin(), src.end(), a);
      auto ib = std::lower_bound(dst.begin(), dst.end(), b);
      if (ia == src.end() || *ia != a || ib == dst.end() || *ib != b) return std::nullopt;
      p[ia - src.begin()] = static_cast<int>(ib - dst.begin());
    }
    if (!is_permutation(p)) return std::nullopt;
    return p;
  }

  bool contains(const std::vector<std::pair<int, int>>& m) const {
    if (empty()) return false;
    auto p = to_positions(m);
    return p && group.contains(compose(*p, inverse(*rep)));
  }
};

// Restriction of a coset on {0..n-1} to an invariant subset a.
inline SetCoset coset_restrict(const Coset& c, VertexSet a) {
  a = sorted_set(std::move(a));
  int n = c.group.degree();
  for (int x : a)
    if (x < 0 || x >= n) throw InputError("restriction set out of range");
  std::vector<int> pos(n, -1);
  for (size_t i = 0; i < a.size(); ++i) pos[a[i]] = static_cast<int>(i);
  std::vector<Perm> gens;
  for (auto& g : c.group.generators()) {
    Perm r(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
      if (pos[g[a[i]]] < 0) throw InputError("restriction set is not invariant");
      r[i] = pos[g[a[i]]];
    }
    gens.push_back(r);
  }
  SetCoset out;
  out.src = a;
  out.group = PermGroup(static_cast<int>(a.size()), gens);
  if (c.empty()) {
    out.dst = a;
    return out;
  }
  VertexSet img;
  for (int x : a) img.push_back((*c.rep)[x]);
  out.dst = sorted_set(img);
  if (out.dst.size() != a.size()) throw InputError("representative is not injective on the set");
  Perm r(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    r[i] = static_cast<int>(std::lower_bound(out.dst.begin(), out.dst.end(), (*c.rep)[a[i]]) - out.dst.begin());
  out.rep = r;
  return out;
}

// Labeling coset Δρ of a domain: maps domain[i] to label rho[δ[i]] in 0..k-1.
struct LabelingCoset {
  VertexSet domain;
  PermGroup delta;  // on positions
  Perm rho;         // position -> label

  // Θ = ρ⁻¹Δρ acting on labels.
  PermGroup theta() const {
    std::vector<Perm> gens;
    Perm ri = inverse(rho);
    for (auto& d : delta.generators()) gens.push_back(compose(compose(ri, d), rho));
    return PermGroup(static_cast<int>(rho.size()), gens);
  }

  bool operator==(const LabelingCoset& o) const {
    if (domain != o.domain || !(delta == o.delta)) return false;
    return delta.contains(compose(rho, inverse(o.rho)));
  }
};

inline std::vector<Perm> enumerate_small(const LabelingCoset& c, uint64_t cap = 1000000) {
  return enumerate_small(Coset{c.delta, c.rho}, cap);
}

namespace detail {

struct PermLess {
  bool operator()(const Perm& a, const Perm& b) const { return a < b; }
};

inline PermGroup normal_closure(const PermGroup& g, const std::vector<Perm>& xs) {
  std::vector<Perm> gens;
  for (auto& x : xs)
    if (!is_identity(x)) gens.push_back(x);
  PermGroup n(g.degree(), gens);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& s : g.generators()) {
      Perm si = inverse(s);
      for (size_t i = 0; i < gens.size(); ++i) {
        Perm c = compose(compose(si, gens[i]), s);
        if (!n.contains(c)) {
          gens.push_back(c);
          n = PermGroup(g.degree(), gens);
          changed = true;
        }
      }
    }
  }
  return n;
}

inline PermGroup derived_subgroup(const PermGroup& g) {
  std::vector<Perm> comms;
  auto& gs = g.generators();
  for (size_t i = 0; i < gs.size(); ++i)
    for (size_t j = i + 1; j < gs.size(); ++j) {
      Perm a = gs[i], b = gs[j];
      comms.push_back(compose(compose(compose(inverse(a), inverse(b)), a), b));
    }
  return normal_closure(g, comms);
}

inline void prime_factors(uint64_t x, std::vector<uint64_t>& out) {
  for (uint64_t p = 2; p * p <= x; ++p)
    while (x % p == 0) {
      out.push_back(p);
      x /= p;
    }
  if (x > 1) out.push_back(x);
}

// Faithful permutation representation of g/n on the cosets of the normal subgroup n.
inline PermGroup quotient(const PermGroup& g, const PermGroup& n, uint64_t cap) {
  auto els = g.elements(cap);
  auto nel = n.elements(cap);
  std::map<Perm, int, PermLess> coset_of;
  int k = 0;
  for (auto& x : els) {
    if (coset_of.count(x)) continue;
    for (auto& y : nel) coset_of[compose(x, y)] = k;
    ++k;
  }
  std::vector<Perm> rep(k);
  for (auto& [x, c] : coset_of)
    if (rep[c].empty()) rep[c] = x;
  std::vector<Perm> gens;
  for (auto& s : g.generators()) {
    Perm p(k);
    for (int c = 0; c < k; ++c) p[c] = coset_of.at(compose(s, rep[c]));
    gens.push_back(p);
  }
  return PermGroup(k, gens);
}

inline void composition_factors_rec(const PermGroup& g, uint64_t cap, std::vector<uint64_t>& out) {
  uint64_t ord = g.order_u64();
  if (ord == 1) return;
  PermGroup d = derived_subgroup(g);
  uint64_t dord = d.order_u64();
  if (dord < ord) {
    prime_factors(ord / dord, out);
    composition_factors_rec(d, cap, out);
    return;
  }
  // Perfect group: split along the smallest normal closure of a single element.
  auto els = g.elements(cap);
  std::set<Perm, PermLess> seen;
  std::optional<PermGroup> best;
  for (auto& x : els) {
    if (is_identity(x) || seen.count(x)) continue;
    for (auto& y : els) seen.insert(compose(compose(inverse(y), x), y));
    PermGroup nc = normal_closure(g, {x});
    if (nc.order_u64() < ord && (!best || nc.order_u64() < best->order_u64())) best = nc;
  }
  if (!best) {
    out.push_back(ord);
    return;
  }
  composition_factors_rec(*best, cap, out);
  composition_factors_rec(quotient(g, *best, cap), cap, out);
}

}  // namespace detail

// Orders of the composition factors, as a sorted multiset.
inline std::vector<uint64_t> composition_factors_small(const PermGroup& g, uint64_t max_order = 10000) {
  if (g.order() > BigInt(max_order)) throw CapacityError("group too large for composition factors");
  std::vector<uint64_t> out;
  detail::composition_factors_rec(g, max_order, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mfiso
