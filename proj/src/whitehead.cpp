#include "mtorus/whitehead.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <queue>
#include <set>

namespace mtorus {

namespace {

bool has(const std::vector<Letter>& s, Letter l) {
  return std::find(s.begin(), s.end(), l) != s.end();
}

}  // namespace

Endomorphism WhiteheadAuto::as_endomorphism(int rank) const {
  const Word a = Word::generator(std::abs(multiplier)).power(multiplier > 0 ? 1 : -1);
  std::vector<Word> im;
  for (int i = 1; i <= rank; ++i) {
    Word x = Word::generator(i);
    if (i == std::abs(multiplier)) {
      im.push_back(x);
      continue;
    }
    bool fwd = has(subset, i);
    bool back = has(subset, -i);
    Word y = x;
    if (fwd) y = y * a;
    if (back) y = a.inverse() * y;
    im.push_back(y);
  }
  return Endomorphism(rank, std::move(im));
}

WhiteheadAuto WhiteheadAuto::inverse() const {
  return WhiteheadAuto{-multiplier, subset};
}

std::vector<WhiteheadAuto> whitehead_automorphisms(int rank) {
  std::vector<WhiteheadAuto> out;
  for (int m = 1; m <= rank; ++m) {
    for (Letter a : {m, -m}) {
      std::vector<Letter> others;
      for (int i = 1; i <= rank; ++i)
        if (i != m) {
          others.push_back(i);
          others.push_back(-i);
        }
      const std::size_t n = others.size();
      for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        WhiteheadAuto w;
        w.multiplier = a;
        for (std::size_t b = 0; b < n; ++b)
          if (mask >> b & 1) w.subset.push_back(others[b]);
        out.push_back(std::move(w));
      }
    }
  }
  return out;
}

std::vector<Endomorphism> nielsen_moves(int rank) {
  std::vector<Endomorphism> out;
  for (int i = 1; i <= rank; ++i) {
    for (int j = 1; j <= rank; ++j) {
      if (i == j) continue;
      for (int s : {1, -1}) {
        for (bool right : {true, false}) {
          std::vector<Word> im;
          for (int k = 1; k <= rank; ++k) {
            Word x = Word::generator(k);
            if (k == i) {
              Word y = Word::generator(j).power(s);
              x = right ? x * y : y * x;
            }
            im.push_back(x);
          }
          out.emplace_back(rank, std::move(im));
        }
      }
    }
  }
  return out;
}

namespace {

std::vector<char> core_vertices(const SubgroupGraph& g) {
  const int n = static_cast<int>(g.num_vertices());
  std::vector<int> deg(n);
  std::vector<char> core(n, 1);
  std::queue<int> q;
  for (int v = 0; v < n; ++v) {
    deg[v] = g.valence(v);
    if (deg[v] <= 1) q.push(v);
  }
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (!core[v] || deg[v] > 1) continue;
    core[v] = 0;
    for (int i = 1; i <= g.ambient_rank(); ++i)
      for (Letter l : {i, -i}) {
        int t = g.follow(v, l);
        if (t != -1 && core[t] && --deg[t] <= 1) q.push(t);
      }
  }
  return core;
}

SubgroupGraph apply_auto(const Endomorphism& a, const SubgroupGraph& g) {
  std::vector<Word> gens;
  for (const Word& b : g.basis()) gens.push_back(a.apply(b));
  return stallings(gens, g.ambient_rank());
}

}  // namespace

WhiteheadGraph whitehead_graph(const SubgroupGraph& g) {
  WhiteheadGraph w;
  w.rank = g.ambient_rank();
  const int m = 2 * w.rank;
  w.adj.assign(m, std::vector<char>(m, 0));
  auto core = core_vertices(g);
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (!core[v]) continue;
    std::vector<int> dirs;
    for (int i = 1; i <= w.rank; ++i)
      for (Letter l : {i, -i}) {
        int t = g.follow(static_cast<int>(v), l);
        if (t != -1 && core[t]) dirs.push_back(letter_key(l));
      }
    for (std::size_t a = 0; a < dirs.size(); ++a)
      for (std::size_t b = a + 1; b < dirs.size(); ++b) {
        w.adj[dirs[a]][dirs[b]] = 1;
        w.adj[dirs[b]][dirs[a]] = 1;
      }
  }
  return w;
}

namespace {

bool connected_without(const WhiteheadGraph& w, int removed) {
  const int m = static_cast<int>(w.adj.size());
  int start = -1;
  for (int v = 0; v < m; ++v)
    if (v != removed) {
      start = v;
      break;
    }
  if (start < 0) return true;
  std::vector<char> seen(m, 0);
  seen[start] = 1;
  std::queue<int> q;
  q.push(start);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int u = 0; u < m; ++u)
      if (u != removed && w.adj[v][u] && !seen[u]) {
        seen[u] = 1;
        q.push(u);
      }
  }
  for (int v = 0; v < m; ++v)
    if (v != removed && !seen[v]) return false;
  return true;
}

Letter key_letter(int key) { return (key % 2 ? -1 : 1) * (key / 2 + 1); }

}  // namespace

bool WhiteheadGraph::connected() const { return connected_without(*this, -1); }

std::optional<Letter> WhiteheadGraph::cut_vertex() const {
  for (int v = 0; v < static_cast<int>(adj.size()); ++v)
    if (!connected_without(*this, v)) return key_letter(v);
  return std::nullopt;
}

namespace {

// G = conj * inverse(graph) * conj^-1, with graph hairless.
struct Descent {
  SubgroupGraph graph;
  Endomorphism inverse;
  Word conj;
};

std::pair<SubgroupGraph, Word> strip_hair(const SubgroupGraph& g) {
  if (g.rank() == 0) return {g, Word{}};
  auto core = core_vertices(g);
  if (core[0]) return {g, Word{}};
  int v = 0;
  while (!core[v]) ++v;
  Word h = g.path_to(v);
  std::vector<Word> gens;
  for (const Word& b : g.basis()) gens.push_back(h.inverse() * b * h);
  return {stallings(gens, g.ambient_rank()), h};
}

Descent advance(const Descent& d, const Endomorphism& move, const Endomorphism& move_inverse) {
  auto [graph, h] = strip_hair(apply_auto(move, d.graph));
  Endomorphism inv = compose(d.inverse, move_inverse);
  return {std::move(graph), inv, d.conj * inv.apply(h)};
}

// Invariant of the conjugacy class of the subgroup.
std::vector<int> class_key(const SubgroupGraph& g) {
  auto core = core_vertices(g);
  auto basis = g.basis();
  std::vector<int> best;
  for (int v = 0; v < static_cast<int>(g.num_vertices()); ++v) {
    if (!core[v]) continue;
    Word p = g.path_to(v);
    std::vector<Word> gens;
    for (const Word& b : basis) gens.push_back(p.inverse() * b * p);
    auto key = stallings(gens, g.ambient_rank()).canonical_key();
    if (best.empty() || key < best) best = std::move(key);
  }
  return best;
}

std::optional<Contained> contained_witness(const Descent& d, const SubgroupGraph& original) {
  auto used = d.graph.used_generators();
  if (static_cast<int>(used.size()) == d.graph.ambient_rank()) return std::nullopt;
  Contained c;
  for (int u : used)
    c.factor_basis.push_back(d.conj * d.inverse.apply(Word::generator(u)) * d.conj.inverse());
  SubgroupGraph factor = stallings(c.factor_basis, original.ambient_rank());
  if (!contains_all(factor, original.basis())) return std::nullopt;
  return c;
}

struct MoveTable {
  std::vector<Endomorphism> fwd, bwd;
  explicit MoveTable(int r) {
    for (const auto& a : whitehead_automorphisms(r)) {
      fwd.push_back(a.as_endomorphism(r));
      bwd.push_back(a.inverse().as_endomorphism(r));
    }
  }
};

}  // namespace

Containment free_factor_containment(const SubgroupGraph& g, int depth) {
  if (depth < 0) throw Error("depth must be nonnegative");
  const int r = g.ambient_rank();
  if (index(g)) return NotContained{"finite index"};
  if (g.rank() == 0) return Contained{{Word::generator(1)}};

  const MoveTable moves(r);
  auto [start, h0] = strip_hair(g);
  Descent cur{std::move(start), Endomorphism::identity(r), h0};
  if (auto c = contained_witness(cur, g)) return *c;

  int steps = 0;
  for (;;) {
    std::size_t best = cur.graph.core_size();
    int best_i = -1;
    for (std::size_t i = 0; i < moves.fwd.size(); ++i) {
      std::size_t size = apply_auto(moves.fwd[i], cur.graph).core_size();
      if (size < best) {
        best = size;
        best_i = static_cast<int>(i);
      }
    }
    if (best_i < 0) break;
    if (steps == depth) return ContainmentUnknown{"Whitehead descent depth exhausted"};
    ++steps;
    cur = advance(cur, moves.fwd[best_i], moves.bwd[best_i]);
    if (auto c = contained_witness(cur, g)) return *c;
  }

  WhiteheadGraph wg = whitehead_graph(cur.graph);
  if (wg.connected() && !wg.cut_vertex()) {
    return NotContained{"Whitehead graph at minimal complexity " +
                        std::to_string(cur.graph.core_size()) + " has no cut vertex"};
  }
  // Peak reduction: a containing factor shows up among equal-complexity moves.
  std::set<std::vector<int>> seen{class_key(cur.graph)};
  std::queue<Descent> q;
  q.push(cur);
  const std::size_t level = cur.graph.core_size();
  const std::size_t budget = 5000;
  while (!q.empty()) {
    Descent d = std::move(q.front());
    q.pop();
    for (std::size_t i = 0; i < moves.fwd.size(); ++i) {
      if (apply_auto(moves.fwd[i], d.graph).core_size() != level) continue;
      Descent next = advance(d, moves.fwd[i], moves.bwd[i]);
      if (!seen.insert(class_key(next.graph)).second) continue;
      if (auto c = contained_witness(next, g)) return *c;
      if (seen.size() > budget) return ContainmentUnknown{"equal-complexity orbit too large"};
      q.push(std::move(next));
    }
  }
  return NotContained{"equal-complexity Whitehead orbit of size " + std::to_string(seen.size()) +
                      " exhausted"};
}

bool contained_by_exhaustion(const SubgroupGraph& g, std::size_t max_states) {
  const int r = g.ambient_rank();
  const MoveTable moves(r);
  std::set<std::vector<int>> seen;
  std::queue<SubgroupGraph> q;
  // Breadth-first over all moves that do not increase complexity.
  SubgroupGraph start = strip_hair(g).first;
  seen.insert(class_key(start));
  q.push(start);
  while (!q.empty() && seen.size() < max_states) {
    SubgroupGraph cur = std::move(q.front());
    q.pop();
    if (static_cast<int>(cur.used_generators().size()) < r) return true;
    for (const auto& a : moves.fwd) {
      SubgroupGraph img = strip_hair(apply_auto(a, cur)).first;
      if (img.core_size() > cur.core_size()) continue;
      if (!seen.insert(class_key(img)).second) continue;
      q.push(std::move(img));
    }
  }
  return false;
}

namespace {

struct BasisLess {
  bool operator()(const std::vector<Word>& a, const std::vector<Word>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

}  // namespace

std::optional<FreeFactorSystem> search_reduction(const Endomorphism& phi, int depth) {
  const int r = phi.rank();
  const auto moves = nielsen_moves(r);
  std::set<std::vector<Word>, BasisLess> seen;
  std::vector<std::vector<Word>> frontier{Endomorphism::identity(r).images()};
  seen.insert(frontier.front());
  std::vector<std::vector<Word>> bases = frontier;
  for (int d = 0; d < depth; ++d) {
    std::vector<std::vector<Word>> next;
    for (const auto& b : frontier) {
      Endomorphism as_map(r, b);
      for (const auto& mv : moves) {
        // Precompose: the new basis is as_map(mv(x_i)).
        auto nb = compose(as_map, mv).images();
        if (seen.insert(nb).second) next.push_back(nb);
      }
    }
    bases.insert(bases.end(), next.begin(), next.end());
    frontier = std::move(next);
  }

  // Memoized conjugate-into tests between factors, keyed by canonical graphs.
  std::map<std::vector<int>, int> factor_id;
  std::vector<SubgroupGraph> factors;
  auto intern = [&](const std::vector<Word>& gens) {
    SubgroupGraph g = stallings(gens, r);
    auto key = g.canonical_key();
    auto it = factor_id.find(key);
    if (it != factor_id.end()) return it->second;
    factor_id[key] = static_cast<int>(factors.size());
    factors.push_back(std::move(g));
    return static_cast<int>(factors.size()) - 1;
  };
  std::map<std::pair<int, int>, std::optional<Word>> memo;
  std::map<int, SubgroupGraph> images;
  auto maps_into = [&](int a, int b) -> const std::optional<Word>& {
    auto key = std::make_pair(a, b);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    if (!images.count(a)) {
      std::vector<Word> im;
      for (const Word& w : factors[a].basis()) im.push_back(phi.apply(w));
      images[a] = stallings(im, r);
    }
    return memo[key] = conjugate_into(images[a], factors[b]);
  };

  const int full = (1 << r) - 1;
  for (const auto& basis : bases) {
    std::vector<int> by_mask(full + 1, -1);
    for (int mask = 1; mask <= full; ++mask) {
      std::vector<Word> gens;
      for (int i = 0; i < r; ++i)
        if (mask >> i & 1) gens.push_back(basis[i]);
      by_mask[mask] = intern(gens);
    }
    // Single invariant factor.
    for (int mask = 1; mask < full; ++mask) {
      int a = by_mask[mask];
      if (const auto& x = maps_into(a, a)) {
        FreeFactorSystem sys{{factors[a]}, {*x}, "invariant free factor (Nielsen search)"};
        if (sys.verify(phi)) return sys;
      }
    }
    // Cycles of disjoint factors of length 2 and 3.
    for (int m1 = 1; m1 < full; ++m1) {
      for (int m2 = 1; m2 < full; ++m2) {
        if (m1 & m2) continue;
        int a = by_mask[m1], b = by_mask[m2];
        const auto& xa = maps_into(a, b);
        if (!xa) continue;
        if (const auto& xb = maps_into(b, a)) {
          FreeFactorSystem sys{{factors[a], factors[b]}, {*xa, *xb},
                               "2-cycle of free factors (Nielsen search)"};
          if (sys.verify(phi)) return sys;
        }
        for (int m3 = 1; m3 < full; ++m3) {
          if ((m1 | m2) & m3) continue;
          int c = by_mask[m3];
          const auto& xb = maps_into(b, c);
          if (!xb) continue;
          if (const auto& xc = maps_into(c, a)) {
            FreeFactorSystem sys{{factors[a], factors[b], factors[c]}, {*xa, *xb, *xc},
                                 "3-cycle of free factors (Nielsen search)"};
            if (sys.verify(phi)) return sys;
          }
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace mtorus
