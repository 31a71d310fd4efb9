#include "mtorus/train_track.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <tuple>

#include "mtorus/whitehead.hpp"

namespace mtorus {

Dir direction_image(const GraphMap& f, Dir d) {
  const EdgePath& im = f.image[edge_of(d)];
  if (im.empty()) return 0;
  return d > 0 ? im.front() : -im.back();
}

namespace {

Dir iterate(const GraphMap& f, Dir d, int k) {
  for (int i = 0; i < k && d != 0; ++i) d = direction_image(f, d);
  return d;
}

}  // namespace

Gates compute_gates(const GraphMap& f) {
  const int n = 2 * f.num_edges();
  const int k = n * n;
  Gates g;
  g.gate.assign(n, -1);
  std::map<std::pair<int, Dir>, int> ids;
  for (int i = 0; i < n; ++i) {
    Dir d = index_dir(i);
    Dir t = iterate(f, d, k);
    // Directions with trivial image each get their own gate.
    auto key = t == 0 ? std::make_pair(-1 - i, 0) : std::make_pair(f.origin(d), t);
    auto [it, fresh] = ids.emplace(key, g.count);
    if (fresh) ++g.count;
    g.gate[i] = it->second;
  }
  return g;
}

std::optional<int> degeneration_time(const GraphMap& f, Dir a, Dir b) {
  const int n = 2 * f.num_edges();
  for (int k = 1; k <= n * n; ++k) {
    a = direction_image(f, a);
    b = direction_image(f, b);
    if (a == 0 || b == 0) return std::nullopt;
    if (a == b) return k;
  }
  return std::nullopt;
}

std::optional<std::size_t> legality(const GraphMap& f, const Gates& g, const EdgePath& p) {
  (void)f;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (p[i + 1] == -p[i] || g.same(-p[i], p[i + 1])) return i;
  }
  return std::nullopt;
}

bool is_injective(const Endomorphism& phi) {
  for (const Word& w : phi.images())
    if (w.empty()) return false;
  return stallings(phi.images(), phi.rank()).rank() == phi.rank();
}

namespace {

struct Components {
  std::vector<int> of_vertex;  // -1 if not touched by the edge set
  int count = 0;
  std::vector<int> edges, vertices;
};

Components components(const GraphMap& f, const std::vector<char>& in) {
  std::vector<int> parent(f.num_vertices);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<char> touched(f.num_vertices, 0);
  for (int e = 0; e < f.num_edges(); ++e) {
    if (!in[e]) continue;
    touched[f.ends[e][0]] = touched[f.ends[e][1]] = 1;
    parent[find(f.ends[e][0])] = find(f.ends[e][1]);
  }
  Components c;
  c.of_vertex.assign(f.num_vertices, -1);
  std::map<int, int> id;
  for (int v = 0; v < f.num_vertices; ++v) {
    if (!touched[v]) continue;
    auto [it, fresh] = id.emplace(find(v), c.count);
    if (fresh) {
      ++c.count;
      c.edges.push_back(0);
      c.vertices.push_back(0);
    }
    c.of_vertex[v] = it->second;
    ++c.vertices[it->second];
  }
  for (int e = 0; e < f.num_edges(); ++e)
    if (in[e]) ++c.edges[c.of_vertex[f.ends[e][0]]];
  return c;
}

bool has_cycle(const GraphMap& f, const std::vector<char>& in) {
  auto c = components(f, in);
  for (int i = 0; i < c.count; ++i)
    if (c.edges[i] >= c.vertices[i]) return true;
  return false;
}

}  // namespace

std::optional<std::vector<char>> invariant_subgraph(const GraphMap& f) {
  std::optional<std::vector<char>> best;
  int best_size = -1;
  for (int e = 0; e < f.num_edges(); ++e) {
    auto in = f.invariant_closure({e});
    int size = static_cast<int>(std::count(in.begin(), in.end(), 1));
    if (size == f.num_edges() || !has_cycle(f, in)) continue;
    if (size > best_size) {
      best_size = size;
      best = in;
    }
  }
  if (!best) return best;
  // Union of all proper closures that stay proper.
  for (int e = 0; e < f.num_edges(); ++e) {
    auto in = f.invariant_closure({e});
    std::vector<char> u = *best;
    for (int x = 0; x < f.num_edges(); ++x) u[x] = u[x] || in[x];
    if (std::count(u.begin(), u.end(), 1) < f.num_edges()) best = u;
  }
  return best;
}

std::optional<ReductionWitness> reduction_from_subgraph(const GraphMap& f,
                                                        const std::vector<char>& in,
                                                        const Endomorphism& phi) {
  auto comp = components(f, in);
  const int r = f.rank;
  // Free factor carried by each component with a cycle.
  std::vector<std::optional<SubgroupGraph>> factor(comp.count);
  std::vector<int> root(comp.count, -1);
  for (int v = 0; v < f.num_vertices; ++v)
    if (comp.of_vertex[v] >= 0 && root[comp.of_vertex[v]] < 0) root[comp.of_vertex[v]] = v;
  for (int c = 0; c < comp.count; ++c) {
    if (comp.edges[c] < comp.vertices[c]) continue;
    const int v0 = root[c];
    // Spanning tree of the component by BFS.
    std::vector<EdgePath> path(f.num_vertices);
    std::vector<char> seen(f.num_vertices, 0);
    std::vector<char> tree(f.num_edges(), 0);
    std::vector<int> queue{v0};
    seen[v0] = 1;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      int v = queue[i];
      for (Dir d : f.directions_at(v)) {
        if (!in[edge_of(d)]) continue;
        int u = f.terminus(d);
        if (seen[u]) continue;
        seen[u] = 1;
        tree[edge_of(d)] = 1;
        path[u] = path[v];
        path[u].push_back(d);
        queue.push_back(u);
      }
    }
    const Word to_root = f.word(f.tree_path(f.base, v0));
    std::vector<Word> gens;
    for (int e = 0; e < f.num_edges(); ++e) {
      if (!in[e] || tree[e]) continue;
      EdgePath loop = path[f.ends[e][0]];
      loop.push_back(dir_of(e));
      EdgePath back = reversed(path[f.ends[e][1]]);
      loop.insert(loop.end(), back.begin(), back.end());
      gens.push_back(to_root * f.word(loop) * to_root.inverse());
    }
    factor[c] = stallings(gens, r);
  }
  // Component containing the image of each root.
  std::vector<int> next(comp.count, -1);
  for (int c = 0; c < comp.count; ++c)
    if (factor[c]) next[c] = comp.of_vertex[f.vertex_image[root[c]]];
  int start = -1;
  for (int c = 0; c < comp.count && start < 0; ++c)
    if (factor[c]) start = c;
  if (start < 0) return std::nullopt;
  // Walk until a component repeats; the repeated part is a cycle.
  std::vector<int> order;
  std::vector<int> pos(comp.count, -1);
  int c = start;
  while (c >= 0 && factor[c] && pos[c] < 0) {
    pos[c] = static_cast<int>(order.size());
    order.push_back(c);
    c = next[c];
  }
  if (c < 0 || !factor[c]) return std::nullopt;
  std::vector<int> cycle(order.begin() + pos[c], order.end());
  FreeFactorSystem sys;
  for (int x : cycle) sys.factors.push_back(*factor[x]);
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const SubgroupGraph& a = sys.factors[i];
    const SubgroupGraph& b = sys.factors[(i + 1) % cycle.size()];
    std::vector<Word> im;
    for (const Word& w : a.basis()) im.push_back(phi.apply(w));
    auto x = conjugate_into(stallings(im, r), b);
    if (!x) return std::nullopt;
    sys.conjugators.push_back(*x);
  }
  const int count = static_cast<int>(std::count(in.begin(), in.end(), 1));
  sys.provenance = "invariant subgraph (" + std::to_string(count) + " of " +
                   std::to_string(f.num_edges()) + " edges)";
  if (!sys.verify(phi)) return std::nullopt;
  return ReductionWitness{sys, sys.provenance};
}

void normalize(GraphMap& f) {
  f.tighten();
  for (bool changed = true; changed;) {
    changed = false;
    for (int v = 0; v < f.num_vertices && !changed; ++v) {
      if (f.valence(v) == 1) {
        f.remove_hair(v);
        changed = true;
      }
    }
    for (int e = 0; e < f.num_edges() && !changed; ++e) {
      if (f.image[e].empty()) {
        if (f.ends[e][0] == f.ends[e][1]) throw Error("endomorphism is not injective");
        f.collapse_forest({e});
        changed = true;
      }
    }
    for (int v = 0; v < f.num_vertices && !changed; ++v) {
      auto dirs = f.directions_at(v);
      if (dirs.size() == 2 && edge_of(dirs[0]) != edge_of(dirs[1])) {
        // Collapse the edge of smaller eigen-length so the stretch factor does not grow.
        TransitionData t = transition_matrix(f);
        if (t.irreducible && t.eigenmetric[edge_of(dirs[0])] < t.eigenmetric[edge_of(dirs[1])])
          f.remove_valence_two(v, dirs[0]);
        else
          f.remove_valence_two(v, dirs[1]);
        changed = true;
      }
    }
  }
}

namespace {

// Subdivides the edge of d so that the piece leaving origin(d) has an image
// of length k; returns the direction of that piece.
Dir split_direction(GraphMap& f, Dir d, std::size_t k) {
  const int e = edge_of(d);
  const std::size_t n = f.image[e].size();
  if (k >= n) return d;
  if (d > 0) {
    f.subdivide(e, k);
    return d;
  }
  f.subdivide(e, n - k);
  return -dir_of(f.num_edges() - 1);
}

std::size_t common_prefix(const EdgePath& a, const EdgePath& b) {
  std::size_t p = 0;
  while (p < a.size() && p < b.size() && a[p] == b[p]) ++p;
  return p;
}

}  // namespace

void fold_turn(GraphMap& f, Dir a, Dir b) {
  const EdgePath ia = f.image_of(a), ib = f.image_of(b);
  const std::size_t p = common_prefix(ia, ib);
  if (p == 0) throw Error("fold_turn: images do not share an initial edge");
  if (edge_of(a) == edge_of(b)) {
    // a and b are the two ends of a loop.
    Dir a2 = split_direction(f, a, p);
    // The other end of the loop now lies on the remaining piece.
    Dir b2 = a > 0 ? -dir_of(f.num_edges() - 1) : dir_of(edge_of(a));
    b2 = split_direction(f, b2, f.image_of(a2).size());
    f.fold(a2, b2);
    return;
  }
  // Splitting one edge rewrites the other image, so measure the prefix again.
  Dir a2 = split_direction(f, a, p);
  Dir b2 = split_direction(f, b, f.image_of(a2).size());
  if (f.image_of(b2).size() < f.image_of(a2).size()) a2 = split_direction(f, a2, f.image_of(b2).size());
  f.fold(a2, b2);
}

namespace {

struct Candidate {
  int k;
  int vertex;
  int first, second;  // ranks of the two directions under the tie-break order
  Dir a, b;
  bool operator<(const Candidate& o) const {
    return std::tie(k, vertex, first, second) < std::tie(o.k, o.vertex, o.first, o.second);
  }
};

}  // namespace

TrainTrackResult find_train_track(const Endomorphism& phi, const TrainTrackOptions& options) {
  // An image inside a proper free factor A gives phi(A) <= A directly.
  auto image_factor = free_factor_containment(stallings(phi.images(), phi.rank()), options.whitehead_depth);
  if (auto* c = std::get_if<Contained>(&image_factor)) {
    FreeFactorSystem sys{{stallings(c->factor_basis, phi.rank())}, {Word{}},
                         "image contained in a proper free factor"};
    if (sys.verify(phi)) return ReductionWitness{sys, sys.provenance};
  }
  if (!is_injective(phi)) throw Error("endomorphism is not injective");
  // Finite-order classes make the fold loop cycle at a stretch factor above 1.
  if (auto ip = inner_power(phi, options.kmax)) return FiniteOrderCertificate{ip->k, ip->conjugator};
  return improve_train_track(rose_representative(phi), phi, options);
}

TrainTrackResult improve_train_track(GraphMap f, const Endomorphism& phi,
                                     const TrainTrackOptions& options) {
  std::mt19937 rng(options.seed);
  std::set<std::string> visited;
  for (int it = 0; it < options.max_iterations; ++it) {
    normalize(f);
    if (!visited.insert(f.to_string()).second)
      return TrainTrackUnknown{"fold sequence revisits a graph map after " + std::to_string(it) +
                               " iterations"};
    TransitionData t = transition_matrix(f);
    if (!t.irreducible) {
      if (auto sub = invariant_subgraph(f)) {
        if (auto w = reduction_from_subgraph(f, *sub, phi)) return *w;
        return TrainTrackUnknown{"invariant subgraph did not yield a verified free factor system"};
      }
      // Every proper invariant set is a forest: collapse the largest.
      std::vector<char> best;
      for (int e = 0; e < f.num_edges(); ++e) {
        auto in = f.invariant_closure({e});
        if (std::count(in.begin(), in.end(), 1) < f.num_edges() &&
            std::count(in.begin(), in.end(), 1) > std::count(best.begin(), best.end(), 1))
          best = in;
      }
      std::vector<int> forest;
      for (int e = 0; e < f.num_edges(); ++e)
        if (best[e]) forest.push_back(e);
      f.collapse_forest(forest);
      continue;
    }
    if (t.lambda <= 1 + 1e-9) {
      if (auto ip = inner_power(phi, options.kmax)) return FiniteOrderCertificate{ip->k, ip->conjugator};
      return TrainTrackUnknown{"stretch factor 1 without an inner power up to k = " +
                               std::to_string(options.kmax)};
    }
    Gates g = compute_gates(f);
    // Tie-break rank of each edge.
    const int ne = f.num_edges();
    std::vector<int> rank(ne);
    std::iota(rank.begin(), rank.end(), 0);
    if (options.seed != 0) std::shuffle(rank.begin(), rank.end(), rng);
    auto dir_rank = [&](Dir d) { return 2 * rank[edge_of(d)] + (d < 0 ? 1 : 0); };
    std::optional<Candidate> best;
    for (int e = 0; e < ne; ++e) {
      const EdgePath& im = f.image[e];
      for (std::size_t i = 0; i + 1 < im.size(); ++i) {
        Dir a = -im[i], b = im[i + 1];
        if (!g.same(a, b)) continue;
        auto k = degeneration_time(f, a, b);
        if (!k) continue;
        if (dir_rank(a) > dir_rank(b)) std::swap(a, b);
        Candidate c{*k, f.origin(a), dir_rank(a), dir_rank(b), a, b};
        if (!best || c < *best) best = c;
      }
    }
    if (!best) return TrainTrack{f, g, t};
    Dir a = iterate(f, best->a, best->k - 1), b = iterate(f, best->b, best->k - 1);
    fold_turn(f, a, b);
  }
  return TrainTrackUnknown{"iteration bound " + std::to_string(options.max_iterations) +
                           " exhausted"};
}

}  // namespace mtorus
