#include "mtorus/subgroups.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <queue>
#include <sstream>
#include <utility>

namespace mtorus {

SubgroupGraph::SubgroupGraph(int ambient_rank) : rank_(ambient_rank) { add_vertex(); }

int SubgroupGraph::add_vertex() {
  out_.emplace_back(rank_, -1);
  in_.emplace_back(rank_, -1);
  parent_.push_back(static_cast<int>(parent_.size()));
  return static_cast<int>(out_.size()) - 1;
}

int SubgroupGraph::find(int v) {
  while (parent_[v] != v) {
    parent_[v] = parent_[parent_[v]];
    v = parent_[v];
  }
  return v;
}

void SubgroupGraph::add_edge(int from, int generator, int to) {
  std::deque<std::pair<int, int>> pending;
  auto link = [&](int u, int g, int v) {
    u = find(u);
    v = find(v);
    int w = out_[u][g];
    int s = in_[v][g];
    if (w == -1 && s == -1) {
      out_[u][g] = v;
      in_[v][g] = u;
    } else if (w != -1) {
      if (find(w) != v) pending.emplace_back(w, v);
    } else if (find(s) != u) {
      pending.emplace_back(s, u);
    }
  };
  link(from, generator - 1, to);
  while (!pending.empty()) {
    auto [x, y] = pending.front();
    pending.pop_front();
    int a = find(x);
    int b = find(y);
    if (a == b) continue;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    for (int g = 0; g < rank_; ++g) {
      int t = out_[b][g];
      if (t != -1) {
        out_[b][g] = -1;
        if (in_[t][g] == b) in_[t][g] = -1;
        link(a, g, t == b ? a : t);
      }
      int s = in_[b][g];
      if (s != -1) {
        in_[b][g] = -1;
        if (out_[s][g] == b) out_[s][g] = -1;
        link(s == b ? a : s, g, a);
      }
    }
  }
}

void SubgroupGraph::fold_and_trim() {
  const int n = static_cast<int>(out_.size());
  std::vector<int> root(n);
  for (int v = 0; v < n; ++v) root[v] = find(v);
  auto nbr = [&](int v, int g, bool fwd) {
    int t = fwd ? out_[v][g] : in_[v][g];
    return t == -1 ? -1 : root[t];
  };
  // Keep vertices reachable from the basepoint, then strip valence-1 vertices.
  std::vector<char> alive(n, 0);
  std::queue<int> q;
  alive[root[0]] = 1;
  q.push(root[0]);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int g = 0; g < rank_; ++g)
      for (bool fwd : {true, false}) {
        int t = nbr(v, g, fwd);
        if (t != -1 && !alive[t]) {
          alive[t] = 1;
          q.push(t);
        }
      }
  }
  auto degree = [&](int v) {
    int d = 0;
    for (int g = 0; g < rank_; ++g) {
      int t = nbr(v, g, true);
      if (t != -1 && alive[t]) d += (t == v ? 2 : 1);
      int s = nbr(v, g, false);
      if (s != -1 && alive[s] && s != v) d += 1;
    }
    return d;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < n; ++v) {
      if (!alive[v] || v == root[0]) continue;
      if (degree(v) <= 1) {
        alive[v] = 0;
        changed = true;
      }
    }
  }
  std::vector<int> id(n, -1);
  int next = 0;
  id[root[0]] = next++;
  for (int v = 0; v < n; ++v)
    if (alive[v] && id[v] == -1) id[v] = next++;
  std::vector<std::vector<int>> out(next, std::vector<int>(rank_, -1));
  std::vector<std::vector<int>> in(next, std::vector<int>(rank_, -1));
  for (int v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    for (int g = 0; g < rank_; ++g) {
      int t = nbr(v, g, true);
      if (t != -1 && alive[t]) {
        out[id[v]][g] = id[t];
        in[id[t]][g] = id[v];
      }
    }
  }
  out_ = std::move(out);
  in_ = std::move(in);
  parent_.resize(next);
  for (int v = 0; v < next; ++v) parent_[v] = v;
}

std::size_t SubgroupGraph::num_edges() const noexcept {
  std::size_t e = 0;
  for (const auto& row : out_)
    for (int t : row) e += (t != -1);
  return e;
}

int SubgroupGraph::read(int v, const Word& w) const noexcept {
  for (Letter l : w.letters()) {
    if (v < 0) return -1;
    v = follow(v, l);
  }
  return v;
}

int SubgroupGraph::valence(int v) const noexcept {
  int d = 0;
  for (int g = 0; g < rank_; ++g) d += (out_[v][g] != -1) + (in_[v][g] != -1);
  return d;
}

namespace {

// BFS tree at the basepoint: for each vertex the letter used to reach it and
// its parent.
struct Tree {
  std::vector<int> parent;
  std::vector<Letter> via;
  std::vector<int> order;
};

Tree bfs_tree(const SubgroupGraph& g) {
  const int n = static_cast<int>(g.num_vertices());
  Tree t;
  t.parent.assign(n, -2);
  t.via.assign(n, 0);
  t.parent[0] = -1;
  std::queue<int> q;
  q.push(0);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    t.order.push_back(v);
    for (int i = 1; i <= g.ambient_rank(); ++i)
      for (Letter l : {i, -i}) {
        int w = g.follow(v, l);
        if (w != -1 && t.parent[w] == -2) {
          t.parent[w] = v;
          t.via[w] = l;
          q.push(w);
        }
      }
  }
  return t;
}

Word tree_path(const Tree& t, int v) {
  std::vector<Letter> rev;
  while (t.parent[v] >= 0) {
    rev.push_back(t.via[v]);
    v = t.parent[v];
  }
  return Word(std::vector<Letter>(rev.rbegin(), rev.rend()));
}

}  // namespace

Word SubgroupGraph::path_to(int v) const { return tree_path(bfs_tree(*this), v); }

std::vector<Word> SubgroupGraph::basis() const {
  Tree t = bfs_tree(*this);
  std::vector<Word> b;
  for (int v : t.order) {
    for (int g = 0; g < rank_; ++g) {
      int w = out_[v][g];
      if (w == -1) continue;
      bool tree_edge = (t.parent[w] == v && t.via[w] == g + 1) ||
                       (t.parent[v] == w && t.via[v] == -(g + 1));
      if (tree_edge) continue;
      b.push_back(tree_path(t, v) * Word::generator(g + 1) * tree_path(t, w).inverse());
    }
  }
  return b;
}

std::size_t SubgroupGraph::core_size() const {
  const int n = static_cast<int>(num_vertices());
  std::vector<int> deg(n);
  for (int v = 0; v < n; ++v) deg[v] = valence(v);
  std::vector<char> alive(n, 1);
  std::size_t edges = num_edges();
  std::queue<int> q;
  for (int v = 0; v < n; ++v)
    if (deg[v] <= 1) q.push(v);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (!alive[v] || deg[v] > 1) continue;
    alive[v] = 0;
    for (int g = 0; g < rank_; ++g)
      for (int t : {out_[v][g], in_[v][g]}) {
        if (t != -1 && alive[t]) {
          --edges;
          if (--deg[t] <= 1) q.push(t);
        }
      }
  }
  return edges;
}

std::vector<int> SubgroupGraph::used_generators() const {
  std::vector<int> used;
  for (int g = 0; g < rank_; ++g) {
    for (const auto& row : out_) {
      if (row[g] != -1) {
        used.push_back(g + 1);
        break;
      }
    }
  }
  return used;
}

std::vector<int> SubgroupGraph::canonical_key() const {
  const int n = static_cast<int>(num_vertices());
  std::vector<int> id(n, -1);
  std::vector<int> order;
  id[0] = 0;
  order.push_back(0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    int v = order[k];
    for (int i = 1; i <= rank_; ++i)
      for (Letter l : {i, -i}) {
        int w = follow(v, l);
        if (w != -1 && id[w] == -1) {
          id[w] = static_cast<int>(order.size());
          order.push_back(w);
        }
      }
  }
  std::vector<int> key{n};
  for (int v : order)
    for (int g = 0; g < rank_; ++g) key.push_back(out_[v][g] == -1 ? -1 : id[out_[v][g]]);
  return key;
}

std::string SubgroupGraph::to_string() const {
  std::ostringstream os;
  os << "<";
  auto b = basis();
  for (std::size_t i = 0; i < b.size(); ++i) os << (i ? ", " : "") << b[i].to_string();
  os << ">";
  return os.str();
}

SubgroupGraph stallings(const std::vector<Word>& gens, int ambient_rank) {
  SubgroupGraph g(ambient_rank);
  for (const Word& w : gens) {
    if (w.max_generator() > ambient_rank) throw Error("generator outside ambient rank");
    if (w.empty()) continue;
    int cur = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      int next = (i + 1 == w.size()) ? 0 : g.add_vertex();
      Letter l = w[i];
      if (l > 0) {
        g.add_edge(cur, l, next);
      } else {
        g.add_edge(next, -l, cur);
      }
      cur = next;
    }
  }
  g.fold_and_trim();
  return g;
}

SubgroupGraph full_group(int ambient_rank) {
  std::vector<Word> gens;
  for (int i = 1; i <= ambient_rank; ++i) gens.push_back(Word::generator(i));
  return stallings(gens, ambient_rank);
}

std::optional<std::size_t> index(const SubgroupGraph& g) {
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    for (int i = 1; i <= g.ambient_rank(); ++i) {
      if (g.follow(static_cast<int>(v), i) == -1 || g.follow(static_cast<int>(v), -i) == -1)
        return std::nullopt;
    }
  }
  return g.num_vertices();
}

bool contains(const SubgroupGraph& g, const Word& w) { return g.read(0, w) == 0; }

bool contains_all(const SubgroupGraph& g, const std::vector<Word>& ws) {
  return std::all_of(ws.begin(), ws.end(), [&](const Word& w) { return contains(g, w); });
}

namespace {

// Folded graph of phi(F): each edge carries a target letter and a domain
// word, so that the domain labels of a closed path at the basepoint spell some
// w whose image under phi is the word read along the path.
struct LabelledEdge {
  int from;
  int to;
  Letter letter;
  Word nu;
};

void orient_from(LabelledEdge& e, int v, Letter l) {
  if (e.from == v && e.letter == l) return;
  std::swap(e.from, e.to);
  e.letter = -e.letter;
  e.nu = e.nu.inverse();
}

bool leaves(const LabelledEdge& e, int v, Letter l) {
  return (e.from == v && e.letter == l) || (e.to == v && e.letter == -l);
}

std::vector<LabelledEdge> fold_image_rose(const Endomorphism& phi, int& num_vertices) {
  std::vector<LabelledEdge> edges;
  int n = 1;
  for (int i = 1; i <= phi.rank(); ++i) {
    const Word& im = phi.image(i);
    if (im.empty()) throw Error("endomorphism is not injective");
    int prev = 0;
    for (std::size_t j = 0; j < im.size(); ++j) {
      int next = j + 1 == im.size() ? 0 : n++;
      edges.push_back({prev, next, im[j], j == 0 ? Word::generator(i) : Word{}});
      prev = next;
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (int v = 0; v < n && !changed; ++v) {
      for (std::size_t a = 0; a < edges.size() && !changed; ++a) {
        for (Letter l : {edges[a].letter, -edges[a].letter}) {
          if (!leaves(edges[a], v, l)) continue;
          std::size_t b = a + 1;
          while (b < edges.size() && !leaves(edges[b], v, l)) ++b;
          if (b == edges.size()) continue;
          orient_from(edges[a], v, l);
          orient_from(edges[b], v, l);
          int u1 = edges[a].to, u2 = edges[b].to;
          if (u1 == u2) {
            if (edges[a].nu != edges[b].nu) throw Error("endomorphism is not injective");
          } else {
            int t = u2 != 0 ? u2 : u1;
            Word c = t == u2 ? edges[b].nu.inverse() * edges[a].nu
                             : edges[a].nu.inverse() * edges[b].nu;
            for (auto& e : edges) {
              if (e.from == t) e.nu = c.inverse() * e.nu;
              if (e.to == t) e.nu = e.nu * c;
            }
            int keep = t == u2 ? u1 : u2;
            for (auto& e : edges) {
              if (e.from == t) e.from = keep;
              if (e.to == t) e.to = keep;
            }
          }
          edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(b));
          changed = true;
          break;
        }
      }
    }
  }
  num_vertices = n;
  return edges;
}

}  // namespace

SubgroupGraph preimage(const Endomorphism& phi, const SubgroupGraph& g) {
  if (phi.rank() != g.ambient_rank()) throw Error("rank mismatch in preimage");
  // Holds for every phi, injective or not.
  if (contains_all(g, phi.images())) return full_group(phi.rank());
  int nk = 0;
  auto edges = fold_image_rose(phi, nk);
  const int r = phi.rank();
  // Outgoing oriented edges per vertex of the image graph.
  std::vector<std::vector<std::pair<int, bool>>> at(nk);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    at[edges[e].from].emplace_back(e, true);
    at[edges[e].to].emplace_back(e, false);
  }
  const int nh = static_cast<int>(g.num_vertices());
  std::vector<int> seen(static_cast<std::size_t>(nk) * nh, 0);
  std::vector<Word> label(static_cast<std::size_t>(nk) * nh);
  std::vector<char> tree(edges.size() * nh, 0);
  std::vector<Word> gens;
  std::queue<std::pair<int, int>> q;
  seen[0] = 1;
  q.emplace(0, 0);
  while (!q.empty()) {
    auto [k, h] = q.front();
    q.pop();
    const Word here = label[static_cast<std::size_t>(k) * nh + h];
    for (auto [e, fwd] : at[k]) {
      const LabelledEdge& ed = edges[e];
      Letter l = fwd ? ed.letter : -ed.letter;
      int k2 = fwd ? ed.to : ed.from;
      int h2 = g.follow(h, l);
      if (h2 == -1) continue;
      Word step = fwd ? ed.nu : ed.nu.inverse();
      std::size_t id = static_cast<std::size_t>(k2) * nh + h2;
      // Product edge identified by (image edge, start of its positive orientation in G).
      std::size_t eid = static_cast<std::size_t>(e) * nh + (fwd ? h : h2);
      if (!seen[id]) {
        seen[id] = 1;
        tree[eid] = 1;
        label[id] = here * step;
        q.emplace(k2, h2);
      } else if (!tree[eid] && fwd) {
        Word loop = here * step * label[id].inverse();
        if (!loop.empty()) gens.push_back(loop);
      }
    }
  }
  return stallings(gens, r);
}

SubgroupGraph intersect(const SubgroupGraph& g, const SubgroupGraph& h) {
  if (g.ambient_rank() != h.ambient_rank()) throw Error("rank mismatch in intersect");
  const int nh = static_cast<int>(h.num_vertices());
  SubgroupGraph r(g.ambient_rank());
  std::vector<int> id(g.num_vertices() * h.num_vertices(), -1);
  std::queue<std::pair<int, int>> q;
  id[0] = 0;
  q.emplace(0, 0);
  while (!q.empty()) {
    auto [a, b] = q.front();
    q.pop();
    int me = id[a * nh + b];
    for (int i = 1; i <= g.ambient_rank(); ++i) {
      for (Letter l : {i, -i}) {
        int a2 = g.follow(a, l);
        int b2 = h.follow(b, l);
        if (a2 == -1 || b2 == -1) continue;
        int& slot = id[a2 * nh + b2];
        bool fresh = slot == -1;
        if (fresh) {
          slot = r.add_vertex();
          q.emplace(a2, b2);
        }
        if (l > 0) r.add_edge(me, i, slot);
      }
    }
  }
  r.fold_and_trim();
  return r;
}

std::optional<Word> conjugate_into(const SubgroupGraph& h, const SubgroupGraph& a) {
  const int n = static_cast<int>(h.num_vertices());
  std::vector<int> deg(n);
  std::vector<char> core(n, 1);
  std::queue<int> q;
  for (int v = 0; v < n; ++v) {
    deg[v] = h.valence(v);
    if (deg[v] <= 1) q.push(v);
  }
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (!core[v] || deg[v] > 1) continue;
    core[v] = 0;
    for (int i = 1; i <= h.ambient_rank(); ++i)
      for (Letter l : {i, -i}) {
        int t = h.follow(v, l);
        if (t != -1 && core[t] && --deg[t] <= 1) q.push(t);
      }
  }
  // The core vertex nearest the basepoint ends the hair.
  Tree t = bfs_tree(h);
  int c = -1;
  for (int v : t.order) {
    if (core[v]) {
      c = v;
      break;
    }
  }
  if (c == -1) return Word{};
  Word p = tree_path(t, c);
  std::vector<Word> basis = h.basis();

  const int na = static_cast<int>(a.num_vertices());
  for (int u = 0; u < na; ++u) {
    std::vector<int> m(n, -1);
    m[c] = u;
    std::queue<int> bq;
    bq.push(c);
    bool ok = true;
    while (!bq.empty() && ok) {
      int v = bq.front();
      bq.pop();
      for (int i = 1; i <= h.ambient_rank() && ok; ++i) {
        for (Letter l : {i, -i}) {
          int w = h.follow(v, l);
          if (w == -1 || !core[w]) continue;
          int img = a.follow(m[v], l);
          if (img == -1 || (m[w] != -1 && m[w] != img)) {
            ok = false;
            break;
          }
          if (m[w] == -1) {
            m[w] = img;
            bq.push(w);
          }
        }
      }
    }
    if (!ok) continue;
    Word x = p * a.path_to(u).inverse();
    bool verified = true;
    for (const Word& b : basis) {
      if (!contains(a, x.inverse() * b * x)) {
        verified = false;
        break;
      }
    }
    if (verified) return x;
  }
  return std::nullopt;
}

bool FreeFactorSystem::verify(const Endomorphism& phi) const {
  const std::size_t k = factors.size();
  if (k == 0 || conjugators.size() != k) return false;
  for (std::size_t i = 0; i < k; ++i) {
    const SubgroupGraph& next = factors[(i + 1) % k];
    const Word& x = conjugators[i];
    for (const Word& b : factors[i].basis()) {
      if (!contains(next, x.inverse() * phi.apply(b) * x)) return false;
    }
  }
  return true;
}

Word FreeFactorSystem::cycle_conjugator(const Endomorphism& phi) const {
  // phi^k(A_0) <= phi^{k-1}(x_0) phi^{k-2}(x_1) ... x_{k-1} A_0 (...)^-1.
  Word x;
  const std::size_t k = factors.size();
  for (std::size_t i = 0; i < k; ++i) {
    Word term = conjugators[i];
    for (std::size_t j = i + 1; j < k; ++j) term = phi.apply(term);
    x *= term;
  }
  return x;
}

}  // namespace mtorus
