#include "mtorus/graph_map.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <sstream>

#include "mtorus/perron.hpp"

namespace mtorus {

void tighten_path(EdgePath& p) {
  EdgePath out;
  out.reserve(p.size());
  for (Dir d : p) {
    if (!out.empty() && out.back() == -d)
      out.pop_back();
    else
      out.push_back(d);
  }
  p = std::move(out);
}

EdgePath reversed(const EdgePath& p) {
  EdgePath out(p.rbegin(), p.rend());
  for (Dir& d : out) d = -d;
  return out;
}

EdgePath GraphMap::image_of(Dir d) const {
  return d > 0 ? image[edge_of(d)] : reversed(image[edge_of(d)]);
}

EdgePath GraphMap::image_of(const EdgePath& p) const {
  EdgePath out;
  for (Dir d : p) {
    EdgePath im = image_of(d);
    out.insert(out.end(), im.begin(), im.end());
  }
  tighten_path(out);
  return out;
}

Word GraphMap::word(const EdgePath& p) const {
  Word w;
  for (Dir d : p) w *= word(d);
  return w;
}

std::vector<Dir> GraphMap::directions_at(int v) const {
  std::vector<Dir> out;
  for (int e = 0; e < num_edges(); ++e) {
    if (ends[e][0] == v) out.push_back(dir_of(e, true));
    if (ends[e][1] == v) out.push_back(dir_of(e, false));
  }
  return out;
}

EdgePath GraphMap::tree_path(int from, int to) const {
  std::vector<Dir> parent(num_vertices, 0);
  std::vector<char> seen(num_vertices, 0);
  std::queue<int> q;
  q.push(from);
  seen[from] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (Dir d : directions_at(v)) {
      int u = terminus(d);
      if (!seen[u]) {
        seen[u] = 1;
        parent[u] = d;
        q.push(u);
      }
    }
  }
  if (!seen[to]) throw Error("graph is disconnected");
  EdgePath p;
  for (int v = to; v != from; v = origin(parent[v])) p.push_back(parent[v]);
  std::reverse(p.begin(), p.end());
  return p;
}

double GraphMap::volume() const { return std::accumulate(length.begin(), length.end(), 0.0); }

std::string GraphMap::path_string(const EdgePath& p) const {
  if (p.empty()) return "1";
  std::string s;
  for (Dir d : p) {
    int e = edge_of(d);
    if (num_edges() <= 26) {
      s += static_cast<char>((d > 0 ? 'a' : 'A') + e);
    } else {
      if (!s.empty()) s += ' ';
      s += (d > 0 ? "e" : "E") + std::to_string(e + 1);
    }
  }
  return s;
}

std::string GraphMap::to_string() const {
  std::ostringstream os;
  os << "vertices " << num_vertices << ", edges " << num_edges() << ", base " << base << "\n";
  for (int e = 0; e < num_edges(); ++e) {
    os << "  " << path_string({dir_of(e)}) << ": " << ends[e][0] << "->" << ends[e][1]
       << "  f = " << path_string(image[e]) << "\n";
  }
  return os.str();
}

void GraphMap::check() const {
  const int n = num_edges();
  if (static_cast<int>(image.size()) != n || static_cast<int>(length.size()) != n ||
      static_cast<int>(nu.size()) != n || static_cast<int>(vertex_image.size()) != num_vertices)
    throw Error("graph map: inconsistent sizes");
  auto valid_path = [&](const EdgePath& p, int from, int to) {
    int at = from;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0 || edge_of(p[i]) >= n) return false;
      if (origin(p[i]) != at) return false;
      if (i > 0 && p[i] == -p[i - 1]) return false;
      at = terminus(p[i]);
    }
    return at == to;
  };
  for (int e = 0; e < n; ++e) {
    if (!(length[e] > 0)) throw Error("graph map: nonpositive edge length");
    if (!valid_path(image[e], vertex_image[ends[e][0]], vertex_image[ends[e][1]]))
      throw Error("graph map: image of edge " + path_string({dir_of(e)}) + " is not a tight path");
  }
  if (static_cast<int>(marking.size()) != rank) throw Error("graph map: marking size");
  for (int g = 0; g < rank; ++g) {
    if (!valid_path(marking[g], base, base)) throw Error("graph map: marking loop invalid");
    if (word(marking[g]) != Word::generator(g + 1)) throw Error("graph map: marking mismatch");
  }
  if (n - num_vertices + 1 != rank) throw Error("graph map: rank of graph differs from rank of F");
}

void GraphMap::tighten() {
  for (auto& p : image) tighten_path(p);
  for (auto& p : marking) tighten_path(p);
}

void GraphMap::substitute(int e, const EdgePath& forward) {
  const EdgePath backward = reversed(forward);
  auto apply = [&](EdgePath& p) {
    EdgePath out;
    for (Dir d : p) {
      if (edge_of(d) != e)
        out.push_back(d);
      else if (d > 0)
        out.insert(out.end(), forward.begin(), forward.end());
      else
        out.insert(out.end(), backward.begin(), backward.end());
    }
    p = std::move(out);
  };
  for (auto& p : image) apply(p);
  for (auto& p : marking) apply(p);
}

void GraphMap::translate(int v, const Word& c) {
  if (v == base) throw Error("graph map: cannot translate the basepoint");
  if (c.empty()) return;
  const Word ci = c.inverse();
  for (int e = 0; e < num_edges(); ++e) {
    if (ends[e][0] == v) nu[e] = ci * nu[e];
    if (ends[e][1] == v) nu[e] = nu[e] * c;
  }
}

void GraphMap::merge_vertex(int gone, int keep) {
  for (auto& en : ends)
    for (int& x : en)
      if (x == gone) x = keep;
  for (int& x : vertex_image)
    if (x == gone) x = keep;
  if (base == gone) base = keep;
  vertex_image.erase(vertex_image.begin() + gone);
  --num_vertices;
  auto shift = [&](int& x) {
    if (x > gone) --x;
  };
  for (auto& en : ends)
    for (int& x : en) shift(x);
  for (int& x : vertex_image) shift(x);
  shift(base);
}

void GraphMap::erase_edge(int e) {
  ends.erase(ends.begin() + e);
  image.erase(image.begin() + e);
  length.erase(length.begin() + e);
  nu.erase(nu.begin() + e);
  auto fix = [&](EdgePath& p) {
    for (Dir& d : p) {
      if (edge_of(d) == e) throw Error("graph map: erased edge still in use");
      if (edge_of(d) > e) d += d > 0 ? -1 : 1;
    }
  };
  for (auto& p : image) fix(p);
  for (auto& p : marking) fix(p);
}

int GraphMap::subdivide(int e, std::size_t k, std::optional<double> first_length) {
  const EdgePath p = image[e];
  if (k == 0 || k >= p.size()) throw Error("subdivide: position must be interior to the image");
  const int w = num_vertices++;
  vertex_image.push_back(terminus(p[k - 1]));
  const int e2 = num_edges();
  ends.push_back({w, ends[e][1]});
  ends[e][1] = w;
  image.emplace_back();
  nu.emplace_back();
  double l1 = first_length.value_or(length[e] * static_cast<double>(k) / static_cast<double>(p.size()));
  length.push_back(length[e] - l1);
  length[e] = l1;
  substitute(e, {dir_of(e), dir_of(e2)});
  auto subst = [&](EdgePath q) {
    EdgePath out;
    for (Dir d : q) {
      if (edge_of(d) != e) {
        out.push_back(d);
      } else if (d > 0) {
        out.push_back(dir_of(e));
        out.push_back(dir_of(e2));
      } else {
        out.push_back(-dir_of(e2));
        out.push_back(-dir_of(e));
      }
    }
    return out;
  };
  image[e] = subst(EdgePath(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k)));
  image[e2] = subst(EdgePath(p.begin() + static_cast<std::ptrdiff_t>(k), p.end()));
  return w;
}

void GraphMap::move_base(Dir d) {
  if (origin(d) != base) throw Error("move_base: direction does not start at the basepoint");
  const Word k = word(d);
  const Word ki = k.inverse();
  for (auto& w : nu) w = k * w * ki;
  for (auto& m : marking) {
    EdgePath p{-d};
    p.insert(p.end(), m.begin(), m.end());
    p.push_back(d);
    tighten_path(p);
    m = std::move(p);
  }
  base = terminus(d);
}

void GraphMap::fold(Dir d1, Dir d2) {
  if (origin(d1) != origin(d2)) throw Error("fold: directions start at different vertices");
  if (edge_of(d1) == edge_of(d2)) throw Error("fold: directions lie on one edge");
  if (image_of(d1) != image_of(d2)) throw Error("fold: images differ");
  const int u1 = terminus(d1), u2 = terminus(d2);
  if (u1 == u2) throw Error("fold would identify parallel edges: endomorphism is not injective");
  const int t = u2 != base ? u2 : u1;
  const int keep = t == u2 ? u1 : u2;
  const Word c = t == u2 ? word(d2).inverse() * word(d1) : word(d1).inverse() * word(d2);
  translate(t, c);
  const int e2 = edge_of(d2);
  substitute(e2, {d2 > 0 ? d1 : -d1});
  merge_vertex(t, keep);
  length[edge_of(d1)] = std::max(length[edge_of(d1)], length[e2]);
  erase_edge(e2);
  tighten();
}

void GraphMap::collapse_forest(std::vector<int> edges) {
  while (!edges.empty()) {
    const int e = edges.back();
    edges.pop_back();
    const int a = ends[e][0], b = ends[e][1];
    if (a == b) throw Error("collapse_forest: edge set contains a loop");
    const int t = b != base ? b : a;
    const int keep = t == b ? a : b;
    translate(t, t == b ? nu[e].inverse() : nu[e]);
    substitute(e, {});
    merge_vertex(t, keep);
    erase_edge(e);
    for (int& x : edges)
      if (x > e) --x;
  }
  tighten();
}

void GraphMap::remove_valence_two(int w, Dir collapse) {
  auto dirs = directions_at(w);
  if (dirs.size() != 2 || edge_of(dirs[0]) == edge_of(dirs[1]))
    throw Error("remove_valence_two: vertex does not have valence two");
  if (collapse == dirs[0]) std::swap(dirs[0], dirs[1]);
  const Dir d1 = -dirs[0], d2 = dirs[1];
  const int u = terminus(d2);
  for (int e = 0; e < num_edges(); ++e) {
    if (vertex_image[ends[e][0]] == w) image[e].insert(image[e].begin(), -d2);
    if (vertex_image[ends[e][1]] == w) image[e].push_back(d2);
  }
  for (int& x : vertex_image)
    if (x == w) x = u;
  if (base == w) move_base(d2);
  translate(w, word(d2));
  tighten();

  EdgePath q = image_of(d1);
  EdgePath q2 = image_of(d2);
  q.insert(q.end(), q2.begin(), q2.end());
  tighten_path(q);
  const int e1 = edge_of(d1), e2 = edge_of(d2);
  const int from = origin(d1), to = terminus(d2);
  const Word nw = word(d1) * word(d2);
  auto pairs = [&](const EdgePath& p) {
    EdgePath out;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == d1 && i + 1 < p.size() && p[i + 1] == d2) {
        out.push_back(dir_of(e1));
        ++i;
      } else if (p[i] == -d2 && i + 1 < p.size() && p[i + 1] == -d1) {
        out.push_back(-dir_of(e1));
        ++i;
      } else if (edge_of(p[i]) == e1 || edge_of(p[i]) == e2) {
        throw Error("remove_valence_two: path ends at the removed vertex");
      } else {
        out.push_back(p[i]);
      }
    }
    return out;
  };
  for (int e = 0; e < num_edges(); ++e)
    if (e != e1 && e != e2) image[e] = pairs(image[e]);
  for (auto& m : marking) m = pairs(m);
  image[e1] = pairs(q);
  image[e2].clear();
  ends[e1] = {from, to};
  nu[e1] = nw;
  length[e1] += length[e2];
  erase_edge(e2);
  // w now has no edges.
  for (auto& en : ends)
    for (int& x : en)
      if (x > w) --x;
  for (int& x : vertex_image)
    if (x > w) --x;
  vertex_image.erase(vertex_image.begin() + w);
  if (base > w) --base;
  --num_vertices;
  tighten();
}

void GraphMap::remove_hair(int v) {
  auto dirs = directions_at(v);
  if (dirs.size() != 1) throw Error("remove_hair: vertex does not have valence one");
  const Dir d = dirs[0];
  const int u = terminus(d);
  if (base == v) move_base(d);
  for (int& x : vertex_image)
    if (x == v) x = u;
  const int e = edge_of(d);
  // Retract the hair onto u; tight paths meet it only at their ends.
  auto strip = [&](EdgePath& p) {
    p.erase(std::remove_if(p.begin(), p.end(), [&](Dir x) { return edge_of(x) == e; }), p.end());
  };
  for (auto& p : image) strip(p);
  for (auto& p : marking) strip(p);
  ends[e] = {u, u};
  merge_vertex(v, u);
  erase_edge(e);
  tighten();
}

std::vector<char> GraphMap::invariant_closure(const std::vector<int>& seed) const {
  std::vector<char> in(num_edges(), 0);
  std::vector<int> stack;
  for (int e : seed)
    if (!in[e]) {
      in[e] = 1;
      stack.push_back(e);
    }
  while (!stack.empty()) {
    int e = stack.back();
    stack.pop_back();
    for (Dir d : image[e]) {
      int x = edge_of(d);
      if (!in[x]) {
        in[x] = 1;
        stack.push_back(x);
      }
    }
  }
  return in;
}

std::vector<std::vector<long>> GraphMap::matrix() const {
  const int n = num_edges();
  std::vector<std::vector<long>> m(n, std::vector<long>(n, 0));
  for (int e = 0; e < n; ++e)
    for (Dir d : image[e]) ++m[edge_of(d)][e];
  return m;
}

GraphMap rose_representative(const Endomorphism& phi) {
  GraphMap f;
  const int r = phi.rank();
  f.rank = r;
  f.num_vertices = 1;
  f.vertex_image = {0};
  for (int i = 0; i < r; ++i) {
    f.ends.push_back({0, 0});
    const auto& im = phi.image(i + 1).vec();
    f.image.emplace_back(im.begin(), im.end());
    f.length.push_back(1.0);
    f.nu.push_back(Word::generator(i + 1));
    f.marking.push_back({dir_of(i)});
  }
  return f;
}

GraphMap tighten(GraphMap f) {
  f.tighten();
  return f;
}

TransitionData transition_matrix(const GraphMap& f) {
  TransitionData t;
  t.matrix = f.matrix();
  PerronData pf = perron_frobenius(t.matrix);
  t.lambda = pf.lambda;
  t.irreducible = pf.irreducible;
  if (pf.irreducible) t.eigenmetric = pf.left;
  return t;
}

Endomorphism induced_endomorphism(const GraphMap& f) {
  const EdgePath p = f.tree_path(f.base, f.vertex_image[f.base]);
  const EdgePath pr = reversed(p);
  std::vector<Word> im;
  for (const auto& m : f.marking) {
    EdgePath loop = p;
    EdgePath fm = f.image_of(m);
    loop.insert(loop.end(), fm.begin(), fm.end());
    loop.insert(loop.end(), pr.begin(), pr.end());
    im.push_back(f.word(loop));
  }
  return Endomorphism(f.rank, std::move(im));
}

bool represents(const GraphMap& f, const Endomorphism& phi) {
  return common_conjugator(phi, induced_endomorphism(f)).has_value();
}

namespace {

struct Validate {
  const GraphMap& f;

  void operator()(const Subdivide& m) const {
    if (m.edge < 0 || m.edge >= f.num_edges()) throw Error("Subdivide: no such edge");
    if (m.position == 0 || m.position >= f.image[m.edge].size())
      throw Error("Subdivide: position must be interior to the image of the edge");
  }
  void operator()(const Fold& m) const {
    for (Dir d : {m.first, m.second})
      if (d == 0 || edge_of(d) >= f.num_edges()) throw Error("Fold: no such direction");
    if (f.origin(m.first) != f.origin(m.second)) throw Error("Fold: directions do not form a turn");
    if (edge_of(m.first) == edge_of(m.second)) throw Error("Fold: directions lie on one edge");
    if (f.image_of(m.first) != f.image_of(m.second)) throw Error("Fold: images are not equal");
    if (f.terminus(m.first) == f.terminus(m.second))
      throw Error("Fold: edges have the same terminal vertex");
  }
  void operator()(const CollapseForest& m) const {
    std::vector<int> parent(f.num_vertices);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    std::vector<char> in(f.num_edges(), 0);
    for (int e : m.edges) {
      if (e < 0 || e >= f.num_edges()) throw Error("CollapseForest: no such edge");
      if (in[e]) throw Error("CollapseForest: repeated edge");
      in[e] = 1;
      int a = find(f.ends[e][0]), b = find(f.ends[e][1]);
      if (a == b) throw Error("CollapseForest: edges contain a cycle");
      parent[a] = b;
    }
    for (int e : m.edges)
      for (Dir d : f.image[e])
        if (!in[edge_of(d)]) throw Error("CollapseForest: edge set is not invariant");
  }
  void operator()(const RemoveValence12& m) const {
    if (m.vertex < 0 || m.vertex >= f.num_vertices) throw Error("RemoveValence12: no such vertex");
    auto dirs = f.directions_at(m.vertex);
    if (dirs.size() == 2 && edge_of(dirs[0]) == edge_of(dirs[1]))
      throw Error("RemoveValence12: vertex carries a single loop");
    if (dirs.size() != 1 && dirs.size() != 2)
      throw Error("RemoveValence12: vertex has valence " + std::to_string(dirs.size()));
  }
};

struct Apply {
  GraphMap& f;
  void operator()(const Subdivide& m) const { f.subdivide(m.edge, m.position); }
  void operator()(const Fold& m) const { f.fold(m.first, m.second); }
  void operator()(const CollapseForest& m) const { f.collapse_forest(m.edges); }
  void operator()(const RemoveValence12& m) const {
    if (f.valence(m.vertex) == 1)
      f.remove_hair(m.vertex);
    else
      f.remove_valence_two(m.vertex);
  }
};

}  // namespace

GraphMap bh_move(const GraphMap& f, const Move& move) {
  std::visit(Validate{f}, move);
  GraphMap g = f;
  std::visit(Apply{g}, move);
  return g;
}

}  // namespace mtorus
