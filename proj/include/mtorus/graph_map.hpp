#pragma once

// Marked graphs and topological representatives of endomorphisms.
//
// An oriented edge (direction) is written d = +(e+1) or -(e+1) for edge index
// e; edge paths are sequences of directions.

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mtorus/words.hpp"

namespace mtorus {

using Dir = int;
using EdgePath = std::vector<Dir>;

constexpr int edge_of(Dir d) noexcept { return (d > 0 ? d : -d) - 1; }
constexpr Dir dir_of(int e, bool forward = true) noexcept { return forward ? e + 1 : -(e + 1); }

// Cancels adjacent d, -d pairs.
void tighten_path(EdgePath& p);
EdgePath reversed(const EdgePath& p);

struct TransitionData {
  std::vector<std::vector<long>> matrix;  // matrix[e][e'] = crossings of e by f(e')
  double lambda = 0;
  std::vector<double> eigenmetric;        // lengths with M^T L = lambda L, sum 1
  bool irreducible = false;
  bool expanding() const noexcept { return irreducible && lambda > 1 + 1e-9; }
};

// Homotopy representative f of an endomorphism phi on a marked graph.
//
// The marking sends every edge to an element nu(e) of F; nu restricted to
// loops at `base` is an isomorphism onto F with inverse given by `marking`.
struct GraphMap {
  int rank = 0;
  int num_vertices = 0;
  std::vector<std::array<int, 2>> ends;  // per edge: origin, terminus
  std::vector<EdgePath> image;           // per edge
  std::vector<int> vertex_image;
  std::vector<double> length;
  int base = 0;
  std::vector<EdgePath> marking;         // generator -> tight loop at base
  std::vector<Word> nu;                  // per edge

  int num_edges() const noexcept { return static_cast<int>(ends.size()); }
  int origin(Dir d) const { return d > 0 ? ends[edge_of(d)][0] : ends[edge_of(d)][1]; }
  int terminus(Dir d) const { return d > 0 ? ends[edge_of(d)][1] : ends[edge_of(d)][0]; }
  EdgePath image_of(Dir d) const;
  // Tightened image of a path.
  EdgePath image_of(const EdgePath& p) const;
  Word word(const EdgePath& p) const;
  Word word(Dir d) const { return d > 0 ? nu[edge_of(d)] : nu[edge_of(d)].inverse(); }

  std::vector<Dir> directions_at(int v) const;
  int valence(int v) const { return static_cast<int>(directions_at(v).size()); }
  // Tight path from `from` to `to` inside a BFS tree rooted at `from`.
  EdgePath tree_path(int from, int to) const;
  double volume() const;

  std::string path_string(const EdgePath& p) const;
  std::string to_string() const;

  // Throws Error if vertex images, edge images or the marking are inconsistent.
  void check() const;

  // In-place elementary moves. Each keeps the represented outer class.
  void tighten();
  // Splits edge e after the first k directions of its image; returns the new
  // vertex. The first piece keeps index e and the second gets a new index.
  int subdivide(int e, std::size_t k, std::optional<double> first_length = std::nullopt);
  // Identifies two directions at one vertex with equal images and distinct
  // terminal vertices.
  void fold(Dir d1, Dir d2);
  void collapse_forest(std::vector<int> edges);
  // Merges the two edges at v; `collapse` (a direction at v, default the
  // second one) names the edge whose far end survives as the image of v.
  void remove_valence_two(int v, Dir collapse = 0);
  void remove_hair(int v);
  // Moves the basepoint to the terminus of d (d starting at the basepoint).
  void move_base(Dir d);

  // Invariant subset of edges, closed under taking image edges.
  std::vector<char> invariant_closure(const std::vector<int>& seed) const;
  std::vector<std::vector<long>> matrix() const;

 private:
  void translate(int v, const Word& c);
  void merge_vertex(int gone, int keep);
  void erase_edge(int e);
  void substitute(int e, const EdgePath& forward);
};

GraphMap rose_representative(const Endomorphism& phi);

GraphMap tighten(GraphMap f);
TransitionData transition_matrix(const GraphMap& f);

// psi(g) = nu(p f(marking g) p^-1) for p the tree path from the basepoint to
// its image. f represents phi iff psi and phi differ by a common conjugator.
Endomorphism induced_endomorphism(const GraphMap& f);
bool represents(const GraphMap& f, const Endomorphism& phi);

struct Subdivide {
  int edge;
  std::size_t position;
};
struct Fold {
  Dir first;
  Dir second;
};
struct CollapseForest {
  std::vector<int> edges;
};
struct RemoveValence12 {
  int vertex;
};
using Move = std::variant<Subdivide, Fold, CollapseForest, RemoveValence12>;

// Validates the move and returns the resulting map; throws Error with a
// diagnostic on an invalid descriptor.
GraphMap bh_move(const GraphMap& f, const Move& move);

}  // namespace mtorus
