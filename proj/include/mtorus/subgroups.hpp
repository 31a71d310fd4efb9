#pragma once

// Stallings graphs of finitely generated subgroups of a free group.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mtorus/words.hpp"

namespace mtorus {

// Folded graph with directed edges labelled by positive generators. Vertex 0
// is the basepoint. Every vertex other than the basepoint has valence >= 2.
class SubgroupGraph {
 public:
  SubgroupGraph() = default;
  explicit SubgroupGraph(int ambient_rank);

  int ambient_rank() const noexcept { return rank_; }
  std::size_t num_vertices() const noexcept { return out_.size(); }
  std::size_t num_edges() const noexcept;
  // Rank of the subgroup: E - V + 1.
  int rank() const noexcept {
    return static_cast<int>(num_edges()) - static_cast<int>(num_vertices()) + 1;
  }

  // Target of the edge labelled `l` leaving v (l < 0: inverse edge), or -1.
  int follow(int v, Letter l) const noexcept {
    return l > 0 ? out_[v][l - 1] : in_[v][-l - 1];
  }
  // Endpoint of reading w from v, or -1 if the reading falls off the graph.
  int read(int v, const Word& w) const noexcept;
  int valence(int v) const noexcept;

  // Free basis read off a BFS spanning tree at the basepoint.
  std::vector<Word> basis() const;
  // Label of the BFS-tree path from the basepoint to v.
  Word path_to(int v) const;

  // Number of edges of the core (the basepoint hair removed).
  std::size_t core_size() const;
  // Whether some generator labels no edge.
  std::vector<int> used_generators() const;

  // Based-isomorphism invariant; equal keys iff equal subgroups.
  std::vector<int> canonical_key() const;
  std::string to_string() const;

  friend bool operator==(const SubgroupGraph& a, const SubgroupGraph& b) {
    return a.rank_ == b.rank_ && a.canonical_key() == b.canonical_key();
  }

  // Construction helpers; see stallings().
  int add_vertex();
  void add_edge(int from, int generator, int to);
  void fold_and_trim();

 private:
  int rank_ = 0;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  // Pending identifications while building.
  std::vector<int> parent_;
  int find(int v);
};

SubgroupGraph stallings(const std::vector<Word>& gens, int ambient_rank);
SubgroupGraph full_group(int ambient_rank);

// Number of cosets if finite; nullopt for infinite index.
std::optional<std::size_t> index(const SubgroupGraph& g);
bool contains(const SubgroupGraph& g, const Word& w);
bool contains_all(const SubgroupGraph& g, const std::vector<Word>& ws);

// phi^-1(<G>).
SubgroupGraph preimage(const Endomorphism& phi, const SubgroupGraph& g);
SubgroupGraph intersect(const SubgroupGraph& g, const SubgroupGraph& h);

// Some x with <H> <= x <A> x^-1, if <H> is conjugate into <A>.
std::optional<Word> conjugate_into(const SubgroupGraph& h, const SubgroupGraph& a);

// phi(A_i) <= x_i A_{i+1} x_i^-1, indices mod k.
struct FreeFactorSystem {
  std::vector<SubgroupGraph> factors;
  std::vector<Word> conjugators;
  std::string provenance;

  std::size_t size() const noexcept { return factors.size(); }
  // Membership check of every basis image.
  bool verify(const Endomorphism& phi) const;
  // Collapses the cycle to a single factor: phi^k(A_0) <= x A_0 x^-1.
  Word cycle_conjugator(const Endomorphism& phi) const;
};

}  // namespace mtorus
