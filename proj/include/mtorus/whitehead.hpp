#pragma once

// Whitehead automorphisms, free-factor containment and the bounded search
// for invariant free factor systems.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mtorus/subgroups.hpp"
#include "mtorus/words.hpp"

namespace mtorus {

// Whitehead automorphism of the second kind (A, a): for x not in {a, a^-1},
// x -> x a if only x in A, x -> a^-1 x if only x^-1 in A, x -> a^-1 x a if
// both. `subset` holds the letters of A other than a.
struct WhiteheadAuto {
  Letter multiplier = 0;
  std::vector<Letter> subset;

  Endomorphism as_endomorphism(int rank) const;
  WhiteheadAuto inverse() const;
};

std::vector<WhiteheadAuto> whitehead_automorphisms(int rank);

// Elementary Nielsen transformations x_i -> x_i x_j^{+-1}, x_j^{+-1} x_i.
std::vector<Endomorphism> nielsen_moves(int rank);

// Whitehead graph of the core of g: vertices are letters; every pair of
// directions at a core vertex is joined.
struct WhiteheadGraph {
  int rank = 0;
  std::vector<std::vector<char>> adj;  // 2*rank x 2*rank, indexed by letter_key

  bool connected() const;
  std::optional<Letter> cut_vertex() const;
};
WhiteheadGraph whitehead_graph(const SubgroupGraph& g);

struct Contained {
  std::vector<Word> factor_basis;  // basis of a proper free factor containing G
};
struct NotContained {
  std::string certificate;
};
struct ContainmentUnknown {
  std::string reason;
};
using Containment = std::variant<Contained, NotContained, ContainmentUnknown>;

// Descends by complexity-reducing Whitehead automorphisms (at most `depth`
// applications), then decides at the minimum.
Containment free_factor_containment(const SubgroupGraph& g, int depth = 8);

// Exhaustive reference: whether some automorphism reachable through
// non-increasing Whitehead moves leaves a generator unused. Test oracle.
bool contained_by_exhaustion(const SubgroupGraph& g, std::size_t max_states = 20000);

// Searches invariant free factor systems whose factors are spanned by
// disjoint subsets of a basis reachable with <= depth Nielsen moves.
std::optional<FreeFactorSystem> search_reduction(const Endomorphism& phi, int depth = 3);

}  // namespace mtorus
