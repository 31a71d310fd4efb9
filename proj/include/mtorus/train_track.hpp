#pragma once

// Bestvina-Handel loop for injective endomorphisms.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mtorus/graph_map.hpp"
#include "mtorus/subgroups.hpp"
#include "mtorus/words.hpp"

namespace mtorus {

// Index of a direction in per-direction tables.
constexpr int dir_index(Dir d) noexcept { return 2 * edge_of(d) + (d < 0 ? 1 : 0); }
constexpr Dir index_dir(int i) noexcept { return i % 2 ? -(i / 2 + 1) : i / 2 + 1; }

// First direction of f(d), or 0 if f(d) is trivial.
Dir direction_image(const GraphMap& f, Dir d);

struct Gates {
  std::vector<int> gate;  // per direction index; equal value iff same gate
  int count = 0;
  bool same(Dir a, Dir b) const { return gate[dir_index(a)] == gate[dir_index(b)]; }
};
Gates compute_gates(const GraphMap& f);

// Least k >= 1 with Df^k(a) = Df^k(b), if any.
std::optional<int> degeneration_time(const GraphMap& f, Dir a, Dir b);

// Position i of the first illegal turn (p[i]^-1, p[i+1]), or nullopt if legal.
std::optional<std::size_t> legality(const GraphMap& f, const Gates& g, const EdgePath& p);

struct TrainTrack {
  GraphMap map;
  Gates gates;
  TransitionData transition;
};

struct ReductionWitness {
  FreeFactorSystem system;
  std::string provenance;
};

struct FiniteOrderCertificate {
  int k = 0;
  Word conjugator;  // phi^k(g) = x g x^-1
};

struct TrainTrackUnknown {
  std::string reason;
};

using TrainTrackResult =
    std::variant<TrainTrack, ReductionWitness, FiniteOrderCertificate, TrainTrackUnknown>;

// Whether phi is injective: images are nontrivial and their Stallings graph
// has rank equal to the rank of F.
bool is_injective(const Endomorphism& phi);

// Largest proper f-invariant edge set carrying a cycle, if any.
std::optional<std::vector<char>> invariant_subgraph(const GraphMap& f);

// Converts an invariant edge set with a cycle into a verified free factor
// system for phi.
std::optional<ReductionWitness> reduction_from_subgraph(const GraphMap& f,
                                                        const std::vector<char>& edges,
                                                        const Endomorphism& phi);

// Removes hairs, trivial-image edges and valence-two vertices; tightens.
void normalize(GraphMap& f);

// Folds the turn (a, b) along the common prefix of the images, subdividing
// first if the prefix is shorter than an image.
void fold_turn(GraphMap& f, Dir a, Dir b);

struct TrainTrackOptions {
  int max_iterations = 500;
  unsigned seed = 0;  // permutes the fold tie-break order; 0 keeps index order
  int kmax = 12;
  int whitehead_depth = 8;
};

TrainTrackResult find_train_track(const Endomorphism& phi, const TrainTrackOptions& options = {});
// The folding loop alone, started from a representative f of phi.
TrainTrackResult improve_train_track(GraphMap f, const Endomorphism& phi,
                                     const TrainTrackOptions& options = {});

}  // namespace mtorus
