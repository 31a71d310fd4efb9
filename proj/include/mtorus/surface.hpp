#pragma once

// Surfaces carried by Nielsen loop systems, and the top-level classification.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mtorus/nielsen.hpp"
#include "mtorus/subgroups.hpp"
#include "mtorus/train_track.hpp"
#include "mtorus/words.hpp"

namespace mtorus {

struct SurfaceRealization {
  int genus = 0;
  int boundary = 0;
  bool transitive_boundary = false;
  int euler_char = 0;
  double lambda = 0;
  bool fully_irreducible = false;     // b == 1
  std::vector<CyclicWord> loops;      // boundary classes
  std::vector<int> permutation;       // loop i is carried to loop permutation[i]
};

struct NotSurface {
  std::string diagnostic;
};

using SurfaceResult = std::variant<SurfaceRealization, NotSurface>;

// Link of a vertex: directions joined by the turns the loops take there.
struct VertexLink {
  int vertex = 0;
  std::vector<Dir> directions;
  std::vector<std::pair<Dir, Dir>> turns;
  int components = 0;
  bool circles = false;  // every direction has degree 2
};
std::vector<VertexLink> vertex_links(const GraphMap& f, const std::vector<EdgePath>& loops);

// Requires every edge to be crossed exactly twice by the loops; throws Error otherwise.
SurfaceResult realize_surface(const StableRepresentative& stable, const NielsenLoops& loops,
                              const Endomorphism& phi);

struct Reducible {
  ReductionWitness witness;
};
struct GeometricPA {
  SurfaceRealization surface;
};
struct IrreducibleAtoroidal {
  double lambda = 0;
  double length_bound = 0;
  int period_bound = 0;
  int whitehead_depth = 0;
  bool irreducibility_bounded = true;  // only the bounded free factor search backs irreducibility
};
struct FiniteOrder {
  int k = 0;
  Word conjugator;
};
struct VerdictUnknown {
  std::string reason;
};
using Verdict = std::variant<Reducible, GeometricPA, IrreducibleAtoroidal, FiniteOrder, VerdictUnknown>;

std::string verdict_name(const Verdict& v);

struct ClassifyBounds {
  int whitehead_depth = 3;
  int period_bound = 8;
  unsigned seed = 0;
  int max_iterations = 500;
  int kmax = 12;
};

struct Classification {
  Verdict verdict;
  std::optional<TrainTrack> train_track;
  std::optional<StableRepresentative> stable;
  std::optional<NielsenLoops> loops;
  std::vector<std::string> notes;
  // Set when a stable representative with Nielsen loops fails the edge
  // multiplicity check and no reduction explains it.
  std::string inconsistency;
};

Classification classify(const Endomorphism& phi, const ClassifyBounds& bounds = {});

}  // namespace mtorus
