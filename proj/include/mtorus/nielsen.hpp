#pragma once

// Periodic indivisible Nielsen paths of expanding train tracks.
//
// Lengths are measured in the metric carried by GraphMap::length, which must
// satisfy length(f(e)) = lambda * length(e). Paths may start and end inside
// edges: the halves of a Nielsen path are stored as edge paths whose outer edge
// is only partially covered, together with their common metric length.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mtorus/graph_map.hpp"
#include "mtorus/train_track.hpp"
#include "mtorus/words.hpp"

namespace mtorus {

struct NielsenPath {
  int vertex = 0;         // the illegal turn
  EdgePath alpha;         // ends at the turn; its first edge may be partial
  EdgePath beta;          // starts at the turn; its last edge may be partial
  double half = 0;        // length of alpha, equal to the length of beta
  int period = 1;         // least k with f^k(rho) = rho or its reverse, rel endpoints
  bool reversing = false; // f^period reverses rho

  EdgePath path() const;
  double volume() const { return 2 * half; }
};

struct NielsenOrbit {
  std::vector<NielsenPath> paths;      // rho_0 .. rho_m with rho_i = f(rho_{i-1})
  std::vector<EdgePath> connectors;    // tau_0 .. tau_m; tau_0 closes the orbit
  bool orientation_reversal = false;   // f(rho_m) is the reverse of rho_0
  double volume() const;
};

struct PinpSearch {
  std::vector<NielsenPath> paths;
  double length_bound = 0;  // bound on the half length
  int period_bound = 0;
  long candidates = 0;      // search nodes visited
  bool complete = true;     // false if a node or image budget was exhausted
};

// Lengths satisfying length(f(e)) = lambda length(e): the map's own lengths
// when they do, the normalized eigenmetric otherwise.
std::vector<double> metric_lengths(const TrainTrack& tt);

// Lipschitz-sum cancellation bound, in the metric.
double bounded_cancellation(const TrainTrack& tt);

PinpSearch enumerate_pinps(const TrainTrack& tt, int period_bound = 8);

// Image of a Nielsen path under f, tightened rel endpoints. `tau` receives the
// cancelled segment, read from the new turn outward.
NielsenPath nielsen_image(const TrainTrack& tt, const NielsenPath& rho, EdgePath* tau = nullptr);
bool same_path(const NielsenPath& a, const NielsenPath& b, bool allow_reverse);

std::vector<NielsenOrbit> nielsen_orbits(const TrainTrack& tt, const std::vector<NielsenPath>& paths);
// Symbolic check of f(alpha_{i-1}) = alpha_i tau_i, f(beta_{i-1}) = tau_i^-1 beta_i.
bool check_orbit(const TrainTrack& tt, const NielsenOrbit& orbit);

struct LegalSegments {
  int count = 0;
  std::vector<EdgePath> segments;
};
// Splits a cyclically tight loop at its illegal turns.
LegalSegments max_legal_segments(const TrainTrack& tt, const EdgePath& loop);

struct FoldStep {
  double x = 0;               // metric length folded
  double graph_decrease = 0;  // recomputed vol(G) - vol(G')
  double orbit_decrease = 0;  // recomputed vol(orbit) - vol(orbit')
  bool full = false;
  std::string turn;
  int turn_paths = 1;  // orbit paths whose illegal turn is the folded one; each loses 2x
};

struct FoldOrbitResult {
  TrainTrack tt;
  NielsenOrbit orbit;
  FoldStep step;
};

// Folds the illegal turn of one orbit path with nontrivial connector, full
// folds first. Throws Error if no connector is nontrivial.
FoldOrbitResult fold_orbit(const TrainTrack& tt, const NielsenOrbit& orbit);

struct CriticalEquation {
  double residual = 0;  // |vol(orbit) - 2 vol(G)| with vol(G) = 1
  bool no_orbit = false;
};
CriticalEquation critical_equation(const TrainTrack& tt, const NielsenOrbit* orbit);

struct StableRepresentative {
  TrainTrack tt;
  std::optional<NielsenOrbit> orbit;
  PinpSearch search;
  int orbit_count = 0;
  std::vector<FoldStep> folds;
  // tt represents g -> x^-1 phi(g) x for this x, a representative of the same outer class.
  Word inner;
};

using StabilizeResult = std::variant<StableRepresentative, ReductionWitness, TrainTrackUnknown>;

struct NielsenOptions {
  int period_bound = 8;
  int max_folds = 32;
  TrainTrackOptions train_track;
};

// Throws Error unless phi has an expanding irreducible train track.
StabilizeResult stabilize(const Endomorphism& phi, const NielsenOptions& options = {});
StabilizeResult stabilize(const TrainTrack& tt, const Endomorphism& phi,
                          const NielsenOptions& options = {});

struct NielsenLoop {
  EdgePath path;
  CyclicWord cls;  // unoriented conjugacy class in F
};

struct NielsenLoops {
  std::vector<NielsenLoop> loops;
  std::map<int, double> multiplicity;  // edge -> covered length / edge length
  bool consistent = false;             // every multiplicity equals 2
};

// Loops assembled from concatenations of orbit paths. Throws Error without an orbit.
NielsenLoops nielsen_loops(const StableRepresentative& stable);
NielsenLoops nielsen_loops(const TrainTrack& tt, const NielsenOrbit& orbit);
NielsenLoops nielsen_loops(const TrainTrack& tt, const std::vector<NielsenPath>& paths);

struct Atoroidal {
  double length_bound = 0;
  int period_bound = 0;
  double lambda = 0;
};
struct Toroidal {
  CyclicWord witness;  // oriented class
  int period = 0;
  bool cross_validated = false;  // found by both the word search and the Nielsen paths
  std::string source;
};
struct AtoroidalityUnknown {
  std::string reason;
};
using AtoroidalityVerdict = std::variant<Atoroidal, Toroidal, AtoroidalityUnknown>;

struct AtoroidalityBounds {
  int max_period = 6;
  int max_len = 12;
  int period_bound = 8;
  TrainTrackOptions train_track;
};

AtoroidalityVerdict atoroidality_verdict(const Endomorphism& phi, const AtoroidalityBounds& bounds = {});

// Least p <= max_p with phi^p(w) conjugate to w, if any.
std::optional<int> class_period(const Endomorphism& phi, const Word& w, int max_p);

}  // namespace mtorus
