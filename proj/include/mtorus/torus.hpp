#pragma once

// Mapping tori G = <F, t | t^-1 a t = phi(a)> and their subgroups built from
// reductions and periodic classes.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mtorus/nielsen.hpp"
#include "mtorus/subgroups.hpp"
#include "mtorus/surface.hpp"
#include "mtorus/words.hpp"

namespace mtorus {

// F *_A = <F, t | t^-1 a t = phi(a), a in A>.
struct HNNPresentation {
  int ambient_rank = 0;
  SubgroupGraph factor;
  std::vector<Word> basis;   // of A
  std::vector<Word> images;  // phi on the basis

  int factor_rank() const { return static_cast<int>(basis.size()); }
  std::vector<std::string> relators() const;
};

HNNPresentation ascending_presentation(const Endomorphism& phi);
HNNPresentation hnn_presentation(const Endomorphism& phi, const SubgroupGraph& a);

int euler_char(const HNNPresentation& p);

// t^t_power followed by w.
struct Syllable {
  int t_power = 0;
  Word w;
};

struct TorusElement {
  std::vector<Syllable> syllables;

  static TorusElement of(const Word& w) { return {{{0, w}}}; }
  static TorusElement t(int power, const Word& x = {}) { return {{{power, x}}}; }

  int t_exponent() const;
  TorusElement inverse() const;
  friend TorusElement operator*(const TorusElement& u, const TorusElement& v);
  std::string to_string() const;
};

// gcd of the t-exponent sums; 0 when every generator lies in the fiber.
int fibration_exponent(const std::vector<TorusElement>& gens);

// <A, t^n x> for phi^n(A) <= x A x^-1, an ascending HNN extension of A.
struct WitnessSubgroup {
  std::vector<TorusElement> generators;
  SubgroupGraph factor;
  Word x;
  int n = 1;
  int euler_char = 0;
  bool cyclic = false;  // rank A = 1: chi = 0 but not a noncyclic witness
  std::string provenance;
  HNNPresentation presentation;  // over A with the map g -> x^-1 phi^n(g) x
};

// Throws Error if A is not proper or the inclusion fails.
WitnessSubgroup witness_subgroup(const Endomorphism& phi, const SubgroupGraph& a, const Word& x, int n,
                                 std::string provenance = {});

// Terms (i_x phi^n)^-k (A), k = 0 .. k_max; their union is F meet <A, t^n x>.
struct FiberChain {
  std::vector<SubgroupGraph> terms;
  std::vector<std::optional<std::size_t>> indices;
  int stable_at = -1;  // first k with term k+1 = term k
  int finite_at = -1;  // first k with finite index
  std::string conclusion;
  bool proof = false;  // the conclusion is certified, not just observed
};

// Throws Error if A is not proper or the inclusion fails.
FiberChain fiber_chain(const Endomorphism& phi, const SubgroupGraph& a, const Word& x, int n, int k_max = 8);

struct Minimal {
  std::string certificate;
};
struct NotMinimal {
  std::vector<Word> factor_basis;
};
struct MinimalityUnknown {
  std::string reason;
};
using Minimality = std::variant<Minimal, NotMinimal, MinimalityUnknown>;

// Whether phi(F) lies in a proper free factor.
Minimality minimality_check(const Endomorphism& phi, int depth = 8);

inline long chi_multiplicativity(long chi, long index) { return index * chi; }

// First k <= k_max with [F : phi^-k(K)] finite.
struct PreimageSpotCheck {
  std::vector<Word> generators;
  std::optional<int> k;
  std::optional<std::size_t> index;
};
PreimageSpotCheck preimage_spot_check(const Endomorphism& phi, const std::vector<Word>& k_gens, int k_max = 8);

struct ReportBounds {
  ClassifyBounds classify;
  AtoroidalityBounds atoroidality;
  int chain_k_max = 8;
  int minimality_depth = 8;
  std::vector<std::vector<Word>> spot_checks;
};

struct ChiZeroReport {
  Classification classification;
  Minimality minimality;
  bool hypothesis_holds = false;  // phi is minimal
  std::optional<AtoroidalityVerdict> atoroidality;
  std::optional<WitnessSubgroup> witness;
  std::optional<FiberChain> chain;
  std::vector<PreimageSpotCheck> spot_checks;
  std::vector<std::string> conclusions;
};

ChiZeroReport chi_zero_report(const Endomorphism& phi, const ReportBounds& bounds = {});

}  // namespace mtorus
