#include "mtorus/torus.hpp"

#include <numeric>

#include "mtorus/whitehead.hpp"

namespace mtorus {

namespace {

std::string basis_string(const std::vector<Word>& ws) {
  std::string s = "<";
  for (std::size_t i = 0; i < ws.size(); ++i) s += (i ? ", " : "") + ws[i].to_string();
  return s + ">";
}

// g -> x^-1 phi^n(g) x, after checking that it maps the proper subgroup A into itself.
Endomorphism restricted_map(const Endomorphism& phi, const SubgroupGraph& a, const Word& x, int n) {
  if (n < 1) throw Error("witness: n must be positive");
  if (auto i = index(a); i && *i == 1) throw Error("witness: the factor must be a proper subgroup");
  const Endomorphism psi = compose(Endomorphism::conjugation_by(phi.rank(), x), phi.power(n));
  for (const Word& b : a.basis())
    if (!contains(a, psi.apply(b)))
      throw Error("witness: phi^" + std::to_string(n) + "(" + b.to_string() + ") is not in x A x^-1");
  return psi;
}

}  // namespace

std::vector<std::string> HNNPresentation::relators() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < basis.size(); ++i)
    out.push_back("t^-1 " + basis[i].to_string() + " t = " + images[i].to_string());
  return out;
}

HNNPresentation hnn_presentation(const Endomorphism& phi, const SubgroupGraph& a) {
  HNNPresentation p;
  p.ambient_rank = phi.rank();
  p.factor = a;
  p.basis = a.basis();
  for (const Word& b : p.basis) p.images.push_back(phi.apply(b));
  return p;
}

HNNPresentation ascending_presentation(const Endomorphism& phi) {
  return hnn_presentation(phi, full_group(phi.rank()));
}

int euler_char(const HNNPresentation& p) { return p.factor_rank() - p.ambient_rank; }

int TorusElement::t_exponent() const {
  int s = 0;
  for (const auto& y : syllables) s += y.t_power;
  return s;
}

TorusElement operator*(const TorusElement& u, const TorusElement& v) {
  // Only the first syllable may have t_power 0.
  TorusElement out = u;
  auto& s = out.syllables;
  for (const Syllable& y : v.syllables) {
    if (s.empty()) {
      s.push_back(y);
    } else if (y.t_power == 0) {
      s.back().w *= y.w;
    } else if (s.back().w.empty()) {
      s.back().t_power += y.t_power;
      s.back().w = y.w;
      if (s.back().t_power == 0 && s.size() > 1) {
        const Word w = s.back().w;
        s.pop_back();
        s.back().w *= w;
      }
    } else {
      s.push_back(y);
    }
  }
  if (s.size() == 1 && s[0].t_power == 0 && s[0].w.empty()) s.clear();
  return out;
}

TorusElement TorusElement::inverse() const {
  TorusElement out;
  for (auto it = syllables.rbegin(); it != syllables.rend(); ++it)
    out = out * of(it->w.inverse()) * t(-it->t_power);
  return out;
}

std::string TorusElement::to_string() const {
  std::string s;
  for (const auto& y : syllables) {
    if (y.t_power != 0) {
      if (!s.empty()) s += ' ';
      s += y.t_power == 1 ? "t" : "t^" + std::to_string(y.t_power);
    }
    if (!y.w.empty()) {
      if (!s.empty()) s += ' ';
      s += y.w.to_string();
    }
  }
  return s.empty() ? "1" : s;
}

int fibration_exponent(const std::vector<TorusElement>& gens) {
  int d = 0;
  for (const auto& g : gens) d = std::gcd(d, g.t_exponent());
  return d;
}

WitnessSubgroup witness_subgroup(const Endomorphism& phi, const SubgroupGraph& a, const Word& x, int n,
                                 std::string provenance) {
  const Endomorphism psi = restricted_map(phi, a, x, n);
  WitnessSubgroup w;
  w.factor = a;
  w.x = x;
  w.n = n;
  w.provenance = std::move(provenance);
  for (const Word& b : a.basis()) w.generators.push_back(TorusElement::of(b));
  w.generators.push_back(TorusElement::t(n, x));
  w.presentation.ambient_rank = a.rank();
  w.presentation.factor = a;
  w.presentation.basis = a.basis();
  for (const Word& b : w.presentation.basis) w.presentation.images.push_back(psi.apply(b));
  w.euler_char = euler_char(w.presentation);
  w.cyclic = a.rank() < 2;
  return w;
}

FiberChain fiber_chain(const Endomorphism& phi, const SubgroupGraph& a, const Word& x, int n, int k_max) {
  const Endomorphism psi = restricted_map(phi, a, x, n);
  FiberChain c;
  c.terms.push_back(a);
  for (int k = 0;; ++k) {
    c.indices.push_back(index(c.terms[k]));
    if (c.finite_at < 0 && c.indices[k]) c.finite_at = k;
    if (k == k_max) break;
    SubgroupGraph next = preimage(psi, c.terms[k]);
    if (next == c.terms[k]) {
      c.stable_at = k;
      break;
    }
    c.terms.push_back(std::move(next));
  }
  if (c.finite_at >= 0) {
    c.conclusion = "finite index " + std::to_string(*c.indices[c.finite_at]) + " at k = " +
                   std::to_string(c.finite_at) + ": the witness subgroup has finite index";
    c.proof = true;
  } else if (c.stable_at >= 0) {
    // The union of the chain is the stable term, of infinite index in F.
    c.conclusion = "infinite index (stable chain)";
    c.proof = true;
  } else {
    c.conclusion = "undetermined at k_max = " + std::to_string(k_max);
  }
  return c;
}

Minimality minimality_check(const Endomorphism& phi, int depth) {
  const Containment c = free_factor_containment(stallings(phi.images(), phi.rank()), depth);
  if (auto* in = std::get_if<Contained>(&c)) return NotMinimal{in->factor_basis};
  if (auto* out = std::get_if<NotContained>(&c)) return Minimal{out->certificate};
  return MinimalityUnknown{std::get<ContainmentUnknown>(c).reason};
}

PreimageSpotCheck preimage_spot_check(const Endomorphism& phi, const std::vector<Word>& k_gens, int k_max) {
  PreimageSpotCheck out{k_gens, std::nullopt, std::nullopt};
  SubgroupGraph term = stallings(k_gens, phi.rank());
  for (int k = 0; k <= k_max; ++k) {
    if (auto i = index(term)) {
      out.k = k;
      out.index = i;
      return out;
    }
    if (k < k_max) term = preimage(phi, term);
  }
  return out;
}

namespace {

std::string generators_string(const WitnessSubgroup& w) {
  std::string s = "<";
  for (std::size_t i = 0; i < w.generators.size(); ++i) s += (i ? ", " : "") + w.generators[i].to_string();
  return s + ">";
}

// <w, t^p x> with phi^p(w) = x w x^-1: a Z^2 when w is not a proper power.
void periodic_witness(ChiZeroReport& r, const Endomorphism& phi, const Word& w, int p, int k_max,
                      const std::string& source) {
  const auto x = conjugator(w, phi.power(p).apply(w));
  if (!x) return;
  const SubgroupGraph a = stallings({w}, phi.rank());
  r.witness = witness_subgroup(phi, a, *x, p, source);
  r.chain = fiber_chain(phi, a, *x, p, k_max);
  std::string c = "the class of " + w.to_string() + " has period " + std::to_string(p) + ": " +
                  generators_string(*r.witness);
  if (r.chain->proof && r.chain->finite_at < 0)
    c += " is a Z^2 subgroup of infinite index, so phi is not atoroidal";
  else
    c += " has chi = 0; " + r.chain->conclusion;
  r.conclusions.push_back(c);
}

}  // namespace

ChiZeroReport chi_zero_report(const Endomorphism& phi, const ReportBounds& bounds) {
  ChiZeroReport r;
  r.minimality = minimality_check(phi, bounds.minimality_depth);
  r.hypothesis_holds = std::holds_alternative<Minimal>(r.minimality);
  if (auto* nm = std::get_if<NotMinimal>(&r.minimality))
    r.conclusions.push_back("hypothesis fails: phi(F) lies in the proper free factor " +
                            basis_string(nm->factor_basis) + ", so the chi = 0 criterion does not apply");
  else if (auto* mu = std::get_if<MinimalityUnknown>(&r.minimality))
    r.conclusions.push_back("minimality undecided: " + mu->reason);

  r.classification = classify(phi, bounds.classify);
  const Verdict& v = r.classification.verdict;
  const int k_max = bounds.chain_k_max;

  if (auto* red = std::get_if<Reducible>(&v)) {
    const FreeFactorSystem& sys = red->witness.system;
    const SubgroupGraph& a = sys.factors.front();
    const Word x = sys.cycle_conjugator(phi);
    const int n = static_cast<int>(sys.size());
    r.witness = witness_subgroup(phi, a, x, n, red->witness.provenance);
    r.chain = fiber_chain(phi, a, x, n, k_max);
    const std::string name = generators_string(*r.witness);
    if (r.chain->finite_at >= 0)
      r.conclusions.push_back(name + " has chi = 0 and finite index; phi is not minimal");
    else if (r.chain->proof && !r.witness->cyclic)
      r.conclusions.push_back(name + " is noncyclic with chi = 0 and infinite index, so phi is not irreducible and atoroidal");
    else
      r.conclusions.push_back(name + " has chi = 0; " + r.chain->conclusion +
                              (r.witness->cyclic ? "; the factor is cyclic, so it is not a noncyclic witness" : ""));
  } else if (auto* g = std::get_if<GeometricPA>(&v)) {
    const Word w = g->surface.loops.front().word();
    const int p = class_period(phi, w, 2 * g->surface.boundary).value_or(2 * g->surface.boundary);
    periodic_witness(r, phi, w, p, k_max, "boundary loop");
  } else if (auto* fo = std::get_if<FiniteOrder>(&v)) {
    const Word a = Word::generator(1);
    const int p = class_period(phi, a, fo->k).value_or(fo->k);
    periodic_witness(r, phi, a, p, k_max, "finite order");
  } else {
    if (bounds.atoroidality.max_period > 0) r.atoroidality = atoroidality_verdict(phi, bounds.atoroidality);
    if (std::holds_alternative<IrreducibleAtoroidal>(v)) {
      if (r.atoroidality && std::holds_alternative<Toroidal>(*r.atoroidality))
        r.conclusions.push_back("inconsistent: a periodic class was found for an atoroidal verdict");
      r.conclusions.push_back(
          "no noncyclic chi = 0 subgroup of infinite index exists: phi is irreducible and atoroidal "
          "(cited consequence, not searched)");
    } else if (r.atoroidality) {
      if (auto* t = std::get_if<Toroidal>(&*r.atoroidality))
        periodic_witness(r, phi, t->witness.word(), t->period, k_max, t->source);
    }
  }
  for (const auto& k : bounds.spot_checks) r.spot_checks.push_back(preimage_spot_check(phi, k, k_max));
  return r;
}

}  // namespace mtorus
