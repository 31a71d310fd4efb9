#include "doctest.h"

#include <cmath>
#include <random>

#include "mtorus/nielsen.hpp"
#include "mtorus/whitehead.hpp"

using namespace mtorus;

namespace {

const Endomorphism thue_morse(2, {Word{1, 2}, Word{2, 1}});
const Endomorphism fibonacci(2, {Word{1, 2}, Word{1}});
const Word commutator{1, 2, -1, -2};

TrainTrack track_of(const Endomorphism& phi) {
  auto r = find_train_track(phi);
  REQUIRE(std::holds_alternative<TrainTrack>(r));
  return std::get<TrainTrack>(r);
}

Endomorphism random_auto(std::mt19937& rng, int rank, int steps) {
  auto moves = nielsen_moves(rank);
  std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
  Endomorphism a = Endomorphism::identity(rank);
  for (int i = 0; i < steps; ++i) a = compose(a, moves[pick(rng)]);
  return a;
}

double length_of(const std::vector<double>& len, const EdgePath& p) {
  double s = 0;
  for (Dir d : p) s += len[edge_of(d)];
  return s;
}

// A path with real endpoints: edges, minus `head` at the start of the first
// edge and `tail` at the end of the last one.
struct RealPath {
  EdgePath edges;
  double head = 0, tail = 0;
};

void trim(RealPath& p, const std::vector<double>& len) {
  while (!p.edges.empty() && p.head >= len[edge_of(p.edges.front())] - 1e-10) {
    p.head -= len[edge_of(p.edges.front())];
    p.edges.erase(p.edges.begin());
  }
  while (!p.edges.empty() && p.tail >= len[edge_of(p.edges.back())] - 1e-10) {
    p.tail -= len[edge_of(p.edges.back())];
    p.edges.pop_back();
  }
}

RealPath real_path(const NielsenPath& rho, const std::vector<double>& len) {
  return {rho.path(), length_of(len, rho.alpha) - rho.half, length_of(len, rho.beta) - rho.half};
}

// Oracle for f_#: push the covering edge path forward, tighten, and trim the
// stretched overhang at both ends.
RealPath push(const GraphMap& f, double lambda, const std::vector<double>& len, RealPath p) {
  p.edges = f.image_of(p.edges);
  p.head *= lambda;
  p.tail *= lambda;
  trim(p, len);
  return p;
}

bool same_real(const RealPath& a, const RealPath& b, bool reverse) {
  if (!reverse) return a.edges == b.edges && std::abs(a.head - b.head) < 1e-8 && std::abs(a.tail - b.tail) < 1e-8;
  return a.edges == reversed(b.edges) && std::abs(a.head - b.tail) < 1e-8 && std::abs(a.tail - b.head) < 1e-8;
}

// Brute-force piNps with both endpoints at vertices: edge paths alpha beta of
// legal halves, fixed by f^k_# up to reversal.
std::vector<EdgePath> vertex_pinps_oracle(const TrainTrack& tt, int max_edges, int max_k) {
  const GraphMap& f = tt.map;
  std::vector<EdgePath> legal;
  std::vector<EdgePath> frontier;
  for (int i = 0; i < 2 * f.num_edges(); ++i) frontier.push_back({index_dir(i)});
  while (!frontier.empty()) {
    EdgePath p = frontier.back();
    frontier.pop_back();
    legal.push_back(p);
    if (static_cast<int>(p.size()) >= max_edges) continue;
    for (Dir d : f.directions_at(f.terminus(p.back()))) {
      if (d == -p.back() || tt.gates.same(-p.back(), d)) continue;
      EdgePath q = p;
      q.push_back(d);
      frontier.push_back(q);
    }
  }
  std::vector<EdgePath> out;
  for (const auto& a : legal)
    for (const auto& b : legal) {
      if (f.terminus(a.back()) != f.origin(b.front())) continue;
      if (b.front() == -a.back() || !tt.gates.same(-a.back(), b.front())) continue;
      if (f.vertex_image[f.origin(a.front())] != f.origin(a.front())) continue;
      EdgePath rho = a;
      rho.insert(rho.end(), b.begin(), b.end());
      EdgePath im = rho;
      for (int k = 1; k <= max_k; ++k) {
        im = f.image_of(im);
        if (im == rho || im == reversed(rho)) {
          out.push_back(rho);
          break;
        }
      }
    }
  return out;
}

}  // namespace

TEST_CASE("the Thue-Morse endomorphism has no periodic Nielsen paths") {
  auto tt = track_of(thue_morse);
  auto s = enumerate_pinps(tt, 8);
  CHECK(s.complete);
  CHECK(s.paths.empty());
  CHECK(s.length_bound > 0);
  auto v = atoroidality_verdict(thue_morse);
  CHECK(std::holds_alternative<Atoroidal>(v));
}

TEST_CASE("a -> ab, b -> a has one reversing Nielsen path") {
  auto tt = track_of(fibonacci);
  auto s = enumerate_pinps(tt, 8);
  REQUIRE(s.paths.size() == 1);
  const NielsenPath& rho = s.paths[0];
  CHECK(rho.period == 1);
  CHECK(rho.reversing);
  CHECK(rho.half == doctest::Approx(1.0).epsilon(1e-12));  // vol(G) = 1
  CHECK(CyclicWord(tt.map.word(rho.path())) == CyclicWord(commutator));

  auto oracle = vertex_pinps_oracle(tt, 6, 4);
  REQUIRE(oracle.size() == 2);  // rho and its reverse
  CHECK((oracle[0] == rho.path() || oracle[1] == rho.path()));

  auto orbits = nielsen_orbits(tt, s.paths);
  REQUIRE(orbits.size() == 1);
  CHECK(orbits[0].orientation_reversal);
  CHECK(check_orbit(tt, orbits[0]));
  CHECK(critical_equation(tt, &orbits[0]).residual < 1e-9);
  CHECK(critical_equation(tt, nullptr).residual == 2.0);
  CHECK(critical_equation(tt, nullptr).no_orbit);

  auto loops = nielsen_loops(tt, orbits[0]);
  REQUIRE(loops.loops.size() == 1);
  CHECK(is_conjugate(loops.loops[0].cls.word(), commutator, true));
  CHECK(loops.consistent);
  CHECK(loops.multiplicity.at(0) == doctest::Approx(2.0));
  CHECK(loops.multiplicity.at(1) == doctest::Approx(2.0));
}

TEST_CASE("maximal legal segments") {
  auto tt = track_of(fibonacci);
  CHECK(max_legal_segments(tt, {1, 2}).count == 1);
  auto one = max_legal_segments(tt, {-2, -1, 2, 1});
  CHECK(one.count == 1);
  CHECK(one.segments[0] == EdgePath{2, 1, -2, -1});
  auto two = max_legal_segments(tt, {-1, 2, -1, 2});
  CHECK(two.count == 2);
  for (const auto& seg : two.segments) CHECK(!legality(tt.map, tt.gates, seg));
}

TEST_CASE("fold_orbit bookkeeping") {
  for (const auto& phi : {fibonacci, Endomorphism(2, {Word{1, 1, 2}, Word{1, 2}}),
                          Endomorphism(2, {Word{1, 2, 1}, Word{1, 2}})}) {
    auto tt = track_of(phi);
    auto orbits = nielsen_orbits(tt, enumerate_pinps(tt, 8).paths);
    REQUIRE(!orbits.empty());
    for (const auto& orbit : orbits) {
      auto r = fold_orbit(tt, orbit);
      CHECK(r.step.x > 0);
      CHECK(std::abs(r.step.graph_decrease - r.step.x) < 1e-9);
      CHECK(std::abs(r.step.orbit_decrease - 2 * r.step.x) < 1e-9);
      CHECK(check_orbit(r.tt, r.orbit));
      CHECK(represents(r.tt.map, phi));
      // Independent recount of the volumes.
      double before = 0, after = 0;
      for (double l : metric_lengths(tt)) before += l;
      for (double l : r.tt.map.length) after += l;
      CHECK(std::abs(before - after - r.step.x) < 1e-9);
    }
  }
  auto tt = track_of(fibonacci);
  auto orbit = nielsen_orbits(tt, enumerate_pinps(tt, 8).paths).at(0);
  // The single fold available on a -> ab, b -> a folds b over the start of a.
  CHECK(fold_orbit(tt, orbit).step.full);
  for (auto& c : orbit.connectors) c.clear();
  CHECK_THROWS_AS(fold_orbit(tt, orbit), Error);
}

TEST_CASE("stabilize") {
  auto atoroidal = stabilize(thue_morse);
  REQUIRE(std::holds_alternative<StableRepresentative>(atoroidal));
  CHECK(!std::get<StableRepresentative>(atoroidal).orbit);

  auto geometric = stabilize(fibonacci);
  REQUIRE(std::holds_alternative<StableRepresentative>(geometric));
  const auto& st = std::get<StableRepresentative>(geometric);
  CHECK(st.orbit_count == 1);
  CHECK(critical_equation(st.tt, &*st.orbit).residual < 1e-9);

  // Two fixed Nielsen paths meeting inside edges: the rose of a conjugate
  // representative carries a single one.
  auto split = stabilize(Endomorphism(2, {Word{1, 1, 2}, Word{1, 2}}));
  REQUIRE(std::holds_alternative<StableRepresentative>(split));
  const auto& st2 = std::get<StableRepresentative>(split);
  CHECK(st2.orbit_count == 1);
  auto loops = nielsen_loops(st2);
  CHECK(loops.consistent);
  REQUIRE(loops.loops.size() == 1);
  CHECK(is_conjugate(loops.loops[0].cls.word(), commutator, true));

  CHECK_THROWS_AS(stabilize(Endomorphism(2, {Word{2}, Word{1}})), Error);
}

TEST_CASE("atoroidality verdicts") {
  auto fib = atoroidality_verdict(fibonacci);
  REQUIRE(std::holds_alternative<Toroidal>(fib));
  const auto& t = std::get<Toroidal>(fib);
  CHECK(t.period == 2);
  CHECK(t.cross_validated);
  CHECK(is_conjugate(t.witness.word(), commutator, true));

  auto id = atoroidality_verdict(Endomorphism::identity(2));
  REQUIRE(std::holds_alternative<Toroidal>(id));
  CHECK(std::get<Toroidal>(id).period == 1);
  CHECK(std::get<Toroidal>(id).witness.word() == Word{1});

  CHECK(class_period(fibonacci, commutator, 4) == 2);
  CHECK(!class_period(thue_morse, Word{1}, 4));
}

TEST_CASE("Nielsen paths of random automorphisms") {
  std::mt19937 rng(7);
  int expanding = 0;
  for (int t = 0; t < 40; ++t) {
    auto phi = random_auto(rng, 2 + t % 2, 5 + t % 5);
    auto r = find_train_track(phi);
    auto* tt = std::get_if<TrainTrack>(&r);
    if (!tt) continue;
    ++expanding;
    auto s = enumerate_pinps(*tt, 4);
    const auto len = metric_lengths(*tt);
    for (const auto& rho : s.paths) {
      // One illegal turn, at the junction.
      CHECK(!legality(tt->map, tt->gates, rho.alpha));
      CHECK(!legality(tt->map, tt->gates, rho.beta));
      CHECK(tt->gates.same(-rho.alpha.back(), rho.beta.front()));
      CHECK(length_of(len, rho.alpha) >= rho.half - 1e-9);
      CHECK(rho.half <= s.length_bound + 1e-9);
      // Oracle: f^period_# returns rho, reversed when flagged.
      RealPath p = real_path(rho, len);
      RealPath q = p;
      for (int k = 0; k < rho.period; ++k) q = push(tt->map, tt->transition.lambda, len, q);
      CHECK(same_real(q, p, rho.reversing));
    }
    for (const auto& orbit : nielsen_orbits(*tt, s.paths)) CHECK(check_orbit(*tt, orbit));
    // Agreement with the bounded word search where both are definite; the
    // search is only cheap enough in rank 2.
    if (phi.rank() != 2) continue;
    auto v = atoroidality_verdict(phi);
    auto w = periodic_conjugacy_search(phi, 6, 12);
    if (std::holds_alternative<Atoroidal>(v)) CHECK(!w);
    if (auto* tor = std::get_if<Toroidal>(&v); tor && w) CHECK(is_conjugate(tor->witness.word(), w->cls.word(), true));
  }
  CHECK(expanding > 10);
}
