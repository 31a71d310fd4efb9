#include "doctest.h"

#include <random>

#include "mtorus/whitehead.hpp"

using namespace mtorus;

namespace {

Word random_word(std::mt19937& rng, int rank, int len) {
  std::uniform_int_distribution<int> g(1, rank), s(0, 1);
  std::vector<Letter> v;
  for (int i = 0; i < len; ++i) v.push_back(s(rng) ? g(rng) : -g(rng));
  return Word(v);
}

Endomorphism random_auto(std::mt19937& rng, int rank, int steps) {
  auto moves = nielsen_moves(rank);
  std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
  Endomorphism a = Endomorphism::identity(rank);
  for (int i = 0; i < steps; ++i) a = compose(a, moves[pick(rng)]);
  return a;
}

}  // namespace

TEST_CASE("Whitehead automorphisms are invertible") {
  for (const auto& w : whitehead_automorphisms(3)) {
    auto f = w.as_endomorphism(3);
    auto g = w.inverse().as_endomorphism(3);
    CHECK(compose(f, g) == Endomorphism::identity(3));
  }
  CHECK(whitehead_automorphisms(2).size() == 4 * 3);
}

TEST_CASE("primitive elements lie in a proper free factor") {
  std::mt19937 rng(23);
  for (int t = 0; t < 25; ++t) {
    auto alpha = random_auto(rng, 2 + t % 2, 5);
    Word p = alpha.apply(Word{1});
    SubgroupGraph g = stallings({p.power(1 + t % 3)}, alpha.rank());
    auto res = free_factor_containment(g, 40);
    auto* c = std::get_if<Contained>(&res);
    REQUIRE(c);
    CHECK(contains_all(stallings(c->factor_basis, alpha.rank()), g.basis()));
  }
}

TEST_CASE("elements filling the free group") {
  auto res = free_factor_containment(stallings({Word{1, 2, -1, -2}}, 2));
  CHECK(std::holds_alternative<NotContained>(res));
  res = free_factor_containment(stallings({Word{1, 1, 2, 2}}, 2));
  CHECK(std::holds_alternative<NotContained>(res));
  res = free_factor_containment(full_group(2));
  CHECK(std::holds_alternative<NotContained>(res));
  res = free_factor_containment(stallings({Word{1, 2, -1, -2, 3, 3}}, 3));
  CHECK(std::holds_alternative<NotContained>(res));
}

TEST_CASE("containment agrees with exhaustive search") {
  std::mt19937 rng(29);
  int decided = 0;
  for (int t = 0; t < 80; ++t) {
    std::vector<Word> gens{random_word(rng, 2, 2 + t % 4)};
    if (t % 3 == 0) gens.push_back(random_word(rng, 2, 3));
    SubgroupGraph g = stallings(gens, 2);
    auto res = free_factor_containment(g, 10);
    if (std::holds_alternative<ContainmentUnknown>(res)) continue;
    ++decided;
    CHECK(std::holds_alternative<Contained>(res) == contained_by_exhaustion(g));
  }
  CHECK(decided > 60);
}

TEST_CASE("reduction search") {
  Endomorphism swap(2, {Word{2}, Word{1}});
  auto s = search_reduction(swap, 1);
  REQUIRE(s);
  CHECK(s->verify(swap));
  Endomorphism tri(3, {Word{1}, Word{2, 1}, Word{3, 2}});
  auto r = search_reduction(tri, 1);
  REQUIRE(r);
  CHECK(r->verify(tri));
  // Invariant factor hidden by a change of basis.
  Endomorphism beta(2, {Word{1, 2}, Word{2}});
  Endomorphism inv(2, {Word{1, -2}, Word{2}});
  Endomorphism psi = compose(beta, compose(Endomorphism(2, {Word{1}, Word{1, 2}}), inv));
  auto h = search_reduction(psi, 2);
  REQUIRE(h);
  CHECK(h->verify(psi));
  Endomorphism golden(2, {Word{1, 2}, Word{1}});
  CHECK_FALSE(search_reduction(golden, 2));
}
