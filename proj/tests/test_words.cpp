#include "doctest.h"

#include <random>

#include "mtorus/words.hpp"

using namespace mtorus;

namespace {

// Reference reduction: repeatedly delete the first cancelling pair.
std::vector<Letter> naive_reduce(std::vector<Letter> v) {
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      if (v[i] == -v[i + 1]) {
        v.erase(v.begin() + i, v.begin() + i + 2);
        changed = true;
        break;
      }
  }
  return v;
}

std::vector<Letter> random_letters(std::mt19937& rng, int rank, int len) {
  std::uniform_int_distribution<int> g(1, rank), s(0, 1);
  std::vector<Letter> v;
  for (int i = 0; i < len; ++i) v.push_back(s(rng) ? g(rng) : -g(rng));
  return v;
}

// Reference conjugacy: some rotation of one cyclic core equals the other.
bool naive_conjugate(const Word& u, const Word& v) {
  Word cu = cyclic_split(u).core, cv = cyclic_split(v).core;
  if (cu.size() != cv.size()) return false;
  if (cu.empty()) return true;
  for (std::size_t k = 0; k < cu.size(); ++k)
    if (rotate(cu, k) == cv) return true;
  return false;
}

}  // namespace

TEST_CASE("free reduction agrees with pairwise cancellation") {
  std::mt19937 rng(7);
  for (int t = 0; t < 500; ++t) {
    auto v = random_letters(rng, 3, 20);
    CHECK(Word(v).vec() == naive_reduce(v));
  }
}

TEST_CASE("group axioms on random words") {
  std::mt19937 rng(11);
  for (int t = 0; t < 200; ++t) {
    Word u(random_letters(rng, 3, 8)), v(random_letters(rng, 3, 8)), w(random_letters(rng, 3, 8));
    CHECK((u * v) * w == u * (v * w));
    CHECK((u * u.inverse()).empty());
    CHECK((u * v).inverse() == v.inverse() * u.inverse());
    CHECK(u.power(3) == u * u * u);
    CHECK(u.power(-2) == u.inverse() * u.inverse());
  }
}

TEST_CASE("rendering") {
  Word w{1, 2, -1, -2};
  CHECK(w.to_string() == "abAB");
  CHECK(Word{}.to_string() == "1");
}

TEST_CASE("cyclic words are conjugacy invariants") {
  std::mt19937 rng(3);
  for (int t = 0; t < 200; ++t) {
    Word u(random_letters(rng, 2, 7)), x(random_letters(rng, 2, 5));
    Word v = x * u * x.inverse();
    CHECK(CyclicWord(u, false) == CyclicWord(v, false));
    CHECK(CyclicWord(u, true) == CyclicWord(u.inverse(), true));
    CHECK(is_conjugate(u, v));
    auto c = conjugator(u, v);
    REQUIRE(c);
    CHECK(*c * u * c->inverse() == v);
  }
  for (int t = 0; t < 300; ++t) {
    Word u(random_letters(rng, 2, 6)), v(random_letters(rng, 2, 6));
    CHECK(is_conjugate(u, v) == naive_conjugate(u, v));
  }
}

TEST_CASE("endomorphism composition and conjugation convention") {
  Endomorphism phi(2, {Word{1, 2}, Word{1}});
  Endomorphism phi2 = phi.power(2);
  CHECK(phi2.image(1) == Word{1, 2, 1});
  CHECK(compose(phi, phi) == phi2);
  Word x{2, 1};
  auto ix = Endomorphism::conjugation_by(2, x);
  Word g{1, 1, -2};
  CHECK(ix.apply(g) == x.inverse() * g * x);
}

TEST_CASE("inner power detects finite order outer classes") {
  // a -> b, b -> a: the square is the identity.
  Endomorphism swap(2, {Word{2}, Word{1}});
  auto ip = inner_power(swap, 6);
  REQUIRE(ip);
  CHECK(ip->k == 2);
  // Composition with an inner automorphism keeps the outer order.
  Word x{1, 2, 2};
  auto twisted = compose(Endomorphism::conjugation_by(2, x), swap);
  auto ip2 = inner_power(twisted, 6);
  REQUIRE(ip2);
  CHECK(ip2->k == 2);
  for (int i = 1; i <= 2; ++i) {
    Word g = Word::generator(i);
    CHECK(twisted.power(2).apply(g) == ip2->conjugator * g * ip2->conjugator.inverse());
  }
  Endomorphism golden(2, {Word{1, 2}, Word{1}});
  CHECK_FALSE(inner_power(golden, 8));
}

TEST_CASE("periodic conjugacy search") {
  // The commutator class is fixed up to orientation by a -> ab, b -> a.
  Endomorphism golden(2, {Word{1, 2}, Word{1}});
  auto w = periodic_conjugacy_search(golden, 4, 6);
  REQUIRE(w);
  CHECK(w->cls.size() == 4);
  Word a = w->cls.word();
  Word img = golden.power(w->period).apply(a);
  CHECK(img == w->conjugator * a.power(w->orientation) * w->conjugator.inverse());

  // a -> ab, b -> bab has no periodic classes (abelianization has no roots of unity
  // fixing a primitive vector other than through the commutator).
  Endomorphism phi(2, {Word{1, 2}, Word{2, 1, 2}});
  auto v = periodic_conjugacy_search(phi, 3, 6);
  if (v) {
    Word b = v->cls.word();
    CHECK(phi.power(v->period).apply(b) == v->conjugator * b.power(v->orientation) * v->conjugator.inverse());
  }
}

TEST_CASE("common conjugator") {
  Endomorphism phi(2, {Word{1, 2}, Word{1}});
  Word x{2, -1};
  auto psi = compose(Endomorphism::conjugation_by(2, x), phi);
  auto c = common_conjugator(psi, phi);
  REQUIRE(c);
  for (int i = 1; i <= 2; ++i)
    CHECK(psi.image(i) == *c * phi.image(i) * c->inverse());
}
