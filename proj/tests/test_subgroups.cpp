#include "doctest.h"

#include <map>
#include <queue>
#include <random>

#include "mtorus/subgroups.hpp"

using namespace mtorus;

namespace {

using Perm = std::vector<int>;

int act(const std::vector<Perm>& gens, int point, Letter l) {
  const Perm& p = gens[std::abs(l) - 1];
  if (l > 0) return p[point];
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] == point) return static_cast<int>(i);
  return -1;
}

// Schreier generators of the stabilizer of point 0, and the orbit size.
std::pair<std::vector<Word>, std::size_t> schreier(const std::vector<Perm>& gens) {
  const int rank = static_cast<int>(gens.size());
  std::map<int, Word> rep{{0, Word{}}};
  std::queue<int> q;
  q.push(0);
  while (!q.empty()) {
    int p = q.front();
    q.pop();
    for (int i = 1; i <= rank; ++i)
      for (Letter l : {i, -i}) {
        int t = act(gens, p, l);
        if (!rep.count(t)) {
          rep[t] = rep[p] * Word{l};
          q.push(t);
        }
      }
  }
  std::vector<Word> out;
  for (auto& [p, w] : rep)
    for (int i = 1; i <= rank; ++i) {
      int t = act(gens, p, i);
      Word s = w * Word{i} * rep[t].inverse();
      if (!s.empty()) out.push_back(s);
    }
  return {out, rep.size()};
}

Perm random_perm(std::mt19937& rng, int n) {
  Perm p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

Word random_word(std::mt19937& rng, int rank, int len) {
  std::uniform_int_distribution<int> g(1, rank), s(0, 1);
  std::vector<Letter> v;
  for (int i = 0; i < len; ++i) v.push_back(s(rng) ? g(rng) : -g(rng));
  return Word(v);
}

// Whether w fixes point 0 under the permutation action (membership oracle).
bool fixes(const std::vector<Perm>& gens, const Word& w) {
  int p = 0;
  for (Letter l : w.letters()) p = act(gens, p, l);
  return p == 0;
}

}  // namespace

TEST_CASE("index and membership agree with permutation stabilizers") {
  std::mt19937 rng(5);
  for (int t = 0; t < 60; ++t) {
    int rank = 2 + t % 2;
    int n = 2 + t % 5;
    std::vector<Perm> gens;
    for (int i = 0; i < rank; ++i) gens.push_back(random_perm(rng, n));
    auto [sgens, orbit] = schreier(gens);
    SubgroupGraph g = stallings(sgens, rank);
    auto idx = index(g);
    REQUIRE(idx);
    CHECK(*idx == orbit);
    // Schreier index formula for the rank.
    CHECK(g.rank() == static_cast<int>(orbit) * (rank - 1) + 1);
    for (int k = 0; k < 40; ++k) {
      Word w = random_word(rng, rank, 1 + k % 9);
      CHECK(contains(g, w) == fixes(gens, w));
    }
  }
}

TEST_CASE("basis regenerates the subgroup") {
  std::mt19937 rng(9);
  for (int t = 0; t < 50; ++t) {
    std::vector<Word> gens{random_word(rng, 2, 5), random_word(rng, 2, 4), random_word(rng, 2, 3)};
    SubgroupGraph g = stallings(gens, 2);
    SubgroupGraph h = stallings(g.basis(), 2);
    CHECK(g == h);
    CHECK(contains_all(g, gens));
    CHECK(static_cast<int>(g.basis().size()) == g.rank());
  }
}

TEST_CASE("infinite index and the trivial cases") {
  CHECK_FALSE(index(stallings({Word{1}}, 2)));
  CHECK(index(full_group(3)) == std::optional<std::size_t>(1));
  CHECK(stallings({}, 2).rank() == 0);
  CHECK(stallings({Word{1, 2}, Word{2}}, 2) == full_group(2));
}

TEST_CASE("preimage under an endomorphism") {
  std::mt19937 rng(13);
  Endomorphism phi(2, {Word{1, 2}, Word{1}});
  for (int t = 0; t < 30; ++t) {
    std::vector<Word> gens{random_word(rng, 2, 4), random_word(rng, 2, 4)};
    SubgroupGraph g = stallings(gens, 2);
    SubgroupGraph pre = preimage(phi, g);
    for (int k = 0; k < 40; ++k) {
      Word w = random_word(rng, 2, 1 + k % 7);
      CHECK(contains(pre, w) == contains(g, phi.apply(w)));
    }
  }
}

TEST_CASE("intersection") {
  std::mt19937 rng(17);
  for (int t = 0; t < 30; ++t) {
    std::vector<Perm> p1{random_perm(rng, 3), random_perm(rng, 3)};
    std::vector<Perm> p2{random_perm(rng, 4), random_perm(rng, 4)};
    SubgroupGraph g = stallings(schreier(p1).first, 2);
    SubgroupGraph h = stallings(schreier(p2).first, 2);
    SubgroupGraph i = intersect(g, h);
    for (int k = 0; k < 40; ++k) {
      Word w = random_word(rng, 2, 1 + k % 8);
      CHECK(contains(i, w) == (fixes(p1, w) && fixes(p2, w)));
    }
  }
}

TEST_CASE("conjugate into") {
  std::mt19937 rng(19);
  for (int t = 0; t < 40; ++t) {
    std::vector<Word> a{random_word(rng, 3, 3), random_word(rng, 3, 4)};
    SubgroupGraph ga = stallings(a, 3);
    Word x = random_word(rng, 3, 4);
    std::vector<Word> h{x * a[0] * a[1] * x.inverse(), x * a[1].power(2) * x.inverse()};
    auto y = conjugate_into(stallings(h, 3), ga);
    REQUIRE(y);
    for (const Word& w : h) CHECK(contains(ga, y->inverse() * w * *y));
  }
  // <a> is not conjugate into <b, c>.
  CHECK_FALSE(conjugate_into(stallings({Word{1}}, 3), stallings({Word{2}, Word{3}}, 3)));
}

TEST_CASE("free factor systems") {
  // a -> a b a^-1... the factor <a> maps into a conjugate of itself.
  Endomorphism phi(2, {Word{2, 1, -2}, Word{2, 1}});
  FreeFactorSystem sys{{stallings({Word{1}}, 2)}, {Word{2}}, "test"};
  CHECK(sys.verify(phi));
  FreeFactorSystem bad{{stallings({Word{1}}, 2)}, {Word{1}}, "test"};
  CHECK_FALSE(bad.verify(phi));
  // Two-cycle a -> b, b -> a.
  Endomorphism swap(2, {Word{2}, Word{1}});
  FreeFactorSystem cyc{{stallings({Word{1}}, 2), stallings({Word{2}}, 2)}, {Word{}, Word{}}, "test"};
  CHECK(cyc.verify(swap));
  Word x = cyc.cycle_conjugator(swap);
  CHECK(swap.power(2).apply(Word{1}) == x * Word{1} * x.inverse());
}
