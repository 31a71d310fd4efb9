#include "doctest.h"

#include <cmath>
#include <random>

#include "mtorus/graph_map.hpp"
#include "mtorus/perron.hpp"
#include "mtorus/whitehead.hpp"

using namespace mtorus;

namespace {

Endomorphism random_auto(std::mt19937& rng, int rank, int steps) {
  auto moves = nielsen_moves(rank);
  std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
  Endomorphism a = Endomorphism::identity(rank);
  for (int i = 0; i < steps; ++i) a = compose(a, moves[pick(rng)]);
  return a;
}

// Largest real root of a monic integer polynomial by bisection.
double largest_root(const std::vector<long long>& c) {
  auto p = [&](double x) {
    double v = 0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + static_cast<double>(c[k]);
    return v;
  };
  double hi = 1;
  for (long long x : c) hi += std::abs(static_cast<double>(x));
  double lo = hi;
  // Walk down to the last sign change.
  const double step = 1e-3;
  while (lo > -hi && (p(lo) > 0) == (p(hi) > 0 || p(hi) == 0)) lo -= step;
  double a = lo, b = lo + step;
  for (int i = 0; i < 200; ++i) {
    double m = (a + b) / 2;
    if ((p(m) > 0) == (p(b) > 0)) b = m; else a = m;
  }
  return (a + b) / 2;
}

}  // namespace

TEST_CASE("rose representatives") {
  Endomorphism phi(2, {Word{1, 2}, Word{2, 1}});
  GraphMap f = rose_representative(phi);
  f.check();
  CHECK(f.path_string(f.image[0]) == "ab");
  CHECK(f.path_string(f.image[1]) == "ba");
  CHECK(represents(f, phi));
  GraphMap id = rose_representative(Endomorphism::identity(3));
  CHECK(id.image[2] == EdgePath{3});
}

TEST_CASE("tightening") {
  GraphMap f = rose_representative(Endomorphism::identity(2));
  f.image[0] = {1, -1, 2};
  f.image[1] = {1, 2, -2, 1};
  f = tighten(f);
  CHECK(f.image[0] == EdgePath{2});
  CHECK(f.image[1] == EdgePath{1, 1});
}

TEST_CASE("transition matrices and eigenvalues") {
  auto t = transition_matrix(rose_representative(Endomorphism(2, {Word{1, 2}, Word{2, 1}})));
  CHECK(t.matrix == std::vector<std::vector<long>>{{1, 1}, {1, 1}});
  CHECK(t.lambda == doctest::Approx(2.0).epsilon(1e-12));
  auto g = transition_matrix(rose_representative(Endomorphism(2, {Word{1, 2}, Word{1}})));
  CHECK(g.matrix == std::vector<std::vector<long>>{{1, 1}, {1, 0}});
  CHECK(std::abs(g.lambda - (1 + std::sqrt(5.0)) / 2) < 1e-12);
  auto id = transition_matrix(rose_representative(Endomorphism::identity(2)));
  CHECK_FALSE(id.irreducible);
  CHECK(id.lambda == doctest::Approx(1.0));
  CHECK_FALSE(id.expanding());
}

TEST_CASE("Perron-Frobenius data against the characteristic polynomial") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> entry(0, 3);
  int checked = 0;
  for (int t = 0; t < 200 && checked < 60; ++t) {
    int n = 2 + t % 4;
    IntMatrix m(n, std::vector<long>(n));
    for (auto& row : m)
      for (auto& x : row) x = entry(rng) == 0 ? 1 : entry(rng) / 2;
    if (!is_irreducible(m)) continue;
    ++checked;
    auto pf = perron_frobenius(m);
    auto c = characteristic_polynomial(m);
    CHECK(std::abs(pf.lambda - largest_root(c)) < 1e-9);
    CHECK(pf.residual < 1e-9);
    CHECK(pf.certified);
    for (double x : pf.left) CHECK(x > 0);
    for (double x : pf.right) CHECK(x > 0);
  }
  CHECK(checked >= 30);
}

TEST_CASE("column sums are image lengths") {
  std::mt19937 rng(37);
  for (int t = 0; t < 20; ++t) {
    auto phi = random_auto(rng, 3, 6);
    GraphMap f = rose_representative(phi);
    auto m = f.matrix();
    for (int e = 0; e < f.num_edges(); ++e) {
      long s = 0;
      for (int x = 0; x < f.num_edges(); ++x) s += m[x][e];
      CHECK(s == static_cast<long>(f.image[e].size()));
    }
  }
}

TEST_CASE("moves preserve the represented outer class") {
  std::mt19937 rng(41);
  for (int t = 0; t < 40; ++t) {
    auto phi = random_auto(rng, 2 + t % 2, 4 + t % 5);
    GraphMap f = rose_representative(phi);
    for (int step = 0; step < 12; ++step) {
      std::vector<Move> options;
      for (int e = 0; e < f.num_edges(); ++e)
        if (f.image[e].size() >= 2) options.push_back(Subdivide{e, 1 + rng() % (f.image[e].size() - 1)});
      for (int v = 0; v < f.num_vertices; ++v) {
        auto dirs = f.directions_at(v);
        if ((dirs.size() == 2 && edge_of(dirs[0]) != edge_of(dirs[1])) || dirs.size() == 1)
          options.push_back(RemoveValence12{v});
        for (Dir a : dirs)
          for (Dir b : dirs)
            if (a < b && edge_of(a) != edge_of(b) && f.image_of(a) == f.image_of(b) &&
                f.terminus(a) != f.terminus(b))
              options.push_back(Fold{a, b});
      }
      for (int e = 0; e < f.num_edges(); ++e)
        if (f.image[e].empty() && f.ends[e][0] != f.ends[e][1]) options.push_back(CollapseForest{{e}});
      if (options.empty()) break;
      f = bh_move(f, options[rng() % options.size()]);
      REQUIRE_NOTHROW(f.check());
      CHECK(represents(f, phi));
    }
  }
}

TEST_CASE("subdivision then collapse returns the original map") {
  Endomorphism phi(2, {Word{1, 2}, Word{1}});
  GraphMap f = rose_representative(phi);
  GraphMap g = bh_move(f, Subdivide{0, 1});
  CHECK(g.num_edges() == 3);
  CHECK(g.num_vertices == 2);
  CHECK(bh_move(f, CollapseForest{}).image == f.image);
  // Removing the new valence-two vertex undoes the subdivision.
  GraphMap h = bh_move(g, RemoveValence12{1});
  CHECK(h.num_edges() == 2);
  CHECK(represents(h, phi));
  CHECK(h.matrix() == f.matrix());
}

TEST_CASE("folding edges with equal images") {
  // a -> ab, b -> a on the rose, subdivided so two edges share an image.
  Endomorphism phi(2, {Word{1, 2}, Word{1}});
  GraphMap f = bh_move(rose_representative(phi), Subdivide{0, 1});
  // Directions at vertex 0 whose images coincide.
  Dir a = 0, b = 0;
  auto dirs = f.directions_at(0);
  for (Dir x : dirs)
    for (Dir y : dirs)
      if (x < y && edge_of(x) != edge_of(y) && f.image_of(x) == f.image_of(y) && f.terminus(x) != f.terminus(y)) {
        a = x;
        b = y;
      }
  REQUIRE(a != 0);
  GraphMap g = bh_move(f, Fold{a, b});
  CHECK(g.num_edges() == f.num_edges() - 1);
  CHECK(g.num_edges() - g.num_vertices + 1 == 2);
  CHECK(represents(g, phi));
}

TEST_CASE("invalid moves are rejected") {
  GraphMap f = rose_representative(Endomorphism(2, {Word{1, 2}, Word{1}}));
  CHECK_THROWS_AS(bh_move(f, Subdivide{0, 0}), Error);
  CHECK_THROWS_AS(bh_move(f, Subdivide{5, 1}), Error);
  CHECK_THROWS_AS(bh_move(f, Fold{1, 2}), Error);
  CHECK_THROWS_AS(bh_move(f, CollapseForest{{0}}), Error);
  CHECK_THROWS_AS(bh_move(f, RemoveValence12{0}), Error);
}
