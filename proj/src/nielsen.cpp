#include "mtorus/nielsen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace mtorus {

namespace {

double tol(double scale) { return 1e-9 * std::max(1.0, std::abs(scale)); }

double path_length(const std::vector<double>& len, const EdgePath& p, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n && i < p.size(); ++i) s += len[edge_of(p[i])];
  return s;
}

double path_length(const std::vector<double>& len, const EdgePath& p) {
  return path_length(len, p, p.size());
}

// Shortest prefix of p of length at least a.
EdgePath cover(const std::vector<double>& len, const EdgePath& p, double a) {
  EdgePath out;
  double s = 0;
  for (Dir d : p) {
    if (s >= a - tol(a)) break;
    out.push_back(d);
    s += len[edge_of(d)];
  }
  return out;
}

std::size_t common_prefix(const EdgePath& a, const EdgePath& b) {
  std::size_t p = 0;
  while (p < a.size() && p < b.size() && a[p] == b[p]) ++p;
  return p;
}

bool legal_step(const GraphMap& f, const Gates& g, Dir last, Dir next) {
  return f.terminus(last) == f.origin(next) && next != -last && !g.same(-last, next);
}

std::vector<Dir> legal_extensions(const GraphMap& f, const Gates& g, Dir last) {
  std::vector<Dir> out;
  for (Dir d : f.directions_at(f.terminus(last)))
    if (legal_step(f, g, last, d)) out.push_back(d);
  return out;
}

// Edges of a ray with the covered fraction of each.
std::vector<std::pair<int, double>> coverage(const std::vector<double>& len, const EdgePath& ray,
                                             double half) {
  std::vector<std::pair<int, double>> out;
  double s = 0;
  for (Dir d : ray) {
    const double l = len[edge_of(d)];
    const double part = std::min(l, half - s);
    out.emplace_back(edge_of(d), part / l);
    s += l;
  }
  return out;
}

struct Search {
  const GraphMap& f;
  const Gates& g;
  const std::vector<double>& len;
  std::vector<EdgePath> power;  // f^k per direction index
  double scale = 0;             // lambda^k - 1
  double bound = 0;
  Dir d1 = 0, d2 = 0;
  long nodes = 0, budget = 0;
  bool exhausted = false;
  std::vector<std::tuple<EdgePath, EdgePath, double, bool>> found{};

  EdgePath image(const EdgePath& p) const {
    EdgePath out;
    for (Dir d : p) {
      const EdgePath& q = power[dir_index(d)];
      out.insert(out.end(), q.begin(), q.end());
    }
    return out;
  }

  bool consistent(const EdgePath& p, const EdgePath& t, double a) const {
    double s = 0;
    for (std::size_t i = 0; i < p.size() && i < t.size(); ++i) {
      if (s >= a - tol(a)) break;
      if (p[i] != t[i]) return false;
      s += len[edge_of(p[i])];
    }
    return true;
  }

  void branch(EdgePath& p1, EdgePath& p2, bool first) {
    EdgePath& ext = first ? p1 : p2;
    for (Dir d : legal_extensions(f, g, ext.back())) {
      ext.push_back(d);
      explore(p1, p2);
      ext.pop_back();
      if (exhausted) return;
    }
  }

  void explore(EdgePath& p1, EdgePath& p2) {
    if (++nodes > budget) {
      exhausted = true;
      return;
    }
    const EdgePath q1 = image(p1), q2 = image(p2);
    const std::size_t p = common_prefix(q1, q2);
    if (p == q1.size() || p == q2.size()) {
      // Images not yet separated: the cancellation already exceeds the image
      // of the exhausted side, so its half is longer than the path itself.
      const bool first = p == q1.size();
      if (path_length(len, first ? p1 : p2) > bound + tol(bound)) return;
      branch(p1, p2, first);
      return;
    }
    if (p == 0) return;
    const double a = path_length(len, q1, p) / scale;
    if (a > bound + tol(bound)) return;
    bool reversing;
    if (q1[p] == d1 && q2[p] == d2)
      reversing = false;
    else if (q1[p] == d2 && q2[p] == d1)
      reversing = true;
    else
      return;
    const EdgePath r1(q1.begin() + static_cast<std::ptrdiff_t>(p), q1.end());
    const EdgePath r2(q2.begin() + static_cast<std::ptrdiff_t>(p), q2.end());
    const EdgePath& t1 = reversing ? r2 : r1;
    const EdgePath& t2 = reversing ? r1 : r2;
    if (!consistent(p1, t1, a) || !consistent(p2, t2, a)) return;
    const bool c1 = path_length(len, p1) >= a - tol(a);
    const bool c2 = path_length(len, p2) >= a - tol(a);
    if (c1 && c2) {
      found.emplace_back(cover(len, p1, a), cover(len, p2, a), a, reversing);
      return;
    }
    const bool first = !c1;
    EdgePath& ext = first ? p1 : p2;
    const EdgePath& target = first ? t1 : t2;
    if (target.size() > ext.size()) {
      const Dir d = target[ext.size()];
      if (!legal_step(f, g, ext.back(), d)) return;
      ext.push_back(d);
      explore(p1, p2);
      ext.pop_back();
      return;
    }
    branch(p1, p2, first);
  }
};

}  // namespace

EdgePath NielsenPath::path() const {
  EdgePath p = alpha;
  p.insert(p.end(), beta.begin(), beta.end());
  return p;
}

double NielsenOrbit::volume() const {
  double v = 0;
  for (const auto& p : paths) v += p.volume();
  return v;
}

std::vector<double> metric_lengths(const TrainTrack& tt) {
  const GraphMap& f = tt.map;
  const double lambda = tt.transition.lambda;
  bool ok = static_cast<int>(f.length.size()) == f.num_edges();
  for (int e = 0; ok && e < f.num_edges(); ++e) {
    const double l = path_length(f.length, f.image[e]);
    ok = std::abs(l - lambda * f.length[e]) <= 1e-9 * std::max(1.0, l);
  }
  return ok ? f.length : tt.transition.eigenmetric;
}

double bounded_cancellation(const TrainTrack& tt) {
  const auto len = metric_lengths(tt);
  long sum = 1;
  for (const auto& im : tt.map.image) sum += static_cast<long>(im.size()) - 1;
  return static_cast<double>(sum) * *std::max_element(len.begin(), len.end());
}

PinpSearch enumerate_pinps(const TrainTrack& tt, int period_bound) {
  const GraphMap& f = tt.map;
  const double lambda = tt.transition.lambda;
  if (!tt.transition.expanding()) throw Error("enumerate_pinps: train track is not expanding");
  const auto len = metric_lengths(tt);
  const double vol = std::accumulate(len.begin(), len.end(), 0.0);
  PinpSearch out;
  out.period_bound = period_bound;
  // Bound from bounded cancellation, rounded up in units of vol(G).
  out.length_bound = std::ceil(2 * bounded_cancellation(tt) / (lambda - 1) / vol - 1e-12) * vol;
  const int n = 2 * f.num_edges();
  std::vector<EdgePath> power(n);
  for (int i = 0; i < n; ++i) power[i] = {index_dir(i)};
  constexpr std::size_t image_budget = 20'000'000;
  constexpr long node_budget = 2'000'000;
  for (int k = 1; k <= period_bound; ++k) {
    std::size_t total = 0;
    for (auto& p : power) {
      p = f.image_of(p);
      total += p.size();
    }
    if (total > image_budget) {
      out.complete = false;
      out.period_bound = k - 1;
      break;
    }
    Search s{.f = f, .g = tt.gates, .len = len, .power = power, .scale = std::pow(lambda, k) - 1, .bound = out.length_bound};
    s.budget = node_budget;
    for (int v = 0; v < f.num_vertices; ++v) {
      auto dirs = f.directions_at(v);
      std::sort(dirs.begin(), dirs.end(), [](Dir x, Dir y) { return dir_index(x) < dir_index(y); });
      for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t j = i + 1; j < dirs.size(); ++j) {
          if (!tt.gates.same(dirs[i], dirs[j])) continue;
          s.d1 = dirs[i];
          s.d2 = dirs[j];
          s.found.clear();
          EdgePath p1{s.d1}, p2{s.d2};
          s.explore(p1, p2);
          for (auto& [r1, r2, a, reversing] : s.found) {
            NielsenPath rho{v, reversed(r1), r2, a, k, reversing};
            bool seen = false;
            for (const auto& x : out.paths) seen = seen || same_path(x, rho, true);
            if (!seen) out.paths.push_back(std::move(rho));
          }
        }
    }
    out.candidates += s.nodes;
    if (s.exhausted) out.complete = false;
  }
  return out;
}

NielsenPath nielsen_image(const TrainTrack& tt, const NielsenPath& rho, EdgePath* tau) {
  const GraphMap& f = tt.map;
  const auto len = metric_lengths(tt);
  const double lambda = tt.transition.lambda;
  const double reach = lambda * rho.half;
  const EdgePath q1 = cover(len, f.image_of(reversed(rho.alpha)), reach);
  const EdgePath q2 = cover(len, f.image_of(rho.beta), reach);
  const std::size_t p = common_prefix(q1, q2);
  if (p == q1.size() || p == q2.size()) throw Error("nielsen_image: path collapses under f");
  const EdgePath x(q1.begin(), q1.begin() + static_cast<std::ptrdiff_t>(p));
  const double half = reach - path_length(len, x);
  NielsenPath out = rho;
  out.vertex = f.origin(q1[p]);
  out.half = half;
  out.alpha = reversed(cover(len, EdgePath(q1.begin() + static_cast<std::ptrdiff_t>(p), q1.end()), half));
  out.beta = cover(len, EdgePath(q2.begin() + static_cast<std::ptrdiff_t>(p), q2.end()), half);
  if (tau) *tau = reversed(x);
  return out;
}

bool same_path(const NielsenPath& a, const NielsenPath& b, bool allow_reverse) {
  if (a.vertex != b.vertex || std::abs(a.half - b.half) > tol(a.half)) return false;
  if (a.alpha == b.alpha && a.beta == b.beta) return true;
  return allow_reverse && a.alpha == reversed(b.beta) && a.beta == reversed(b.alpha);
}

std::vector<NielsenOrbit> nielsen_orbits(const TrainTrack& tt, const std::vector<NielsenPath>& paths) {
  std::vector<NielsenOrbit> out;
  std::vector<char> used(paths.size(), 0);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (used[i]) continue;
    used[i] = 1;
    NielsenOrbit orbit;
    orbit.paths.push_back(paths[i]);
    orbit.connectors.emplace_back();
    for (std::size_t steps = 0;; ++steps) {
      if (steps > paths.size()) throw Error("nielsen_orbits: orbit does not close");
      EdgePath tau;
      NielsenPath next = nielsen_image(tt, orbit.paths.back(), &tau);
      if (same_path(next, orbit.paths.front(), true)) {
        orbit.orientation_reversal = !same_path(next, orbit.paths.front(), false);
        orbit.connectors[0] = tau;
        break;
      }
      for (std::size_t j = 0; j < paths.size(); ++j)
        if (!used[j] && same_path(next, paths[j], true)) used[j] = 1;
      orbit.paths.push_back(std::move(next));
      orbit.connectors.push_back(std::move(tau));
    }
    out.push_back(std::move(orbit));
  }
  return out;
}

bool check_orbit(const TrainTrack& tt, const NielsenOrbit& orbit) {
  const std::size_t m = orbit.paths.size();
  if (m == 0 || orbit.connectors.size() != m) return false;
  for (std::size_t i = 0; i < m; ++i) {
    EdgePath tau;
    NielsenPath next = nielsen_image(tt, orbit.paths[i], &tau);
    const std::size_t j = (i + 1) % m;
    if (tau != orbit.connectors[j]) return false;
    if (j != 0 && !same_path(next, orbit.paths[j], false)) return false;
    if (j == 0) {
      if (!same_path(next, orbit.paths[0], true)) return false;
      if (orbit.orientation_reversal == same_path(next, orbit.paths[0], false)) return false;
    }
  }
  return true;
}

LegalSegments max_legal_segments(const TrainTrack& tt, const EdgePath& loop) {
  LegalSegments out;
  const std::size_t n = loop.size();
  std::vector<std::size_t> cuts;  // segment starts
  for (std::size_t i = 0; i < n; ++i) {
    const Dir a = loop[i], b = loop[(i + 1) % n];
    if (b == -a || tt.gates.same(-a, b)) cuts.push_back((i + 1) % n);
  }
  if (cuts.empty()) {
    out.count = 1;
    out.segments.push_back(loop);
    return out;
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    const std::size_t from = cuts[c], to = cuts[(c + 1) % cuts.size()];
    EdgePath seg;
    for (std::size_t i = from; seg.empty() || i % n != to; ++i) seg.push_back(loop[i % n]);
    out.segments.push_back(std::move(seg));
  }
  out.count = static_cast<int>(out.segments.size());
  return out;
}

namespace {

// Carries Nielsen paths through the subdivisions and the fold of one turn.
struct Transport {
  GraphMap& f;
  double lambda;
  std::vector<NielsenPath>& paths;

  void recover(NielsenPath& rho, EdgePath r1, EdgePath r2) {
    tighten_path(r1);
    tighten_path(r2);
    while (!r1.empty() && !r2.empty() && r1.front() == r2.front()) {
      rho.half -= f.length[edge_of(r1.front())];
      r1.erase(r1.begin());
      r2.erase(r2.begin());
    }
    if (rho.half <= tol(1) || r1.empty() || r2.empty())
      throw Error("fold_orbit: a Nielsen path is folded away");
    rho.alpha = reversed(cover(f.length, r1, rho.half));
    rho.beta = cover(f.length, r2, rho.half);
    rho.vertex = f.origin(rho.beta.front());
  }

  template <class Fn>
  void rewrite(Fn fn) {
    for (auto& rho : paths) {
      EdgePath r1, r2;
      for (Dir d : reversed(rho.alpha)) fn(d, r1);
      for (Dir d : rho.beta) fn(d, r2);
      recover(rho, std::move(r1), std::move(r2));
    }
  }

  Dir split(Dir d, std::size_t k) {
    const int e = edge_of(d);
    const std::size_t n = f.image[e].size();
    if (k >= n) return d;
    const std::size_t at = d > 0 ? k : n - k;
    f.subdivide(e, at, path_length(f.length, f.image[e], at) / lambda);
    const int e2 = f.num_edges() - 1;
    rewrite([&](Dir x, EdgePath& out) {
      if (edge_of(x) != e) {
        out.push_back(x);
      } else if (x > 0) {
        out.push_back(dir_of(e));
        out.push_back(dir_of(e2));
      } else {
        out.push_back(-dir_of(e2));
        out.push_back(-dir_of(e));
      }
    });
    return d > 0 ? d : -dir_of(e2);
  }

  void fold(Dir d1, Dir d2) {
    const int e2 = edge_of(d2);
    f.fold(d1, d2);
    auto shift = [&](Dir x) { return edge_of(x) > e2 ? (x > 0 ? x - 1 : x + 1) : x; };
    rewrite([&](Dir x, EdgePath& out) {
      if (x == d2) x = d1;
      if (x == -d2) x = -d1;
      out.push_back(shift(x));
    });
  }

  // Folds the turn (a, b) along the common prefix of the images; returns the
  // folded length and whether a whole edge was folded.
  std::pair<double, bool> fold_turn(Dir a, Dir b) {
    const EdgePath ia = f.image_of(a), ib = f.image_of(b);
    const std::size_t p = common_prefix(ia, ib);
    if (p == 0) throw Error("fold_orbit: images of the turn do not overlap");
    const bool full = p == ia.size() || p == ib.size();
    Dir a2, b2;
    if (edge_of(a) == edge_of(b)) {
      a2 = split(a, p);
      b2 = a > 0 ? -dir_of(f.num_edges() - 1) : dir_of(edge_of(a));
      b2 = split(b2, f.image_of(a2).size());
    } else {
      a2 = split(a, p);
      b2 = split(b, f.image_of(a2).size());
      if (f.image_of(b2).size() < f.image_of(a2).size()) a2 = split(a2, f.image_of(b2).size());
    }
    const double x = f.length[edge_of(a2)];
    fold(a2, b2);
    return {x, full};
  }
};

}  // namespace

FoldOrbitResult fold_orbit(const TrainTrack& tt, const NielsenOrbit& orbit) {
  const std::size_t m = orbit.paths.size();
  if (m == 0) throw Error("fold_orbit: empty orbit");
  GraphMap f = tt.map;
  f.length = metric_lengths(tt);
  // Turn of rho_{i-1} whose connector tau_i is nontrivial. Turns crossed by
  // a single orbit path come first (a shared turn shortens the orbit by 2x
  // per path), then full folds.
  auto turn_of = [](const NielsenPath& rho) {
    const Dir a = -rho.alpha.back(), b = rho.beta.front();
    return std::pair<Dir, Dir>(std::min(a, b), std::max(a, b));
  };
  std::map<std::pair<Dir, Dir>, int> crossings;
  for (const auto& rho : orbit.paths) ++crossings[turn_of(rho)];
  std::optional<std::size_t> pick;
  std::pair<bool, bool> pick_rank{false, false};
  for (std::size_t j = 0; j < m; ++j) {
    if (orbit.connectors[(j + 1) % m].empty()) continue;
    const NielsenPath& rho = orbit.paths[j];
    const EdgePath ia = f.image_of(-rho.alpha.back()), ib = f.image_of(rho.beta.front());
    const std::size_t p = common_prefix(ia, ib);
    const std::pair<bool, bool> rank{crossings[turn_of(rho)] == 1, p == ia.size() || p == ib.size()};
    if (!pick || rank > pick_rank) {
      pick = j;
      pick_rank = rank;
    }
  }
  if (!pick) throw Error("fold_orbit: every connector is trivial");
  const double vol0 = f.volume();
  const double orbit0 = orbit.volume();
  std::vector<NielsenPath> paths = orbit.paths;
  const NielsenPath& rho = orbit.paths[*pick];
  const Dir a = -rho.alpha.back(), b = rho.beta.front();
  Transport t{f, tt.transition.lambda, paths};
  FoldStep step;
  step.turn = f.path_string({-a}) + f.path_string({b});
  step.turn_paths = crossings[turn_of(rho)];
  std::tie(step.x, step.full) = t.fold_turn(a, b);

  FoldOrbitResult out;
  out.tt = TrainTrack{f, compute_gates(f), transition_matrix(f)};
  for (const auto& im : f.image)
    if (legality(f, out.tt.gates, im)) throw Error("fold_orbit: the fold destroyed the train track property");
  out.orbit.paths = paths;
  out.orbit.connectors.resize(m);
  out.orbit.orientation_reversal = orbit.orientation_reversal;
  for (std::size_t j = 0; j < m; ++j) {
    EdgePath tau;
    NielsenPath next = nielsen_image(out.tt, paths[j], &tau);
    const std::size_t i = (j + 1) % m;
    const bool ok = i == 0 ? same_path(next, paths[0], true) : same_path(next, paths[i], false);
    if (!ok) throw Error("fold_orbit: orbit relations fail after the fold");
    out.orbit.connectors[i] = std::move(tau);
  }
  step.graph_decrease = vol0 - f.volume();
  step.orbit_decrease = orbit0 - out.orbit.volume();
  out.step = step;
  return out;
}

CriticalEquation critical_equation(const TrainTrack& tt, const NielsenOrbit* orbit) {
  const auto len = metric_lengths(tt);
  const double vol = std::accumulate(len.begin(), len.end(), 0.0);
  if (!orbit || orbit->paths.empty()) return {2.0, true};
  return {std::abs(orbit->volume() / vol - 2.0), false};
}

namespace {

// Runs fold_orbit until at most one orbit remains; nullopt if the folds revisit
// a combinatorial map or run out.
std::optional<StabilizeResult> fold_down(TrainTrack cur, const Endomorphism& phi,
                                         const NielsenOptions& options) {
  if (!cur.transition.expanding()) throw Error("stabilize: train track is not expanding");
  cur.map.length = metric_lengths(cur);
  StableRepresentative out;
  std::set<std::string> seen;
  for (int step = 0;; ++step) {
    PinpSearch search = enumerate_pinps(cur, options.period_bound);
    auto orbits = nielsen_orbits(cur, search.paths);
    if (orbits.size() <= 1) {
      out.tt = cur;
      out.search = std::move(search);
      out.orbit_count = static_cast<int>(orbits.size());
      if (!orbits.empty()) out.orbit = orbits.front();
      return out;
    }
    if (step >= options.max_folds || !seen.insert(cur.map.to_string()).second) return std::nullopt;
    FoldOrbitResult r;
    try {
      r = fold_orbit(cur, orbits.front());
    } catch (const Error&) {
      return std::nullopt;
    }
    out.folds.push_back(r.step);
    cur = std::move(r.tt);
    if (!cur.transition.irreducible) {
      if (auto sub = invariant_subgraph(cur.map))
        if (auto w = reduction_from_subgraph(cur.map, *sub, phi)) return StabilizeResult{*w};
      return std::nullopt;
    }
  }
}

}  // namespace

StabilizeResult stabilize(const TrainTrack& tt, const Endomorphism& phi, const NielsenOptions& options) {
  if (auto r = fold_down(tt, phi, options)) return *r;
  // Other topological representatives of the outer class: g -> x^-1 phi(g) x.
  const int r = phi.rank();
  std::vector<Word> xs;
  for (int a = -r; a <= r; ++a) {
    if (a == 0) continue;
    xs.push_back(Word{a});
    for (int b = -r; b <= r; ++b)
      if (b != 0 && b != -a) xs.push_back(Word{a, b});
  }
  for (const Word& x : xs) {
    const Endomorphism psi = compose(Endomorphism::conjugation_by(r, x), phi);
    TrainTrackResult t;
    try {
      t = find_train_track(psi, options.train_track);
    } catch (const Error&) {
      continue;
    }
    auto* next = std::get_if<TrainTrack>(&t);
    if (!next || !next->transition.expanding()) continue;
    if (auto res = fold_down(*next, psi, options)) {
      if (auto* st = std::get_if<StableRepresentative>(&*res)) {
        st->inner = x;
        return *st;
      }
    }
  }
  return TrainTrackUnknown{"no representative with at most one Nielsen path orbit found"};
}

StabilizeResult stabilize(const Endomorphism& phi, const NielsenOptions& options) {
  TrainTrackResult r = find_train_track(phi, options.train_track);
  if (auto* w = std::get_if<ReductionWitness>(&r)) return *w;
  if (auto* u = std::get_if<TrainTrackUnknown>(&r)) return *u;
  if (std::holds_alternative<FiniteOrderCertificate>(r))
    throw Error("stabilize: finite order, no expanding train track");
  return stabilize(std::get<TrainTrack>(r), phi, options);
}

namespace {

struct Point {
  int vertex = -1;
  int edge = -1;
  double pos = 0;
};

Point far_end(const GraphMap& f, const std::vector<double>& len, const EdgePath& ray, double half) {
  const double before = path_length(len, ray, ray.size() - 1);
  const Dir d = ray.back();
  const int e = edge_of(d);
  const double t = half - before;
  const double pos = d > 0 ? t : len[e] - t;
  if (pos <= tol(len[e])) return {f.ends[e][0], -1, 0};
  if (pos >= len[e] - tol(len[e])) return {f.ends[e][1], -1, 0};
  return {-1, e, pos};
}

bool same_point(const Point& a, const Point& b) {
  if (a.vertex >= 0 || b.vertex >= 0) return a.vertex == b.vertex;
  return a.edge == b.edge && std::abs(a.pos - b.pos) <= tol(a.pos);
}

// Appends b to a across a junction; interior junctions share their edge.
void join(EdgePath& a, const EdgePath& b, bool interior) {
  std::size_t from = 0;
  if (interior && !a.empty() && !b.empty() && a.back() == b.front()) from = 1;
  a.insert(a.end(), b.begin() + static_cast<std::ptrdiff_t>(from), b.end());
  tighten_path(a);
}

struct CycleFinder {
  // adj[u]: (path index, +1 forward / -1 backward, other node)
  std::vector<std::vector<std::tuple<int, int, int>>> adj;
  std::vector<char> seen, active;
  std::vector<std::tuple<int, int, int>> via;  // parent node, path, sign
  std::vector<std::pair<int, int>> cycle;

  bool dfs(int u, int from_path) {
    seen[u] = active[u] = 1;
    for (auto [j, sign, v] : adj[u]) {
      if (j == from_path) continue;
      if (!seen[v]) {
        via[v] = {u, j, sign};
        if (dfs(v, j)) return true;
      } else if (active[v]) {
        cycle.emplace_back(j, sign);
        for (int w = u; w != v; w = std::get<0>(via[w])) cycle.emplace_back(std::get<1>(via[w]), std::get<2>(via[w]));
        std::reverse(cycle.begin(), cycle.end());
        return true;
      }
    }
    active[u] = 0;
    return false;
  }
};

}  // namespace

NielsenLoops nielsen_loops(const TrainTrack& tt, const NielsenOrbit& orbit) {
  if (orbit.paths.empty()) throw Error("nielsen_loops: no Nielsen path orbit");
  return nielsen_loops(tt, orbit.paths);
}

NielsenLoops nielsen_loops(const TrainTrack& tt, const std::vector<NielsenPath>& paths) {
  const GraphMap& f = tt.map;
  const auto len = metric_lengths(tt);
  NielsenLoops out;
  for (int e = 0; e < f.num_edges(); ++e) out.multiplicity[e] = 0;
  std::vector<Point> nodes;
  auto node_of = [&](const Point& p) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (same_point(nodes[i], p)) return static_cast<int>(i);
    nodes.push_back(p);
    return static_cast<int>(nodes.size() - 1);
  };
  std::vector<std::pair<int, int>> ends;
  for (const auto& rho : paths) {
    const EdgePath r1 = reversed(rho.alpha);
    for (auto [e, c] : coverage(len, r1, rho.half)) out.multiplicity[e] += c;
    for (auto [e, c] : coverage(len, rho.beta, rho.half)) out.multiplicity[e] += c;
    ends.emplace_back(node_of(far_end(f, len, r1, rho.half)), node_of(far_end(f, len, rho.beta, rho.half)));
  }
  out.consistent = std::all_of(out.multiplicity.begin(), out.multiplicity.end(),
                               [](const auto& kv) { return std::abs(kv.second - 2) < 1e-9; });

  const int n = static_cast<int>(nodes.size());
  CycleFinder cf;
  cf.adj.resize(n);
  for (int j = 0; j < static_cast<int>(ends.size()); ++j) {
    cf.adj[ends[j].first].emplace_back(j, +1, ends[j].second);
    cf.adj[ends[j].second].emplace_back(j, -1, ends[j].first);
  }
  cf.seen.assign(n, 0);
  cf.active.assign(n, 0);
  cf.via.assign(n, {-1, -1, 0});
  for (int s = 0; s < n; ++s) {
    if (cf.seen[s]) continue;
    cf.cycle.clear();
    if (!cf.dfs(s, -1)) continue;
    EdgePath loop;
    Point start;
    for (auto [j, sign] : cf.cycle) {
      const NielsenPath& rho = paths[j];
      const EdgePath seg = sign > 0 ? rho.path() : reversed(rho.path());
      const Point from = nodes[sign > 0 ? ends[j].first : ends[j].second];
      if (loop.empty()) {
        loop = seg;
        start = from;
      } else {
        join(loop, seg, from.vertex < 0);
      }
    }
    if (start.vertex < 0 && loop.size() > 1 && loop.back() == loop.front()) loop.pop_back();
    while (loop.size() >= 2 && loop.front() == -loop.back()) {
      loop.pop_back();
      loop.erase(loop.begin());
    }
    if (loop.empty()) continue;
    const Word to = f.word(f.tree_path(f.base, f.origin(loop.front())));
    const Word w = to * f.word(loop) * to.inverse();
    if (w.empty()) continue;
    out.loops.push_back({loop, CyclicWord(w, true)});
  }
  return out;
}

NielsenLoops nielsen_loops(const StableRepresentative& stable) {
  if (!stable.orbit) throw Error("nielsen_loops: stable representative has no Nielsen path orbit");
  return nielsen_loops(stable.tt, *stable.orbit);
}

std::optional<int> class_period(const Endomorphism& phi, const Word& w, int max_p) {
  Word cur = w;
  for (int p = 1; p <= max_p; ++p) {
    cur = phi.apply(cur);
    if (cur.size() > 4'000'000) return std::nullopt;
    if (is_conjugate(cur, w)) return p;
  }
  return std::nullopt;
}

AtoroidalityVerdict atoroidality_verdict(const Endomorphism& phi, const AtoroidalityBounds& bounds) {
  const auto search = periodic_conjugacy_search(phi, bounds.max_period, bounds.max_len);
  auto from_search = [&](bool validated, std::string source) {
    return Toroidal{search->cls, search->period, validated, std::move(source)};
  };
  TrainTrackResult r;
  try {
    r = find_train_track(phi, bounds.train_track);
  } catch (const Error& e) {
    if (search) return from_search(false, "word search");
    return AtoroidalityUnknown{e.what()};
  }
  if (auto* tt = std::get_if<TrainTrack>(&r)) {
    const PinpSearch pinps = enumerate_pinps(*tt, bounds.period_bound);
    std::vector<Word> classes;
    int longest = 2;
    for (const auto& orbit : nielsen_orbits(*tt, pinps.paths)) {
      int p = 0;
      for (const auto& rho : orbit.paths) p = std::max(p, rho.period);
      longest = std::max(longest, 2 * p * static_cast<int>(orbit.paths.size()));
    }
    if (!pinps.paths.empty())
      for (const auto& loop : nielsen_loops(*tt, pinps.paths).loops) classes.push_back(loop.cls.word());
    auto agrees = [&](const Word& w) { return search && is_conjugate(w, search->cls.word(), true); };
    if (search) {
      bool validated = std::any_of(classes.begin(), classes.end(), agrees);
      return from_search(validated, validated ? "word search and Nielsen loops" : "word search");
    }
    for (const Word& w : classes)
      if (auto p = class_period(phi, w, longest)) return Toroidal{CyclicWord(w, false), *p, false, "Nielsen loop"};
    if (!classes.empty()) return AtoroidalityUnknown{"Nielsen loops without a verified period"};
    if (!pinps.complete) return AtoroidalityUnknown{"Nielsen path search budget exhausted"};
    return Atoroidal{pinps.length_bound, pinps.period_bound, tt->transition.lambda};
  }
  if (search) return from_search(false, "word search");
  if (auto* fo = std::get_if<FiniteOrderCertificate>(&r)) {
    const Word a = Word::generator(1);
    const int p = class_period(phi, a, fo->k).value_or(fo->k);
    return Toroidal{CyclicWord(a, false), p, false, "finite order"};
  }
  if (auto* u = std::get_if<TrainTrackUnknown>(&r)) return AtoroidalityUnknown{u->reason};
  return AtoroidalityUnknown{"reducible: only the bounded word search applies"};
}

}  // namespace mtorus
