#include "mtorus/surface.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "mtorus/whitehead.hpp"

namespace mtorus {

std::vector<VertexLink> vertex_links(const GraphMap& f, const std::vector<EdgePath>& loops) {
  std::vector<VertexLink> links(f.num_vertices);
  for (int v = 0; v < f.num_vertices; ++v) {
    links[v].vertex = v;
    links[v].directions = f.directions_at(v);
  }
  for (const EdgePath& loop : loops)
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Dir x = loop[i], y = loop[(i + 1) % loop.size()];
      links[f.terminus(x)].turns.emplace_back(-x, y);
    }
  for (auto& link : links) {
    const int n = 2 * f.num_edges();
    std::vector<int> parent(n), degree(n, 0);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (auto [a, b] : link.turns) {
      ++degree[dir_index(a)];
      ++degree[dir_index(b)];
      parent[find(dir_index(a))] = find(dir_index(b));
    }
    link.circles = true;
    std::vector<int> roots;
    for (Dir d : link.directions) {
      link.circles = link.circles && degree[dir_index(d)] == 2;
      roots.push_back(find(dir_index(d)));
    }
    std::sort(roots.begin(), roots.end());
    link.components = static_cast<int>(std::unique(roots.begin(), roots.end()) - roots.begin());
  }
  return links;
}

SurfaceResult realize_surface(const StableRepresentative& stable, const NielsenLoops& loops,
                              const Endomorphism& phi) {
  const GraphMap& f = stable.tt.map;
  std::vector<EdgePath> paths;
  std::vector<int> count(f.num_edges(), 0);
  for (const auto& loop : loops.loops) {
    paths.push_back(loop.path);
    for (Dir d : loop.path) ++count[edge_of(d)];
  }
  for (int e = 0; e < f.num_edges(); ++e)
    if (count[e] != 2)
      throw Error("realize_surface: edge " + f.path_string({dir_of(e)}) + " is crossed " +
                  std::to_string(count[e]) + " times");
  // The annuli glued along the loops make a surface near v iff the link of v
  // is a single circle. A vertex with a split link is blown up into one
  // vertex per link component; the result must still have the Euler
  // characteristic of the graph.
  const auto links = vertex_links(f, paths);
  int split_vertices = 0;
  std::string singular;
  for (const auto& link : links) {
    split_vertices += link.components;
    if (!link.circles || link.components != 1) {
      singular += "vertex " + std::to_string(link.vertex) + ": link has " +
                  std::to_string(link.components) + " components, turns";
      for (auto [a, b] : link.turns) singular += " {" + f.path_string({a}) + "," + f.path_string({b}) + "}";
      singular += "; ";
    }
  }
  if (!singular.empty())
    return NotSurface{singular + "blow-up gives chi " + std::to_string(split_vertices - f.num_edges()) +
                      " instead of " + std::to_string(f.num_vertices - f.num_edges())};
  SurfaceRealization s;
  s.euler_char = f.num_vertices - f.num_edges();
  s.boundary = static_cast<int>(loops.loops.size());
  const int twice_genus = 2 - s.euler_char - s.boundary;
  if (twice_genus < 0 || twice_genus % 2 != 0)
    return NotSurface{"2 - chi - b = " + std::to_string(twice_genus) + " is not twice a genus"};
  s.genus = twice_genus / 2;
  s.lambda = stable.tt.transition.lambda;
  s.fully_irreducible = s.boundary == 1;
  for (const auto& loop : loops.loops) s.loops.push_back(loop.cls);
  // phi permutes the boundary classes; inner adjustments do not change classes.
  for (const auto& loop : loops.loops) {
    const Word img = phi.apply(loop.cls.word());
    int j = -1;
    for (std::size_t i = 0; i < loops.loops.size() && j < 0; ++i)
      if (is_conjugate(img, loops.loops[i].cls.word(), true)) j = static_cast<int>(i);
    if (j < 0) return NotSurface{"the boundary class " + loop.cls.to_string() + " is not carried to a boundary class"};
    s.permutation.push_back(j);
  }
  int cycle = 1;
  for (int i = s.permutation[0]; i != 0 && cycle <= s.boundary; i = s.permutation[i]) ++cycle;
  s.transitive_boundary = cycle == s.boundary;
  return s;
}

std::string verdict_name(const Verdict& v) {
  static const char* names[] = {"Reducible", "GeometricPA", "IrreducibleAtoroidal", "FiniteOrder", "Unknown"};
  return names[v.index()];
}

namespace {

std::optional<Reducible> bounded_reduction(const Endomorphism& phi, int depth) {
  if (auto sys = search_reduction(phi, depth)) return Reducible{{*sys, sys->provenance}};
  return std::nullopt;
}

}  // namespace

Classification classify(const Endomorphism& phi, const ClassifyBounds& bounds) {
  Classification out;
  TrainTrackOptions to;
  to.max_iterations = bounds.max_iterations;
  to.seed = bounds.seed;
  to.kmax = bounds.kmax;
  TrainTrackResult r;
  try {
    r = find_train_track(phi, to);
  } catch (const Error& e) {
    out.verdict = VerdictUnknown{e.what()};
    return out;
  }
  auto unknown = [&](std::string reason) {
    if (auto red = bounded_reduction(phi, bounds.whitehead_depth)) {
      out.notes.push_back(reason);
      out.verdict = *red;
    } else {
      out.verdict = VerdictUnknown{std::move(reason)};
    }
    return out;
  };
  if (auto* w = std::get_if<ReductionWitness>(&r)) {
    out.verdict = Reducible{*w};
    return out;
  }
  if (auto* fo = std::get_if<FiniteOrderCertificate>(&r)) {
    out.verdict = FiniteOrder{fo->k, fo->conjugator};
    return out;
  }
  if (auto* u = std::get_if<TrainTrackUnknown>(&r)) return unknown(u->reason);
  const TrainTrack& tt = std::get<TrainTrack>(r);
  out.train_track = tt;
  if (!tt.transition.expanding()) return unknown("train track is not expanding");

  // A surface carried by the piNps of this train track needs no stabilization.
  StableRepresentative direct;
  direct.tt = tt;
  direct.tt.map.length = metric_lengths(tt);
  direct.search = enumerate_pinps(direct.tt, bounds.period_bound);
  const auto orbits = nielsen_orbits(direct.tt, direct.search.paths);
  direct.orbit_count = static_cast<int>(orbits.size());
  if (orbits.size() == 1) direct.orbit = orbits.front();
  if (orbits.size() > 1) {
    NielsenLoops loops = nielsen_loops(direct.tt, direct.search.paths);
    if (!loops.loops.empty() && loops.consistent) {
      auto s = realize_surface(direct, loops, phi);
      auto* surface = std::get_if<SurfaceRealization>(&s);
      if (surface && surface->transitive_boundary) {
        out.notes.push_back("surface realized on a train track with " +
                            std::to_string(orbits.size()) + " Nielsen path orbits");
        out.stable = direct;
        out.loops = loops;
        out.verdict = GeometricPA{*surface};
        return out;
      }
    }
  }

  NielsenOptions no;
  no.period_bound = bounds.period_bound;
  no.train_track = to;
  StabilizeResult sr = orbits.size() <= 1 ? StabilizeResult{direct} : stabilize(tt, phi, no);
  if (auto* w = std::get_if<ReductionWitness>(&sr)) {
    out.verdict = Reducible{*w};
    return out;
  }
  if (auto* u = std::get_if<TrainTrackUnknown>(&sr)) return unknown(u->reason);
  const StableRepresentative& st = std::get<StableRepresentative>(sr);
  out.stable = st;
  if (!st.search.paths.empty()) {
    NielsenLoops loops = nielsen_loops(st.tt, st.search.paths);
    out.loops = loops;
    if (!loops.loops.empty()) {
      if (!loops.consistent) {
        unknown("Nielsen loops do not cover every edge twice");
        if (std::holds_alternative<VerdictUnknown>(out.verdict))
          out.inconsistency = std::get<VerdictUnknown>(out.verdict).reason;
        return out;
      }
      const SurfaceResult s = realize_surface(st, loops, phi);
      if (auto* ns = std::get_if<NotSurface>(&s)) return unknown("not a surface: " + ns->diagnostic);
      const auto& surface = std::get<SurfaceRealization>(s);
      if (!surface.transitive_boundary) return unknown("boundary loops are not permuted transitively");
      out.verdict = GeometricPA{surface};
      return out;
    }
  }
  if (!st.search.complete) return unknown("Nielsen path search budget exhausted");
  if (auto red = bounded_reduction(phi, bounds.whitehead_depth)) {
    out.verdict = *red;
    return out;
  }
  out.verdict = IrreducibleAtoroidal{st.tt.transition.lambda, st.search.length_bound,
                                     st.search.period_bound, bounds.whitehead_depth, true};
  return out;
}

}  // namespace mtorus
