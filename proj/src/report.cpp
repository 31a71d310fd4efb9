#include "mtorus/report.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace mtorus {

double rounded(double x) {
  const double r = std::round(x * 1e10) / 1e10;
  return r == 0 ? 0.0 : r;
}

namespace {

Json words(const std::vector<Word>& ws) {
  Json a = Json::array();
  for (const Word& w : ws) a.push_back(w.to_string());
  return a;
}

Json reals(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(rounded(x));
  return a;
}

Json factor_system(const FreeFactorSystem& s) {
  Json factors = Json::array();
  for (const auto& f : s.factors) factors.push_back(words(f.basis()));
  return {{"factors", factors}, {"conjugators", words(s.conjugators)}, {"provenance", s.provenance}};
}

Json search_json(const PinpSearch& s) {
  return {{"paths", s.paths.size()},
          {"length_bound", rounded(s.length_bound)},
          {"period_bound", s.period_bound},
          {"complete", s.complete}};
}

Json loops_json(const NielsenLoops& l) {
  Json loops = Json::array();
  for (const auto& x : l.loops) loops.push_back(x.cls.to_string());
  Json mult = Json::object();
  for (auto [e, m] : l.multiplicity) mult[std::to_string(e)] = rounded(m);
  return {{"classes", loops}, {"multiplicity", mult}, {"consistent", l.consistent}};
}

Json bounds_json(const RunOptions& o) {
  return {{"whitehead_depth", o.classify.whitehead_depth},
          {"period_bound", o.classify.period_bound},
          {"max_iterations", o.classify.max_iterations},
          {"seed", o.classify.seed},
          {"kmax", o.classify.kmax},
          {"max_period", o.atoroidality.max_period},
          {"max_len", o.atoroidality.max_len},
          {"chain_k_max", o.chain_k_max}};
}

TrainTrackOptions tt_options(const RunOptions& o) {
  TrainTrackOptions t;
  t.max_iterations = o.classify.max_iterations;
  t.seed = o.classify.seed;
  t.kmax = o.classify.kmax;
  return t;
}

Json train_track_result(const TrainTrackResult& r) {
  if (auto* tt = std::get_if<TrainTrack>(&r)) {
    Json j = to_json(*tt);
    j["type"] = "TrainTrack";
    return j;
  }
  if (auto* w = std::get_if<ReductionWitness>(&r))
    return {{"type", "Reduction"}, {"system", factor_system(w->system)}, {"provenance", w->provenance}};
  if (auto* f = std::get_if<FiniteOrderCertificate>(&r))
    return {{"type", "FiniteOrder"}, {"k", f->k}, {"conjugator", f->conjugator.to_string()}};
  return {{"type", "Unknown"}, {"reason", std::get<TrainTrackUnknown>(r).reason}};
}

Json stable_json(const StableRepresentative& st) {
  Json paths = Json::array();
  for (const auto& p : st.search.paths) paths.push_back(to_json(st.tt, p));
  Json folds = Json::array();
  for (const auto& f : st.folds)
    folds.push_back({{"x", rounded(f.x)},
                     {"graph_decrease", rounded(f.graph_decrease)},
                     {"orbit_decrease", rounded(f.orbit_decrease)},
                     {"turn_paths", f.turn_paths},
                     {"full", f.full},
                     {"turn", f.turn}});
  return {{"train_track", to_json(st.tt)},
          {"inner", st.inner.to_string()},
          {"orbit_count", st.orbit_count},
          {"search", search_json(st.search)},
          {"paths", paths},
          {"folds", folds}};
}

Json classification_json(const Classification& c) {
  Json j = {{"verdict", to_json(c.verdict)}, {"notes", c.notes}};
  if (c.train_track) j["train_track"] = to_json(*c.train_track);
  if (c.stable) {
    j["orbit_count"] = c.stable->orbit_count;
    j["search"] = search_json(c.stable->search);
  }
  if (c.loops) j["loops"] = loops_json(*c.loops);
  if (!c.inconsistency.empty()) j["inconsistency"] = c.inconsistency;
  return j;
}

Json minimality_json(const Minimality& m) {
  if (auto* x = std::get_if<Minimal>(&m)) return {{"type", "Minimal"}, {"certificate", x->certificate}};
  if (auto* x = std::get_if<NotMinimal>(&m)) return {{"type", "NotMinimal"}, {"factor", words(x->factor_basis)}};
  return {{"type", "Unknown"}, {"reason", std::get<MinimalityUnknown>(m).reason}};
}

Json presentation_json(const HNNPresentation& p) {
  return {{"ambient_rank", p.ambient_rank},
          {"factor", words(p.basis)},
          {"relators", p.relators()},
          {"euler_char", euler_char(p)}};
}

Json run_command(const std::string& command, const Endomorphism& phi, const RunOptions& o) {
  if (command == "classify") return classification_json(classify(phi, o.classify));
  if (command == "tt") return train_track_result(find_train_track(phi, tt_options(o)));
  if (command == "nielsen") {
    TrainTrackResult r = find_train_track(phi, tt_options(o));
    Json j = {{"train_track", train_track_result(r)}};
    if (auto* tt = std::get_if<TrainTrack>(&r); tt && tt->transition.expanding()) {
      NielsenOptions no;
      no.period_bound = o.classify.period_bound;
      no.train_track = tt_options(o);
      StabilizeResult s = stabilize(*tt, phi, no);
      if (auto* st = std::get_if<StableRepresentative>(&s)) {
        j["stable"] = stable_json(*st);
        if (st->orbit) {
          j["critical_residual"] = rounded(critical_equation(st->tt, &*st->orbit).residual);
          j["loops"] = loops_json(nielsen_loops(st->tt, st->search.paths));
        }
      } else if (auto* w = std::get_if<ReductionWitness>(&s)) {
        j["stable"] = train_track_result(*w);
      } else {
        j["stable"] = train_track_result(std::get<TrainTrackUnknown>(s));
      }
    }
    AtoroidalityBounds ab = o.atoroidality;
    ab.period_bound = o.classify.period_bound;
    ab.train_track = tt_options(o);
    j["atoroidality"] = to_json(atoroidality_verdict(phi, ab));
    return j;
  }
  if (command == "surface") {
    Classification c = classify(phi, o.classify);
    Json j = {{"verdict", verdict_name(c.verdict)}};
    if (auto* g = std::get_if<GeometricPA>(&c.verdict))
      j["surface"] = to_json(g->surface);
    else
      j["surface"] = nullptr;
    j["classification"] = classification_json(c);
    if (!c.inconsistency.empty()) j["inconsistency"] = c.inconsistency;
    return j;
  }
  if (command == "torus" || command == "report") {
    ReportBounds rb;
    rb.classify = o.classify;
    rb.atoroidality = o.atoroidality;
    rb.atoroidality.period_bound = o.classify.period_bound;
    rb.atoroidality.train_track = tt_options(o);
    rb.chain_k_max = o.chain_k_max;
    rb.minimality_depth = 8;
    if (command == "torus") rb.atoroidality.max_period = 0;
    ChiZeroReport r = chi_zero_report(phi, rb);
    Json j = {{"presentation", presentation_json(ascending_presentation(phi))},
              {"minimality", minimality_json(r.minimality)},
              {"hypothesis_holds", r.hypothesis_holds}};
    j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
    j["chain"] = r.chain ? to_json(*r.chain) : Json(nullptr);
    if (command == "report") {
      j["classification"] = classification_json(r.classification);
      j["atoroidality"] = r.atoroidality ? to_json(*r.atoroidality) : Json(nullptr);
      Json spots = Json::array();
      for (const auto& s : r.spot_checks)
        spots.push_back({{"generators", words(s.generators)},
                         {"k", s.k ? Json(*s.k) : Json(nullptr)},
                         {"index", s.index ? Json(*s.index) : Json(nullptr)}});
      j["spot_checks"] = spots;
      if (!r.classification.inconsistency.empty()) j["inconsistency"] = r.classification.inconsistency;
    } else {
      j["verdict"] = verdict_name(r.classification.verdict);
    }
    j["conclusions"] = r.conclusions;
    return j;
  }
  throw Error("unknown command '" + command + "'");
}

void render(std::ostringstream& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = j.is_object() ? it.key() : "-";
    const Json& v = *it;
    if (v.is_structured() && !v.empty()) {
      bool flat = v.is_array();
      for (const auto& x : v) flat = flat && !x.is_structured();
      if (flat) {
        out << pad << key << ": ";
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
        out << '\n';
      } else {
        out << pad << key << ":\n";
        render(out, v, indent + 2);
      }
    } else {
      out << pad << key << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
  }
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"classify", "tt", "nielsen", "surface", "torus", "report"};
  return c;
}

Json to_json(const GraphMap& f) {
  Json edges = Json::array();
  for (int e = 0; e < f.num_edges(); ++e)
    edges.push_back({{"edge", f.path_string({dir_of(e)})},
                     {"from", f.ends[e][0]},
                     {"to", f.ends[e][1]},
                     {"length", e < static_cast<int>(f.length.size()) ? rounded(f.length[e]) : 1.0},
                     {"image", f.path_string(f.image[e])},
                     {"marking", f.nu[e].to_string()}});
  Json marking = Json::array();
  for (const auto& m : f.marking) marking.push_back(f.path_string(m));
  return {{"vertices", f.num_vertices}, {"base", f.base}, {"edges", edges}, {"generators", marking}};
}

Json to_json(const TrainTrack& tt) {
  Json gates = Json::array();
  for (int i = 0; i < static_cast<int>(tt.gates.gate.size()); ++i)
    gates.push_back({{"direction", tt.map.path_string({index_dir(i)})}, {"gate", tt.gates.gate[i]}});
  return {{"graph", to_json(tt.map)},
          {"lambda", rounded(tt.transition.lambda)},
          {"matrix", tt.transition.matrix},
          {"eigenmetric", reals(tt.transition.eigenmetric)},
          {"gates", gates}};
}

Json to_json(const TrainTrack& tt, const NielsenPath& p) {
  return {{"vertex", p.vertex},
          {"alpha", tt.map.path_string(p.alpha)},
          {"beta", tt.map.path_string(p.beta)},
          {"half", rounded(p.half)},
          {"period", p.period},
          {"reversing", p.reversing}};
}

Json to_json(const SurfaceRealization& s) {
  Json loops = Json::array();
  for (const auto& l : s.loops) loops.push_back(l.to_string());
  return {{"g", s.genus},
          {"b", s.boundary},
          {"euler_char", s.euler_char},
          {"lambda", rounded(s.lambda)},
          {"transitive_boundary", s.transitive_boundary},
          {"fully_irreducible", s.fully_irreducible},
          {"loops", loops},
          {"permutation", s.permutation}};
}

Json to_json(const Verdict& v) {
  Json j = {{"type", verdict_name(v)}};
  if (auto* r = std::get_if<Reducible>(&v)) {
    j["system"] = factor_system(r->witness.system);
    j["verified"] = true;
  } else if (auto* g = std::get_if<GeometricPA>(&v)) {
    j["surface"] = to_json(g->surface);
  } else if (auto* a = std::get_if<IrreducibleAtoroidal>(&v)) {
    j["lambda"] = rounded(a->lambda);
    j["length_bound"] = rounded(a->length_bound);
    j["period_bound"] = a->period_bound;
    j["whitehead_depth"] = a->whitehead_depth;
    j["irreducibility"] = a->irreducibility_bounded ? "bounded search" : "certified";
  } else if (auto* f = std::get_if<FiniteOrder>(&v)) {
    j["k"] = f->k;
    j["conjugator"] = f->conjugator.to_string();
  } else {
    j["reason"] = std::get<VerdictUnknown>(v).reason;
  }
  return j;
}

Json to_json(const AtoroidalityVerdict& v) {
  if (auto* a = std::get_if<Atoroidal>(&v))
    return {{"type", "Atoroidal"},
            {"length_bound", rounded(a->length_bound)},
            {"period_bound", a->period_bound},
            {"lambda", rounded(a->lambda)}};
  if (auto* t = std::get_if<Toroidal>(&v))
    return {{"type", "Toroidal"},
            {"witness", t->witness.to_string()},
            {"period", t->period},
            {"cross_validated", t->cross_validated},
            {"source", t->source}};
  return {{"type", "Unknown"}, {"reason", std::get<AtoroidalityUnknown>(v).reason}};
}

Json to_json(const WitnessSubgroup& w) {
  Json gens = Json::array();
  for (const auto& g : w.generators) gens.push_back(g.to_string());
  return {{"generators", gens},
          {"factor", words(w.factor.basis())},
          {"x", w.x.to_string()},
          {"n", w.n},
          {"euler_char", w.euler_char},
          {"cyclic", w.cyclic},
          {"fibration_exponent", fibration_exponent(w.generators)},
          {"relators", w.presentation.relators()},
          {"provenance", w.provenance}};
}

Json to_json(const FiberChain& c) {
  Json terms = Json::array();
  for (std::size_t k = 0; k < c.terms.size(); ++k)
    terms.push_back({{"k", k},
                     {"basis", words(c.terms[k].basis())},
                     {"index", c.indices[k] ? Json(*c.indices[k]) : Json(nullptr)}});
  return {{"terms", terms},
          {"stable_at", c.stable_at},
          {"finite_at", c.finite_at},
          {"conclusion", c.conclusion},
          {"proof", c.proof}};
}

Json run(const std::string& command, const EndoSpec& spec, const RunOptions& options) {
  Json images = Json::object();
  for (int i = 0; i < spec.rank; ++i) images[spec.names[i]] = spec.images[i].to_string();
  Json report = {{"schema", kSchemaVersion},
                 {"command", command},
                 {"input", {{"name", spec.name}, {"rank", spec.rank}, {"images", images}, {"text", print(spec)}}},
                 {"warnings", spec.warnings},
                 {"bounds", bounds_json(options)}};
  if (!spec.expect.empty()) report["input"]["expect"] = spec.expect;
  const auto start = std::chrono::steady_clock::now();
  try {
    report["result"] = run_command(command, spec.endomorphism(), options);
  } catch (const std::exception& e) {
    report["result"] = nullptr;
    report["error"] = e.what();
  }
  if (options.timing)
    report["timing_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

int report_status(const Json& report) {
  if (report.contains("error")) return 2;
  const Json& r = report["result"];
  if (r.is_object() && r.contains("inconsistency")) return 2;
  return 0;
}

std::string dump(const Json& report) { return report.dump(); }

std::string render_text(const Json& report) {
  std::ostringstream out;
  render(out, report, 0);
  return out.str();
}

}  // namespace mtorus
