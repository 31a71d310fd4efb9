#pragma once

// JSON reports for the command-line front end. Floating values are rounded
// to 1e-10 so that output is byte-stable.

#include <string>
#include <vector>

#include "json.hpp"
#include "mtorus/nielsen.hpp"
#include "mtorus/parse.hpp"
#include "mtorus/surface.hpp"
#include "mtorus/torus.hpp"
#include "mtorus/train_track.hpp"

namespace mtorus {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct RunOptions {
  ClassifyBounds classify;
  AtoroidalityBounds atoroidality;
  int chain_k_max = 8;
  bool timing = false;
};

const std::vector<std::string>& commands();

// One report object. Module errors are caught and stored under "error".
Json run(const std::string& command, const EndoSpec& spec, const RunOptions& options);

// 0 for a clean report, 2 when it records an error or an internal inconsistency.
int report_status(const Json& report);

std::string dump(const Json& report);
// Indented plain-text rendering of the same object.
std::string render_text(const Json& report);

double rounded(double x);
Json to_json(const GraphMap& f);
Json to_json(const TrainTrack& tt);
Json to_json(const TrainTrack& tt, const NielsenPath& p);
Json to_json(const SurfaceRealization& s);
Json to_json(const Verdict& v);
Json to_json(const AtoroidalityVerdict& v);
Json to_json(const WitnessSubgroup& w);
Json to_json(const FiberChain& c);

}  // namespace mtorus
