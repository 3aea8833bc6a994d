#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/mms.hpp"

namespace maxlab {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 1,     // an asserted invariant failed
  kExitSchema = 2,
  kExitBudget = 3,
  kExitSeedCap = 4,
  kExitOther = 5,
};

/// Experiment manifest:
///   {"id": str, "construction": {"kind", "params"}, "op": str, "params": {...}, "seed": int}
/// ops: construct, weak_norm, regularity, padding, localize, cover, tree, suite
/// ("suite" needs no construction).
struct ExperimentManifest {
  std::string id;
  nlohmann::json construction;
  std::string op;
  nlohmann::json params;
  std::uint64_t seed = 0;

  static ExperimentManifest from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// SHA-256 of the compact dump of to_json() (keys sorted).
  std::string hash() const;
};

struct RunOutcome {
  int exit_code = kExitOk;
  nlohmann::json summary;  // always has "pass", "manifest_hash", "seed", "version"
  std::string csv;
  std::vector<std::filesystem::path> files;
};

/// Validates and runs a manifest, writing <out_dir>/<id>.json and, when the op
/// has a table, <out_dir>/<id>.csv. Errors map to their exit codes and a
/// machine-readable {"error": {"kind", "message"}} summary.
RunOutcome run_manifest(const nlohmann::json& manifest, const std::filesystem::path& out_dir);

/// Function spec: {"kind": "delta", "point": g} | {"kind": "indicator", "points": [...]}
/// | {"kind": "ball", "center": c, "radius": key} | {"kind": "ones"},
/// or the string forms "delta:g", "indicator:a,b,c", "ball:c:key", "ones".
std::vector<Rational> parse_function(const Space& s, const nlohmann::json& spec);

/// Radii spec: "all", "lacunary" or "lacunary:eps", "subexp", "pow:b" (keys 1, b, b^2, ...
/// below the diameter), "keys:a,b,c", or a JSON array of keys.
RadiiSet parse_radii(const Space& s, const nlohmann::json& spec);

}  // namespace maxlab
