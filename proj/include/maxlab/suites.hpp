#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace maxlab {

struct CriterionResult {
  std::string id;     // "C1" .. "C14"
  std::string title;
  bool pass = false;
  double seconds = 0;
  std::string summary;  // one line
  nlohmann::json detail;
};

/// prelim, dyadic, ad, partitions, covering, tree, doob, localize
const std::vector<std::string>& suite_names();
/// Criterion ids run by a suite; throws SchemaError for unknown names.
std::vector<std::string> suite_members(const std::string& suite);
const std::vector<std::string>& criterion_ids();

/// Runs one acceptance criterion. Exceptions are turned into a failing result.
CriterionResult run_criterion(const std::string& id, std::uint64_t seed = 20240601);
std::vector<CriterionResult> run_suite(const std::string& suite, std::uint64_t seed = 20240601);

/// "C7 PASS  title  (1.23 s)  summary"
std::string criterion_line(const CriterionResult& r);

}  // namespace maxlab
