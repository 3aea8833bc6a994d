#include <cstdlib>
#include <cstring>
#include <iostream>

#include "maxlab/report.hpp"
#include "maxlab/suites.hpp"

// Usage: acceptance [--json PATH] [--seed N] [C1 C7 ...]
int main(int argc, char** argv) {
  std::string json_path;
  std::uint64_t seed = 20240601;
  std::vector<std::string> ids;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--json") && i + 1 < argc)
      json_path = argv[++i];
    else if (!std::strcmp(argv[i], "--seed") && i + 1 < argc)
      seed = std::strtoull(argv[++i], nullptr, 10);
    else
      ids.push_back(argv[i]);
  }
  if (ids.empty()) ids = maxlab::criterion_ids();

  nlohmann::json report = nlohmann::json::array();
  int failed = 0;
  for (const auto& id : ids) {
    auto r = maxlab::run_criterion(id, seed);
    std::cout << maxlab::criterion_line(r) << std::endl;
    if (!r.pass) ++failed;
    report.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"summary", r.summary}, {"detail", r.detail}});
  }
  std::cout << (ids.size() - failed) << "/" << ids.size() << " criteria passed" << std::endl;
  if (!json_path.empty()) maxlab::write_file(json_path, maxlab::dump_json(report));
  return failed ? 1 : 0;
}
