#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

std::string cli() {
  const char* p = std::getenv("MAXLAB_CLI");
  return p ? p : "maxlab";
}

Run run(const std::string& args) {
  Run r;
  const std::string cmd = "\"" + cli() + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int st = pclose(pipe);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("maxlab_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const nlohmann::json& j) { std::ofstream(p) << j.dump(2); }

}  // namespace

TEST_CASE("weak-norm manifest on the star") {
  auto dir = scratch("star");
  write(dir / "m.json", {{"id", "star5"},
                         {"op", "weak_norm"},
                         {"seed", 0},
                         {"construction", {{"kind", "star"}, {"params", {{"K", 5}}}}},
                         {"params", {{"f", "delta:0"}, {"radii", "all"}}}});
  auto r = run("run " + (dir / "m.json").string() + " --out-dir " + (dir / "out").string());
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(slurp(dir / "out" / "star5.json"));
  CHECK(j["pass"] == true);
  CHECK(j["result"]["certified_value"] == "4/1");
  CHECK(nlohmann::json::parse(r.out)["manifest_hash"] == j["manifest_hash"]);
  fs::remove_all(dir);
}

TEST_CASE("schema errors exit with code 2") {
  auto dir = scratch("schema");
  write(dir / "empty.json", nlohmann::json::object());
  CHECK(run("run " + (dir / "empty.json").string() + " --out-dir " + (dir / "out").string()).code == 2);
  write(dir / "badop.json", {{"id", "x"}, {"op", "teleport"}, {"construction", {{"kind", "star"}, {"params", {{"K", 3}}}}}});
  CHECK(run("run " + (dir / "badop.json").string() + " --out-dir " + (dir / "out").string()).code == 2);
  std::ofstream(dir / "garbage.json") << "{ not json";
  CHECK(run("run " + (dir / "garbage.json").string() + " --out-dir " + (dir / "out").string()).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("budget exhaustion exits with code 3") {
  auto dir = scratch("budget");
  auto r = run("maxnorm --space star --params '{\"K\":40}' --radii all --budget 10 --out-dir " + (dir / "out").string());
  CHECK(r.code == 3);
  fs::remove_all(dir);
}

TEST_CASE("seeded padding runs are byte-identical") {
  auto dir = scratch("pad");
  const std::string args = "partition --space torus --params '{\"N\":256}' --beta 0.0225 --trials 2000 --seed 42 --id pad";
  CHECK(run(args + " --out-dir " + (dir / "a").string()).code == 0);
  CHECK(run(args + " --out-dir " + (dir / "b").string()).code == 0);
  CHECK(slurp(dir / "a" / "pad.json") == slurp(dir / "b" / "pad.json"));
  CHECK(slurp(dir / "a" / "pad.csv") == slurp(dir / "b" / "pad.csv"));
  CHECK_FALSE(slurp(dir / "a" / "pad.json").empty());
  fs::remove_all(dir);
}

TEST_CASE("help documents the budget variable and exit codes") {
  auto r = run("--help");
  CHECK(r.code == 0);
  CHECK(r.out.find("MAXLAB_BUDGET") != std::string::npos);
  CHECK(r.out.find("exit") != std::string::npos);
}
