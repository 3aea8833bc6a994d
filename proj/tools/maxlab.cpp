#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "maxlab/common.hpp"
#include "maxlab/manifest.hpp"
#include "maxlab/report.hpp"

using nlohmann::json;

namespace {

json parse_json_arg(const std::string& s, const char* what) {
  if (s.empty()) return json::object();
  try {
    return json::parse(s);
  } catch (const json::exception& e) {
    throw maxlab::SchemaError(std::string("bad JSON for ") + what + ": " + e.what());
  }
}

// Accepts a plain spec string or inline JSON.
json spec_arg(const std::string& s) {
  if (!s.empty() && (s.front() == '{' || s.front() == '[')) return parse_json_arg(s, "spec");
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximal-function laboratory on finite metric measure spaces."};
  app.footer(
      "Environment:\n  MAXLAB_BUDGET  point-count budget for materialized spaces (default 20000000).\n"
      "Exit codes: 0 ok, 1 invariant failed, 2 schema error, 3 budget exceeded,\n"
      "            4 seed retry cap exceeded, 5 other error.");
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  std::string out_dir = "out", id, budget_arg;
  app.add_option("--seed", seed, "Base seed for randomized ops")->capture_default_str();
  app.add_option("--out-dir", out_dir, "Directory for <id>.json / <id>.csv")->capture_default_str();
  app.add_option("--id", id, "Run id (default: the subcommand name)");
  app.add_option("--budget", budget_arg, "Point-count budget; overrides MAXLAB_BUDGET");

  std::string space, params;
  auto add_space = [&](CLI::App* c) {
    c->add_option("--space", space, "star | euclidean_star | torus | doubling_product | ad_regular | kary_tree")
        ->required();
    c->add_option("--params", params, "Construction parameters as JSON, e.g. '{\"K\":5}'");
  };

  auto* construct = app.add_subcommand("construct", "Build a space and print its summary and ball table");
  add_space(construct);

  std::string f = "delta:0", radii = "all", variant = "standard", expect;
  auto* maxnorm = app.add_subcommand("maxnorm", "Exact weak (1,1) witness of a maximal operator");
  add_space(maxnorm);
  maxnorm->add_option("--f", f, "Function spec: delta:g | indicator:a,b | ball:c:key | ones")->capture_default_str();
  maxnorm->add_option("--radii", radii, "all | lacunary[:eps] | subexp | pow:b | keys:a,b")->capture_default_str();
  maxnorm->add_option("--variant", variant, "standard | modified | spherical | mq")->capture_default_str();
  maxnorm->add_option("--expect", expect, "Fail unless the certified value equals this rational");

  std::string kind = "doubling";
  double K = 0, n_reg = 1;
  auto* regularity = app.add_subcommand("regularity", "Check a regularity condition");
  add_space(regularity);
  regularity->add_option("--kind", kind, "doubling | microdoubling | strong_microdoubling | tempered | ahlfors_david")
      ->capture_default_str();
  regularity->add_option("--K", K, "Constant to test against (0: report the measured one)");
  regularity->add_option("--n", n_reg, "Microdoubling exponent");
  regularity->add_option("--radii", radii, "Radii for the tempered check");

  double beta = 0, slack = 0.03;
  int depth = -1;
  std::uint64_t trials = 1000;
  std::string sampler = "clock";
  auto* partition = app.add_subcommand("partition", "Random partition trees and padding probabilities");
  add_space(partition);
  partition->add_option("--beta", beta, "Padding parameter")->required();
  partition->add_option("--depth", depth, "Tree depth (default: from the microdoubling constant)");
  partition->add_option("--trials", trials, "Number of sampled trees")->capture_default_str();
  partition->add_option("--sampler", sampler, "clock | iid")->capture_default_str();
  partition->add_option("--slack", slack, "Allowed shortfall below the target probability")->capture_default_str();

  double n_loc = 2, K_loc = 5, p_exp = 1;
  std::vector<std::int64_t> points;
  std::size_t ball_samples = 4;
  auto* localize = app.add_subcommand("localize", "Compare localized and global maximal operators");
  add_space(localize);
  localize->add_option("--radii", radii, "Radii spec")->capture_default_str();
  localize->add_option("--n", n_loc, "Microdoubling exponent")->capture_default_str();
  localize->add_option("--K", K_loc, "Microdoubling constant (>= 5)")->capture_default_str();
  localize->add_option("--points", points, "Point masses to test");
  localize->add_option("--ball-samples", ball_samples, "Random ball indicators")->capture_default_str();
  localize->add_option("--p", p_exp, "Exponent p")->capture_default_str();

  std::vector<std::string> fs;
  std::size_t lambda_grid = 20;
  std::uint64_t cover_trials = 0;
  auto* cover = app.add_subcommand("cover", "Poisson covering and the tempered weak-type bound");
  add_space(cover);
  cover->add_option("--radii", radii, "Radii spec (default subexp)");
  cover->add_option("--f", fs, "Function specs (repeatable)");
  cover->add_option("--lambda-grid", lambda_grid, "Number of lambda values per function")->capture_default_str();
  cover->add_option("--K", K, "Tempered constant (default: measured)");
  cover->add_option("--trials", cover_trials, "Poisson moment trials (0: skip)");

  int k = 2, tdepth = 4;
  std::vector<int> ks;
  std::string check = "weaknorm", tree_f = "delta_root";
  auto* tree = app.add_subcommand("tree", "Rooted k-ary tree experiments");
  tree->add_option("--k", k, "Branching factor")->capture_default_str();
  tree->add_option("--depth", tdepth, "Tree depth D")->capture_default_str();
  tree->add_option("--ks", ks, "Branching factors for the weak-norm scan");
  tree->add_option("--check", check, "pairs | dist | weaknorm")->capture_default_str();
  tree->add_option("--trials", trials, "Random instances for the pair check");
  tree->add_option("--f", tree_f, "delta_root | random (dist check)");

  std::string manifest_path;
  auto* run = app.add_subcommand("run", "Run an experiment manifest file");
  run->add_option("manifest", manifest_path, "Manifest JSON file")->required();

  std::string suite_name;
  auto* suite = app.add_subcommand("suite", "Run an acceptance suite");
  suite->add_option("--suite", suite_name, "prelim | dyadic | ad | partitions | doob | covering | tree | localize | all")
      ->required();

  CLI11_PARSE(app, argc, argv);

  json m;
  try {
    if (!budget_arg.empty()) maxlab::set_budget(static_cast<std::uint64_t>(std::stod(budget_arg)));
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "run") {
      std::ifstream in(manifest_path);
      if (!in) throw maxlab::SchemaError("cannot read manifest " + manifest_path);
      try {
        m = json::parse(in);
      } catch (const json::exception& e) {
        throw maxlab::SchemaError(std::string("manifest is not valid JSON: ") + e.what());
      }
    } else {
      json p = json::object();
      std::string op = name;
      if (name == "maxnorm") {
        op = "weak_norm";
        p = {{"f", spec_arg(f)}, {"radii", spec_arg(radii)}, {"variant", variant}};
        if (!expect.empty()) p["expect"] = expect;
      } else if (name == "regularity") {
        p = {{"kind", kind}, {"K", K}, {"n", static_cast<int>(n_reg)}};
        if (kind == "tempered") p["radii"] = spec_arg(radii == "all" ? "subexp" : radii);
      } else if (name == "partition") {
        op = "padding";
        p = {{"beta", beta}, {"trials", trials}, {"sampler", sampler}, {"slack", slack}};
        if (depth >= 0) p["depth"] = depth;
      } else if (name == "localize") {
        p = {{"radii", spec_arg(radii)}, {"n", static_cast<int>(n_loc)}, {"K", K_loc},
             {"ball_samples", ball_samples}, {"p", p_exp}};
        if (!points.empty()) p["points"] = points;
      } else if (name == "cover") {
        p = {{"radii", spec_arg(radii == "all" && !cover->count("--radii") ? "subexp" : radii)},
             {"lambdas", lambda_grid}, {"K", K}, {"trials", cover_trials}};
        json arr = json::array();
        for (const auto& s : fs) arr.push_back(spec_arg(s));
        if (!arr.empty()) p["f"] = arr;
      } else if (name == "tree") {
        p = {{"k", k}, {"depth", tdepth}, {"check", check}, {"trials", trials}, {"f", tree_f}};
        if (!ks.empty()) p["ks"] = ks;
      } else if (name == "suite") {
        p = {{"name", suite_name}};
      }
      m = {{"id", id.empty() ? name : id}, {"op", op}, {"params", p}, {"seed", seed}};
      if (name != "tree" && name != "suite")
        m["construction"] = {{"kind", space}, {"params", parse_json_arg(params, "--params")}};
    }
  } catch (const maxlab::SchemaError& e) {
    std::cout << maxlab::dump_json({{"pass", false}, {"error", {{"kind", "schema"}, {"message", e.what()}}}});
    return maxlab::kExitSchema;
  } catch (const std::exception& e) {
    std::cout << maxlab::dump_json({{"pass", false}, {"error", {{"kind", "other"}, {"message", e.what()}}}});
    return maxlab::kExitOther;
  }

  auto outcome = maxlab::run_manifest(m, out_dir);
  std::cout << maxlab::dump_json(outcome.summary);
  return outcome.exit_code;
}
