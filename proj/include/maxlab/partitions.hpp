#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/mms.hpp"

namespace maxlab {

/// A partition of the point set as a cell id per point (ids are dense, 0-based).
struct Partition {
  std::vector<std::uint32_t> cell;
  std::uint32_t cells = 1;

  static Partition trivial(std::size_t n);
  static Partition singletons(std::size_t n);
  /// Relabels arbitrary ids densely in order of first appearance.
  static Partition from_labels(const std::vector<std::uint64_t>& labels);
  std::vector<std::vector<Point>> members() const;
};

/// Increasing partitions F_0, F_1, ... (each refines the previous one).
struct Filtration {
  std::vector<Partition> levels;
  bool valid() const;
};

enum class Sampler { iid, clock };

struct TreeOptions {
  Sampler sampler = Sampler::clock;
  /// Level-k diameter bound diam * ratio^k; the radius r_k is uniform on
  /// diam * ratio^k * [1/4, 1/2].
  Rational ratio = Rational(1, 2);
};

struct PartitionTree {
  std::vector<Partition> levels;  // levels[0] trivial
  std::vector<Dist> radii;        // r_1..r_K as keys (radii[0] unused, 0)
  std::vector<Dist> diam_bound;   // key of diam / 2^k
  std::vector<Point> centers;     // in order of first use (iid) or of clock rank (clock)
  std::uint64_t seed = 0;
  Sampler sampler = Sampler::clock;

  std::size_t depth() const { return levels.size() - 1; }
  Filtration filtration() const { return {levels}; }
};

/// Draws a partition tree of depth K: independent radii r_k and random
/// centers; P_k(x) is fixed by the first centers within r_1, ..., r_k of x.
/// The iid sampler draws centers from mu (capped at 64 n K draws, then
/// SeedCapExceeded). The clock sampler orders the points by independent
/// Exp(mu(x)) clocks, which is the law of first appearances of the iid
/// sequence, and yields the same partitions in law.
PartitionTree sample_partition_tree(const Space& s, int K, std::uint64_t seed, const TreeOptions& opt = {});

struct TreeCheck {
  bool refinement = true;
  bool diameter = true;
  bool trivial_root = true;
  int bad_level = -1;
  bool pass() const { return refinement && diameter && trivial_root; }
};

/// Refinement, diam(P_k(x)) <= diam(X)/2^k and P_0 = {X}, all exact.
TreeCheck check_tree(const Space& s, const PartitionTree& t);

/// Keys of the padding radii beta diam / 2^k, k = 0..K (beta given as an upper rational bound).
std::vector<Dist> padding_radii(const Space& s, const Rational& beta, int K);

/// B(x, rho_k) subset of P_k(x) for every (x, k); result[k][x].
std::vector<std::vector<char>> padded(const Space& s, const PartitionTree& t, const std::vector<Dist>& rho);

struct WilsonInterval {
  double lo, hi;
};
WilsonInterval wilson95(std::uint64_t successes, std::uint64_t trials);

struct PaddingReport {
  double beta = 0;
  Rational beta_rational;  // rational upper bound of beta actually used
  int depth = 0;
  std::uint64_t trials = 0;
  double target = 0.5;  // required padding probability
  double slack = 0.03;
  double threshold = 0.47;
  /// successes[k][x]
  std::vector<std::vector<std::uint64_t>> successes;
  double worst_lower = 1;
  Point worst_x = 0;
  int worst_k = 0;
  /// mean over trees of mu({x : padded at k}) / mu(X), per k.
  std::vector<double> mean_padded_fraction;
  /// Levels whose padding radius is below the minimum distance (padding certain).
  std::vector<int> trivial_levels;
  bool pass = true;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Monte Carlo over independent trees. Passes iff every Wilson-95 lower bound
/// is >= threshold (default 0.5 - slack).
PaddingReport padding_probability(const Space& s, double beta, int K, std::uint64_t trials, std::uint64_t seed,
                                  double slack = 0.03, const TreeOptions& opt = {}, double target = 0.5);

/// Default depth: enough levels for diam / 2^K to drop below the minimum distance.
int default_depth(const Space& s);

/// E(f | partition) as a function (constant on each cell).
std::vector<Rational> conditional_expectation(const Space& s, const std::vector<Rational>& f, const Partition& P);

struct DoobReport {
  Rational weak_lhs;  // sup_v v mu(g >= v)
  Rational l1;
  bool weak_pass = true;
  std::vector<double> p_values;
  std::vector<double> lp_ratio;  // ||g||_p / ||f||_p
  bool lp_pass = true;
  bool pass() const { return weak_pass && lp_pass; }
  nlohmann::json to_json() const;
};

/// g = sup_k |E(f | F_k)|: weak (1,1) with constant 1 and ||g||_p <= p/(p-1) ||f||_p.
DoobReport doob_check(const Space& s, const std::vector<Rational>& f, const Filtration& F,
                      const std::vector<double>& ps = {2, 4});

/// Sublinear operator M_k on functions of the space.
using LevelOperator = std::function<std::vector<Rational>(int k, const std::vector<Rational>&)>;

struct ModifiedDoobReport {
  bool hypothesis_pass = true;
  std::string hypothesis_mode;  // "exhaustive", "cells" or "sampled"
  std::uint64_t sets_checked = 0;
  int witness_k = -1;
  Point witness_x = 0;
  std::vector<Point> witness_set;  // cells of E_k for the literal mode
  double A = 0, B = 0, p = 1;
  double lhs = 0;  // sup_v v^p mu(sup_k |M_k f| >= v)
  double rhs = 0;  // ((2A)^p + (2B)^p) ||f||_p^p
  bool conclusion_pass = true;
  bool pass() const { return hypothesis_pass && conclusion_pass; }
  nlohmann::json to_json() const;
};

/// Hypothesis (emf): 1_E M_{k+1} f = M_{k+1}(1_E f) for every F_k-measurable E,
/// literally over all unions of cells when F_k has at most `exhaustive_cells`
/// cells. Beyond that, `positive_max` declares M_k a supremum of positive
/// averaging operators (times an indicator); then A(1_E f) splits as the sum of
/// A(1_C f) over the cells C of E, and the identity for every single cell
/// implies it for every union, so single cells are checked ("cells" mode).
/// Otherwise singletons, complements and random unions are sampled.
/// Conclusion: sup_v v^p mu(sup_k |M_k f| >= v) <= ((2A)^p + (2B)^p) ||f||_p^p.
ModifiedDoobReport modified_doob_check(const Space& s, const Filtration& F, const LevelOperator& M,
                                       const std::vector<Rational>& f, double A, double B, double p,
                                       int exhaustive_cells = 12, bool positive_max = false);

/// Tree-localized operators of the localization proof for one residue i in {1,2,3}:
/// M_k = 1_{E~_k} M_{R^i_k} with R^i_k = R n diam [2^{-(3k+i)m}, 2^{-(3k-1+i)m}],
/// E~_k the points padded at level (3k+i-2)m, and F_k = P_{(3k+i+1)m}.
struct LocalizedFamily {
  int i = 1, m = 1;
  std::vector<RadiiSet> bands;    // R^i_k, k = 0..
  Filtration filtration;          // F_k
  std::vector<std::vector<char>> padded_set;  // E~_k
  LevelOperator op;
  double A = 0;  // (max_k sum_{r in R^i_k} ||A_r||_{1->1})^{1/p}
  double B = 0;  // exact sup ||M_k f||_inf / ||E(|f| | F_k)||_inf
  bool structural_local = true;  // B(x, r) within F_{k-1}(x) for x in E~_k, r in R^i_k
};

/// Builds the family from a sampled tree of sufficient depth. A, B are computed for exponent p.
LocalizedFamily localized_family(const Space& s, const RadiiSet& R, double beta, int i, std::uint64_t seed, double p,
                                 const TreeOptions& opt = {});

/// ||A_r||_{1->1} = max_y sum_{x : d(x,y) <= r} mu(x) / mu(B(x, r)).
Rational averaging_l1_norm(const Space& s, Dist r);

struct LocalizationRow {
  std::string f;
  Rational lhs;            // witness for M_R
  Rational rhs;            // max over windows R n [rho, n rho]
  double ratio = 0;
  double claimed_bound = 0;  // K + (1 + log log K / (1 + log n))^{1/p} rhs
  bool trivial_direction = true;
};

struct LocalizationReport {
  int n = 0;
  double K = 0;
  double p = 1;
  std::size_t windows = 0;
  std::vector<LocalizationRow> rows;
  bool microdoubling_pass = true;
  bool pass() const;
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Witnesses of M_R versus those of every window R n [rho, n rho], over point
/// masses at the given points and random ball indicators (when the naive
/// profile fits the budget). Rejects K < 5.
LocalizationReport localization_experiment(const Space& s, const RadiiSet& R, int n, double K,
                                           const std::vector<Point>& point_masses, std::size_t ball_samples,
                                           std::uint64_t seed, double p = 1);

}  // namespace maxlab
