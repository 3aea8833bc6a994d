#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxlab/kary_tree.hpp"
#include "maxlab/rational.hpp"

namespace maxlab {

/// |{(x, y) in E x F : d(x, y) = r}| by splitting E, F into levels and pairing
/// depth j with depth i = j + r - 2m through the common m-th / (r-m)-th ancestor.
std::uint64_t pair_count(const KaryTree& t, const std::vector<Point>& E, const std::vector<Point>& F, int r);
/// Same count by a double loop.
std::uint64_t pair_count_naive(const KaryTree& t, const std::vector<Point>& E, const std::vector<Point>& F, int r);

struct PairBound {
  std::uint64_t count = 0;
  double bound = 0;  // 2 sqrt(|E| |F|) k^{r/2}
  double ratio = 0;  // count / bound
  bool pass = true;  // count^2 <= 4 |E| |F| k^r, exactly
};
PairBound pair_bound(const KaryTree& t, std::uint64_t count, std::size_t e, std::size_t f, int r);

struct ExhaustivePairReport {
  int k = 0, D = 0;
  std::uint64_t sets = 0;  // E subsets enumerated
  std::uint64_t cases = 0; // (E, r, |F|) cases checked
  double worst_ratio = 0;
  bool pass = true;
  nlohmann::json to_json() const;
};

/// Every (E, F, r) on a tree with at most 15 vertices. For fixed E and r the
/// count over F is sum_{y in F} |S(y, r) n E|, so among sets of one size the
/// largest count comes from the vertices with the most hits; checking those
/// prefixes covers every F of that size.
ExhaustivePairReport exhaustive_pair_check(const KaryTree& t);

/// Per-vertex spherical maximal function sup_r A°_r |f|(x) over nonempty spheres.
/// Clipped spheres by default; with `infinite` the averages divide by the
/// sphere sizes of the infinite tree (f is zero outside the truncated tree).
struct SphericalProfile {
  std::vector<Rational> value;
  std::vector<int> best_r;
  bool infinite = false;
  /// sizes[x][r] = |S(x, r)|, filled only by spherical_profile(..., with_sizes = true).
  std::vector<std::vector<std::uint64_t>> sizes;
};
SphericalProfile spherical_profile(const KaryTree& t, const std::vector<Rational>& f, bool infinite = false,
                                   bool with_sizes = false);

/// A°_r |f| at every vertex (clipped spheres; empty spheres give 0).
std::vector<Rational> spherical_average(const KaryTree& t, const std::vector<Rational>& f, int r);

struct DistributionalRow {
  int r = 0;
  Rational lambda;
  Rational lhs;        // mu(A°_r f >= lambda)
  double rhs = 0;      // sum_{1 <= 2^n <= 2 k^r} sqrt(2^n / k^r) 2^n mu(|f| >= 2^{n-1} lambda)
  double chain = 0;    // sum_n 2^10 sqrt(2^n / k^r) 2^n mu(E_n) + k^r mu(|f| >= k^r lambda / 2)
  double constant = 1025;
  double margin = 0;   // constant * rhs - lhs
  bool chain_pass = true;
  bool pass = true;    // lhs <= constant * rhs
};
DistributionalRow distributional_check(const KaryTree& t, const std::vector<Rational>& f, int r,
                                       const Rational& lambda);

/// |S(x, r)| in the infinite k-ary tree for a vertex at depth h.
std::uint64_t sphere_size_at_depth(int k, int h, int r);

struct TreeScanRow {
  int k = 0, D = 0;
  std::string family;
  Rational spherical;  // sup_v v mu(M° f >= v) / ||f||_1
  Rational standard;   // same for M
  int spherical_depth = 0;  // depth class attaining the witness
};

struct TreeScan {
  std::vector<TreeScanRow> rows;
  Rational max_spherical, min_spherical;
  double ratio = 0;  // max / min spherical witness across k
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Weak-norm witnesses on the depth-D truncation for f in {delta_root, ones},
/// computed per depth class (every vertex at depth h has the same value), so
/// the tree is never materialized. delta_root uses infinite-tree spheres and
/// balls; ones uses the truncated tree, where every average is 1.
TreeScan tree_weak_norm_scan(const std::vector<int>& ks, int D, const std::vector<std::string>& families);

}  // namespace maxlab
