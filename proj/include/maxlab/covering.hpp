#pragma once

#include <string>
#include <memory>
#include <vector>

#include "json.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/mms.hpp"

namespace maxlab {

/// B*(x) = B(x, r_k) u U_i B(x, r_k, r_i). The enlarged balls grow with r_i,
/// so this is B(x, r_k, max r_i) (or B(x, r_k) without lower radii).
std::vector<Point> extended_ball(const Space& s, Point x, Dist r_k, const std::vector<Dist>& lower);

/// p(x) = min_{y in B(x, r_k)} 1 / mu(B*(y)) for x in E_k (0 elsewhere).
std::vector<Rational> intensity(const Space& s, const std::vector<Point>& E_k, Dist r_k,
                                const std::vector<Dist>& lower);

struct PoissonCoverSample {
  std::vector<std::pair<Point, std::uint64_t>> sigma;  // (point, multiplicity), by point
  std::vector<char> E_prime;                           // U_{x in Sigma} B*(x)
  std::vector<char> F;                                 // U_{x in Sigma} B(x, r_k)
  std::uint64_t seed = 0;
  std::uint64_t size() const;
};

/// N ~ Poisson(sum p mu), then N iid draws from p mu / P.
PoissonCoverSample sample_poisson(const Space& s, const std::vector<Rational>& p, Dist r_k,
                                  const std::vector<Dist>& lower, std::uint64_t seed, bool build_sets = true);

/// alpha_w = sum_x w p mu.
Rational alpha_w(const Space& s, const std::vector<Rational>& w, const std::vector<Rational>& p);
/// alpha(y) = sum_{x in B(y, r_k)} p(x) mu(x), for every y.
std::vector<Rational> alpha_ball(const Space& s, const std::vector<Rational>& p, Dist r_k);

struct CoverSampleCheck {
  bool contains = true;    // E' contains F
  bool indicator = true;   // 1_F(y) = 1 iff |Sigma n B(y, r_k)| >= 1
};
CoverSampleCheck check_cover_sample(const Space& s, const PoissonCoverSample& c, Dist r_k);

struct MomentRow {
  std::string weight;
  double expected = 0;   // alpha_w
  double empirical = 0;  // mean of sum_{x in Sigma} w(x)
  double sigma = 0;      // 3-sigma allowance uses sqrt(alpha_{w^2} / trials)
  bool pass = true;
};

struct MomentReport {
  std::uint64_t trials = 0;
  std::vector<MomentRow> rows;
  /// Pr[|Sigma n B(y, r_k)| >= 1] against 1 - e^{-alpha(y)} at a few y.
  std::vector<MomentRow> hit_rows;
  bool alpha_le_one = true;
  bool pass() const;
  nlohmann::json to_json() const;
};

MomentReport poisson_moments(const Space& s, const std::vector<Rational>& p, Dist r_k,
                             const std::vector<std::pair<std::string, std::vector<Rational>>>& weights,
                             const std::vector<Point>& probes, std::uint64_t trials, std::uint64_t seed);

struct LindenstraussRow {
  std::string f;
  double lambda = 0;
  Rational level_mass;  // mu(max_j A_{r_j} |f| > lambda)
  double ratio = 0;     // lambda mu(...) / ||f||_1
  double bound = 0;     // 2e/(e-1) K
  bool pass = true;
};

struct LindenstraussReport {
  double K = 0;
  double constant = 0;  // 2e/(e-1) K
  std::vector<LindenstraussRow> rows;
  double worst_ratio = 0;
  bool pass() const;
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Default lambda grid: `count` geometric values between the smallest
/// positive and the largest value of the profile.
std::vector<double> lambda_grid(const MaximalProfile& p, std::size_t count);

/// For each f and lambda: lambda mu(max_j A_{r_j}|f| > lambda) <= 2e/(e-1) K ||f||_1.
/// K is taken from tempered_check; a supplied K below it is rejected.
LindenstraussReport lindenstrauss_experiment(const Space& s, const RadiiSet& radii,
                                             const std::vector<std::pair<std::string, std::vector<Rational>>>& fs,
                                             std::size_t lambdas, double K = 0);

struct SubexpRadii {
  RadiiSet radii;
  bool truncated = false;
  double tolerance = 0.001;
  nlohmann::json to_json() const;
};

/// r_1 = smallest positive distance; r_{k+1} is the smallest realized distance
/// above max(r_k, k), strictly below the diameter, with
/// log mu(B(x, r_{k+1} + r_k)) <= log mu(B(x, r_{k+1})) + tolerance for every x.
SubexpRadii subexp_radii(const Space& s, std::size_t count, double tolerance = 0.001);

}  // namespace maxlab
