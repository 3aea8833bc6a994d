#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxlab/field.hpp"
#include "maxlab/mms.hpp"

namespace maxlab {

enum class Variant { standard, modified, spherical, mq };
std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

/// Value of M f at x, carried with the measure of the set of points that
/// share it (a single point, or a symmetry class of points).
struct ProfileEntry {
  Point x;
  Rational value;
  Rational mass;
};

struct MaximalProfile {
  Variant variant = Variant::standard;
  nlohmann::json f_desc;
  nlohmann::json radii_desc;
  Rational l1;
  std::vector<ProfileEntry> entries;

  std::vector<Rational> values() const;
  std::string to_csv() const;
};

struct WeakNormCertificate {
  Rational value;      // threshold * mass / l1
  Rational threshold;  // v*
  Rational mass;       // mu(M f >= v*)
  Rational l1;
  double p = 1;
  nlohmann::json f_desc;
  nlohmann::json to_json() const;
};

/// A_r f(x) = mu(B(x, r))^{-1} sum_{y in B(x, r)} |f(y)| mu(y).
Rational average(const Space& s, const std::vector<Rational>& f, Point x, Dist r);

/// sum |f| mu.
Rational l1_norm(const Space& s, const std::vector<Rational>& f);

/// M_R f at every point. Standard: ball averages. Modified: ball numerator
/// over mu(B(x, r, r)). Spherical: averages over {y : d(x, y) = r}, empty
/// spheres skipped. When R.to_zero, standard and modified also see the
/// singleton balls, so M f >= |f|. Costs about n^2 distance evaluations.
MaximalProfile maximal_profile(const Space& s, const std::vector<Rational>& f, const RadiiSet& R,
                               Variant v = Variant::standard);

/// M_R f evaluated at the given representatives only; each entry carries the
/// supplied class mass. The caller vouches that M f is constant on each class.
MaximalProfile maximal_profile_classes(const Space& s, const std::vector<Rational>& f, const RadiiSet& R,
                                       Variant v, const std::vector<std::pair<Point, Rational>>& reps);

/// M_R (c delta_g) for standard or modified variants:
/// c mu(g) max{1 / mu(B(x, r)) : r in R, d(x, g) <= r}.
MaximalProfile maximal_profile_delta(const Space& s, Point g, const Rational& c, const RadiiSet& R,
                                     Variant v = Variant::standard);

/// M_q f on X_q (per-point entries of unit mass).
MaximalProfile maximal_profile_mq(const QuadraticLevelSpace& s, const std::vector<Rational>& f);

/// max over profile values v of v mu(M f >= v) / ||f||_1, ties to the smallest v.
WeakNormCertificate weak_norm_witness(const MaximalProfile& p);

/// Radii keys {(1 + eps) 2^j} from the smallest one reaching the minimum
/// positive distance to the first one reaching the diameter (to_zero set,
/// standing in for the j < 0 members).
RadiiSet lacunary_radii(const Space& s, const Rational& eps);
/// All realized positive distances, with to_zero set: the radii (0, inf).
RadiiSet all_radii(const Space& s);

struct RadiiBand {
  int index;                 // band [r n^{j/m}, r n^{(j+1)/m}]
  std::vector<Dist> keys;    // members not already taken by the band below
};

/// Splits R into the bands R n [r n^{j/m}, r n^{(j+1)/m}]; a radius on a
/// shared endpoint goes to the lower band. Empty bands are omitted.
std::vector<RadiiBand> radii_bands(const RadiiSet& R, const DistScale& scale, const Rational& r_lo, int n, int m);

/// R n [rho, n rho] for every rho in R (the windows of the localization statement).
std::vector<RadiiSet> radii_windows(const RadiiSet& R, const DistScale& scale, int n);

using Operator = std::function<std::vector<Rational>(const std::vector<Rational>&)>;

/// Operator f -> M_R f on a space.
Operator make_operator(const Space& s, const RadiiSet& R, Variant v);

struct StrongNormEstimate {
  double estimate = 0;  // a LOWER bound on the L_p operator norm
  std::string best_family;
  std::size_t trials = 0;
  double p = 2;
  nlohmann::json to_json() const;
};

/// max ||M f||_p / ||f||_p over point masses, random ball indicators and
/// random +-1 fields (point weights taken from the space).
StrongNormEstimate strong_norm_estimate(const Space& s, const Operator& op, const RadiiSet& ball_radii, double p,
                                        std::size_t trials, std::uint64_t seed);

}  // namespace maxlab
