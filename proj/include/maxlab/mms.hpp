#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxlab/common.hpp"
#include "maxlab/group.hpp"
#include "maxlab/rational.hpp"

namespace maxlab {

/// How integer distance keys map to real distances. Keys are strictly
/// monotone in the distance and key 0 is distance 0.
///   integer:  value = key / denom
///   squared:  value = sqrt(key)
///   exponent: value = base^{(key - 1 + lo) / n} for key >= 1
class DistScale {
 public:
  enum class Kind { integer, squared, exponent };

  static DistScale integer(std::int64_t denom = 1);
  static DistScale squared();
  static DistScale exponent(int base, int n, int lo);

  Kind kind() const { return kind_; }
  std::int64_t denom() const { return denom_; }
  int base() const { return base_; }
  int n() const { return n_; }
  int lo() const { return lo_; }

  long double value(Dist k) const;
  /// Largest key whose value is <= r (-1 when r < 0).
  Dist key_le(const Rational& r) const;
  /// Largest key whose value is <= c * value(k), or < when strict.
  Dist scaled(Dist k, const Rational& c, bool strict = false) const;
  /// Largest key whose value is <= value(a) + value(b).
  Dist sum(Dist a, Dist b) const;
  /// Exponent j of a key on the exponent scale.
  int exponent_of(Dist k) const { return static_cast<int>(k) - 1 + lo_; }

  nlohmann::json to_json() const;

 private:
  Kind kind_ = Kind::integer;
  std::int64_t denom_ = 1;
  int base_ = 3, n_ = 1, lo_ = 0;
};

class GroupSpace;

/// Finite metric measure space with an exact distance oracle.
class Space {
 public:
  virtual ~Space() = default;
  virtual std::size_t size() const = 0;
  virtual Dist dist(Point x, Point y) const = 0;
  virtual Rational weight(Point) const { return Rational(1); }
  virtual bool counting() const { return true; }
  virtual const DistScale& scale() const = 0;
  virtual nlohmann::json descriptor() const = 0;
  /// Non-null for translation-invariant group spaces, d(x, y) = N(x - y).
  virtual const GroupSpace* as_group() const { return nullptr; }
};

using SpacePtr = std::shared_ptr<const Space>;

/// Explicit distance matrix; suitable up to a few thousand points.
class TableSpace : public Space {
 public:
  TableSpace(std::size_t n, std::vector<Dist> dist, std::vector<Rational> weight, DistScale scale,
             nlohmann::json descriptor);

  std::size_t size() const override { return n_; }
  Dist dist(Point x, Point y) const override { return dist_[x * n_ + y]; }
  Rational weight(Point x) const override { return weight_[x]; }
  bool counting() const override { return counting_; }
  const DistScale& scale() const override { return scale_; }
  nlohmann::json descriptor() const override { return descriptor_; }

 private:
  std::size_t n_;
  std::vector<Dist> dist_;
  std::vector<Rational> weight_;
  bool counting_;
  DistScale scale_;
  nlohmann::json descriptor_;
};

/// Counting measure on a finite abelian group with an invariant metric given
/// by a norm table. Balls are translates of the sorted-by-norm prefix.
class GroupSpace : public Space {
 public:
  std::size_t size() const override { return group_->size(); }
  Dist dist(Point x, Point y) const override { return norm_[group_->sub(x, y)]; }
  const DistScale& scale() const override { return scale_; }
  const GroupSpace* as_group() const override { return this; }

  const AbelianGroup& group() const { return *group_; }
  Dist norm(Point g) const { return norm_[g]; }
  const std::vector<Dist>& norms() const { return norm_; }
  /// Elements ordered by (norm, index).
  const std::vector<Point>& sorted() const { return sorted_; }
  /// Distinct norms, ascending (starts with 0).
  const std::vector<Dist>& levels() const { return levels_; }
  /// |B(0, r)|.
  std::size_t ball_count(Dist r) const;

 protected:
  GroupSpace(std::vector<std::uint32_t> moduli, DistScale scale);
  void set_norms(std::vector<Dist> norms);

 private:
  std::unique_ptr<AbelianGroup> group_;
  DistScale scale_;
  std::vector<Dist> norm_;
  std::vector<Point> sorted_;
  std::vector<Dist> levels_;
  std::vector<std::size_t> level_end_;
};

/// Cyclic group Z_N with the arc metric min(|i - j|, N - |i - j|).
class TorusSpace : public GroupSpace {
 public:
  explicit TorusSpace(std::size_t N);
  nlohmann::json descriptor() const override;

 private:
  std::size_t N_;
};

/// mu(B(x, .)) as a step function: measure at each distinct distance from x.
struct RadialProfile {
  std::vector<Dist> keys;
  std::vector<Rational> cum;
  Rational at(Dist r) const;     // mu(B(x, r))
  Rational below(Dist r) const;  // mu of the open ball of key radius r
};

RadialProfile radial_profile(const Space& s, Point x);
/// Same, but always by scanning every point (ignores group structure).
RadialProfile radial_profile_scan(const Space& s, Point x);
Rational total_measure(const Space& s);
Rational measure_of(const Space& s, const std::vector<Point>& pts);
std::vector<Point> ball(const Space& s, Point x, Dist r);
Rational ball_measure(const Space& s, Point x, Dist r);
/// B(x, r, r2) = union of B(y, r2) over y in B(x, r).
std::vector<Point> enlarged_ball(const Space& s, Point x, Dist r, Dist r2);
/// Sorted distinct distance keys (includes 0).
std::vector<Dist> realized_distances(const Space& s);
Dist diameter(const Space& s);

enum class RegularityKind { doubling, microdoubling, strong_microdoubling, ahlfors_david, tempered };
std::string to_string(RegularityKind k);

struct RegularityParams {
  double K = 0;   // doubling / microdoubling / tempered constant
  int n = 1;      // microdoubling or AD exponent
  Rational C = 1;     // AD upper constant
  Rational c_lo = 1;  // AD lower constant
  Rational normalizer = 1;  // AD: divide mu by this
  std::optional<Dist> r_lo, r_hi;  // AD radius range (keys)
};

struct RegularityReport {
  RegularityKind kind;
  RegularityParams params;
  double worst_ratio = 1;
  /// AD only: smallest mu/(normalizer r^n) seen (checked against c_lo).
  double worst_lower = 0;
  Point x = 0, y = 0;
  Dist r_key = 0;      // lower end of the radius interval of the witness
  Dist r_sup_key = 0;  // the ratio is approached as r rises to this key
  bool pass = true;
  nlohmann::json to_json() const;
};

/// Evaluates the defining ratio over every x and every r > 0. Because
/// mu(B(x, .)) only jumps at realized distances, the supremum over each
/// interval [d_i, d_{i+1}) is attained in the limit r -> d_{i+1}.
RegularityReport regularity_check(const Space& s, RegularityKind kind, const RegularityParams& p);

/// Strictly increasing radii keys. `to_zero` marks a set that also contains
/// radii arbitrarily close to 0 (such as (0, inf) or a lacunary family indexed
/// by Z); below the smallest positive distance those balls are singletons.
struct RadiiSet {
  std::vector<Dist> keys;
  bool to_zero = false;
  static RadiiSet from_keys(std::vector<Dist> keys, bool to_zero = false);
  std::size_t size() const { return keys.size(); }
};

/// max over j, x, y in B(x, r_j) of mu(B(x, r_j) u U_{i<j} B(x, r_j, r_i)) / mu(B(y, r_j)).
RegularityReport tempered_check(const Space& s, const RadiiSet& radii, double K);

struct TriangleReport {
  bool pass = true;
  bool exhaustive = false;
  std::uint64_t checked = 0;
  Point x = 0, y = 0, z = 0;
  std::string failure;
};

/// Symmetry, non-degeneracy and the triangle inequality. Exhaustive up to
/// `exhaustive_max` points, otherwise `samples` random triples.
TriangleReport metric_check(const Space& s, std::size_t exhaustive_max = 500, std::uint64_t samples = 1'000'000,
                            std::uint64_t seed = 1);

/// For group spaces: mu(B(x, r)) computed by scanning equals |B(0, r)| for sampled x.
bool invariance_check(const Space& s, std::size_t representatives, std::uint64_t seed);

}  // namespace maxlab
