#include "maxlab/mms.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "maxlab/rng.hpp"

namespace maxlab {

namespace mp = boost::multiprecision;

namespace {

mp::cpp_int ipow(mp::cpp_int b, unsigned e) {
  mp::cpp_int r = 1;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// base^j <= (a/b)^n, or < when strict; a, b > 0.
bool pow_le(int base, int j, std::int64_t a, std::int64_t b, int n, bool strict) {
  mp::cpp_int lhs = ipow(mp::cpp_int(b), n);
  mp::cpp_int rhs = ipow(mp::cpp_int(a), n);
  if (j >= 0)
    lhs *= ipow(mp::cpp_int(base), j);
  else
    rhs *= ipow(mp::cpp_int(base), -j);
  return strict ? lhs < rhs : lhs <= rhs;
}

// Largest integer j with base^j <= (a/b)^n (or <).
int largest_pow(int base, std::int64_t a, std::int64_t b, int n, bool strict) {
  long double est = n * std::log(static_cast<long double>(a) / b) / std::log(static_cast<long double>(base));
  int j = static_cast<int>(std::floor(est));
  while (!pow_le(base, j, a, b, n, strict)) --j;
  while (pow_le(base, j + 1, a, b, n, strict)) ++j;
  return j;
}

__int128 floor_div(__int128 a, __int128 b) {
  __int128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

__int128 isqrt128(__int128 v) {
  if (v <= 0) return 0;
  __int128 r = static_cast<__int128>(std::sqrt(static_cast<long double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

Dist clamp_key(__int128 v) {
  if (v > std::numeric_limits<Dist>::max() / 4) return std::numeric_limits<Dist>::max() / 4;
  return static_cast<Dist>(v);
}

}  // namespace

DistScale DistScale::integer(std::int64_t denom) {
  DistScale s;
  s.kind_ = Kind::integer;
  s.denom_ = denom;
  return s;
}

DistScale DistScale::squared() {
  DistScale s;
  s.kind_ = Kind::squared;
  return s;
}

DistScale DistScale::exponent(int base, int n, int lo) {
  DistScale s;
  s.kind_ = Kind::exponent;
  s.base_ = base;
  s.n_ = n;
  s.lo_ = lo;
  return s;
}

long double DistScale::value(Dist k) const {
  if (k <= 0) return 0;
  switch (kind_) {
    case Kind::integer:
      return static_cast<long double>(k) / denom_;
    case Kind::squared:
      return std::sqrt(static_cast<long double>(k));
    case Kind::exponent:
      return std::pow(static_cast<long double>(base_), static_cast<long double>(exponent_of(k)) / n_);
  }
  return 0;
}

Dist DistScale::key_le(const Rational& r) const {
  if (r < Rational(0)) return -1;
  if (r.is_zero()) return 0;
  switch (kind_) {
    case Kind::integer:
      return clamp_key(floor_div(static_cast<__int128>(r.num()) * denom_, r.den()));
    case Kind::squared:
      return clamp_key(floor_div(static_cast<__int128>(r.num()) * r.num(), static_cast<__int128>(r.den()) * r.den()));
    case Kind::exponent: {
      int j = largest_pow(base_, r.num(), r.den(), n_, false);
      return std::max<Dist>(0, j - lo_ + 1);
    }
  }
  return -1;
}

Dist DistScale::scaled(Dist k, const Rational& c, bool strict) const {
  if (c < Rational(0)) return -1;
  if (k <= 0 || c.is_zero()) return strict ? -1 : 0;
  switch (kind_) {
    case Kind::integer:
    case Kind::squared: {
      __int128 num = static_cast<__int128>(k) * c.num();
      __int128 den = c.den();
      if (kind_ == Kind::squared) {
        num *= c.num();
        den *= c.den();
      }
      __int128 fl = floor_div(num, den);
      if (strict && fl * den == num) --fl;
      return clamp_key(fl);
    }
    case Kind::exponent: {
      // base^{j'/n} <= c base^{j/n}  <=>  base^{j'-j} <= c^n
      int d = largest_pow(base_, c.num(), c.den(), n_, strict);
      return std::max<Dist>(0, k + d);
    }
  }
  return -1;
}

Dist DistScale::sum(Dist a, Dist b) const {
  if (a <= 0) return std::max<Dist>(b, 0);
  if (b <= 0) return a;
  switch (kind_) {
    case Kind::integer:
      return a + b;
    case Kind::squared:
      return clamp_key(static_cast<__int128>(a) + b + isqrt128(static_cast<__int128>(4) * a * b));
    case Kind::exponent: {
      // Irrational comparison; exact ties between sums of distinct powers
      // base^{j/n} do not occur in the key ranges used here.
      long double v = value(a) + value(b);
      long double lb = std::log(static_cast<long double>(base_));
      Dist k = std::max<Dist>(1, static_cast<Dist>(std::floor(n_ * std::log(v) / lb)) - lo_ + 1);
      while (k > 0 && value(k) > v * (1 + 1e-15L)) --k;
      while (value(k + 1) <= v * (1 + 1e-15L)) ++k;
      return k;
    }
  }
  return 0;
}

nlohmann::json DistScale::to_json() const {
  switch (kind_) {
    case Kind::integer:
      return {{"kind", "integer"}, {"denom", denom_}};
    case Kind::squared:
      return {{"kind", "squared"}};
    case Kind::exponent:
      return {{"kind", "exponent"}, {"base", base_}, {"n", n_}, {"lo", lo_}};
  }
  return {};
}

TableSpace::TableSpace(std::size_t n, std::vector<Dist> dist, std::vector<Rational> weight, DistScale scale,
                       nlohmann::json descriptor)
    : n_(n), dist_(std::move(dist)), weight_(std::move(weight)), counting_(true), scale_(scale),
      descriptor_(std::move(descriptor)) {
  if (n_ == 0) throw SchemaError("empty space");
  if (dist_.size() != n_ * n_) throw SchemaError("distance table size mismatch");
  if (weight_.empty()) weight_.assign(n_, Rational(1));
  if (weight_.size() != n_) throw SchemaError("weight vector size mismatch");
  for (const auto& w : weight_) {
    if (!(Rational(0) < w)) throw SchemaError("weights must be positive");
    if (w != Rational(1)) counting_ = false;
  }
}

GroupSpace::GroupSpace(std::vector<std::uint32_t> moduli, DistScale scale)
    : group_(std::make_unique<AbelianGroup>(std::move(moduli))), scale_(scale) {
  require_budget(group_->size(), "group space");
}

void GroupSpace::set_norms(std::vector<Dist> norms) {
  if (norms.size() != group_->size()) throw std::logic_error("norm table size");
  norm_ = std::move(norms);
  sorted_.resize(norm_.size());
  std::iota(sorted_.begin(), sorted_.end(), Point{0});
  std::stable_sort(sorted_.begin(), sorted_.end(), [&](Point a, Point b) { return norm_[a] < norm_[b]; });
  levels_.clear();
  level_end_.clear();
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    Dist d = norm_[sorted_[i]];
    if (levels_.empty() || levels_.back() != d) {
      levels_.push_back(d);
      level_end_.push_back(i + 1);
    } else {
      level_end_.back() = i + 1;
    }
  }
}

std::size_t GroupSpace::ball_count(Dist r) const {
  auto it = std::upper_bound(levels_.begin(), levels_.end(), r);
  if (it == levels_.begin()) return 0;
  return level_end_[static_cast<std::size_t>(it - levels_.begin()) - 1];
}

TorusSpace::TorusSpace(std::size_t N) : GroupSpace({static_cast<std::uint32_t>(N)}, DistScale::integer(1)), N_(N) {
  std::vector<Dist> norms(N);
  for (std::size_t g = 0; g < N; ++g) norms[g] = static_cast<Dist>(std::min(g, N - g));
  set_norms(std::move(norms));
}

nlohmann::json TorusSpace::descriptor() const {
  return {{"type", "torus"}, {"params", {{"N", N_}}}, {"scale", scale().to_json()}};
}

Rational RadialProfile::at(Dist r) const {
  auto it = std::upper_bound(keys.begin(), keys.end(), r);
  if (it == keys.begin()) return 0;
  return cum[static_cast<std::size_t>(it - keys.begin()) - 1];
}

Rational RadialProfile::below(Dist r) const {
  auto it = std::lower_bound(keys.begin(), keys.end(), r);
  if (it == keys.begin()) return 0;
  return cum[static_cast<std::size_t>(it - keys.begin()) - 1];
}

RadialProfile radial_profile_scan(const Space& s, Point x) {
  std::vector<std::pair<Dist, Point>> d(s.size());
  for (Point y = 0; y < s.size(); ++y) d[y] = {s.dist(x, y), y};
  std::sort(d.begin(), d.end());
  RadialProfile p;
  Rational acc = 0;
  for (auto& [k, y] : d) {
    acc += s.weight(y);
    if (!p.keys.empty() && p.keys.back() == k) {
      p.cum.back() = acc;
    } else {
      p.keys.push_back(k);
      p.cum.push_back(acc);
    }
  }
  return p;
}

RadialProfile radial_profile(const Space& s, Point x) {
  if (const GroupSpace* g = s.as_group()) {
    RadialProfile p;
    p.keys = g->levels();
    for (Dist k : p.keys) p.cum.emplace_back(static_cast<std::int64_t>(g->ball_count(k)));
    return p;
  }
  return radial_profile_scan(s, x);
}

Rational total_measure(const Space& s) {
  if (s.counting()) return Rational(static_cast<std::int64_t>(s.size()));
  Rational t = 0;
  for (Point x = 0; x < s.size(); ++x) t += s.weight(x);
  return t;
}

Rational measure_of(const Space& s, const std::vector<Point>& pts) {
  if (s.counting()) return Rational(static_cast<std::int64_t>(pts.size()));
  Rational t = 0;
  for (Point x : pts) t += s.weight(x);
  return t;
}

std::vector<Point> ball(const Space& s, Point x, Dist r) {
  std::vector<Point> out;
  if (const GroupSpace* g = s.as_group()) {
    std::size_t c = g->ball_count(r);
    out.reserve(c);
    for (std::size_t i = 0; i < c; ++i) out.push_back(g->group().add(x, g->sorted()[i]));
    std::sort(out.begin(), out.end());
    return out;
  }
  for (Point y = 0; y < s.size(); ++y)
    if (s.dist(x, y) <= r) out.push_back(y);
  return out;
}

Rational ball_measure(const Space& s, Point x, Dist r) {
  if (const GroupSpace* g = s.as_group()) return Rational(static_cast<std::int64_t>(g->ball_count(r)));
  Rational t = 0;
  for (Point y = 0; y < s.size(); ++y)
    if (s.dist(x, y) <= r) t += s.weight(y);
  return t;
}

std::vector<Point> enlarged_ball(const Space& s, Point x, Dist r, Dist r2) {
  std::vector<char> mark(s.size(), 0);
  if (const GroupSpace* g = s.as_group()) {
    std::size_t c1 = g->ball_count(r), c2 = g->ball_count(r2);
    require_budget(static_cast<std::uint64_t>(c1) * c2, "enlarged_ball");
    for (std::size_t i = 0; i < c1; ++i) {
      Point a = g->group().add(x, g->sorted()[i]);
      for (std::size_t j = 0; j < c2; ++j) mark[g->group().add(a, g->sorted()[j])] = 1;
    }
  } else {
    for (Point y : ball(s, x, r))
      for (Point z = 0; z < s.size(); ++z)
        if (s.dist(y, z) <= r2) mark[z] = 1;
  }
  std::vector<Point> out;
  for (Point z = 0; z < s.size(); ++z)
    if (mark[z]) out.push_back(z);
  return out;
}

std::vector<Dist> realized_distances(const Space& s) {
  if (const GroupSpace* g = s.as_group()) return g->levels();
  require_budget(static_cast<std::uint64_t>(s.size()) * s.size(), "realized_distances");
  std::vector<Dist> all;
  for (Point x = 0; x < s.size(); ++x)
    for (Point y = x; y < s.size(); ++y) all.push_back(s.dist(x, y));
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

Dist diameter(const Space& s) { return realized_distances(s).back(); }

std::string to_string(RegularityKind k) {
  switch (k) {
    case RegularityKind::doubling:
      return "doubling";
    case RegularityKind::microdoubling:
      return "microdoubling";
    case RegularityKind::strong_microdoubling:
      return "strong-microdoubling";
    case RegularityKind::ahlfors_david:
      return "AD";
    case RegularityKind::tempered:
      return "tempered";
  }
  return "?";
}

nlohmann::json RegularityReport::to_json() const {
  nlohmann::json j = {{"kind", to_string(kind)},
                      {"params",
                       {{"K", params.K},
                        {"n", params.n},
                        {"C", params.C.str()},
                        {"c_lo", params.c_lo.str()},
                        {"normalizer", params.normalizer.str()}}},
                      {"worst_ratio", worst_ratio},
                      {"witness", {{"x", x}, {"y", y}, {"r_key", r_key}, {"r_sup_key", r_sup_key}}},
                      {"pass", pass}};
  if (kind == RegularityKind::ahlfors_david) j["worst_lower"] = worst_lower;
  return j;
}

namespace {

mp::cpp_rational to_mp(const Rational& r) { return mp::cpp_rational(r.num(), r.den()); }

// value(k)^n as an exact rational.
mp::cpp_rational exact_power(const DistScale& sc, Dist k, int n) {
  switch (sc.kind()) {
    case DistScale::Kind::integer:
      return mp::cpp_rational(ipow(mp::cpp_int(k), n), ipow(mp::cpp_int(sc.denom()), n));
    case DistScale::Kind::squared:
      if (n % 2 != 0) throw SchemaError("AD check on a squared scale needs even n");
      return mp::cpp_rational(ipow(mp::cpp_int(k), n / 2));
    case DistScale::Kind::exponent: {
      int j = sc.exponent_of(k);
      if (sc.n() != n) throw SchemaError("AD exponent must match the exponent scale");
      mp::cpp_int b = ipow(mp::cpp_int(sc.base()), std::abs(j));
      return j >= 0 ? mp::cpp_rational(b) : mp::cpp_rational(mp::cpp_int(1), b);
    }
  }
  return 0;
}

std::vector<Point> representatives(const Space& s) {
  if (s.as_group()) return {0};
  std::vector<Point> xs(s.size());
  std::iota(xs.begin(), xs.end(), Point{0});
  return xs;
}

struct Candidate {
  long double ratio = -1;
  Point x = 0, y = 0;
  Dist r = 0, r_sup = 0;
};

void consider(Candidate& best, long double ratio, Point x, Point y, Dist r, Dist r_sup) {
  if (ratio > best.ratio) best = {ratio, x, y, r, r_sup};
}

}  // namespace

RegularityReport regularity_check(const Space& s, RegularityKind kind, const RegularityParams& p) {
  RegularityReport rep{kind, p};
  if (kind == RegularityKind::tempered) throw SchemaError("use tempered_check for tempered radii");
  const DistScale& sc = s.scale();
  auto xs = representatives(s);

  if (kind == RegularityKind::ahlfors_david) {
    if (p.n < 1) throw SchemaError("AD check needs integer n >= 1");
    auto realized = realized_distances(s);
    Dist lo = p.r_lo.value_or(realized.size() > 1 ? realized[1] : realized[0]);
    Dist hi = p.r_hi.value_or(realized.back());
    mp::cpp_rational norm = to_mp(p.normalizer);
    mp::cpp_rational worst_up = 0, worst_low = -1;
    Candidate best;
    for (Point x : xs) {
      RadialProfile prof = radial_profile(s, x);
      for (std::size_t i = 0; i < prof.keys.size(); ++i) {
        Dist a = prof.keys[i];
        Dist next = i + 1 < prof.keys.size() ? prof.keys[i + 1] : std::numeric_limits<Dist>::max();
        if (a > hi || next <= lo) continue;
        Dist left = std::max(a, lo);
        Dist right = std::min(next, hi);  // attained or approached from below
        if (left == 0) continue;
        mp::cpp_rational m = to_mp(prof.cum[i]) / norm;
        mp::cpp_rational up = m / exact_power(sc, left, p.n);
        mp::cpp_rational low = m / exact_power(sc, right, p.n);
        if (up > worst_up) {
          worst_up = up;
          best = {static_cast<long double>(up), x, x, left, right};
        }
        if (worst_low < 0 || low < worst_low) worst_low = low;
      }
    }
    rep.worst_ratio = static_cast<double>(worst_up);
    rep.worst_lower = static_cast<double>(worst_low);
    rep.x = best.x;
    rep.r_key = best.r;
    rep.r_sup_key = best.r_sup;
    rep.pass = worst_up <= to_mp(p.C) && worst_low >= to_mp(p.c_lo);
    return rep;
  }

  Rational c = kind == RegularityKind::doubling ? Rational(2) : Rational(p.n + 1, p.n);
  std::vector<RadialProfile> all_profiles;
  if (kind == RegularityKind::strong_microdoubling && !s.as_group()) {
    require_budget(static_cast<std::uint64_t>(s.size()) * s.size(), "strong microdoubling");
    for (Point y = 0; y < s.size(); ++y) all_profiles.push_back(radial_profile(s, y));
  }
  Candidate best;
  for (Point x : xs) {
    RadialProfile prof = radial_profile(s, x);
    for (std::size_t i = 0; i + 1 < prof.keys.size(); ++i) {
      Dist sup_key = prof.keys[i + 1];
      Dist reach = sc.scaled(sup_key, c, true);
      if (kind == RegularityKind::strong_microdoubling && !s.as_group()) {
        for (Point y : ball(s, x, prof.keys[i])) {
          Rational ratio = all_profiles[y].at(reach) / prof.cum[i];
          consider(best, ratio.to_ldouble(), x, y, prof.keys[i], sup_key);
        }
      } else {
        Rational ratio = prof.at(reach) / prof.cum[i];
        consider(best, ratio.to_ldouble(), x, x, prof.keys[i], sup_key);
      }
    }
    consider(best, 1, x, x, prof.keys.back(), prof.keys.back());
  }
  rep.worst_ratio = static_cast<double>(best.ratio);
  rep.x = best.x;
  rep.y = best.y;
  rep.r_key = best.r;
  rep.r_sup_key = best.r_sup;
  rep.pass = best.ratio <= static_cast<long double>(p.K);
  return rep;
}

RadiiSet RadiiSet::from_keys(std::vector<Dist> keys, bool to_zero) {
  if (keys.empty()) throw SchemaError("radii set must be nonempty");
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] <= 0) throw SchemaError("radii must be positive");
    if (i > 0 && keys[i] <= keys[i - 1]) throw SchemaError("radii must be strictly increasing");
  }
  return RadiiSet{std::move(keys), to_zero};
}

RegularityReport tempered_check(const Space& s, const RadiiSet& radii, double K) {
  RegularityParams p;
  p.K = K;
  RegularityReport rep{RegularityKind::tempered, p};
  Candidate best;
  for (Point x : representatives(s)) {
    for (std::size_t j = 0; j < radii.size(); ++j) {
      Dist rj = radii.keys[j];
      // The enlarged balls are monotone in the inner radius, so the union
      // over i < j is the one with i = j - 1.
      Rational num = j == 0 ? ball_measure(s, x, rj) : measure_of(s, enlarged_ball(s, x, rj, radii.keys[j - 1]));
      Rational worst_den = 0;
      Point arg = x;
      if (s.as_group()) {
        worst_den = ball_measure(s, x, rj);
      } else {
        for (Point y : ball(s, x, rj)) {
          Rational m = ball_measure(s, y, rj);
          if (worst_den.is_zero() || m < worst_den) {
            worst_den = m;
            arg = y;
          }
        }
      }
      consider(best, (num / worst_den).to_ldouble(), x, arg, rj, rj);
    }
  }
  rep.worst_ratio = static_cast<double>(best.ratio);
  rep.x = best.x;
  rep.y = best.y;
  rep.r_key = best.r;
  rep.r_sup_key = best.r_sup;
  rep.pass = best.ratio <= static_cast<long double>(K);
  return rep;
}

TriangleReport metric_check(const Space& s, std::size_t exhaustive_max, std::uint64_t samples, std::uint64_t seed) {
  TriangleReport rep;
  const DistScale& sc = s.scale();
  const std::size_t n = s.size();

  // Sum lookups are expensive on the exponent scale; tabulate over realized keys.
  std::map<std::pair<Dist, Dist>, Dist> memo;
  auto sum = [&](Dist a, Dist b) {
    if (sc.kind() != DistScale::Kind::exponent) return sc.sum(a, b);
    auto key = std::minmax(a, b);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Dist v = sc.sum(a, b);
    memo.emplace(key, v);
    return v;
  };
  auto fail = [&](Point x, Point y, Point z, const std::string& why) {
    rep.pass = false;
    rep.x = x;
    rep.y = y;
    rep.z = z;
    rep.failure = why;
  };

  if (const GroupSpace* g = s.as_group()) {
    const auto& G = g->group();
    auto check_pair = [&](Point a, Point b) {
      ++rep.checked;
      if (g->norm(G.add(a, b)) > sum(g->norm(a), g->norm(b))) fail(a, 0, G.neg(b), "triangle");
    };
    for (Point a = 0; a < n && rep.pass; ++a) {
      if ((g->norm(a) == 0) != (a == 0)) fail(a, 0, 0, "non-degeneracy");
      if (g->norm(a) != g->norm(G.neg(a))) fail(a, 0, 0, "symmetry");
    }
    if (n * n <= 50'000'000ULL) {
      rep.exhaustive = true;
      for (Point a = 0; a < n && rep.pass; ++a)
        for (Point b = 0; b < n && rep.pass; ++b) check_pair(a, b);
    } else {
      Rng rng(seed);
      for (std::uint64_t t = 0; t < samples && rep.pass; ++t) check_pair(rng.below(n), rng.below(n));
    }
    return rep;
  }

  for (Point x = 0; x < n && rep.pass; ++x)
    for (Point y = 0; y < n && rep.pass; ++y) {
      if (s.dist(x, y) != s.dist(y, x)) fail(x, y, y, "symmetry");
      if ((s.dist(x, y) == 0) != (x == y)) fail(x, y, y, "non-degeneracy");
    }
  auto check = [&](Point x, Point y, Point z) {
    ++rep.checked;
    if (s.dist(x, z) > sum(s.dist(x, y), s.dist(y, z))) fail(x, y, z, "triangle");
  };
  if (n <= exhaustive_max) {
    rep.exhaustive = true;
    for (Point x = 0; x < n && rep.pass; ++x)
      for (Point y = 0; y < n && rep.pass; ++y)
        for (Point z = 0; z < n && rep.pass; ++z) check(x, y, z);
  } else {
    Rng rng(seed);
    for (std::uint64_t t = 0; t < samples && rep.pass; ++t) check(rng.below(n), rng.below(n), rng.below(n));
  }
  return rep;
}

bool invariance_check(const Space& s, std::size_t representatives_count, std::uint64_t seed) {
  RadialProfile ref = radial_profile(s, 0);
  Rng rng(seed);
  for (std::size_t t = 0; t < representatives_count; ++t) {
    Point x = t == 0 ? 0 : rng.below(s.size());
    RadialProfile p = radial_profile_scan(s, x);
    if (p.keys != ref.keys || p.cum != ref.cum) return false;
  }
  return true;
}

}  // namespace maxlab
