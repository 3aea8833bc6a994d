#include "maxlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "maxlab/rng.hpp"

namespace maxlab {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::standard: return "standard";
    case Variant::modified: return "modified";
    case Variant::spherical: return "spherical";
    case Variant::mq: return "mq";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "standard") return Variant::standard;
  if (s == "modified") return Variant::modified;
  if (s == "spherical") return Variant::spherical;
  if (s == "mq") return Variant::mq;
  throw SchemaError("unknown operator variant: " + s);
}

std::vector<Rational> MaximalProfile::values() const {
  std::vector<Rational> v;
  v.reserve(entries.size());
  for (const auto& e : entries) v.push_back(e.value);
  return v;
}

std::string MaximalProfile::to_csv() const {
  std::ostringstream os;
  os << "x,value,mass\n";
  for (const auto& e : entries) os << e.x << ',' << e.value.str() << ',' << e.mass.str() << '\n';
  return os.str();
}

nlohmann::json WeakNormCertificate::to_json() const {
  return {{"certified_value", value.str()},
          {"certified_value_float", value.to_double()},
          {"threshold", threshold.str()},
          {"mass", mass.str()},
          {"l1_norm", l1.str()},
          {"p", p},
          {"f", f_desc}};
}

Rational average(const Space& s, const std::vector<Rational>& f, Point x, Dist r) {
  Rational num = 0, den = 0;
  for (Point y = 0; y < s.size(); ++y)
    if (s.dist(x, y) <= r) {
      num += f[y].abs() * s.weight(y);
      den += s.weight(y);
    }
  return num / den;
}

Rational l1_norm(const Space& s, const std::vector<Rational>& f) {
  if (f.size() != s.size()) throw SchemaError("function length does not match the space");
  Rational t = 0;
  for (Point y = 0; y < s.size(); ++y) t += f[y].abs() * s.weight(y);
  return t;
}

namespace {

bool integral(const std::vector<Rational>& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& r) { return r.den() == 1; });
}

template <class T>
T from_rational(const Rational& r) {
  if constexpr (std::is_same_v<T, std::int64_t>)
    return r.num();
  else
    return r;
}

// Per-point evaluator shared by the full and the class-compressed paths.
class Evaluator {
 public:
  Evaluator(const Space& s, const std::vector<Rational>& f, const RadiiSet& R, Variant v)
      : s_(s), R_(R), v_(v), g_(s.as_group()) {
    if (f.size() != s.size()) throw SchemaError("function length does not match the space");
    if (R.keys.empty() && !R.to_zero) throw SchemaError("radii set is empty");
    if (v == Variant::mq) throw SchemaError("mq variant needs a quadratic level space");
    fw_.resize(s.size());
    w_.resize(s.size());
    for (Point y = 0; y < s.size(); ++y) {
      w_[y] = s.weight(y);
      fw_[y] = f[y].abs() * w_[y];
    }
    int_ = integral(fw_) && integral(w_);
    if (v == Variant::modified && g_) {
      for (Dist r : R.keys) enlarged_.push_back(Rational(static_cast<std::int64_t>(enlarged_ball(s, 0, r, r).size())));
    }
  }

  Rational at(Point x) const { return int_ ? eval<std::int64_t>(x) : eval<Rational>(x); }

 private:
  template <class T>
  Rational eval(Point x) const {
    // Points around x in nondecreasing distance, with prefix sums.
    std::vector<std::pair<Dist, Point>> order;
    if (g_) {
      order.reserve(s_.size());
      for (Point o : g_->sorted()) order.emplace_back(g_->norm(o), g_->group().add(x, o));
    } else {
      order.reserve(s_.size());
      for (Point y = 0; y < s_.size(); ++y) order.emplace_back(s_.dist(x, y), y);
      std::sort(order.begin(), order.end());
    }
    const std::size_t n = order.size();
    std::vector<T> num(n + 1), mea(n + 1);
    num[0] = mea[0] = T(0);
    for (std::size_t i = 0; i < n; ++i) {
      num[i + 1] = num[i] + from_rational<T>(fw_[order[i].second]);
      mea[i + 1] = mea[i] + from_rational<T>(w_[order[i].second]);
    }
    auto end_le = [&](Dist r) {
      return static_cast<std::size_t>(
          std::upper_bound(order.begin(), order.end(), std::make_pair(r, static_cast<Point>(-1))) - order.begin());
    };
    // Radii below the smallest positive distance give the singleton ball.
    Rational best = R_.to_zero && v_ != Variant::spherical ? Rational(num[1]) / Rational(mea[1]) : Rational(0);
    for (std::size_t i = 0; i < R_.keys.size(); ++i) {
      const Dist r = R_.keys[i];
      Rational val;
      if (v_ == Variant::spherical) {
        std::size_t lo = static_cast<std::size_t>(
            std::lower_bound(order.begin(), order.end(), std::make_pair(r, Point{0})) - order.begin());
        std::size_t hi = end_le(r);
        if (lo == hi) continue;
        val = Rational(num[hi] - num[lo]) / Rational(mea[hi] - mea[lo]);
      } else {
        std::size_t hi = end_le(r);
        Rational den = Rational(mea[hi]);
        if (v_ == Variant::modified) den = g_ ? enlarged_[i] : measure_of(s_, enlarged_ball(s_, x, r, r));
        val = Rational(num[hi]) / den;
      }
      if (val > best) best = val;
    }
    return best;
  }

  const Space& s_;
  const RadiiSet& R_;
  Variant v_;
  const GroupSpace* g_;
  std::vector<Rational> fw_, w_, enlarged_;
  bool int_ = false;
};

nlohmann::json radii_json(const RadiiSet& R) {
  nlohmann::json keys = nlohmann::json::array();
  for (Dist k : R.keys) keys.push_back(k);
  return {{"keys", keys}, {"count", R.keys.size()}, {"to_zero", R.to_zero}};
}

}  // namespace

MaximalProfile maximal_profile(const Space& s, const std::vector<Rational>& f, const RadiiSet& R, Variant v) {
  require_budget(static_cast<std::uint64_t>(s.size()) * s.size(), "maximal_profile (naive path; use the delta or class path)");
  Evaluator ev(s, f, R, v);
  MaximalProfile p;
  p.variant = v;
  p.radii_desc = radii_json(R);
  p.l1 = l1_norm(s, f);
  p.entries.resize(s.size());
  parallel_for(s.size(), [&](std::size_t x) { p.entries[x] = {x, ev.at(x), s.weight(x)}; });
  return p;
}

MaximalProfile maximal_profile_classes(const Space& s, const std::vector<Rational>& f, const RadiiSet& R, Variant v,
                                       const std::vector<std::pair<Point, Rational>>& reps) {
  require_budget(static_cast<std::uint64_t>(reps.size()) * s.size(), "maximal_profile_classes");
  Evaluator ev(s, f, R, v);
  MaximalProfile p;
  p.variant = v;
  p.radii_desc = radii_json(R);
  p.l1 = l1_norm(s, f);
  p.entries.resize(reps.size());
  parallel_for(reps.size(), [&](std::size_t i) { p.entries[i] = {reps[i].first, ev.at(reps[i].first), reps[i].second}; });
  return p;
}

MaximalProfile maximal_profile_delta(const Space& s, Point g, const Rational& c, const RadiiSet& R, Variant v) {
  if (v != Variant::standard && v != Variant::modified)
    throw SchemaError("delta fast path supports the standard and modified variants");
  if (R.keys.empty() && !R.to_zero) throw SchemaError("radii set is empty");
  MaximalProfile p;
  p.variant = v;
  p.radii_desc = radii_json(R);
  p.f_desc = {{"kind", "point_mass"}, {"at", g}, {"c", c.str()}};
  const Rational mass_g = c.abs() * s.weight(g);
  p.l1 = mass_g;
  p.entries.resize(s.size());
  const GroupSpace* gs = s.as_group();
  std::vector<Rational> group_den;
  if (gs) {
    for (Dist r : R.keys)
      group_den.push_back(Rational(static_cast<std::int64_t>(
          v == Variant::modified ? enlarged_ball(s, 0, r, r).size() : gs->ball_count(r))));
  } else {
    require_budget(static_cast<std::uint64_t>(s.size()) * s.size(), "maximal_profile_delta");
  }
  parallel_for(s.size(), [&](std::size_t x) {
    const Dist d = s.dist(x, g);
    // Balls grow with r, so the first admissible radius gives the maximum.
    auto it = std::lower_bound(R.keys.begin(), R.keys.end(), d);
    Rational val = R.to_zero && x == g ? c.abs() : Rational(0);
    if (it != R.keys.end() && val.is_zero()) {
      const auto i = static_cast<std::size_t>(it - R.keys.begin());
      Rational den;
      if (gs)
        den = group_den[i];
      else if (v == Variant::modified)
        den = measure_of(s, enlarged_ball(s, x, *it, *it));
      else
        den = ball_measure(s, x, *it);
      val = mass_g / den;
    }
    p.entries[x] = {x, val, s.weight(x)};
  });
  return p;
}

MaximalProfile maximal_profile_mq(const QuadraticLevelSpace& s, const std::vector<Rational>& f) {
  MaximalProfile p;
  p.variant = Variant::mq;
  p.radii_desc = {{"levels", "all nonempty E_z"}};
  std::vector<Rational> vals = mq_operator(s, f);
  p.l1 = 0;
  for (const auto& v : f) p.l1 += v.abs();
  p.entries.resize(vals.size());
  for (std::size_t x = 0; x < vals.size(); ++x) p.entries[x] = {x, vals[x], Rational(1)};
  return p;
}

WeakNormCertificate weak_norm_witness(const MaximalProfile& p) {
  if (p.l1.is_zero()) throw SchemaError("weak_norm_witness: f is zero");
  // mass of {M f >= v} for each distinct value, scanning values downward.
  std::map<Rational, Rational, std::greater<>> by_value;
  for (const auto& e : p.entries) by_value[e.value] += e.mass;
  WeakNormCertificate c;
  c.l1 = p.l1;
  c.f_desc = p.f_desc;
  Rational cum = 0;
  bool first = true;
  for (const auto& [v, m] : by_value) {
    cum += m;
    if (v.is_zero()) continue;
    Rational val = v * cum / p.l1;
    // >= so that a tie moves to the smaller threshold.
    if (first || val >= c.value) {
      c.value = val;
      c.threshold = v;
      c.mass = cum;
      first = false;
    }
  }
  return c;
}

RadiiSet lacunary_radii(const Space& s, const Rational& eps) {
  std::vector<Dist> real = realized_distances(s);
  if (real.size() < 2) return RadiiSet{{}, true};
  const DistScale& sc = s.scale();
  const long double dmin = sc.value(real[1]), diam = sc.value(real.back());
  // First j with (1 + eps) 2^j >= dmin.
  int j = 0;
  const long double f = 1.0L + eps.to_ldouble();
  while (f * std::ldexp(1.0L, j) < dmin) ++j;
  while (j > -62 && f * std::ldexp(1.0L, j - 1) >= dmin) --j;
  std::vector<Dist> keys;
  for (;; ++j) {
    Rational two = j >= 0 ? Rational(std::int64_t{1} << j) : Rational(1, std::int64_t{1} << -j);
    Dist k = sc.key_le((Rational(1) + eps) * two);
    if (keys.empty() || k > keys.back()) keys.push_back(k);
    if (std::ldexp(1.0L, j) >= diam) break;
  }
  return RadiiSet::from_keys(keys, true);
}

RadiiSet all_radii(const Space& s) {
  std::vector<Dist> real = realized_distances(s);
  real.erase(real.begin());
  if (real.empty()) return RadiiSet{{}, true};
  return RadiiSet::from_keys(real, true);
}

std::vector<RadiiBand> radii_bands(const RadiiSet& R, const DistScale& scale, const Rational& r_lo, int n, int m) {
  if (n <= 1 || m < 1) throw SchemaError("radii_bands needs n > 1 and m >= 1");
  const long double lr = std::log(r_lo.to_ldouble()), ln = std::log(static_cast<long double>(n));
  std::map<int, std::vector<Dist>> bands;
  for (Dist k : R.keys) {
    long double t = m * (std::log(scale.value(k)) - lr) / ln;
    long double rt = std::round(t);
    int idx;
    if (std::fabs(t - rt) < 1e-9L)
      idx = rt == 0 ? 0 : static_cast<int>(rt) - 1;  // on an endpoint: the lower band, except at r_lo
    else
      idx = static_cast<int>(std::floor(t));
    bands[idx].push_back(k);
  }
  std::vector<RadiiBand> out;
  for (auto& [i, keys] : bands) out.push_back({i, keys});
  return out;
}

std::vector<RadiiSet> radii_windows(const RadiiSet& R, const DistScale& scale, int n) {
  std::vector<RadiiSet> out;
  for (std::size_t i = 0; i < R.keys.size(); ++i) {
    const Dist top = scale.scaled(R.keys[i], Rational(n));
    std::vector<Dist> w;
    for (std::size_t j = i; j < R.keys.size() && R.keys[j] <= top; ++j) w.push_back(R.keys[j]);
    out.push_back(RadiiSet::from_keys(w));
  }
  return out;
}

Operator make_operator(const Space& s, const RadiiSet& R, Variant v) {
  return [&s, R, v](const std::vector<Rational>& f) { return maximal_profile(s, f, R, v).values(); };
}

nlohmann::json StrongNormEstimate::to_json() const {
  return {{"lower_bound_estimate", estimate}, {"label", "LOWER BOUND"}, {"best_family", best_family},
          {"trials", trials}, {"p", p}};
}

StrongNormEstimate strong_norm_estimate(const Space& s, const Operator& op, const RadiiSet& ball_radii, double p,
                                        std::size_t trials, std::uint64_t seed) {
  if (!(p > 1)) throw SchemaError("strong_norm_estimate needs p > 1");
  StrongNormEstimate est;
  est.p = p;
  auto norm = [&](const std::vector<Rational>& f) {
    long double t = 0;
    for (Point y = 0; y < s.size(); ++y) t += std::pow(std::fabs(f[y].to_ldouble()), p) * s.weight(y).to_ldouble();
    return std::pow(t, 1.0L / p);
  };
  auto consider = [&](const std::vector<Rational>& f, const char* family) {
    long double nf = norm(f);
    if (nf == 0) return;
    double r = static_cast<double>(norm(op(f)) / nf);
    ++est.trials;
    if (r > est.estimate) {
      est.estimate = r;
      est.best_family = family;
    }
  };
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const Point x = rng.below(s.size());
    std::vector<Rational> f(s.size(), Rational(0));
    switch (t % 3) {
      case 0:
        f[x] = 1;
        consider(f, "point_mass");
        break;
      case 1: {
        Dist r = ball_radii.keys.empty() ? 0 : ball_radii.keys[rng.below(ball_radii.keys.size())];
        for (Point y : ball(s, x, r)) f[y] = 1;
        consider(f, "ball_indicator");
        break;
      }
      default:
        for (auto& v : f) v = rng.below(2) ? 1 : -1;
        consider(f, "random_sign");
    }
  }
  return est;
}

}  // namespace maxlab
