#include "maxlab/covering.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "maxlab/rng.hpp"

namespace maxlab {

namespace {

// Offsets of B*(0) on a group space; B*(x) = x + offsets.
std::vector<Point> group_extended_offsets(const GroupSpace& g, Dist r_k, const std::vector<Dist>& lower) {
  Dist inner = lower.empty() ? -1 : *std::max_element(lower.begin(), lower.end());
  if (inner < 0) {
    std::size_t c = g.ball_count(r_k);
    return {g.sorted().begin(), g.sorted().begin() + static_cast<std::ptrdiff_t>(c)};
  }
  return enlarged_ball(g, 0, r_k, inner);
}

std::vector<Point> ball_offsets(const GroupSpace& g, Dist r) {
  std::size_t c = g.ball_count(r);
  return {g.sorted().begin(), g.sorted().begin() + static_cast<std::ptrdiff_t>(c)};
}

}  // namespace

std::vector<Point> extended_ball(const Space& s, Point x, Dist r_k, const std::vector<Dist>& lower) {
  Dist inner = -1;
  for (Dist r : lower) {
    if (r > r_k) throw SchemaError("extended_ball: lower radius exceeds r_k");
    inner = std::max(inner, r);
  }
  if (inner < 0) return ball(s, x, r_k);
  return enlarged_ball(s, x, r_k, inner);
}

std::vector<Rational> intensity(const Space& s, const std::vector<Point>& E_k, Dist r_k,
                                const std::vector<Dist>& lower) {
  std::vector<Rational> p(s.size(), Rational(0));
  if (const GroupSpace* g = s.as_group()) {
    Rational v = Rational(1) / Rational(static_cast<std::int64_t>(group_extended_offsets(*g, r_k, lower).size()));
    for (Point x : E_k) p[x] = v;
    return p;
  }
  require_budget(static_cast<std::uint64_t>(s.size()) * s.size(), "intensity");
  std::vector<Rational> star(s.size());
  for (Point y = 0; y < s.size(); ++y) star[y] = measure_of(s, extended_ball(s, y, r_k, lower));
  for (Point x : E_k) {
    Rational worst = 0;
    for (Point y : ball(s, x, r_k)) worst = rmax(worst, star[y]);
    p[x] = Rational(1) / worst;
  }
  return p;
}

std::uint64_t PoissonCoverSample::size() const {
  std::uint64_t n = 0;
  for (const auto& e : sigma) n += e.second;
  return n;
}

namespace {

struct Intensity {
  std::vector<Point> support;
  std::vector<double> weight;  // p mu on the support
  double total = 0;
  std::unique_ptr<AliasTable> alias;
};

Intensity make_intensity(const Space& s, const std::vector<Rational>& p) {
  Intensity in;
  for (Point x = 0; x < s.size(); ++x) {
    if (p[x].is_zero()) continue;
    double w = (p[x] * s.weight(x)).to_double();
    in.support.push_back(x);
    in.weight.push_back(w);
    in.total += w;
  }
  if (!in.support.empty()) in.alias = std::make_unique<AliasTable>(in.weight);
  return in;
}

std::vector<std::pair<Point, std::uint64_t>> draw_sigma(const Intensity& in, Rng& rng) {
  std::vector<std::pair<Point, std::uint64_t>> out;
  if (!in.alias) return out;
  std::uint64_t N = rng.poisson(in.total);
  std::vector<Point> pts;
  pts.reserve(N);
  for (std::uint64_t i = 0; i < N; ++i) pts.push_back(in.support[in.alias->draw(rng)]);
  std::sort(pts.begin(), pts.end());
  for (Point x : pts) {
    if (!out.empty() && out.back().first == x)
      ++out.back().second;
    else
      out.push_back({x, 1});
  }
  return out;
}

}  // namespace

PoissonCoverSample sample_poisson(const Space& s, const std::vector<Rational>& p, Dist r_k,
                                  const std::vector<Dist>& lower, std::uint64_t seed, bool build_sets) {
  if (p.size() != s.size()) throw SchemaError("intensity size does not match the space");
  PoissonCoverSample c;
  c.seed = seed;
  Rng rng(seed);
  c.sigma = draw_sigma(make_intensity(s, p), rng);
  if (!build_sets) return c;
  c.E_prime.assign(s.size(), 0);
  c.F.assign(s.size(), 0);
  if (const GroupSpace* g = s.as_group()) {
    auto star = group_extended_offsets(*g, r_k, lower);
    auto b = ball_offsets(*g, r_k);
    for (const auto& [x, mult] : c.sigma) {
      for (Point o : star) c.E_prime[g->group().add(x, o)] = 1;
      for (Point o : b) c.F[g->group().add(x, o)] = 1;
    }
  } else {
    for (const auto& [x, mult] : c.sigma) {
      for (Point y : extended_ball(s, x, r_k, lower)) c.E_prime[y] = 1;
      for (Point y : ball(s, x, r_k)) c.F[y] = 1;
    }
  }
  return c;
}

Rational alpha_w(const Space& s, const std::vector<Rational>& w, const std::vector<Rational>& p) {
  Rational a = 0;
  for (Point x = 0; x < s.size(); ++x)
    if (!p[x].is_zero()) a += w[x] * p[x] * s.weight(x);
  return a;
}

std::vector<Rational> alpha_ball(const Space& s, const std::vector<Rational>& p, Dist r_k) {
  std::vector<Rational> a(s.size(), Rational(0));
  std::vector<Point> support;
  for (Point x = 0; x < s.size(); ++x)
    if (!p[x].is_zero()) support.push_back(x);
  require_budget(static_cast<std::uint64_t>(s.size()) * support.size(), "alpha_ball");
  for (Point y = 0; y < s.size(); ++y)
    for (Point x : support)
      if (s.dist(x, y) <= r_k) a[y] += p[x] * s.weight(x);
  return a;
}

CoverSampleCheck check_cover_sample(const Space& s, const PoissonCoverSample& c, Dist r_k) {
  CoverSampleCheck r;
  for (Point y = 0; y < s.size(); ++y) {
    if (c.F[y] && !c.E_prime[y]) r.contains = false;
    bool hit = false;
    for (const auto& e : c.sigma)
      if (s.dist(e.first, y) <= r_k) {
        hit = true;
        break;
      }
    if (hit != static_cast<bool>(c.F[y])) r.indicator = false;
  }
  return r;
}

bool MomentReport::pass() const {
  if (!alpha_le_one) return false;
  for (const auto& r : rows)
    if (!r.pass) return false;
  for (const auto& r : hit_rows)
    if (!r.pass) return false;
  return true;
}

nlohmann::json MomentReport::to_json() const {
  auto row = [](const MomentRow& r) {
    return nlohmann::json{{"weight", r.weight},
                          {"expected", r.expected},
                          {"empirical", r.empirical},
                          {"sigma", r.sigma},
                          {"pass", r.pass}};
  };
  nlohmann::json j{{"trials", trials}, {"alpha_le_one", alpha_le_one}, {"pass", pass()}};
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(row(r));
  j["hit_rows"] = nlohmann::json::array();
  for (const auto& r : hit_rows) j["hit_rows"].push_back(row(r));
  return j;
}

MomentReport poisson_moments(const Space& s, const std::vector<Rational>& p, Dist r_k,
                             const std::vector<std::pair<std::string, std::vector<Rational>>>& weights,
                             const std::vector<Point>& probes, std::uint64_t trials, std::uint64_t seed) {
  MomentReport rep;
  rep.trials = trials;
  auto alpha = alpha_ball(s, p, r_k);
  for (const auto& a : alpha)
    if (a > Rational(1)) rep.alpha_le_one = false;

  Intensity in = make_intensity(s, p);
  std::vector<std::vector<double>> w(weights.size(), std::vector<double>(s.size()));
  for (std::size_t i = 0; i < weights.size(); ++i)
    for (Point x = 0; x < s.size(); ++x) w[i][x] = weights[i].second[x].to_double();

  std::vector<double> sum(weights.size(), 0.0);
  std::vector<std::uint64_t> hits(probes.size(), 0);
  Rng rng(seed);
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto sigma = draw_sigma(in, rng);
    for (std::size_t i = 0; i < weights.size(); ++i)
      for (const auto& [x, mult] : sigma) sum[i] += w[i][x] * static_cast<double>(mult);
    for (std::size_t j = 0; j < probes.size(); ++j)
      for (const auto& e : sigma)
        if (s.dist(e.first, probes[j]) <= r_k) {
          ++hits[j];
          break;
        }
  }
  const double T = static_cast<double>(trials);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    MomentRow r;
    r.weight = weights[i].first;
    r.expected = alpha_w(s, weights[i].second, p).to_double();
    std::vector<Rational> sq(s.size());
    for (Point x = 0; x < s.size(); ++x) sq[x] = weights[i].second[x] * weights[i].second[x];
    // The sum over a Poisson process has variance alpha_{w^2}.
    r.sigma = std::sqrt(alpha_w(s, sq, p).to_double() / T);
    r.empirical = sum[i] / T;
    r.pass = std::abs(r.empirical - r.expected) <= 3 * r.sigma + 1e-12;
    rep.rows.push_back(r);
  }
  for (std::size_t j = 0; j < probes.size(); ++j) {
    MomentRow r;
    r.weight = "hit@" + std::to_string(probes[j]);
    r.expected = 1 - std::exp(-alpha[probes[j]].to_double());
    r.empirical = static_cast<double>(hits[j]) / T;
    r.sigma = std::sqrt(r.expected * (1 - r.expected) / T);
    r.pass = std::abs(r.empirical - r.expected) <= 3 * r.sigma + 1e-12;
    rep.hit_rows.push_back(r);
  }
  return rep;
}

bool LindenstraussReport::pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

std::string LindenstraussReport::to_csv() const {
  std::ostringstream o;
  o.precision(12);
  o << "f,lambda,level_mass,ratio,bound,pass\n";
  for (const auto& r : rows)
    o << r.f << ',' << r.lambda << ',' << r.level_mass.str() << ',' << r.ratio << ',' << r.bound << ',' << (r.pass ? "true" : "false") << '\n';
  return o.str();
}

nlohmann::json LindenstraussReport::to_json() const {
  nlohmann::json j{{"K", K}, {"constant", constant}, {"worst_ratio", worst_ratio}, {"pass", pass()}};
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows)
    j["rows"].push_back({{"f", r.f},
                         {"lambda", r.lambda},
                         {"level_mass", r.level_mass.str()},
                         {"ratio", r.ratio},
                         {"bound", r.bound},
                         {"pass", r.pass}});
  return j;
}

std::vector<double> lambda_grid(const MaximalProfile& p, std::size_t count) {
  double lo = 0, hi = 0;
  for (const auto& e : p.entries) {
    double v = e.value.to_double();
    if (v <= 0) continue;
    if (lo == 0 || v < lo) lo = v;
    hi = std::max(hi, v);
  }
  std::vector<double> out;
  if (hi == 0 || count == 0) return out;
  if (count == 1 || lo == hi) return {lo / 2};
  // Geometric steps from just below the smallest value to just below the largest.
  double a = std::log(lo) - 1e-9, b = std::log(hi) - 1e-9;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1)));
  return out;
}

LindenstraussReport lindenstrauss_experiment(const Space& s, const RadiiSet& radii,
                                             const std::vector<std::pair<std::string, std::vector<Rational>>>& fs,
                                             std::size_t lambdas, double K) {
  auto temp = tempered_check(s, radii, K > 0 ? K : 1e300);
  if (K <= 0) K = temp.worst_ratio;
  if (temp.worst_ratio > K * (1 + 1e-12))
    throw SchemaError("radii are not tempered with the supplied constant (worst ratio " +
                      std::to_string(temp.worst_ratio) + ")");
  LindenstraussReport rep;
  rep.K = K;
  rep.constant = 2 * std::exp(1.0) / (std::exp(1.0) - 1) * K;
  for (const auto& [name, f] : fs) {
    MaximalProfile prof = maximal_profile(s, f, radii, Variant::standard);
    double l1 = prof.l1.to_double();
    for (double lambda : lambda_grid(prof, lambdas)) {
      LindenstraussRow r;
      r.f = name;
      r.lambda = lambda;
      r.level_mass = 0;
      for (const auto& e : prof.entries)
        if (e.value.to_double() > lambda) r.level_mass += e.mass;
      r.ratio = lambda * r.level_mass.to_double() / l1;
      r.bound = rep.constant;
      r.pass = r.ratio <= r.bound * (1 + 1e-12);
      rep.worst_ratio = std::max(rep.worst_ratio, r.ratio);
      rep.rows.push_back(r);
    }
  }
  return rep;
}

nlohmann::json SubexpRadii::to_json() const {
  nlohmann::json keys = nlohmann::json::array();
  for (Dist k : radii.keys) keys.push_back(k);
  return {{"keys", keys}, {"truncated", truncated}, {"tolerance", tolerance}};
}

SubexpRadii subexp_radii(const Space& s, std::size_t count, double tolerance) {
  SubexpRadii out;
  out.tolerance = tolerance;
  const DistScale& sc = s.scale();
  auto realized = realized_distances(s);
  if (realized.size() < 2) {
    out.truncated = true;
    return out;
  }
  if (count == 0) return out;
  const Dist diam = realized.back();

  std::vector<RadialProfile> profiles;
  if (s.as_group()) {
    profiles.push_back(radial_profile(s, 0));
  } else {
    require_budget(static_cast<std::uint64_t>(s.size()) * s.size(), "subexp_radii");
    for (Point x = 0; x < s.size(); ++x) profiles.push_back(radial_profile(s, x));
  }
  auto ok = [&](Dist r, Dist prev) {
    Dist reach = sc.sum(r, prev);
    for (const auto& prof : profiles) {
      long double grow = std::log(prof.at(reach).to_ldouble()) - std::log(prof.at(r).to_ldouble());
      if (grow > static_cast<long double>(tolerance)) return false;
    }
    return true;
  };

  std::vector<Dist> keys{realized[1]};
  while (keys.size() < count) {
    Dist prev = keys.back();
    Dist floor_key = std::max(prev, sc.key_le(Rational(static_cast<std::int64_t>(keys.size()))));
    Dist next = -1;
    for (Dist r : realized) {
      if (r <= floor_key || r >= diam) continue;
      if (ok(r, prev)) {
        next = r;
        break;
      }
    }
    if (next < 0) {
      out.truncated = true;
      break;
    }
    keys.push_back(next);
  }
  out.radii = RadiiSet::from_keys(keys);
  return out;
}

}  // namespace maxlab
