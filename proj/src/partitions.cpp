#include "maxlab/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "maxlab/rng.hpp"

namespace maxlab {

Partition Partition::trivial(std::size_t n) { return {std::vector<std::uint32_t>(n, 0), 1}; }

Partition Partition::singletons(std::size_t n) {
  Partition p;
  p.cell.resize(n);
  std::iota(p.cell.begin(), p.cell.end(), 0u);
  p.cells = static_cast<std::uint32_t>(n);
  return p;
}

Partition Partition::from_labels(const std::vector<std::uint64_t>& labels) {
  Partition p;
  p.cell.resize(labels.size());
  std::unordered_map<std::uint64_t, std::uint32_t> ids;
  ids.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, fresh] = ids.try_emplace(labels[i], static_cast<std::uint32_t>(ids.size()));
    p.cell[i] = it->second;
  }
  p.cells = static_cast<std::uint32_t>(ids.size());
  return p;
}

std::vector<std::vector<Point>> Partition::members() const {
  std::vector<std::vector<Point>> m(cells);
  for (Point x = 0; x < cell.size(); ++x) m[cell[x]].push_back(x);
  return m;
}

bool Filtration::valid() const {
  for (std::size_t k = 1; k < levels.size(); ++k) {
    // Each finer cell must sit inside one coarser cell.
    std::vector<std::int64_t> parent(levels[k].cells, -1);
    for (Point x = 0; x < levels[k].cell.size(); ++x) {
      auto& p = parent[levels[k].cell[x]];
      if (p < 0) p = levels[k - 1].cell[x];
      if (p != static_cast<std::int64_t>(levels[k - 1].cell[x])) return false;
    }
  }
  return true;
}

namespace {

std::vector<Point> ball_points(const Space& s, Point x, Dist r) {
  if (const GroupSpace* g = s.as_group()) {
    const std::size_t c = g->ball_count(r);
    std::vector<Point> out(c);
    for (std::size_t i = 0; i < c; ++i) out[i] = g->group().add(x, g->sorted()[i]);
    return out;
  }
  return ball(s, x, r);
}

Dist min_positive_distance(const std::vector<Dist>& real) { return real.size() > 1 ? real[1] : 1; }

// Key of diam * c for c = ratio^k * extra, or -1 when that radius is below the
// minimum positive distance (the level is then made of singletons).
Dist scaled_key(const DistScale& sc, Dist diam, Dist dmin, const Rational& ratio, int k, const Rational& extra) {
  const long double approx =
      sc.value(diam) * std::pow(ratio.to_ldouble(), static_cast<long double>(k)) * extra.to_ldouble();
  if (approx < sc.value(dmin) * (1 - 1e-12L)) return -1;
  Rational c = extra;
  for (int i = 0; i < k; ++i) c *= ratio;
  return sc.scaled(diam, c);
}

}  // namespace

int default_depth(const Space& s) {
  std::vector<Dist> real = realized_distances(s);
  if (real.size() < 2) return 1;
  const long double ratio = s.scale().value(real.back()) / s.scale().value(real[1]);
  int K = 1;
  while (std::ldexp(1.0L, K) <= ratio) ++K;
  return K;
}

PartitionTree sample_partition_tree(const Space& s, int K, std::uint64_t seed, const TreeOptions& opt) {
  if (K < 1) throw SchemaError("partition tree depth must be >= 1");
  if (!(opt.ratio > Rational(0)) || !(opt.ratio < Rational(1))) throw SchemaError("tree ratio must lie in (0, 1)");
  const std::size_t n = s.size();
  const std::vector<Dist> real = realized_distances(s);
  const Dist diam = real.back(), dmin = min_positive_distance(real);
  Rng rng(seed);

  PartitionTree t;
  t.seed = seed;
  t.sampler = opt.sampler;
  t.levels.push_back(Partition::trivial(n));
  t.radii.assign(static_cast<std::size_t>(K) + 1, 0);
  t.diam_bound.assign(static_cast<std::size_t>(K) + 1, diam);
  for (int k = 1; k <= K; ++k) {
    // U uniform on [0, 2^30]: r_k / (diam ratio^k) = (2^30 + U) / 2^32 in [1/4, 1/2].
    const std::int64_t U = static_cast<std::int64_t>(rng.below((std::uint64_t{1} << 30) + 1));
    t.radii[static_cast<std::size_t>(k)] =
        scaled_key(s.scale(), diam, dmin, opt.ratio, k, Rational((std::int64_t{1} << 30) + U, std::int64_t{1} << 32));
    Dist b = scaled_key(s.scale(), diam, dmin, opt.ratio, k, Rational(1));
    t.diam_bound[static_cast<std::size_t>(k)] = b < 0 ? 0 : b;
  }

  // claim[k][x] = rank (position in the center order) of the first center
  // within r_k of x, i.e. j_k(x).
  std::vector<std::vector<std::uint32_t>> claim(static_cast<std::size_t>(K) + 1);
  std::vector<std::size_t> unclaimed(static_cast<std::size_t>(K) + 1, n);
  std::vector<int> live;
  for (int k = 1; k <= K; ++k) {
    if (t.radii[static_cast<std::size_t>(k)] < 0) continue;
    claim[static_cast<std::size_t>(k)].assign(n, UINT32_MAX);
    live.push_back(k);
  }
  auto use_center = [&](Point c) {
    const auto rank = static_cast<std::uint32_t>(t.centers.size());
    t.centers.push_back(c);
    for (auto it = live.begin(); it != live.end();) {
      const auto k = static_cast<std::size_t>(*it);
      for (Point y : ball_points(s, c, t.radii[k]))
        if (claim[k][y] == UINT32_MAX) {
          claim[k][y] = rank;
          --unclaimed[k];
        }
      it = unclaimed[k] == 0 ? live.erase(it) : it + 1;
    }
  };

  if (opt.sampler == Sampler::clock) {
    std::vector<std::pair<double, Point>> clock(n);
    for (Point x = 0; x < n; ++x) clock[x] = {rng.exponential(s.weight(x).to_double()), x};
    std::sort(clock.begin(), clock.end());
    for (std::size_t i = 0; i < n && !live.empty(); ++i) use_center(clock[i].second);
  } else {
    std::vector<double> w(n);
    for (Point x = 0; x < n; ++x) w[x] = s.weight(x).to_double();
    AliasTable alias(w);
    std::vector<char> seen(n, 0);
    const std::uint64_t cap = 64ull * n * static_cast<std::uint64_t>(K);
    for (std::uint64_t draws = 0; !live.empty(); ++draws) {
      if (draws >= cap) throw SeedCapExceeded("partition sampler: center-draw cap exceeded", seed);
      const Point c = alias.draw(rng);
      if (seen[c]) continue;
      seen[c] = 1;
      use_center(c);
    }
  }

  for (int k = 1; k <= K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Partition& prev = t.levels.back();
    if (t.radii[ku] < 0) {
      t.levels.push_back(Partition::singletons(n));
      t.radii[ku] = 0;
      continue;
    }
    std::vector<std::uint64_t> labels(n);
    for (Point x = 0; x < n; ++x) labels[x] = static_cast<std::uint64_t>(prev.cell[x]) * n + claim[ku][x];
    t.levels.push_back(Partition::from_labels(labels));
  }
  return t;
}

TreeCheck check_tree(const Space& s, const PartitionTree& t) {
  TreeCheck c;
  if (t.levels.empty() || t.levels[0].cells != 1) c.trivial_root = false;
  Filtration f{t.levels};
  if (!f.valid()) c.refinement = false;
  for (std::size_t k = 1; k < t.levels.size() && c.diameter; ++k) {
    const Partition& P = t.levels[k];
    if (P.cells == s.size()) continue;
    for (const auto& cell : P.members()) {
      require_budget(static_cast<std::uint64_t>(cell.size()) * cell.size(), "check_tree");
      for (std::size_t a = 0; a < cell.size() && c.diameter; ++a)
        for (std::size_t b = a + 1; b < cell.size(); ++b)
          if (s.dist(cell[a], cell[b]) > t.diam_bound[k]) {
            c.diameter = false;
            c.bad_level = static_cast<int>(k);
            break;
          }
    }
  }
  return c;
}

std::vector<Dist> padding_radii(const Space& s, const Rational& beta, int K) {
  const std::vector<Dist> real = realized_distances(s);
  const Dist diam = real.back(), dmin = min_positive_distance(real);
  std::vector<Dist> rho;
  for (int k = 0; k <= K; ++k) {
    Dist key = scaled_key(s.scale(), diam, dmin, Rational(1, 2), k, beta);
    rho.push_back(key < 0 ? 0 : key);
  }
  return rho;
}

std::vector<std::vector<char>> padded(const Space& s, const PartitionTree& t, const std::vector<Dist>& rho) {
  std::vector<std::vector<char>> out(t.levels.size(), std::vector<char>(s.size(), 1));
  for (std::size_t k = 0; k < t.levels.size(); ++k) {
    const Partition& P = t.levels[k];
    if (P.cells == 1 || rho[k] == 0) continue;
    for (Point x = 0; x < s.size(); ++x)
      for (Point y : ball_points(s, x, rho[k]))
        if (P.cell[y] != P.cell[x]) {
          out[k][x] = 0;
          break;
        }
  }
  return out;
}

WilsonInterval wilson95(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {0, 1};
  const double z = 1.959963984540054, n = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / n;
  const double den = 1 + z * z / n;
  const double mid = ph + z * z / (2 * n);
  const double half = z * std::sqrt(ph * (1 - ph) / n + z * z / (4 * n * n));
  return {std::max(0.0, (mid - half) / den), std::min(1.0, (mid + half) / den)};
}

namespace {

// Rational upper bound of a positive double with denominator 2^40.
Rational rational_above(double v) {
  const std::int64_t den = std::int64_t{1} << 40;
  return Rational(static_cast<std::int64_t>(std::ceil(v * static_cast<double>(den))), den);
}

}  // namespace

PaddingReport padding_probability(const Space& s, double beta, int K, std::uint64_t trials, std::uint64_t seed,
                                  double slack, const TreeOptions& opt, double target) {
  if (beta < 0) throw SchemaError("beta must be >= 0");
  PaddingReport rep;
  rep.beta = beta;
  rep.beta_rational = beta == 0 ? Rational(0) : rational_above(beta);
  rep.depth = K;
  rep.trials = trials;
  rep.target = target;
  rep.slack = slack;
  rep.threshold = target - slack;
  const std::size_t n = s.size(), L = static_cast<std::size_t>(K) + 1;
  const std::vector<Dist> rho = padding_radii(s, rep.beta_rational, K);
  for (std::size_t k = 0; k < L; ++k)
    if (rho[k] == 0) rep.trivial_levels.push_back(static_cast<int>(k));
  rep.successes.assign(L, std::vector<std::uint64_t>(n, 0));
  rep.mean_padded_fraction.assign(L, 0);
  const Rational total = total_measure(s);
  std::vector<double> w(n);
  for (Point x = 0; x < n; ++x) w[x] = (s.weight(x) / total).to_double();

  // A tree only matters on levels whose padding radius reaches another point.
  const bool all_trivial = rep.trivial_levels.size() == L;
  const std::uint64_t chunk = 256;
  std::vector<std::vector<std::vector<char>>> results(chunk);
  for (std::uint64_t base = 0; base < trials; base += chunk) {
    const std::uint64_t m = std::min(chunk, trials - base);
    parallel_for(m, [&](std::size_t j) {
      if (all_trivial) {
        results[j].assign(L, std::vector<char>(n, 1));
        return;
      }
      PartitionTree t = sample_partition_tree(s, K, trial_seed(seed, base + j), opt);
      results[j] = padded(s, t, rho);
    });
    for (std::uint64_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < L; ++k) {
        double frac = 0;
        for (Point x = 0; x < n; ++x)
          if (results[j][k][x]) {
            ++rep.successes[k][x];
            frac += w[x];
          }
        rep.mean_padded_fraction[k] += frac;
      }
  }
  for (auto& v : rep.mean_padded_fraction) v /= static_cast<double>(std::max<std::uint64_t>(trials, 1));
  rep.worst_lower = 1;
  for (std::size_t k = 0; k < L; ++k)
    for (Point x = 0; x < n; ++x) {
      const double lo = wilson95(rep.successes[k][x], trials).lo;
      if (lo < rep.worst_lower) {
        rep.worst_lower = lo;
        rep.worst_x = x;
        rep.worst_k = static_cast<int>(k);
      }
    }
  rep.pass = rep.worst_lower >= rep.threshold;
  return rep;
}

nlohmann::json PaddingReport::to_json() const {
  nlohmann::json j = {{"beta", beta},          {"beta_rational", beta_rational.str()},
                      {"depth", depth},        {"trials", trials},
                      {"target", target},      {"slack", slack},
                      {"threshold", threshold}, {"worst_wilson_lower", worst_lower},
                      {"worst_x", worst_x},    {"worst_k", worst_k},
                      {"mean_padded_fraction", mean_padded_fraction},
                      {"trivial_levels", trivial_levels}, {"pass", pass}};
  return j;
}

std::string PaddingReport::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "k,x,successes,trials,estimate,wilson_lo,wilson_hi\n";
  for (std::size_t k = 0; k < successes.size(); ++k)
    for (std::size_t x = 0; x < successes[k].size(); ++x) {
      auto w = wilson95(successes[k][x], trials);
      os << k << ',' << x << ',' << successes[k][x] << ',' << trials << ','
         << static_cast<double>(successes[k][x]) / static_cast<double>(std::max<std::uint64_t>(trials, 1)) << ','
         << w.lo << ',' << w.hi << '\n';
    }
  return os.str();
}

std::vector<Rational> conditional_expectation(const Space& s, const std::vector<Rational>& f, const Partition& P) {
  if (f.size() != s.size() || P.cell.size() != s.size()) throw SchemaError("conditional_expectation: size mismatch");
  std::vector<Rational> num(P.cells, Rational(0)), den(P.cells, Rational(0));
  for (Point x = 0; x < s.size(); ++x) {
    num[P.cell[x]] += f[x] * s.weight(x);
    den[P.cell[x]] += s.weight(x);
  }
  std::vector<Rational> out(s.size());
  for (Point x = 0; x < s.size(); ++x) out[x] = num[P.cell[x]] / den[P.cell[x]];
  return out;
}

namespace {

// sup_v v^p mu(g >= v) over the values of g.
double weak_p(const Space& s, const std::vector<Rational>& g, double p) {
  std::vector<std::pair<Rational, Rational>> vm;
  for (Point x = 0; x < s.size(); ++x) vm.emplace_back(g[x].abs(), s.weight(x));
  std::sort(vm.begin(), vm.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double best = 0;
  long double cum = 0;
  for (std::size_t i = 0; i < vm.size(); ++i) {
    cum += vm[i].second.to_ldouble();
    if (i + 1 < vm.size() && vm[i + 1].first == vm[i].first) continue;
    best = std::max(best, static_cast<double>(std::pow(vm[i].first.to_ldouble(), p) * cum));
  }
  return best;
}

long double lp_norm_p(const Space& s, const std::vector<Rational>& f, double p) {
  long double t = 0;
  for (Point x = 0; x < s.size(); ++x) t += std::pow(std::fabs(f[x].to_ldouble()), p) * s.weight(x).to_ldouble();
  return t;
}

}  // namespace

DoobReport doob_check(const Space& s, const std::vector<Rational>& f, const Filtration& F, const std::vector<double>& ps) {
  if (!F.valid()) throw SchemaError("doob_check: the partitions are not nested");
  DoobReport r;
  std::vector<Rational> g(s.size(), Rational(0));
  for (const auto& P : F.levels) {
    auto e = conditional_expectation(s, f, P);
    for (Point x = 0; x < s.size(); ++x) g[x] = rmax(g[x], e[x].abs());
  }
  r.l1 = 0;
  for (Point x = 0; x < s.size(); ++x) r.l1 += f[x].abs() * s.weight(x);
  // Exact sup_v v mu(g >= v).
  std::vector<std::pair<Rational, Rational>> vm;
  for (Point x = 0; x < s.size(); ++x) vm.emplace_back(g[x], s.weight(x));
  std::sort(vm.begin(), vm.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  Rational cum = 0;
  r.weak_lhs = 0;
  for (std::size_t i = 0; i < vm.size(); ++i) {
    cum += vm[i].second;
    if (i + 1 < vm.size() && vm[i + 1].first == vm[i].first) continue;
    r.weak_lhs = rmax(r.weak_lhs, vm[i].first * cum);
  }
  r.weak_pass = r.weak_lhs <= r.l1;
  for (double p : ps) {
    const long double nf = std::pow(lp_norm_p(s, f, p), 1.0L / p), ng = std::pow(lp_norm_p(s, g, p), 1.0L / p);
    const double ratio = nf == 0 ? 0 : static_cast<double>(ng / nf);
    r.p_values.push_back(p);
    r.lp_ratio.push_back(ratio);
    if (ratio > p / (p - 1) * (1 + 1e-12)) r.lp_pass = false;
  }
  return r;
}

nlohmann::json DoobReport::to_json() const {
  return {{"weak_lhs", weak_lhs.str()}, {"l1_norm", l1.str()}, {"weak_pass", weak_pass},
          {"p", p_values},             {"lp_ratio", lp_ratio}, {"lp_pass", lp_pass}};
}

ModifiedDoobReport modified_doob_check(const Space& s, const Filtration& F, const LevelOperator& M,
                                       const std::vector<Rational>& f, double A, double B, double p,
                                       int exhaustive_cells, bool positive_max) {
  ModifiedDoobReport r;
  r.A = A;
  r.B = B;
  r.p = p;
  const int K = static_cast<int>(F.levels.size());
  const std::size_t n = s.size();
  bool exhaustive = true, reduced = false;
  Rng rng(0x6d6f64646f6f62ULL);
  for (int k = 0; k + 1 < K && r.hypothesis_pass; ++k) {
    const Partition& P = F.levels[static_cast<std::size_t>(k)];
    const std::vector<Rational> Mf = M(k + 1, f);
    // Unions of cells to try: all of them, or singletons, complements and random unions.
    std::vector<std::vector<char>> sets;
    if (static_cast<int>(P.cells) <= exhaustive_cells) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << P.cells); ++mask) {
        std::vector<char> in(P.cells);
        for (std::uint32_t c = 0; c < P.cells; ++c) in[c] = (mask >> c) & 1;
        sets.push_back(std::move(in));
      }
    } else if (positive_max) {
      reduced = true;
      for (std::uint32_t c = 0; c < P.cells; ++c) {
        std::vector<char> in(P.cells, 0);
        in[c] = 1;
        sets.push_back(std::move(in));
      }
    } else {
      exhaustive = false;
      for (std::uint32_t c = 0; c < P.cells; ++c) {
        std::vector<char> in(P.cells, 0);
        in[c] = 1;
        sets.push_back(in);
        for (auto& b : in) b = !b;
        sets.push_back(std::move(in));
      }
      for (int t = 0; t < 64; ++t) {
        std::vector<char> in(P.cells);
        for (auto& b : in) b = static_cast<char>(rng.below(2));
        sets.push_back(std::move(in));
      }
    }
    for (const auto& in : sets) {
      ++r.sets_checked;
      std::vector<Rational> fE(n);
      for (Point x = 0; x < n; ++x) fE[x] = in[P.cell[x]] ? f[x] : Rational(0);
      const std::vector<Rational> MfE = M(k + 1, fE);
      for (Point x = 0; x < n; ++x) {
        const Rational lhs = in[P.cell[x]] ? Mf[x] : Rational(0);
        if (!(lhs == MfE[x])) {
          r.hypothesis_pass = false;
          r.witness_k = k;
          r.witness_x = x;
          for (std::uint32_t c = 0; c < P.cells; ++c)
            if (in[c]) r.witness_set.push_back(c);
          break;
        }
      }
      if (!r.hypothesis_pass) break;
    }
  }
  r.hypothesis_mode = !exhaustive ? "sampled" : reduced ? "cells" : "exhaustive";

  std::vector<Rational> g(n, Rational(0));
  for (int k = 0; k < K; ++k) {
    auto v = M(k, f);
    for (Point x = 0; x < n; ++x) g[x] = rmax(g[x], v[x].abs());
  }
  r.lhs = weak_p(s, g, p);
  r.rhs = static_cast<double>((std::pow(2 * A, p) + std::pow(2 * B, p)) * lp_norm_p(s, f, p));
  r.conclusion_pass = r.lhs <= r.rhs * (1 + 1e-12);
  return r;
}

nlohmann::json ModifiedDoobReport::to_json() const {
  return {{"hypothesis_pass", hypothesis_pass}, {"hypothesis_mode", hypothesis_mode},
          {"sets_checked", sets_checked},       {"witness_k", witness_k},
          {"witness_x", witness_x},             {"A", A},
          {"B", B},                             {"p", p},
          {"lhs", lhs},                         {"rhs", rhs},
          {"conclusion_pass", conclusion_pass}};
}

Rational averaging_l1_norm(const Space& s, Dist r) {
  if (s.as_group()) return Rational(1);
  std::vector<Rational> inv(s.size());
  for (Point x = 0; x < s.size(); ++x) inv[x] = s.weight(x) / ball_measure(s, x, r);
  Rational best = 0;
  for (Point y = 0; y < s.size(); ++y) {
    Rational t = 0;
    for (Point x = 0; x < s.size(); ++x)
      if (s.dist(x, y) <= r) t += inv[x];
    best = rmax(best, t);
  }
  return best;
}

LocalizedFamily localized_family(const Space& s, const RadiiSet& R, double beta, int i, std::uint64_t seed, double p,
                                 const TreeOptions& opt) {
  if (i < 1 || i > 3) throw SchemaError("localized_family: i must be 1, 2 or 3");
  if (!(beta > 0) || beta >= 1) throw SchemaError("localized_family: beta must lie in (0, 1)");
  LocalizedFamily fam;
  fam.i = i;
  fam.m = static_cast<int>(std::ceil(-std::log2(beta) - 1e-12));
  if (fam.m < 1) fam.m = 1;
  const int m = fam.m;
  const std::vector<Dist> real = realized_distances(s);
  const Dist diam = real.back(), dmin = min_positive_distance(real);
  const DistScale& sc = s.scale();
  const Rational half(1, 2);

  // R^i_k for k = 0.. until the band lies below every radius.
  for (int k = 0;; ++k) {
    const int e_lo = (3 * k + i) * m, e_hi = (3 * k - 1 + i) * m;
    const Dist hi = e_hi < 0 ? diam : scaled_key(sc, diam, dmin, half, e_hi, Rational(1));
    if (hi < 0 || hi < R.keys.front()) break;
    // r >= diam 2^{-e_lo} iff r exceeds the largest key strictly below it.
    Dist lo_strict = -1;
    if (scaled_key(sc, diam, dmin, half, e_lo, Rational(1)) >= 0) {
      Rational c = 1;
      for (int a = 0; a < e_lo; ++a) c *= half;
      lo_strict = sc.scaled(diam, c, true);
    }
    std::vector<Dist> band;
    for (Dist r : R.keys)
      if (r > lo_strict && r <= hi) band.push_back(r);
    fam.bands.push_back(RadiiSet{band});
    if (k > 64) break;
  }
  const int nb = static_cast<int>(fam.bands.size());
  const int depth = std::max(1, (3 * (nb - 1) + i + 1) * m);
  PartitionTree tree = sample_partition_tree(s, depth, seed, opt);
  auto level = [&](int L) { return tree.levels[static_cast<std::size_t>(std::clamp(L, 0, depth))]; };

  const std::vector<Dist> rho_all = padding_radii(s, rational_above(beta), depth);
  const std::vector<std::vector<char>> pad = padded(s, tree, rho_all);
  for (int k = 0; k < nb; ++k) {
    fam.filtration.levels.push_back(level((3 * k + i + 1) * m));
    const int L = std::max(0, (3 * k + i - 2) * m);
    fam.padded_set.push_back(pad[static_cast<std::size_t>(std::min(L, depth))]);
  }

  const std::size_t n = s.size();
  const Space* sp = &s;
  auto bands = fam.bands;
  auto padset = fam.padded_set;
  fam.op = [sp, bands, padset, n](int k, const std::vector<Rational>& f) {
    std::vector<Rational> out(n, Rational(0));
    const auto ku = static_cast<std::size_t>(k);
    if (ku >= bands.size() || bands[ku].keys.empty()) return out;
    auto v = maximal_profile(*sp, f, bands[ku], Variant::standard).values();
    for (Point x = 0; x < n; ++x)
      if (padset[ku][x]) out[x] = v[x];
    return out;
  };

  // A: weak (p,p) bound via sum of ||A_r||_{1->1}; B: exact worst cell-union ratio.
  double A = 0;
  for (const auto& band : fam.bands) {
    long double t = 0;
    for (Dist r : band.keys) t += averaging_l1_norm(s, r).to_ldouble();
    A = std::max(A, static_cast<double>(std::pow(t, 1.0L / p)));
  }
  fam.A = A;
  double B = 0;
  for (int k = 0; k < nb; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Partition& P = fam.filtration.levels[ku];
    std::vector<Rational> cell_mass(P.cells, Rational(0));
    for (Point x = 0; x < n; ++x) cell_mass[P.cell[x]] += s.weight(x);
    for (Point x = 0; x < n; ++x) {
      if (!fam.padded_set[ku][x]) continue;
      for (Dist r : fam.bands[ku].keys) {
        std::vector<char> hit(P.cells, 0);
        Rational ball_mass = 0, union_mass = 0;
        for (Point y : ball_points(s, x, r)) {
          ball_mass += s.weight(y);
          if (!hit[P.cell[y]]) {
            hit[P.cell[y]] = 1;
            union_mass += cell_mass[P.cell[y]];
          }
        }
        B = std::max(B, (union_mass / ball_mass).to_double());
      }
    }
    // Localization: for x in E~_k, every B(x, r) with r in R^i_k stays in F_{k-1}(x).
    if (k >= 1) {
      const Partition& Q = fam.filtration.levels[ku - 1];
      for (Point x = 0; x < n && fam.structural_local; ++x) {
        if (!fam.padded_set[ku][x] || fam.bands[ku].keys.empty()) continue;
        for (Point y : ball_points(s, x, fam.bands[ku].keys.back()))
          if (Q.cell[y] != Q.cell[x]) {
            fam.structural_local = false;
            break;
          }
      }
    }
  }
  fam.B = B;
  return fam;
}

bool LocalizationReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const LocalizationRow& r) { return r.trivial_direction; });
}

std::string LocalizationReport::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "f,lhs,rhs,ratio,claimed_bound,trivial_direction\n";
  for (const auto& r : rows)
    os << r.f << ',' << r.lhs.str() << ',' << r.rhs.str() << ',' << r.ratio << ',' << r.claimed_bound << ','
       << (r.trivial_direction ? "true" : "false") << '\n';
  return os.str();
}

nlohmann::json LocalizationReport::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows)
    rs.push_back({{"f", r.f},
                  {"lhs", r.lhs.str()},
                  {"rhs", r.rhs.str()},
                  {"ratio", r.ratio},
                  {"claimed_bound", r.claimed_bound},
                  {"trivial_direction", r.trivial_direction}});
  return {{"n", n},   {"K", K},       {"p", p}, {"windows", windows}, {"microdoubling_pass", microdoubling_pass},
          {"rows", rs}, {"pass", pass()}};
}

LocalizationReport localization_experiment(const Space& s, const RadiiSet& R, int n, double K,
                                           const std::vector<Point>& point_masses, std::size_t ball_samples,
                                           std::uint64_t seed, double p) {
  if (K < 5) throw SchemaError("localization_experiment needs K >= 5");
  if (n < 1) throw SchemaError("localization_experiment needs n >= 1");
  if (R.keys.empty()) throw SchemaError("radii set is empty");
  LocalizationReport rep;
  rep.n = n;
  rep.K = K;
  rep.p = p;
  const std::uint64_t nn = static_cast<std::uint64_t>(s.size()) * s.size();
  if (s.as_group() || nn <= budget()) {
    RegularityParams rp;
    rp.K = K;
    rp.n = n;
    rep.microdoubling_pass = regularity_check(s, RegularityKind::microdoubling, rp).pass;
  }
  const std::vector<RadiiSet> windows = radii_windows(R, s.scale(), n);
  rep.windows = windows.size();
  const double factor = std::pow(1 + std::log(std::log(K)) / (1 + std::log(static_cast<double>(n))), 1.0 / p);

  auto finish = [&](LocalizationRow row, const std::function<MaximalProfile(const RadiiSet&)>& prof) {
    row.lhs = weak_norm_witness(prof(R)).value;
    row.rhs = 0;
    for (const auto& w : windows) {
      Rational b = weak_norm_witness(prof(w)).value;
      if (b > row.lhs) row.trivial_direction = false;
      row.rhs = rmax(row.rhs, b);
    }
    row.ratio = row.rhs.is_zero() ? 0 : (row.lhs / row.rhs).to_double();
    row.claimed_bound = K + factor * row.rhs.to_double();
    rep.rows.push_back(std::move(row));
  };

  for (Point g : point_masses) {
    LocalizationRow row;
    row.f = "delta@" + std::to_string(g);
    finish(row, [&](const RadiiSet& W) { return maximal_profile_delta(s, g, Rational(1), W); });
  }
  if (nn <= budget()) {
    Rng rng(seed);
    for (std::size_t t = 0; t < ball_samples; ++t) {
      const Point c = rng.below(s.size());
      const Dist r = R.keys[rng.below(R.keys.size())];
      std::vector<Rational> f(s.size(), Rational(0));
      for (Point y : ball(s, c, r)) f[y] = 1;
      LocalizationRow row;
      row.f = "ball@" + std::to_string(c) + ":" + std::to_string(r);
      finish(row, [&](const RadiiSet& W) { return maximal_profile(s, f, W); });
    }
  }
  return rep;
}

}  // namespace maxlab
