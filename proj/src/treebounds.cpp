#include "maxlab/treebounds.hpp"

#include <algorithm>
#include <bit>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace maxlab {

namespace mp = boost::multiprecision;

namespace {

std::uint64_t ipow(std::uint64_t k, int e) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) v *= k;
  return v;
}

mp::cpp_int big(const Rational& r, bool num) { return num ? mp::cpp_int(r.num()) : mp::cpp_int(r.den()); }

// |a| >= lambda * num / den, exactly.
bool ge_scaled(const Rational& a, const Rational& lambda, const mp::cpp_int& num, const mp::cpp_int& den) {
  mp::cpp_int lhs = mp::abs(big(a, true)) * big(lambda, false) * den;
  mp::cpp_int rhs = big(lambda, true) * num * big(a, false);
  return lhs >= rhs;
}

}  // namespace

std::uint64_t pair_count(const KaryTree& t, const std::vector<Point>& E, const std::vector<Point>& F, int r) {
  if (r < 0) return 0;
  // chain[i] = ancestors 0..min(r, depth) of the i-th point.
  auto chains = [&](const std::vector<Point>& S) {
    std::vector<std::vector<Point>> c(S.size());
    for (std::size_t i = 0; i < S.size(); ++i) {
      Point x = S[i];
      const int up = std::min(r, t.depth(x));
      c[i].push_back(x);
      for (int m = 0; m < up; ++m) c[i].push_back(x = t.parent(x));
    }
    return c;
  };
  const auto ce = chains(E), cf = chains(F);
  std::vector<std::uint64_t> per_m(static_cast<std::size_t>(r) + 1, 0);
  parallel_for(per_m.size(), [&](std::size_t mi) {
    const std::size_t up_e = mi, up_f = static_cast<std::size_t>(r) - mi;
    const bool split = up_e >= 1 && up_f >= 1;
    // Pairs meet at the common ancestor a; when both climb, the children of a
    // on the two paths must differ.
    std::unordered_map<Point, std::uint64_t> ea, fa, ec, fc;
    for (const auto& c : ce) {
      if (c.size() <= up_e) continue;
      ++ea[c[up_e]];
      if (split) ++ec[c[up_e - 1]];
    }
    for (const auto& c : cf) {
      if (c.size() <= up_f) continue;
      ++fa[c[up_f]];
      if (split) ++fc[c[up_f - 1]];
    }
    std::uint64_t total = 0;
    for (const auto& [a, n] : ea) {
      auto it = fa.find(a);
      if (it != fa.end()) total += n * it->second;
    }
    if (split)
      for (const auto& [c, n] : ec) {
        auto it = fc.find(c);
        if (it != fc.end()) total -= n * it->second;
      }
    per_m[mi] = total;
  });
  std::uint64_t sum = 0;
  for (auto v : per_m) sum += v;
  return sum;
}

std::uint64_t pair_count_naive(const KaryTree& t, const std::vector<Point>& E, const std::vector<Point>& F, int r) {
  std::uint64_t c = 0;
  for (Point x : E)
    for (Point y : F)
      if (t.dist(x, y) == r) ++c;
  return c;
}

PairBound pair_bound(const KaryTree& t, std::uint64_t count, std::size_t e, std::size_t f, int r) {
  PairBound b;
  b.count = count;
  b.bound = 2 * std::sqrt(static_cast<double>(e) * static_cast<double>(f)) * std::pow(t.k(), r / 2.0);
  b.ratio = b.bound > 0 ? static_cast<double>(count) / b.bound : 0;
  mp::cpp_int lhs = mp::cpp_int(count) * count;
  mp::cpp_int rhs = mp::cpp_int(4) * e * f * mp::pow(mp::cpp_int(t.k()), static_cast<unsigned>(r));
  b.pass = lhs <= rhs;
  return b;
}

nlohmann::json ExhaustivePairReport::to_json() const {
  return {{"k", k}, {"D", D}, {"sets", sets}, {"cases", cases}, {"worst_ratio", worst_ratio}, {"pass", pass}};
}

ExhaustivePairReport exhaustive_pair_check(const KaryTree& t) {
  const std::size_t n = t.size();
  if (n > 15) throw BudgetExceeded("exhaustive_pair_check: at most 15 vertices");
  ExhaustivePairReport rep;
  rep.k = t.k();
  rep.D = t.D();
  const int rmax = 2 * t.D();
  // sphere[y][r] as a bit mask.
  std::vector<std::vector<std::uint32_t>> sphere(n, std::vector<std::uint32_t>(static_cast<std::size_t>(rmax) + 1, 0));
  for (Point y = 0; y < n; ++y)
    for (Point x = 0; x < n; ++x) sphere[y][static_cast<std::size_t>(t.dist(x, y))] |= 1u << x;

  std::vector<std::uint64_t> hits(n);
  for (std::uint32_t E = 1; E < (1u << n); ++E) {
    ++rep.sets;
    const std::uint64_t e = static_cast<std::uint64_t>(std::popcount(E));
    for (int r = 0; r <= rmax; ++r) {
      for (Point y = 0; y < n; ++y)
        hits[y] = static_cast<std::uint64_t>(std::popcount(E & sphere[y][static_cast<std::size_t>(r)]));
      std::sort(hits.begin(), hits.end(), std::greater<>());
      const std::uint64_t kr = ipow(static_cast<std::uint64_t>(t.k()), r);
      std::uint64_t c = 0;
      for (std::size_t s = 1; s <= n; ++s) {
        c += hits[s - 1];
        ++rep.cases;
        if (c * c > 4 * e * s * kr) rep.pass = false;
        double ratio = static_cast<double>(c) /
                       (2 * std::sqrt(static_cast<double>(e * s)) * std::sqrt(static_cast<double>(kr)));
        rep.worst_ratio = std::max(rep.worst_ratio, ratio);
      }
    }
  }
  return rep;
}

namespace {

std::vector<Rational> abs_prefix(const std::vector<Rational>& f) {
  std::vector<Rational> p(f.size() + 1, Rational(0));
  for (std::size_t i = 0; i < f.size(); ++i) p[i + 1] = p[i] + f[i].abs();
  return p;
}

// Numerator and clipped size of A°_r at x.
std::pair<Rational, std::uint64_t> sphere_sum(const KaryTree& t, const std::vector<Rational>& prefix, Point x, int r) {
  Rational s = 0;
  std::uint64_t size = 0;
  for (auto [lo, hi] : t.sphere_ranges(x, r)) {
    s += prefix[hi] - prefix[lo];
    size += hi - lo;
  }
  return {s, size};
}

}  // namespace

SphericalProfile spherical_profile(const KaryTree& t, const std::vector<Rational>& f, bool infinite,
                                   bool with_sizes) {
  if (f.size() != t.size()) throw SchemaError("spherical_profile: f has the wrong size");
  SphericalProfile p;
  p.infinite = infinite;
  p.value.assign(t.size(), Rational(0));
  p.best_r.assign(t.size(), 0);
  if (with_sizes) p.sizes.assign(t.size(), {});
  auto prefix = abs_prefix(f);
  parallel_for(t.size(), [&](std::size_t x) {
    const int reach = t.depth(x) + t.D();
    Rational best = -1;
    int arg = 0;
    for (int r = 0; r <= reach; ++r) {
      auto [num, size] = sphere_sum(t, prefix, x, r);
      if (with_sizes) p.sizes[x].push_back(size);
      if (size == 0) continue;
      std::uint64_t den = infinite ? t.sphere_size_infinite(x, r) : size;
      Rational v = num / Rational(static_cast<std::int64_t>(den));
      if (v > best) {
        best = v;
        arg = r;
      }
    }
    p.value[x] = best;
    p.best_r[x] = arg;
  });
  return p;
}

std::vector<Rational> spherical_average(const KaryTree& t, const std::vector<Rational>& f, int r) {
  auto prefix = abs_prefix(f);
  std::vector<Rational> out(t.size(), Rational(0));
  for (Point x = 0; x < t.size(); ++x) {
    auto [num, size] = sphere_sum(t, prefix, x, r);
    if (size > 0) out[x] = num / Rational(static_cast<std::int64_t>(size));
  }
  return out;
}

DistributionalRow distributional_check(const KaryTree& t, const std::vector<Rational>& f, int r,
                                       const Rational& lambda) {
  if (r < 0 || r > t.D()) throw SchemaError("distributional_check needs 0 <= r <= D");
  if (lambda <= Rational(0)) throw SchemaError("distributional_check needs lambda > 0");
  DistributionalRow row;
  row.r = r;
  row.lambda = lambda;
  auto avg = spherical_average(t, f, r);
  std::int64_t lhs = 0;
  for (const auto& v : avg)
    if (v >= lambda) ++lhs;
  row.lhs = Rational(lhs);

  const mp::cpp_int kr = mp::pow(mp::cpp_int(t.k()), static_cast<unsigned>(r));
  const double krd = std::pow(static_cast<double>(t.k()), r);
  // mu(|f| >= lambda * num / den)
  auto count_ge = [&](const mp::cpp_int& num, const mp::cpp_int& den) {
    std::uint64_t c = 0;
    for (const auto& v : f)
      if (!v.is_zero() && ge_scaled(v, lambda, num, den)) ++c;
    return c;
  };
  for (int n = 0; mp::pow(mp::cpp_int(2), static_cast<unsigned>(n)) <= 2 * kr; ++n) {
    const mp::cpp_int two_n = mp::pow(mp::cpp_int(2), static_cast<unsigned>(n));
    const double w = std::sqrt(std::ldexp(1.0, n) / krd) * std::ldexp(1.0, n);
    const std::uint64_t ge = count_ge(two_n, 2);  // |f| >= 2^{n-1} lambda
    row.rhs += w * static_cast<double>(ge);
    if (two_n <= kr) {
      const std::uint64_t en = ge - count_ge(two_n * 2, 2);  // 2^{n-1} <= |f| / lambda < 2^n
      row.chain += 1024 * w * static_cast<double>(en);
    }
  }
  row.chain += krd * static_cast<double>(count_ge(kr, 2));
  row.margin = row.constant * row.rhs - static_cast<double>(lhs);
  row.pass = row.margin >= 0;
  row.chain_pass = static_cast<double>(lhs) <= row.chain;
  return row;
}

std::uint64_t sphere_size_at_depth(int k, int h, int r) {
  if (r < 0) return 0;
  const std::uint64_t K = static_cast<std::uint64_t>(k);
  std::uint64_t c = 0;
  for (int m = 0; m <= std::min(r, h); ++m) {
    const int s = r - m;
    if (s == 0)
      c += 1;
    else if (m == 0)
      c += ipow(K, s);
    else
      c += (K - 1) * ipow(K, s - 1);
  }
  return c;
}

std::string TreeScan::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "k,D,family,spherical,standard,spherical_float,standard_float,spherical_depth\n";
  for (const auto& r : rows)
    os << r.k << ',' << r.D << ',' << r.family << ',' << r.spherical.str() << ',' << r.standard.str() << ','
       << r.spherical.to_double() << ',' << r.standard.to_double() << ',' << r.spherical_depth << '\n';
  return os.str();
}

nlohmann::json TreeScan::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows)
    rs.push_back({{"k", r.k},
                  {"D", r.D},
                  {"family", r.family},
                  {"spherical", r.spherical.str()},
                  {"standard", r.standard.str()},
                  {"spherical_depth", r.spherical_depth}});
  return {{"rows", rs},
          {"max_spherical", max_spherical.str()},
          {"min_spherical", min_spherical.str()},
          {"ratio", ratio}};
}

namespace {

struct ClassWitness {
  Rational value;
  int depth = 0;
};

// values[h] shared by the k^h vertices at depth h.
ClassWitness class_witness(int k, const std::vector<Rational>& values, const Rational& l1) {
  std::vector<int> order(values.size());
  for (std::size_t h = 0; h < values.size(); ++h) order[h] = static_cast<int>(h);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] > values[b]; });
  ClassWitness w{Rational(0), 0};
  std::int64_t mass = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int h = order[i];
    mass += static_cast<std::int64_t>(ipow(static_cast<std::uint64_t>(k), h));
    // Classes tied with the next one are only counted once the tie is complete.
    if (i + 1 < order.size() && values[order[i + 1]] == values[h]) continue;
    Rational v = values[h] * Rational(mass) / l1;
    if (v > w.value) w = {v, h};
  }
  return w;
}

}  // namespace

TreeScan tree_weak_norm_scan(const std::vector<int>& ks, int D, const std::vector<std::string>& families) {
  TreeScan scan;
  bool first = true;
  for (const auto& fam : families) {
    if (fam != "delta_root" && fam != "ones") throw SchemaError("unknown tree family: " + fam);
  }
  for (int k : ks) {
    if (k < 2) throw SchemaError("tree scan needs k >= 2");
    long double n = 0;
    for (int h = 0; h <= D; ++h) n += std::pow(static_cast<long double>(k), h);
    if (n * k > 9e18L) throw BudgetExceeded("tree scan: k^(D+1) does not fit 64-bit counts");
    for (const auto& fam : families) {
      TreeScanRow row;
      row.k = k;
      row.D = D;
      row.family = fam;
      std::vector<Rational> sph(static_cast<std::size_t>(D) + 1), stdv(static_cast<std::size_t>(D) + 1);
      Rational l1;
      if (fam == "delta_root") {
        l1 = 1;
        for (int h = 0; h <= D; ++h) {
          // Only r = h reaches the root.
          sph[h] = Rational(1) / Rational(static_cast<std::int64_t>(sphere_size_at_depth(k, h, h)));
          std::uint64_t ball = 0;
          for (int r = 0; r <= h; ++r) ball += sphere_size_at_depth(k, h, r);
          stdv[h] = Rational(1) / Rational(static_cast<std::int64_t>(ball));
        }
      } else {
        l1 = Rational(static_cast<std::int64_t>(n));
        for (int h = 0; h <= D; ++h) sph[h] = stdv[h] = 1;
      }
      auto ws = class_witness(k, sph, l1);
      row.spherical = ws.value;
      row.spherical_depth = ws.depth;
      row.standard = class_witness(k, stdv, l1).value;
      if (fam == "delta_root") {
        if (first || row.spherical > scan.max_spherical) scan.max_spherical = row.spherical;
        if (first || row.spherical < scan.min_spherical) scan.min_spherical = row.spherical;
        first = false;
      }
      scan.rows.push_back(row);
    }
  }
  if (!first) scan.ratio = (scan.max_spherical / scan.min_spherical).to_double();
  return scan;
}

}  // namespace maxlab
