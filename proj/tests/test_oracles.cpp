// Brute-force oracles for the frozen constants used by the acceptance suite.
// Each recomputes its value from first principles and only uses the library
// for the object under test (distances, or the value being checked).
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "doctest.h"
#include "maxlab/constructions.hpp"
#include "maxlab/covering.hpp"
#include "maxlab/kary_tree.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/treebounds.hpp"

using namespace maxlab;

namespace {

// sup_v v * #{M f >= v} / ||f||_1 over the values taken by M f.
Rational witness(const std::vector<Rational>& mf, const std::vector<std::int64_t>& mass, std::int64_t l1) {
  std::map<Rational, std::int64_t, std::greater<>> by_value;
  for (std::size_t i = 0; i < mf.size(); ++i) by_value[mf[i]] += mass[i];
  Rational best = 0;
  std::int64_t cum = 0;
  for (const auto& [v, m] : by_value) {
    cum += m;
    best = std::max(best, v * Rational(cum) / Rational(l1));
  }
  return best;
}

// Lacunary witness for f = 1 on {0} x F_q^t, every point and every radius
// evaluated directly from the distance function.
Rational doubling_oracle(int q, int t) {
  DoublingProductSpace s(q, t);
  const std::size_t n = s.size();
  for (Point y = 0; y < n; ++y) REQUIRE(s.weight(y) == Rational(1));
  std::vector<char> f(n, 0);
  for (Point y = 0; y < n; ++y) f[y] = s.u_of(y) == 0;
  const auto keys = s.lacunary_radii().keys;
  std::vector<Rational> mf(n);
  std::vector<std::int64_t> mass(n, 1);
  for (Point x = 0; x < n; ++x) {
    std::vector<std::int64_t> num(keys.size(), 0), den(keys.size(), 0);
    for (Point y = 0; y < n; ++y) {
      const Dist d = s.dist(x, y);
      for (std::size_t i = 0; i < keys.size(); ++i)
        if (d <= keys[i]) {
          ++den[i];
          num[i] += f[y];
        }
    }
    Rational best = f[x] ? Rational(1) : Rational(0);  // radii accumulate at 0
    for (std::size_t i = 0; i < keys.size(); ++i) best = std::max(best, Rational(num[i]) / Rational(den[i]));
    mf[x] = best;
  }
  return witness(mf, mass, static_cast<std::int64_t>(n / s.xq_size()));
}

// Sizes of S(x, r) for x at depth h of the infinite k-ary tree, by BFS over
// (depth, index) labels.
std::vector<std::uint64_t> bfs_spheres(int k, int h, int rmax) {
  using V = std::pair<int, std::uint64_t>;
  std::set<V> seen{{h, 0}};
  std::vector<V> frontier{{h, 0}};
  std::vector<std::uint64_t> sizes{1};
  for (int r = 1; r <= rmax; ++r) {
    std::vector<V> next;
    auto visit = [&](V v) {
      if (seen.insert(v).second) next.push_back(v);
    };
    for (auto [d, i] : frontier) {
      if (d > 0) visit({d - 1, i / static_cast<std::uint64_t>(k)});
      for (int c = 0; c < k; ++c) visit({d + 1, i * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(c)});
    }
    sizes.push_back(next.size());
    frontier = std::move(next);
  }
  return sizes;
}

// Witness for delta_root on the depth-D truncation with infinite-tree
// normalizations; depth class h holds k^h vertices.
std::pair<Rational, Rational> tree_oracle(int k, int D) {
  std::vector<Rational> sph, stdv;
  std::vector<std::int64_t> mass;
  std::int64_t kh = 1;
  for (int h = 0; h <= D; ++h, kh *= k) {
    auto sz = bfs_spheres(k, h, h);
    std::uint64_t ball = 0;
    for (auto c : sz) ball += c;
    sph.push_back(Rational(1) / Rational(static_cast<std::int64_t>(sz[static_cast<std::size_t>(h)])));
    stdv.push_back(Rational(1) / Rational(static_cast<std::int64_t>(ball)));
    mass.push_back(kh);
  }
  return {witness(sph, mass, 1), witness(stdv, mass, 1)};
}

}  // namespace

TEST_CASE("doubling example witnesses, t = 2 and t = 3") {
  const Rational w2 = doubling_oracle(5, 2);
  CHECK(w2 == Rational(11, 9));
  DoublingProductSpace s2(5, 2);
  std::vector<Rational> f(s2.size(), Rational(0));
  for (Point y = 0; y < s2.size(); ++y)
    if (s2.u_of(y) == 0) f[y] = 1;
  CHECK(weak_norm_witness(maximal_profile(s2, f, s2.lacunary_radii())).value == w2);

  set_budget(std::uint64_t{1} << 40);
  CHECK(doubling_oracle(5, 3) == Rational(5, 3));
}

TEST_CASE("tree constant C0 by BFS on the infinite tree") {
  Rational best = 0;
  for (int k = 2; k <= 8; ++k) {
    const int D = k <= 3 ? 10 : 6;
    auto [sph, stdv] = tree_oracle(k, D);
    auto scan = tree_weak_norm_scan({k}, D, {"delta_root"});
    CHECK(scan.rows[0].spherical == sph);
    CHECK(scan.rows[0].standard == stdv);
    CHECK(stdv <= sph);
    best = std::max(best, sph);
  }
  CHECK(best == Rational(2047, 1536));
  CHECK(tree_oracle(2, 10).first == Rational(2047, 1536));
}

TEST_CASE("infinite-tree sphere sizes by BFS") {
  for (int k = 2; k <= 4; ++k)
    for (int h = 0; h <= 4; ++h) {
      auto sz = bfs_spheres(k, h, 7);
      for (int r = 0; r <= 7; ++r) CHECK(sz[static_cast<std::size_t>(r)] == sphere_size_at_depth(k, h, r));
    }
}

TEST_CASE("exhaustive pair check matches full enumeration of (E, F, r)") {
  for (auto [k, D] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {2, 2}}) {
    KaryTree t(k, D);
    const std::size_t n = t.size();
    double worst = 0;
    bool pass = true;
    for (std::uint32_t em = 1; em < (1u << n); ++em)
      for (std::uint32_t fm = 1; fm < (1u << n); ++fm)
        for (int r = 0; r <= 2 * D; ++r) {
          std::uint64_t count = 0;
          for (Point x = 0; x < n; ++x)
            for (Point y = 0; y < n; ++y)
              count += (em >> x & 1) && (fm >> y & 1) && t.dist(x, y) == r;
          const auto e = static_cast<std::uint64_t>(__builtin_popcount(em));
          const auto f = static_cast<std::uint64_t>(__builtin_popcount(fm));
          std::uint64_t kr = 1;
          for (int i = 0; i < r; ++i) kr *= static_cast<std::uint64_t>(k);
          pass = pass && count * count <= 4 * e * f * kr;
          worst = std::max(worst, double(count) / (2 * std::sqrt(double(e * f)) * std::pow(double(k), r / 2.0)));
        }
    auto rep = exhaustive_pair_check(t);
    CHECK(rep.pass == pass);
    CHECK(rep.worst_ratio == doctest::Approx(worst));
  }
}

TEST_CASE("subexponential radii on Z_4096 from ball sizes") {
  const long double tol = 0.001L;
  auto size = [](Dist r) { return std::min<Dist>(2 * r + 1, 4096); };
  auto grow = [&](Dist r, Dist prev) {
    return std::log(static_cast<long double>(size(r + prev))) - std::log(static_cast<long double>(size(r)));
  };
  std::vector<Dist> keys{1};
  for (;;) {
    const Dist prev = keys.back();
    const Dist floor_key = std::max<Dist>(prev, static_cast<Dist>(keys.size()));
    Dist next = -1;
    for (Dist r = floor_key + 1; r < 2048; ++r)
      if (grow(r, prev) <= tol) {
        next = r;
        break;
      }
    if (next < 0) break;
    keys.push_back(next);
  }
  CHECK(keys == std::vector<Dist>{1, 1000, 2046, 2047});
  CHECK(subexp_radii(*torus(4096), 64).radii.keys == keys);
}
