#include "doctest.h"
#include "maxlab/kary_tree.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/rng.hpp"
#include "maxlab/treebounds.hpp"

using namespace maxlab;

namespace {

std::vector<Point> level(const KaryTree& t, int j) {
  std::vector<Point> v;
  for (std::size_t i = 0; i < t.level_size(j); ++i) v.push_back(t.level_begin(j) + i);
  return v;
}

}  // namespace

TEST_CASE("pair counts: small cases") {
  KaryTree t(2, 4);
  CHECK(pair_count(t, {0}, {0}, 0) == 1);
  CHECK(pair_bound(t, 1, 1, 1, 0).pass);
  auto T3 = level(t, 3);
  CHECK(pair_count(t, T3, T3, 2) == 8);
  auto b = pair_bound(t, 8, 8, 8, 2);
  CHECK(b.bound == doctest::Approx(32));
  CHECK(b.pass);
  CHECK(pair_count(t, T3, T3, 0) == 8);
  CHECK(pair_count(t, {0}, T3, 3) == 8);
  CHECK(pair_count(t, T3, {0}, 3) == 8);
}

TEST_CASE("pair counts: concentric spheres are nearly tight") {
  KaryTree t(2, 8);
  auto E = level(t, 4), F = level(t, 8);
  const std::uint64_t c = pair_count(t, E, F, 4);
  CHECK(c == 256);
  auto b = pair_bound(t, c, E.size(), F.size(), 4);
  CHECK(b.pass);
  CHECK(b.ratio > 0.4);
}

TEST_CASE("pair counts agree with the naive count and are symmetric") {
  Rng rng(31);
  for (int inst = 0; inst < 300; ++inst) {
    KaryTree t(2 + static_cast<int>(rng.below(3)), 1 + static_cast<int>(rng.below(5)));
    auto pick = [&] {
      std::vector<Point> s;
      for (Point x = 0; x < t.size(); ++x)
        if (rng.below(3) == 0) s.push_back(x);
      return s;
    };
    auto E = pick(), F = pick();
    const int r = static_cast<int>(rng.below(2 * static_cast<std::uint64_t>(t.D()) + 1));
    const auto c = pair_count(t, E, F, r);
    CHECK(c == pair_count_naive(t, E, F, r));
    CHECK(c == pair_count(t, F, E, r));
    CHECK(pair_bound(t, c, E.size(), F.size(), r).pass);
  }
}

TEST_CASE("exhaustive pair check") {
  KaryTree t(2, 2);
  auto rep = exhaustive_pair_check(t);
  CHECK(rep.pass);
  CHECK(rep.sets == 127);  // nonempty E
  CHECK(rep.worst_ratio <= 1);
  CHECK_THROWS_AS(exhaustive_pair_check(KaryTree(2, 4)), BudgetExceeded);
}

TEST_CASE("spherical maximal function") {
  KaryTree t(2, 6);
  std::vector<Rational> one(t.size(), Rational(1));
  for (const auto& v : spherical_profile(t, one).value) CHECK(v == Rational(1));
  std::vector<Rational> d(t.size(), Rational(0));
  d[0] = 1;
  auto prof = spherical_profile(t, d);
  for (Point x = 0; x < t.size(); ++x)
    CHECK(prof.value[x] == Rational(1, static_cast<std::int64_t>(t.sphere_size(x, t.depth(x)))));
  auto a2 = spherical_average(t, d, 2);
  for (Point x = 0; x < t.size(); ++x)
    CHECK(a2[x] == (t.depth(x) == 2 ? Rational(1, static_cast<std::int64_t>(t.sphere_size(x, 2))) : Rational(0)));
}

TEST_CASE("infinite-tree sphere sizes") {
  for (int k = 2; k <= 4; ++k) {
    KaryTree t(k, 5);
    for (Point x = 0; x < t.size(); ++x)
      for (int r = 0; r <= 10; ++r) CHECK(sphere_size_at_depth(k, t.depth(x), r) == t.sphere_size_infinite(x, r));
  }
  CHECK(sphere_size_at_depth(2, 3, 3) == 8 + 4);  // k^h + k^{h-1} at r = h
}

TEST_CASE("distributional inequality") {
  KaryTree t(2, 6);
  std::vector<Rational> zero(t.size(), Rational(0));
  auto z = distributional_check(t, zero, 3, Rational(1, 4));
  CHECK(z.lhs == Rational(0));
  CHECK(z.pass);
  std::vector<Rational> d(t.size(), Rational(0));
  d[0] = 1;
  for (int e = -12; e <= 2; ++e) {
    Rational lambda = e >= 0 ? Rational(1 << e) : Rational(1, 1 << -e);
    auto row = distributional_check(t, d, 3, lambda);
    CHECK(row.margin >= 0);
    if (row.lhs > Rational(0)) CHECK(row.margin > 0);
  }
  KaryTree t3(3, 5);
  Rng rng(4);
  std::vector<Rational> f(t3.size(), Rational(0));
  for (auto& v : f)
    if (rng.below(10) == 0) v = Rational(static_cast<std::int64_t>(1 + rng.below(9)));
  int rows = 0;
  for (int r = 1; r <= 5; ++r)
    for (int e = -14; e < 6; ++e, ++rows) {
      Rational lambda = e >= 0 ? Rational(1 << e) : Rational(1, 1 << -e);
      CHECK(distributional_check(t3, f, r, lambda).pass);
    }
  CHECK(rows == 100);
  CHECK_THROWS_AS(distributional_check(t, d, 7, Rational(1)), SchemaError);
}

TEST_CASE("tree weak-norm scan") {
  auto scan = tree_weak_norm_scan({2, 3}, 6, {"delta_root", "ones"});
  for (const auto& row : scan.rows)
    if (row.family == "ones") {
      CHECK(row.spherical == Rational(1));
      CHECK(row.standard == Rational(1));
    }
  CHECK(scan.ratio >= 1);
  CHECK(scan.max_spherical >= scan.min_spherical);
  CHECK(scan.to_csv().rfind("k,D,family", 0) == 0);
}
