#include <algorithm>

#include "doctest.h"
#include "maxlab/constructions.hpp"
#include "maxlab/covering.hpp"
#include "maxlab/kary_tree.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/partitions.hpp"
#include "maxlab/rng.hpp"
#include "maxlab/treebounds.hpp"

using namespace maxlab;

namespace {

std::vector<Rational> random_function(Rng& rng, std::size_t n, int density = 3) {
  std::vector<Rational> f(n, Rational(0));
  for (auto& v : f)
    if (rng.below(static_cast<std::uint64_t>(density)) == 0)
      v = Rational(static_cast<std::int64_t>(rng.below(9)) - 4, static_cast<std::int64_t>(1 + rng.below(3)));
  return f;
}

std::vector<SpacePtr> small_spaces() {
  return {torus(30), star_space(4), euclidean_star(7), std::make_shared<KaryTree>(2, 4),
          std::make_shared<DoublingProductSpace>(5, 1)};
}

}  // namespace

TEST_CASE("constructions are metric spaces") {
  for (const auto& s : small_spaces()) CHECK(metric_check(*s).pass);
  CHECK(metric_check(DoublingProductSpace(5, 2)).pass);
  CHECK(metric_check(ADRegularSpace(1, 3, 8, 1)).pass);
}

TEST_CASE("group constructions are translation invariant") {
  CHECK(invariance_check(*torus(97), 20, 1));
  CHECK(invariance_check(DoublingProductSpace(5, 2), 30, 2));
  CHECK(invariance_check(ADRegularSpace(1, 3, 8, 1), 30, 3));
}

TEST_CASE("M f >= |f| when the radii accumulate at zero") {
  Rng rng(11);
  for (const auto& s : small_spaces())
    for (int i = 0; i < 4; ++i) {
      auto f = random_function(rng, s->size());
      for (auto v : {Variant::standard, Variant::modified}) {
        auto prof = maximal_profile(*s, f, all_radii(*s), v);
        for (Point x = 0; x < s->size(); ++x) CHECK(prof.entries[x].value >= f[x].abs());
      }
    }
}

TEST_CASE("maximal function: sublinear, homogeneous, monotone in R, modified <= standard") {
  Rng rng(12);
  for (const auto& s : small_spaces()) {
    auto real = realized_distances(*s);
    std::vector<Dist> half;
    for (std::size_t i = 1; i < real.size(); i += 2) half.push_back(real[i]);
    const auto R = all_radii(*s), H = RadiiSet::from_keys(half);
    for (int i = 0; i < 3; ++i) {
      auto f = random_function(rng, s->size()), g = random_function(rng, s->size());
      std::vector<Rational> sum(s->size()), scaled(s->size());
      for (Point x = 0; x < s->size(); ++x) {
        sum[x] = f[x] + g[x];
        scaled[x] = f[x] * Rational(-3, 2);
      }
      auto mf = maximal_profile(*s, f, R).values(), mg = maximal_profile(*s, g, R).values();
      auto ms = maximal_profile(*s, sum, R).values(), mc = maximal_profile(*s, scaled, R).values();
      auto mh = maximal_profile(*s, f, H).values(), mm = maximal_profile(*s, f, R, Variant::modified).values();
      for (Point x = 0; x < s->size(); ++x) {
        CHECK(ms[x] <= mf[x] + mg[x]);
        CHECK(mc[x] == mf[x] * Rational(3, 2));
        CHECK(mh[x] <= mf[x]);
        CHECK(mm[x] <= mf[x]);
      }
    }
  }
}

TEST_CASE("single average on an invariant space has weak norm at most 1") {
  Rng rng(13);
  for (std::size_t n : {17, 64}) {
    auto z = torus(n);
    for (int i = 0; i < 10; ++i) {
      auto f = random_function(rng, n);
      if (l1_norm(*z, f).is_zero()) continue;
      const Dist r = static_cast<Dist>(1 + rng.below(n / 2 - 1));
      CHECK(weak_norm_witness(maximal_profile(*z, f, RadiiSet::from_keys({r}))).value <= Rational(1));
    }
  }
}

TEST_CASE("ball maximal function is dominated by the spherical one on trees") {
  KaryTree t(3, 4);
  Rng rng(14);
  const auto R = all_radii(t);
  for (int i = 0; i < 10; ++i) {
    auto f = random_function(rng, t.size(), 4);
    auto m = maximal_profile(t, f, R).values();
    auto ms = spherical_profile(t, f).value;
    for (Point x = 0; x < t.size(); ++x) CHECK(m[x] <= ms[x]);
  }
}

TEST_CASE("doob inequality on random trees and functions") {
  Rng rng(15);
  std::vector<SpacePtr> spaces = {torus(48), star_space(4), euclidean_star(10)};
  for (const auto& s : spaces)
    for (int i = 0; i < 8; ++i) {
      auto f = random_function(rng, s->size());
      if (l1_norm(*s, f).is_zero()) continue;
      auto tree = sample_partition_tree(*s, default_depth(*s), rng.next());
      CHECK(check_tree(*s, tree).pass());
      CHECK(doob_check(*s, f, tree.filtration()).pass());
    }
}

TEST_CASE("localization: the trivial direction always holds") {
  auto z = torus(128);
  auto rep = localization_experiment(*z, all_radii(*z), 2, 5, {0, 77}, 3, 9);
  for (const auto& row : rep.rows) CHECK(row.trivial_direction);
}

TEST_CASE("poisson cover: E' contains F and alpha <= 1") {
  std::vector<SpacePtr> spaces = {torus(60), star_space(5)};
  for (const auto& s : spaces) {
    auto real = realized_distances(*s);
    const Dist rk = real.back();
    std::vector<Point> E;
    for (Point x = 0; x < s->size(); x += 3) E.push_back(x);
    auto p = intensity(*s, E, rk, {real[1]});
    for (const auto& a : alpha_ball(*s, p, rk)) CHECK(a <= Rational(1));
    for (std::uint64_t i = 0; i < 50; ++i) {
      auto c = sample_poisson(*s, p, rk, {real[1]}, trial_seed(5, i));
      for (Point x = 0; x < s->size(); ++x)
        if (c.F[x]) CHECK(c.E_prime[x]);
      CHECK(check_cover_sample(*s, c, rk).indicator);
    }
  }
}

TEST_CASE("results do not depend on the thread count") {
  const unsigned saved = thread_count();
  auto run = [] {
    auto z = torus(200);
    std::vector<Rational> f(200, Rational(0));
    f[3] = 2;
    f[150] = 1;
    auto prof = maximal_profile(*z, f, all_radii(*z)).to_csv();
    auto pad = padding_probability(*z, 0.05, 4, 200, 42).to_json().dump();
    return prof + pad;
  };
  set_thread_count(1);
  const auto one = run();
  set_thread_count(4);
  const auto four = run();
  set_thread_count(saved);
  CHECK(one == four);
}
