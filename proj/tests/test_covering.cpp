#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "maxlab/constructions.hpp"
#include "maxlab/covering.hpp"
#include "maxlab/rng.hpp"

using namespace maxlab;

namespace {

std::vector<Point> sorted(std::vector<Point> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<Point> all_points(const Space& s) {
  std::vector<Point> v(s.size());
  for (Point x = 0; x < s.size(); ++x) v[x] = x;
  return v;
}

}  // namespace

TEST_CASE("extended balls") {
  auto z = torus(64);
  CHECK(sorted(extended_ball(*z, 9, 6, {})) == sorted(ball(*z, 9, 6)));
  CHECK(sorted(extended_ball(*z, 9, 8, {2})) == sorted(ball(*z, 9, 10)));
  auto star = star_space(5);
  CHECK(extended_ball(*star, 0, 2, {1}).size() == star->size());
}

TEST_CASE("intensity") {
  auto one = torus(1);
  auto p1 = intensity(*one, {0}, 1, {});
  CHECK(p1[0] == Rational(1));

  auto z = torus(40);
  auto pz = intensity(*z, all_points(*z), 5, {1, 2});
  for (Point x = 0; x < z->size(); ++x) CHECK(pz[x] == pz[0]);
  CHECK(pz[0] == Rational(1, 15));  // B*(y) = B(y, 5 + 2)

  auto star = star_space(5);
  std::vector<Point> spokes;
  for (Point x = 1; x < star->size(); ++x) spokes.push_back(x);
  auto ps = intensity(*star, spokes, 1, {});
  CHECK(ps[0] == Rational(0));
  for (Point x : spokes) CHECK(ps[x] == Rational(1, 20));
}

TEST_CASE("alpha is at most one") {
  std::vector<SpacePtr> spaces = {torus(50), star_space(5), euclidean_star(8)};
  Rng rng(2);
  for (const auto& s : spaces)
    for (int t = 0; t < 5; ++t) {
      std::vector<Point> E;
      for (Point x = 0; x < s->size(); ++x)
        if (rng.below(2)) E.push_back(x);
      if (E.empty()) E.push_back(0);
      auto radii = realized_distances(*s);
      const Dist rk = radii.back();
      auto p = intensity(*s, E, rk, {radii[1]});
      for (const auto& a : alpha_ball(*s, p, rk)) CHECK(a <= Rational(1));
    }
}

TEST_CASE("poisson sampling") {
  auto z = torus(8);
  std::vector<Rational> zero(8, Rational(0));
  auto empty = sample_poisson(*z, zero, 2, {}, 3);
  CHECK(empty.size() == 0);

  std::vector<Rational> p(8, Rational(1, 4));  // P = 2
  CHECK(alpha_w(*z, std::vector<Rational>(8, Rational(1)), p) == Rational(2));
  const std::uint64_t trials = 100000;
  double total = 0;
  for (std::uint64_t i = 0; i < trials; ++i) total += double(sample_poisson(*z, p, 2, {}, trial_seed(77, i), false).size());
  CHECK(std::fabs(total / trials - 2) <= 0.05);

  for (std::uint64_t i = 0; i < 30; ++i) {
    auto c = sample_poisson(*z, p, 2, {1}, trial_seed(78, i));
    auto chk = check_cover_sample(*z, c, 2);
    CHECK(chk.contains);
    CHECK(chk.indicator);
  }
}

TEST_CASE("poisson moments") {
  auto z = torus(64);
  auto p = intensity(*z, all_points(*z), 8, {2});
  std::vector<Rational> half(64, Rational(0));
  for (Point x = 0; x < 32; ++x) half[x] = 1;
  auto rep = poisson_moments(*z, p, 8, {{"one", std::vector<Rational>(64, Rational(1))}, {"half", half}}, {0, 17},
                             20000, 5);
  CHECK(rep.pass());
  CHECK(rep.alpha_le_one);
  CHECK(rep.rows.size() == 2);
  CHECK(rep.hit_rows.size() == 2);
}

TEST_CASE("lindenstrauss experiment") {
  auto z = torus(256);
  auto lac = RadiiSet::from_keys({1, 4, 16, 64});
  std::vector<Rational> d(256, Rational(0));
  d[0] = 1;
  auto rep = lindenstrauss_experiment(*z, lac, {{"delta", d}}, 20);
  CHECK(rep.pass());
  CHECK(rep.worst_ratio < 1 + 1e-9);
  CHECK(rep.constant == doctest::Approx(2 * std::exp(1.0) / (std::exp(1.0) - 1) * rep.K));
  CHECK(rep.rows.size() == 20);
  CHECK_THROWS_AS(lindenstrauss_experiment(*z, lac, {{"delta", d}}, 5, 0.5), SchemaError);

  auto star = star_space(5);
  std::vector<Rational> hub(star->size(), Rational(0));
  hub[0] = 1;
  auto srep = lindenstrauss_experiment(*star, RadiiSet::from_keys({1, 2}), {{"hub", hub}}, 10);
  CHECK(srep.pass());
  bool saw_spokes = false;
  for (const auto& row : srep.rows)
    if (row.lambda < 0.8 && row.lambda > 0.2) saw_spokes = saw_spokes || row.level_mass == Rational(16);
  CHECK(saw_spokes);

  std::vector<Rational> zero(256, Rational(0));
  auto zrep = lindenstrauss_experiment(*z, lac, {{"zero", zero}}, 5);
  for (const auto& row : zrep.rows) CHECK(row.level_mass == Rational(0));
}

TEST_CASE("subexponential radii") {
  auto one = torus(1);
  auto s1 = subexp_radii(*one, 4);
  CHECK(s1.radii.keys.empty());
  CHECK(s1.truncated);
  auto z = torus(4096);
  auto c1 = subexp_radii(*z, 1);
  CHECK(c1.radii.keys == std::vector<Dist>{1});
  auto s = subexp_radii(*z, 16);
  CHECK(s.truncated);
  CHECK(s.radii.keys == std::vector<Dist>{1, 1000, 2046, 2047});
  auto t = tempered_check(*z, s.radii, 1e9);
  CHECK(t.worst_ratio <= std::exp(0.001) + 1e-12);
}
