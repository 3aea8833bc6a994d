#include <algorithm>

#include "doctest.h"
#include "maxlab/constructions.hpp"
#include "maxlab/mms.hpp"
#include "maxlab/rng.hpp"

using namespace maxlab;

namespace {

bool subset(std::vector<Point> a, std::vector<Point> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("dist scales") {
  auto i = DistScale::integer(4);
  CHECK(i.value(6) == doctest::Approx(1.5));
  CHECK(i.key_le(Rational(3, 2)) == 6);
  CHECK(i.key_le(Rational(-1)) == -1);
  CHECK(i.sum(3, 5) == 8);
  CHECK(i.scaled(4, Rational(3, 2)) == 6);
  CHECK(i.scaled(4, Rational(3, 2), true) == 5);

  auto sq = DistScale::squared();
  CHECK(sq.value(2) == doctest::Approx(std::sqrt(2.0)));
  CHECK(sq.key_le(Rational(2)) == 4);
  CHECK(sq.sum(1, 1) == 4);  // 1 + 1 = 2 = sqrt(4)
  CHECK(sq.sum(1, 2) == 5);  // 1 + sqrt 2 = 2.414 -> sqrt(5) = 2.236

  auto ex = DistScale::exponent(3, 2, -3);
  CHECK(ex.value(1) == doctest::Approx(std::pow(3.0, -1.5)));
  CHECK(ex.exponent_of(4) == 0);
  CHECK(ex.key_le(Rational(1)) == 4);
}

TEST_CASE("balls") {
  auto star = star_space(5);
  CHECK(ball(*star, 0, 1).size() == star->size());
  CHECK(ball_measure(*star, 0, 1) == Rational(20));
  CHECK(ball(*star, 3, 0) == std::vector<Point>{3});
  auto z64 = torus(64);
  CHECK(ball(*z64, 10, 3).size() == 7);
  CHECK(ball(*z64, 0, 3).size() == 7);
}

TEST_CASE("enlarged balls") {
  auto star = star_space(5);
  CHECK(enlarged_ball(*star, 1, 1, 1).size() == star->size());
  auto z64 = torus(64);
  auto a = enlarged_ball(*z64, 5, 2, 3), b = ball(*z64, 5, 5);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  auto c = enlarged_ball(*z64, 5, 4, 0), d = ball(*z64, 5, 4);
  std::sort(c.begin(), c.end());
  std::sort(d.begin(), d.end());
  CHECK(c == d);
}

TEST_CASE("ball monotonicity and enlarged-ball sandwich") {
  std::vector<SpacePtr> spaces = {star_space(6), euclidean_star(7), torus(50)};
  Rng rng(11);
  for (const auto& s : spaces) {
    auto radii = realized_distances(*s);
    for (int t = 0; t < 40; ++t) {
      Point x = rng.below(s->size());
      Dist r = radii[rng.below(radii.size())], r2 = radii[rng.below(radii.size())];
      if (r > r2) std::swap(r, r2);
      CHECK(subset(ball(*s, x, r), ball(*s, x, r2)));
      auto e = enlarged_ball(*s, x, r, r2);
      CHECK(subset(ball(*s, x, r), e));
      CHECK(subset(e, ball(*s, x, s->scale().sum(r, r2))));
    }
  }
}

TEST_CASE("radial profiles and invariance") {
  auto z = torus(30);
  auto p = radial_profile(*z, 4), q = radial_profile_scan(*z, 4);
  CHECK(p.keys == q.keys);
  CHECK(p.cum == q.cum);
  CHECK(p.at(2) == Rational(5));
  CHECK(p.below(2) == Rational(3));
  CHECK(invariance_check(*z, 30, 1));
  CHECK(total_measure(*star_space(4)) == Rational(12));
}

TEST_CASE("regularity checks") {
  auto star = star_space(5);
  RegularityParams p;
  p.K = 5;
  auto rep = regularity_check(*star, RegularityKind::doubling, p);
  CHECK(rep.pass);
  CHECK(rep.worst_ratio <= 5 + 1e-12);

  auto one = torus(1);
  for (auto k : {RegularityKind::doubling, RegularityKind::microdoubling}) {
    auto r = regularity_check(*one, k, p);
    CHECK(r.pass);
    CHECK(r.worst_ratio == doctest::Approx(1));
  }
  p.K = 2.9;
  p.n = 1;
  CHECK_FALSE(regularity_check(*torus(256), RegularityKind::microdoubling, p).pass);
  p.K = 3;
  CHECK(regularity_check(*torus(256), RegularityKind::microdoubling, p).pass);
}

TEST_CASE("tempered check") {
  auto z = torus(64);
  auto single = tempered_check(*z, RadiiSet::from_keys({5}), 1);
  CHECK(single.pass);
  CHECK(single.worst_ratio == doctest::Approx(1));

  auto z256 = torus(256);
  CHECK(tempered_check(*z256, RadiiSet::from_keys({1, 4, 16, 64}), 5).pass);

  auto star = star_space(5);
  auto st = tempered_check(*star, RadiiSet::from_keys({1, 2}), 100);
  // r_1 = 1 at a spoke: the ball is {spoke, hub} (mass 5) against the hub's
  // ball (mass 20), and the whole space (20) over a spoke's ball (5).
  CHECK(st.worst_ratio == doctest::Approx(4));
}

TEST_CASE("radii set validation") {
  CHECK_THROWS_AS(RadiiSet::from_keys({}), SchemaError);
  CHECK_THROWS_AS(RadiiSet::from_keys({0, 1}), SchemaError);
  CHECK_THROWS_AS(RadiiSet::from_keys({2, 2}), SchemaError);
}

TEST_CASE("metric check catches a broken triangle") {
  std::vector<Dist> d = {0, 1, 5, 1, 0, 1, 5, 1, 0};
  TableSpace bad(3, d, {1, 1, 1}, DistScale::integer(1), {{"type", "bad"}});
  CHECK_FALSE(metric_check(bad).pass);
  CHECK(metric_check(*star_space(5)).pass);
  CHECK(metric_check(*star_space(10)).exhaustive);
}
