#include <cmath>

#include "doctest.h"
#include "maxlab/constructions.hpp"
#include "maxlab/maximal.hpp"

using namespace maxlab;

namespace {

std::vector<Rational> delta(std::size_t n, Point x) {
  std::vector<Rational> f(n, Rational(0));
  f[x] = 1;
  return f;
}

}  // namespace

TEST_CASE("averages") {
  auto z = torus(8);
  std::vector<Rational> c(z->size(), Rational(3, 7));
  CHECK(average(*z, c, 5, 2) == Rational(3, 7));
  CHECK(average(*z, delta(8, 0), 0, 1) == Rational(1, 3));
  auto star = star_space(5);
  CHECK(average(*star, delta(star->size(), 0), 4, 1) == Rational(4, 5));
}

TEST_CASE("star profile and witness") {
  auto star = star_space(5);
  auto f = delta(star->size(), 0);
  // R = {1, 2} taken literally: the hub only sees balls of mass 20.
  auto literal = maximal_profile(*star, f, RadiiSet::from_keys({1, 2}));
  CHECK(literal.entries[0].value == Rational(1, 5));
  CHECK(weak_norm_witness(literal).value == Rational(16, 5));
  // R = (0, inf): the hub's singleton ball gives M f(hub) = 1.
  auto prof = maximal_profile(*star, f, all_radii(*star));
  CHECK(all_radii(*star).keys == std::vector<Dist>{1, 2});
  CHECK(prof.entries[0].value == Rational(1));
  for (Point x = 1; x < star->size(); ++x) CHECK(prof.entries[x].value == Rational(4, 5));
  auto w = weak_norm_witness(prof);
  CHECK(w.value == Rational(4));
  CHECK(w.threshold == Rational(4, 5));
  CHECK(w.mass == Rational(20));
  CHECK(w.l1 == Rational(4));
  for (int K : {2, 3, 7})
    CHECK(weak_norm_witness(maximal_profile(*star_space(K), delta(static_cast<std::size_t>((K - 1) * (K - 1) + 1), 0),
                                            all_radii(*star_space(K))))
              .value == Rational(K - 1));
}

TEST_CASE("constant functions") {
  std::vector<SpacePtr> spaces = {star_space(4), euclidean_star(5), torus(20)};
  for (const auto& s : spaces) {
    std::vector<Rational> one(s->size(), Rational(1));
    for (auto v : {Variant::standard, Variant::modified}) {
      auto prof = maximal_profile(*s, one, all_radii(*s), v);
      if (v == Variant::standard)
        for (const auto& e : prof.entries) CHECK(e.value == Rational(1));
      else
        for (const auto& e : prof.entries) CHECK(e.value <= Rational(1));
    }
    CHECK(weak_norm_witness(maximal_profile(*s, one, all_radii(*s))).value == Rational(1));
  }
}

TEST_CASE("euclidean star witness") {
  auto e = euclidean_star(50);
  auto w = weak_norm_witness(maximal_profile(*e, delta(e->size(), 0), all_radii(*e)));
  CHECK(w.value >= Rational(51, 2));
}

TEST_CASE("M_q witness exceeds q / 2") {
  QuadraticLevelSpace s(FiniteField(7), 2);
  auto p = maximal_profile_mq(s, delta(s.size(), 0));
  CHECK(weak_norm_witness(p).value > Rational(7, 2));
}

TEST_CASE("delta fast path agrees with the naive path") {
  std::vector<SpacePtr> spaces = {star_space(5), euclidean_star(9), torus(33),
                                  std::make_shared<DoublingProductSpace>(5, 1)};
  for (const auto& s : spaces)
    for (Point g : {Point{0}, Point{1}, s->size() - 1})
      for (auto v : {Variant::standard, Variant::modified}) {
        auto R = all_radii(*s);
        auto fast = maximal_profile_delta(*s, g, Rational(3), R, v);
        std::vector<Rational> f(s->size(), Rational(0));
        f[g] = 3;
        auto slow = maximal_profile(*s, f, R, v);
        for (Point x = 0; x < s->size(); ++x) CHECK(fast.entries[x].value == slow.entries[x].value);
      }
}

TEST_CASE("lacunary profile dominates M_q f_q / 6 on the accessible levels") {
  DoublingProductSpace s(5, 3);
  const std::size_t nq = s.xq_size();
  std::vector<Rational> f(s.size(), Rational(0));
  for (std::size_t v = 0; v < s.size() / nq; ++v) f[s.make(0, v)] = 1;
  std::vector<std::pair<Point, Rational>> reps;
  for (std::size_t u = 0; u < nq; ++u) reps.push_back({s.make(u, 0), Rational(1)});
  auto prof = maximal_profile_classes(s, f, s.lacunary_radii(), Variant::standard, reps);
  int checked = 0;
  for (std::size_t u = 0; u < nq; ++u) {
    const int z = s.xq().level(u);
    bool accessible = u == 0;
    for (int j = 1; j <= s.t(); ++j) accessible = accessible || s.level_of_index(j) == z;
    if (!accessible) continue;
    ++checked;
    const Rational mq(1, static_cast<std::int64_t>(s.xq().level_set(z).size()));
    CHECK(prof.entries[u].value >= mq / Rational(6));
  }
  CHECK(checked > 1);
}

TEST_CASE("radii bands") {
  auto sc = DistScale::integer(1);
  auto bands = radii_bands(RadiiSet::from_keys({1, 2, 4, 8}), sc, Rational(1), 8, 3);
  REQUIRE(bands.size() == 3);
  CHECK(bands[0].keys == std::vector<Dist>{1, 2});
  CHECK(bands[1].keys == std::vector<Dist>{4});
  CHECK(bands[2].keys == std::vector<Dist>{8});
  CHECK(radii_bands(RadiiSet::from_keys({5}), sc, Rational(5), 4, 2).size() == 1);
  CHECK(std::pow(4.0, 1.0 / 12) <= 1.25);
  CHECK_THROWS_AS(radii_bands(RadiiSet::from_keys({1}), sc, Rational(1), 1, 2), SchemaError);
}

TEST_CASE("radii windows") {
  auto w = radii_windows(RadiiSet::from_keys({1, 2, 3, 8, 9}), DistScale::integer(1), 3);
  REQUIRE(w.size() == 5);
  CHECK(w[0].keys == std::vector<Dist>{1, 2, 3});
  CHECK(w[2].keys == std::vector<Dist>{3, 8, 9});
  CHECK(w[4].keys == std::vector<Dist>{9});
}

TEST_CASE("lacunary radii") {
  auto z = torus(64);
  auto R = lacunary_radii(*z, Rational(0));
  CHECK(R.keys == std::vector<Dist>{1, 2, 4, 8, 16, 32});
}

TEST_CASE("strong norm estimate") {
  auto z = torus(40);
  auto R = all_radii(*z);
  auto op = make_operator(*z, R, Variant::standard);
  auto est = strong_norm_estimate(*z, op, R, 2, 30, 9);
  CHECK(est.estimate >= 1);
  CHECK(est.trials == 30);
  CHECK(est.to_json()["label"] == "LOWER BOUND");
  CHECK_THROWS_AS(strong_norm_estimate(*z, op, R, 1, 3, 9), SchemaError);
}

TEST_CASE("variant names round trip") {
  for (auto v : {Variant::standard, Variant::modified, Variant::spherical, Variant::mq})
    CHECK(parse_variant(to_string(v)) == v);
  CHECK_THROWS_AS(parse_variant("bogus"), SchemaError);
}
