#include "doctest.h"
#include "maxlab/constructions.hpp"
#include "maxlab/kary_tree.hpp"
#include "maxlab/maximal.hpp"

using namespace maxlab;

TEST_CASE("star space") {
  auto s2 = star_space(2);
  CHECK(s2->size() == 2);
  CHECK(s2->weight(0) == Rational(1));
  CHECK(s2->weight(1) == Rational(1));
  auto s5 = star_space(5);
  CHECK(s5->size() == 17);
  CHECK(total_measure(*s5) == Rational(20));
  CHECK(s5->dist(1, 2) == 2);
  CHECK(metric_check(*star_space(10)).pass);
  CHECK_THROWS_AS(star_space(1), SchemaError);
}

TEST_CASE("euclidean star") {
  auto e1 = euclidean_star(1);
  CHECK(e1->size() == 2);
  CHECK(e1->scale().value(e1->dist(0, 1)) == doctest::Approx(1));
  auto e10 = euclidean_star(10);
  CHECK(e10->scale().value(e10->dist(1, 2)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(metric_check(*e10).pass);
  std::vector<Rational> f(e10->size(), Rational(0));
  f[0] = 1;
  for (const auto& e : maximal_profile(*e10, f, all_radii(*e10)).entries) CHECK(e.value >= Rational(1, 2));
}

TEST_CASE("doubling product space, q = 5") {
  DoublingProductSpace s2(5, 2);
  CHECK(s2.m() == 2);
  CHECK(s2.size() == 25 * 25);
  CHECK(metric_check(s2).pass);
  // r in [1, 4): X_q x {0}; r in [4 + 1, 16): X_q x V_1. Keys are distances times 2^m.
  for (Dist k = 4; k < 16; ++k) CHECK(s2.ball_count(k) == 25);
  for (Dist k = 20; k < 64; ++k) CHECK(s2.ball_count(k) == 125);
  auto table = s2.ball_structure();
  CHECK(table.coverage);
  CHECK(table.all_pass());
  CHECK(invariance_check(s2, 40, 3));

  DoublingProductSpace literal(5, 2, 0, true);
  CHECK_FALSE(metric_check(literal).pass);
}

TEST_CASE("doubling product space is doubling with constant 2q") {
  DoublingProductSpace s(5, 3);
  RegularityParams p;
  p.K = 10;
  auto rep = regularity_check(s, RegularityKind::doubling, p);
  CHECK(rep.pass);
  CHECK(rep.worst_ratio <= 10);
  CHECK(s.ball_structure().all_pass());
}

TEST_CASE("lacunary radii of the doubling product space") {
  DoublingProductSpace s(5, 2);
  auto R = s.lacunary_radii();
  // 2^{-l} for l = 2..0 (keys 1, 2, 4), then 2^i + 2^{-2} for i = 1..5.
  CHECK(R.keys == std::vector<Dist>{1, 2, 4, 9, 17, 33, 65, 129});
}

TEST_CASE("Ahlfors-David example") {
  ADRegularSpace s(2, 4, 16, 3);
  CHECK(s.q() == 9);
  CHECK(s.size() == 729 * 81);
  CHECK(s.nesting_holds());
  for (const auto& row : s.window()) CHECK(row.pass);
  CHECK(s.ball_structure().all_pass());
  auto b0 = s.B(-s.M());
  std::size_t members = 0;
  for (char c : b0) members += c;
  CHECK(members == 1);
  CHECK(b0[0] == 1);

  ADRegularSpace s1(1, 3, 8, 1);
  for (const auto& row : s1.window())
    if (row.j >= 1) {
      Rational pow3 = 1;
      for (int i = 0; i < row.j; ++i) pow3 *= Rational(3);
      CHECK(row.ratio <= Rational(4) * pow3);
    }
  CHECK(metric_check(s1).pass);
}

TEST_CASE("k-ary tree") {
  KaryTree t0(2, 0);
  CHECK(t0.size() == 1);
  CHECK(t0.sphere(0, 0) == std::vector<Point>{0});
  KaryTree t(3, 2);
  CHECK(t.size() == 13);
  CHECK(t.sphere_size(0, 2) == 9);
  KaryTree t5(2, 5);
  const Point leaf = t5.level_begin(5) + 7;
  CHECK(t5.sphere_size(leaf, 2) == 2);
  CHECK(metric_check(t5).pass);
  for (Point x = 0; x < t5.size(); ++x)
    for (int r = 0; r <= 10; ++r) {
      CHECK(t5.sphere(x, r).size() == t5.sphere_size(x, r));
      CHECK(t5.sphere_size(x, r) <= t5.sphere_size_infinite(x, r));
    }
}

TEST_CASE("build_space from specs") {
  auto s = build_space(ConstructionSpec::from_json({{"kind", "star"}, {"params", {{"K", 5}}}}));
  CHECK(s->size() == 17);
  auto t = build_space(ConstructionSpec::from_json({{"kind", "kary_tree"}, {"params", {{"k", 3}, {"D", 2}}}}));
  CHECK(t->size() == 13);
  CHECK_THROWS_AS(ConstructionSpec::from_json({{"kind", "moebius"}, {"params", nlohmann::json::object()}}),
                  SchemaError);
  CHECK_THROWS_AS(build_space(ConstructionSpec::from_json({{"kind", "star"}, {"params", {{"K", 1}}}})), SchemaError);
}

TEST_CASE("descriptors are deterministic") {
  CHECK(star_space(5)->descriptor() == star_space(5)->descriptor());
  CHECK(DoublingProductSpace(5, 2).descriptor().dump() == DoublingProductSpace(5, 2).descriptor().dump());
}
