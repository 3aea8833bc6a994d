#include <cmath>

#include "doctest.h"
#include "maxlab/field.hpp"
#include "maxlab/rng.hpp"

using namespace maxlab;

TEST_CASE("field axioms on small fields") {
  for (auto [p, e] : std::vector<std::pair<int, int>>{{3, 1}, {5, 1}, {3, 2}, {3, 3}}) {
    FiniteField F(p, e);
    const int q = F.q();
    for (int a = 0; a < q; ++a) {
      CHECK(F.add(a, F.neg(a)) == 0);
      CHECK(F.mul(a, 1) == a);
      if (a) {
        int inv = 0;
        for (int b = 1; b < q; ++b)
          if (F.mul(a, b) == 1) inv = b;
        CHECK(inv != 0);
      }
      for (int b = 0; b < q; ++b) CHECK(F.mul(a, b) == F.mul(b, a));
    }
  }
}

TEST_CASE("hardcoded moduli are irreducible") {
  CHECK(FiniteField::irreducible(3, {1, 0, 1}));
  CHECK(FiniteField::irreducible(3, {1, 2, 0, 1}));
  CHECK_FALSE(FiniteField::irreducible(3, {2, 0, 1}));  // x^2 - 1
  CHECK(FiniteField::default_modulus(3, 2) == std::vector<int>{1, 0, 1});
  CHECK(FiniteField::default_modulus(3, 3) == std::vector<int>{1, 2, 0, 1});
}

TEST_CASE("gauss sums") {
  FiniteField F3(3);
  auto g = gauss_sum(F3, 1);
  CHECK(std::abs(g) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  auto expect = 1.0 + 2.0 * std::polar(1.0, 2 * M_PI / 3);
  CHECK(std::abs(g - expect) < 1e-12);
  CHECK(std::abs(gauss_sum(FiniteField(5), 0) - 5.0) < 1e-12);
  CHECK(std::abs(gauss_sum(FiniteField(3, 2), 1)) == doctest::Approx(3.0).epsilon(1e-12));
  for (int q : {3, 5, 7, 11, 13}) {
    FiniteField F(q);
    for (int y = 1; y < q; ++y) CHECK(std::abs(gauss_sum(F, y)) == doctest::Approx(std::sqrt(q)).epsilon(1e-9));
  }
}

TEST_CASE("level sets") {
  QuadraticLevelSpace s(FiniteField(5), 2);
  auto rep = level_set_sizes(s);
  CHECK(rep.rows[0].size == 9);
  for (int z = 1; z < 5; ++z) CHECK(rep.rows[z].size == 4);
  CHECK(rep.total == 25);

  auto r3 = level_set_sizes(QuadraticLevelSpace(FiniteField(3), 1));
  CHECK(r3.rows[2].size == 0);
  CHECK_FALSE(r3.all_pass);

  CHECK(level_set_sizes(QuadraticLevelSpace(FiniteField(7), 3)).all_pass);
  // m = 2 over q = 3 mod 4: x^2 + y^2 = 0 only at the origin.
  CHECK(level_set_sizes(QuadraticLevelSpace(FiniteField(7), 2)).rows[0].size == 1);
  CHECK(QuadraticLevelSpace::default_dimension(7) == 2);
  CHECK(QuadraticLevelSpace::default_dimension(9) == 2);
  CHECK(QuadraticLevelSpace::default_dimension(11) == 3);
}

TEST_CASE("level sets partition X_q and are symmetric") {
  for (auto [q, m] : std::vector<std::pair<int, int>>{{3, 2}, {5, 2}, {7, 2}, {9, 2}}) {
    QuadraticLevelSpace s(FiniteField(q == 9 ? 3 : q, q == 9 ? 2 : 1), m);
    std::size_t total = 0;
    for (int z = 0; z < q; ++z) {
      total += s.level_set(z).size();
      for (std::size_t x : s.level_set(z)) CHECK(s.level(s.neg(x)) == z);
    }
    CHECK(total == s.size());
  }
}

TEST_CASE("fourier bounds") {
  QuadraticLevelSpace s52(FiniteField(5), 2);
  auto row = indicator_fourier_max(s52, 1);
  CHECK(row.pass);
  CHECK(row.max_fourier <= 0.2 + 1e-9);
  QuadraticLevelSpace s32(FiniteField(3), 2);
  for (int z = 0; z < 3; ++z) {
    CHECK(std::isfinite(indicator_fourier_max(s32, z).max_fourier));
    CHECK(indicator_fourier_zero(s32, z) == Rational(static_cast<std::int64_t>(s32.level_set(z).size()), 9));
  }
  QuadraticLevelSpace s72(FiniteField(7), 2);
  for (int z = 0; z < 7; ++z) CHECK(indicator_fourier_max(s72, z).max_fourier <= 1.0 / 7 + 1e-9);
}

TEST_CASE("minkowski sums") {
  QuadraticLevelSpace s(FiniteField(5), 2);
  // span(e_1) is W_{-1} of the F_p flag when e = 1.
  CHECK(4 * minkowski_sum_measure(s, 1, 1) >= 25);
  for (int z = 0; z < 5; ++z) {
    CHECK(minkowski_sum_measure(s, 0 + s.flag_depth(), z) == s.level_set(z).size());
    CHECK(minkowski_sum_measure(s, 0, z) == s.size());
  }
  auto rows = vne_report(QuadraticLevelSpace(FiniteField(7), 3));
  for (const auto& r : rows) CHECK(r.pass);
}

TEST_CASE("M_q operator") {
  QuadraticLevelSpace s(FiniteField(5), 2);
  std::vector<Rational> delta(s.size(), Rational(0));
  delta[0] = 1;
  auto m = mq_operator(s, delta);
  for (std::size_t x = 0; x < s.size(); ++x)
    CHECK(m[x] == Rational(1, static_cast<std::int64_t>(s.level_set(s.level(s.neg(x))).size())));
  std::vector<Rational> one(s.size(), Rational(1));
  for (const auto& v : mq_operator(s, one)) CHECK(v == Rational(1));
}

TEST_CASE("M_q matches a direct sum and is sublinear") {
  QuadraticLevelSpace s(FiniteField(7), 2);
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Rational> f(s.size()), g(s.size()), fg(s.size());
    for (std::size_t x = 0; x < s.size(); ++x) {
      f[x] = Rational(static_cast<std::int64_t>(rng.below(2)));
      g[x] = Rational(static_cast<std::int64_t>(rng.below(5)) - 2);
      fg[x] = f[x] + g[x];
    }
    auto mf = mq_operator(s, f), mg = mq_operator(s, g), mfg = mq_operator(s, fg);
    std::vector<Rational> c3(s.size());
    for (std::size_t x = 0; x < s.size(); ++x) c3[x] = Rational(-3) * g[x];
    auto mc = mq_operator(s, c3);
    for (std::size_t x = 0; x < s.size(); ++x) {
      Rational best = 0;
      for (int z = 0; z < 7; ++z) {
        Rational sum = 0;
        for (std::size_t y = 0; y < s.size(); ++y)
          if (s.level(y) == z) sum += f[s.add(x, y)].abs();
        best = rmax(best, sum / Rational(static_cast<std::int64_t>(s.level_set(z).size())));
      }
      CHECK(mf[x] == best);
      CHECK(mfg[x] <= mf[x] + mg[x]);
      CHECK(mc[x] == Rational(3) * mg[x]);
    }
  }
}
