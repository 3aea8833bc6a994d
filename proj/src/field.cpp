#include "maxlab/field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "maxlab/common.hpp"

namespace maxlab {

namespace {

using Poly = std::vector<int>;  // low to high

int mod(int a, int p) { return ((a % p) + p) % p; }

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo b over F_p (b nonzero).
Poly poly_rem(Poly a, const Poly& b, int p) {
  trim(a);
  Poly bb = b;
  trim(bb);
  int lead_inv = 1;
  while (mod(bb.back() * lead_inv, p) != 1) ++lead_inv;
  while (a.size() >= bb.size()) {
    int c = mod(a.back() * lead_inv, p);
    std::size_t shift = a.size() - bb.size();
    for (std::size_t i = 0; i < bb.size(); ++i) a[i + shift] = mod(a[i + shift] - c * bb[i], p);
    trim(a);
  }
  return a;
}

}  // namespace

bool is_odd_prime(int p) {
  if (p < 3 || p % 2 == 0) return false;
  for (int d = 3; d * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}

std::vector<int> FiniteField::default_modulus(int p, int e) {
  if (e == 1) return {0, 1};
  if (p == 3 && e == 2) return {1, 0, 1};     // x^2 + 1
  if (p == 3 && e == 3) return {1, 2, 0, 1};  // x^3 + 2x + 1
  throw SchemaError("no built-in modulus for p=" + std::to_string(p) + ", e=" + std::to_string(e));
}

bool FiniteField::irreducible(int p, const std::vector<int>& modulus) {
  Poly f = modulus;
  trim(f);
  int deg = static_cast<int>(f.size()) - 1;
  if (deg < 1) return false;
  if (deg == 1) return true;
  // Trial division by every monic polynomial of degree 1..deg/2.
  for (int d = 1; d <= deg / 2; ++d) {
    int count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (int idx = 0; idx < count; ++idx) {
      Poly g(d + 1);
      int t = idx;
      for (int i = 0; i < d; ++i) {
        g[i] = t % p;
        t /= p;
      }
      g[d] = 1;
      if (poly_rem(f, g, p).empty()) return false;
    }
  }
  return true;
}

FiniteField::FiniteField(int p, int e) : FiniteField(p, e, default_modulus(p, e)) {}

FiniteField::FiniteField(int p, int e, std::vector<int> modulus)
    : p_(p), e_(e), q_(1), modulus_(std::move(modulus)) {
  if (!is_odd_prime(p)) throw SchemaError("field characteristic must be an odd prime");
  if (e < 1 || e > 3) throw SchemaError("extension degree must be 1..3");
  if (static_cast<int>(modulus_.size()) != e + 1 || modulus_.back() != 1)
    throw SchemaError("modulus must be monic of degree e");
  if (!irreducible(p, modulus_)) throw SchemaError("modulus is reducible");
  for (int i = 0; i < e; ++i) q_ *= p;
  build();
}

int FiniteField::digit(int a, int i) const {
  for (int k = 0; k < i; ++k) a /= p_;
  return a % p_;
}

void FiniteField::build() {
  auto to_poly = [&](int a) {
    Poly c(e_);
    for (int i = 0; i < e_; ++i) {
      c[i] = a % p_;
      a /= p_;
    }
    return c;
  };
  auto from_poly = [&](const Poly& c) {
    int a = 0;
    for (int i = e_ - 1; i >= 0; --i) a = a * p_ + (i < static_cast<int>(c.size()) ? c[i] : 0);
    return a;
  };
  add_.assign(q_ * q_, 0);
  mul_.assign(q_ * q_, 0);
  neg_.assign(q_, 0);
  for (int a = 0; a < q_; ++a) {
    Poly pa = to_poly(a);
    Poly na(e_);
    for (int i = 0; i < e_; ++i) na[i] = mod(-pa[i], p_);
    neg_[a] = from_poly(na);
    for (int b = 0; b < q_; ++b) {
      Poly pb = to_poly(b);
      Poly s(e_);
      for (int i = 0; i < e_; ++i) s[i] = mod(pa[i] + pb[i], p_);
      add_[a * q_ + b] = from_poly(s);
      Poly prod(2 * e_, 0);
      for (int i = 0; i < e_; ++i)
        for (int j = 0; j < e_; ++j) prod[i + j] = mod(prod[i + j] + pa[i] * pb[j], p_);
      mul_[a * q_ + b] = from_poly(poly_rem(prod, modulus_, p_));
    }
  }
  trace_.assign(q_, 0);
  for (int a = 0; a < q_; ++a) {
    int sum = 0;
    int power = a;
    for (int k = 0; k < e_; ++k) {
      sum = add(sum, power);
      int next = 1;
      for (int t = 0; t < p_; ++t) next = mul(next, power);
      power = next;
    }
    if (sum >= p_) throw std::logic_error("trace left the prime field");
    trace_[a] = sum;
  }
  chi_.resize(p_);
  for (int t = 0; t < p_; ++t) chi_[t] = std::polar(1.0, 2.0 * std::numbers::pi * t / p_);
}

nlohmann::json FiniteField::descriptor() const {
  return {{"p", p_}, {"e", e_}, {"q", q_}, {"modulus", modulus_}};
}

std::complex<double> gauss_sum(const FiniteField& f, int y) {
  std::complex<double> s = 0;
  for (int x = 0; x < f.q(); ++x) s += f.chi(f.mul(y, f.mul(x, x)));
  return s;
}

QuadraticLevelSpace::QuadraticLevelSpace(FiniteField field, int m) : field_(std::move(field)), m_(m), size_(1) {
  if (m < 1) throw SchemaError("dimension m must be >= 1");
  for (int i = 0; i < m; ++i) size_ *= static_cast<std::size_t>(field_.q());
  require_budget(size_, "quadratic level space");
  level_.resize(size_);
  sets_.assign(field_.q(), {});
  for (std::size_t x = 0; x < size_; ++x) {
    int z = 0;
    for (int i = 0; i < m_; ++i) {
      int c = coord(x, i);
      z = field_.add(z, field_.mul(c, c));
    }
    level_[x] = z;
    sets_[z].push_back(x);
  }
}

int QuadraticLevelSpace::default_dimension(int q) {
  int m = 0;
  while (static_cast<long>(m + 1) * (m + 1) < q) ++m;
  return m;
}

int QuadraticLevelSpace::coord(std::size_t x, int i) const {
  for (int k = 0; k < i; ++k) x /= field_.q();
  return static_cast<int>(x % field_.q());
}

std::size_t QuadraticLevelSpace::add(std::size_t x, std::size_t y) const {
  std::size_t r = 0, mult = 1;
  const std::size_t q = field_.q();
  for (int i = 0; i < m_; ++i) {
    r += mult * field_.add(static_cast<int>(x % q), static_cast<int>(y % q));
    x /= q;
    y /= q;
    mult *= q;
  }
  return r;
}

std::size_t QuadraticLevelSpace::neg(std::size_t x) const {
  std::size_t r = 0, mult = 1;
  const std::size_t q = field_.q();
  for (int i = 0; i < m_; ++i) {
    r += mult * field_.neg(static_cast<int>(x % q));
    x /= q;
    mult *= q;
  }
  return r;
}

int QuadraticLevelSpace::dot(std::size_t x, std::size_t y) const {
  int s = 0;
  const std::size_t q = field_.q();
  for (int i = 0; i < m_; ++i) {
    s = field_.add(s, field_.mul(static_cast<int>(x % q), static_cast<int>(y % q)));
    x /= q;
    y /= q;
  }
  return s;
}

std::size_t QuadraticLevelSpace::flag_size(int j) const {
  std::size_t s = 1;
  for (int i = 0; i < flag_depth() - j; ++i) s *= static_cast<std::size_t>(field_.p());
  return s;
}

bool QuadraticLevelSpace::in_flag(std::size_t x, int j) const { return x < flag_size(j); }

bool QuadraticLevelSpace::in_fq_flag(std::size_t x, int l) const { return in_flag(x, l * field_.e()); }

nlohmann::json QuadraticLevelSpace::descriptor() const {
  return {{"p", field_.p()}, {"e", field_.e()}, {"modulus", field_.modulus()}, {"m", m_}};
}

LevelSetReport level_set_sizes(const QuadraticLevelSpace& s) {
  LevelSetReport rep{{}, true, 0};
  const std::size_t X = s.size();
  const std::size_t q = static_cast<std::size_t>(s.q());
  for (int z = 0; z < s.q(); ++z) {
    std::size_t n = s.level_set(z).size();
    // X/(2q) < n < 2X/q, cleared of denominators.
    bool pass = 2 * q * n > X && q * n < 2 * X;
    rep.rows.push_back({z, n, pass});
    rep.all_pass = rep.all_pass && pass;
    rep.total += n;
  }
  return rep;
}

FourierRow indicator_fourier_max(const QuadraticLevelSpace& s, int z, double tol) {
  const auto& E = s.level_set(z);
  require_budget(static_cast<std::uint64_t>(E.size()) * s.size(), "indicator_fourier_max");
  const FiniteField& F = s.field();
  double best = 0;
  for (std::size_t eta = 1; eta < s.size(); ++eta) {
    std::complex<double> acc = 0;
    for (std::size_t x : E) acc += F.chi(s.dot(eta, x));
    best = std::max(best, std::abs(acc));
  }
  best /= static_cast<double>(s.size());
  double bound = std::pow(static_cast<double>(s.q()), -0.5 * s.m());
  return {z, best, bound, best <= bound + tol};
}

Rational indicator_fourier_zero(const QuadraticLevelSpace& s, int z) {
  return Rational(static_cast<std::int64_t>(s.level_set(z).size()), static_cast<std::int64_t>(s.size()));
}

std::size_t minkowski_sum_measure(const QuadraticLevelSpace& s, int j, int z) {
  if (j < 0 || j > s.flag_depth()) throw std::out_of_range("flag index");
  const std::size_t W = s.flag_size(j);
  require_budget(static_cast<std::uint64_t>(W) * s.level_set(z).size(), "minkowski_sum_measure");
  std::vector<char> hit(s.size(), 0);
  std::size_t count = 0;
  for (std::size_t x : s.level_set(z)) {
    for (std::size_t w = 0; w < W; ++w) {
      std::size_t y = s.add(x, w);
      if (!hit[y]) {
        hit[y] = 1;
        ++count;
      }
    }
  }
  return count;
}

std::vector<VneRow> vne_report(const QuadraticLevelSpace& s) {
  std::vector<VneRow> rows;
  const int j = (s.m() - 1) * s.field().e();  // span(e_1) as an F_p-flag member
  for (int z = 0; z < s.q(); ++z) {
    std::size_t meas = minkowski_sum_measure(s, j, z);
    rows.push_back({z, meas, 4 * meas >= s.size()});
  }
  return rows;
}

std::vector<Rational> mq_operator(const QuadraticLevelSpace& s, const std::vector<Rational>& f) {
  if (f.size() != s.size()) throw std::invalid_argument("function size mismatch");
  require_budget(static_cast<std::uint64_t>(s.size()) * s.size(), "mq_operator");
  bool any = false;
  for (int z = 0; z < s.q(); ++z) any = any || !s.level_set(z).empty();
  if (!any) throw std::logic_error("all level sets empty");
  std::vector<Rational> out(s.size());
  parallel_for(s.size(), [&](std::size_t x) {
    Rational best = 0;
    for (int z = 0; z < s.q(); ++z) {
      const auto& E = s.level_set(z);
      if (E.empty()) continue;
      Rational sum = 0;
      for (std::size_t y : E) sum += f[s.add(x, y)].abs();
      best = rmax(best, sum / Rational(static_cast<std::int64_t>(E.size())));
    }
    out[x] = best;
  });
  return out;
}

}  // namespace maxlab
