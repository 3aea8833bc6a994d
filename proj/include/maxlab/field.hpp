#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "maxlab/rational.hpp"

namespace maxlab {

/// F_q with q = p^e. Elements are indexed 0..q-1 by their coefficient
/// vector over F_p in base p (index = sum c_i p^i for c_0 + c_1 a + ...).
class FiniteField {
 public:
  /// Prime field (e = 1) or one of the hardcoded extensions F_9, F_27.
  FiniteField(int p, int e = 1);
  /// Explicit monic modulus, coefficients low to high (size e + 1).
  FiniteField(int p, int e, std::vector<int> modulus);

  int p() const { return p_; }
  int e() const { return e_; }
  int q() const { return q_; }
  const std::vector<int>& modulus() const { return modulus_; }

  int add(int a, int b) const { return add_[a * q_ + b]; }
  int mul(int a, int b) const { return mul_[a * q_ + b]; }
  int neg(int a) const { return neg_[a]; }
  int sub(int a, int b) const { return add(a, neg(b)); }
  /// Absolute trace to F_p, as an integer in [0, p).
  int trace(int a) const { return trace_[a]; }
  /// Additive character exp(2 pi i Tr(a) / p).
  std::complex<double> chi(int a) const { return chi_[trace_[a]]; }
  /// F_p-coordinate c_i of element a.
  int digit(int a, int i) const;

  /// Irreducibility of the modulus by exhaustive search for roots and
  /// (for e <= 3 this suffices) factors.
  static bool irreducible(int p, const std::vector<int>& modulus);
  static std::vector<int> default_modulus(int p, int e);

  nlohmann::json descriptor() const;

 private:
  void build();
  int p_, e_, q_;
  std::vector<int> modulus_;
  std::vector<int> add_, mul_, neg_, trace_;
  std::vector<std::complex<double>> chi_;
};

bool is_odd_prime(int p);

/// sum_{x in F_q} chi(y x^2)
std::complex<double> gauss_sum(const FiniteField& f, int y);

/// X_q = F_q^m with Q(x) = x_1^2 + ... + x_m^2, the level sets E_z = Q^{-1}(z),
/// and the coordinate flags. Point index: sum_i x_i q^i, which is also the
/// base-p expansion of the F_p coordinates (digit i*e + d).
class QuadraticLevelSpace {
 public:
  QuadraticLevelSpace(FiniteField field, int m);

  /// Largest integer strictly below sqrt(q).
  static int default_dimension(int q);

  const FiniteField& field() const { return field_; }
  int m() const { return m_; }
  std::size_t size() const { return size_; }
  int q() const { return field_.q(); }

  int coord(std::size_t x, int i) const;
  std::size_t add(std::size_t x, std::size_t y) const;
  std::size_t neg(std::size_t x) const;
  std::size_t sub(std::size_t x, std::size_t y) const { return add(x, neg(y)); }
  /// F_q-bilinear pairing sum x_i y_i.
  int dot(std::size_t x, std::size_t y) const;

  int level(std::size_t x) const { return level_[x]; }
  const std::vector<std::size_t>& level_set(int z) const { return sets_[z]; }

  /// Depth of the F_p flag, m * e.
  int flag_depth() const { return m_ * field_.e(); }
  /// x in W_{-j} of the F_p flag: the last j F_p-coordinates vanish.
  bool in_flag(std::size_t x, int j) const;
  /// Size p^{me - j} of W_{-j}.
  std::size_t flag_size(int j) const;
  /// x in the F_q-flag subspace of codimension l: last l F_q-coordinates vanish.
  /// W_{-(m-1)} of this flag is span(e_1).
  bool in_fq_flag(std::size_t x, int l) const;

  nlohmann::json descriptor() const;

 private:
  FiniteField field_;
  int m_;
  std::size_t size_;
  std::vector<int> level_;
  std::vector<std::vector<std::size_t>> sets_;
};

struct LevelSetRow {
  int z;
  std::size_t size;
  bool mujq_pass;
};

struct LevelSetReport {
  std::vector<LevelSetRow> rows;
  bool all_pass;
  std::size_t total;
};

/// Exact |E_z| with the window |X|/(2q) < |E_z| < 2|X|/q per level.
LevelSetReport level_set_sizes(const QuadraticLevelSpace& s);

struct FourierRow {
  int z;
  double max_fourier;
  double bound;
  bool pass;
};

/// max_{eta != 0} |1_{E_z}^(eta)| with 1^(eta) = |X|^{-1} sum_x 1_E(x) chi(<eta, x>).
/// Throws BudgetExceeded if |E_z| * |X| exceeds the budget.
FourierRow indicator_fourier_max(const QuadraticLevelSpace& s, int z, double tol = 1e-9);
/// Zero-frequency coefficient |E_z| / |X|, exact.
Rational indicator_fourier_zero(const QuadraticLevelSpace& s, int z);

/// |W_{-j} + E_z| for the F_p flag subspace W_{-j}.
std::size_t minkowski_sum_measure(const QuadraticLevelSpace& s, int j, int z);

struct VneRow {
  int z;
  std::size_t measure;
  bool pass;
};

/// |span(e_1) + E_z| >= |X| / 4 per level.
std::vector<VneRow> vne_report(const QuadraticLevelSpace& s);

/// M_q f(x) = max over nonempty E_z of |E_z|^{-1} sum_{y in E_z} |f(x + y)|.
std::vector<Rational> mq_operator(const QuadraticLevelSpace& s, const std::vector<Rational>& f);

}  // namespace maxlab
