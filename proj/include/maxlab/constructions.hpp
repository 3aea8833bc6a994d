#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxlab/field.hpp"
#include "maxlab/mms.hpp"

namespace maxlab {

/// Hub of weight K-1 joined at distance 1 to (K-1)^2 unit-weight spokes.
/// Point 0 is the hub.
std::shared_ptr<TableSpace> star_space(int K);

/// {0, e_1, ..., e_n} in R^n with squared-distance keys (1 and 2). Point 0 is the origin.
std::shared_ptr<TableSpace> euclidean_star(int n);

std::shared_ptr<TorusSpace> torus(std::size_t N);

/// One radius band of a group space: the ball B(0, r) predicted for every
/// r in [lo, hi) versus the ball returned by the generic oracle.
struct BallBand {
  std::string form;
  std::string lo, hi;  // real radii, "p/q" or symbolic
  Dist key_lo = 0, key_hi = 0;  // keys checked (both ends of the band)
  std::size_t predicted = 0, observed = 0;
  bool pass = false;
};

struct BallStructureTable {
  std::vector<BallBand> bands;
  /// Every realized distance falls in some band.
  bool coverage = false;
  bool all_pass() const;
  std::string to_csv() const;
};

/// X = X_q x F_q^t with the metric 4^{j(v)} 1_{v != 0} + 2^{-l_{j(v)}(u)} 1_{u != 0}.
/// Point index u + |X_q| v; keys are distances times 2^m.
///
/// l_j(u) is taken over (E_j u {0}) + W_{-l}. With E_j alone (literal = true)
/// d((u, 0), (0, v)) can exceed d((u, 0), 0) + d(0, (0, v)) once j(v) >= 1, so
/// the literal table is kept only to exhibit that failure.
class DoublingProductSpace : public GroupSpace {
 public:
  /// m = 0 selects the largest integer below sqrt(q).
  DoublingProductSpace(int q, int t, int m = 0, bool literal = false);

  int q() const { return q_; }
  int t() const { return t_; }
  int m() const { return m_; }
  const QuadraticLevelSpace& xq() const { return *xq_; }
  std::size_t xq_size() const { return xq_->size(); }
  std::size_t u_of(Point g) const { return g % xq_->size(); }
  std::size_t v_of(Point g) const { return g / xq_->size(); }
  Point make(std::size_t u, std::size_t v) const { return u + xq_->size() * v; }

  /// Level z_j used for E_j (j = 1..t); E_0 = {0}.
  int level_of_index(int j) const { return j % q_; }
  bool in_E(int j, std::size_t u) const;
  /// Smallest j with v in V_j.
  int jv(std::size_t v) const;
  /// Largest l in 0..m with u in (E_j u {0}) + W_{-l}.
  int ell(int j, std::size_t u) const { return ell_[static_cast<std::size_t>(j) * xq_size() + u]; }
  /// u in W_{-l} of the F_q flag.
  bool in_W(std::size_t u, int l) const { return xq_->in_fq_flag(u, l); }
  bool in_level_flag(int j, std::size_t u, int l) const { return ell(j, u) >= l; }
  bool literal() const { return literal_; }

  BallStructureTable ball_structure() const;
  /// One radius per dyadic scale: 2^{-l} for l = m..0, then 2^i + 2^{-m} for
  /// i = 1..2t+1. At even i = 2j this is the smallest radius whose ball
  /// contains E_j x V_j.
  RadiiSet lacunary_radii() const;
  nlohmann::json descriptor() const override;

 private:
  int q_, t_, m_;
  bool literal_;
  std::unique_ptr<QuadraticLevelSpace> xq_;
  std::vector<int> ell_;
};

struct ADWindowRow {
  int j;
  std::size_t measure;
  Rational ratio;  // mu(B_j) / mu(X_q)
  bool pass;
};

struct TripleMarginReport {
  std::size_t in_range = 0;    // exponent triples with 3^{j''/n} > 3^{j/n} + 3^{j'/n}
  std::size_t violations = 0;  // of j'' > j' + k among those with j' >= 1
  bool pass = true;
};

/// X = X_q x F_3^t with d(x, y) = min{3^{j/n} : x - y in B_j}. Keys are j + M.
class ADRegularSpace : public GroupSpace {
 public:
  /// m = 0 selects the largest integer below sqrt(q).
  ADRegularSpace(int k, int t, int n, int m = 0);

  int k() const { return k_; }
  int q() const { return q_; }
  int t() const { return t_; }
  int n() const { return n_; }
  int m() const { return m_; }
  /// F_3-dimension of X_q.
  int M() const { return M_; }
  const QuadraticLevelSpace& xq() const { return *xq_; }
  std::size_t xq_size() const { return xq_->size(); }
  std::size_t u_of(Point g) const { return g % xq_->size(); }
  std::size_t v_of(Point g) const { return g / xq_->size(); }

  int level_of_index(int l) const { return l % q_; }
  bool in_E(int l, std::size_t u) const;
  int jv(std::size_t v) const;
  /// Exponent j of the norm of g (-M for g = 0).
  int exponent(Point g) const { return static_cast<int>(norm(g)) - M_; }
  Dist key_of(int j) const { return j + M_; }

  /// B_j straight from its definition, as a membership bitmap.
  std::vector<char> B(int j) const;
  bool nesting_holds() const;
  BallStructureTable ball_structure() const;
  /// 3^j <= mu(B_j)/mu(X_q) <= 4 3^j for -M+1 <= j <= t.
  std::vector<ADWindowRow> window() const;
  TripleMarginReport triple_margin() const;
  nlohmann::json descriptor() const override;

 private:
  int k_, q_, t_, n_, m_, M_;
  std::unique_ptr<QuadraticLevelSpace> xq_;
};

/// Parameters of a construction; all builders are deterministic.
struct ConstructionSpec {
  std::string kind;  // star | euclidean_star | torus | doubling_product | ad_regular | kary_tree
  nlohmann::json params;

  static ConstructionSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const { return {{"kind", kind}, {"params", params}}; }
};

SpacePtr build_space(const ConstructionSpec& spec);

}  // namespace maxlab
