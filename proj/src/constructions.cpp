#include "maxlab/constructions.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "maxlab/kary_tree.hpp"

namespace maxlab {

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Compares the oracle ball B(0, key) with a predicted membership test.
BallBand compare_band(const GroupSpace& s, std::string form, std::string lo, std::string hi, Dist key_lo,
                      Dist key_hi, const std::function<bool(Point)>& predicted) {
  BallBand band{std::move(form), std::move(lo), std::move(hi), key_lo, key_hi};
  std::vector<char> pred(s.size());
  for (Point g = 0; g < s.size(); ++g) {
    pred[g] = predicted(g) ? 1 : 0;
    band.predicted += pred[g];
  }
  band.pass = true;
  for (Dist key : {key_lo, key_hi}) {
    std::size_t c = s.ball_count(key);
    if (key == key_lo) band.observed = c;
    if (c != band.predicted) band.pass = false;
    for (std::size_t i = 0; i < c && band.pass; ++i)
      if (!pred[s.sorted()[i]]) band.pass = false;
  }
  return band;
}

bool covered(const BallStructureTable& t, const std::vector<Dist>& keys) {
  for (Dist k : keys) {
    bool hit = false;
    for (const auto& b : t.bands)
      if (k >= b.key_lo && k <= b.key_hi) hit = true;
    if (!hit) return false;
  }
  return true;
}

}  // namespace

std::shared_ptr<TableSpace> star_space(int K) {
  if (K < 2) throw SchemaError("star_space needs K >= 2");
  const std::size_t spokes = static_cast<std::size_t>(K - 1) * (K - 1);
  const std::size_t n = spokes + 1;
  require_budget(n * n, "star_space");
  std::vector<Dist> d(n * n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    d[i * n + i] = 0;
    if (i > 0) d[i] = d[i * n] = 1;
  }
  std::vector<Rational> w(n, Rational(1));
  w[0] = Rational(K - 1);
  return std::make_shared<TableSpace>(n, std::move(d), std::move(w), DistScale::integer(1),
                                      nlohmann::json{{"type", "star"},
                                                     {"params", {{"K", K}}},
                                                     {"scale", DistScale::integer(1).to_json()}});
}

std::shared_ptr<TableSpace> euclidean_star(int n) {
  if (n < 1) throw SchemaError("euclidean_star needs n >= 1");
  const std::size_t N = static_cast<std::size_t>(n) + 1;
  require_budget(N * N, "euclidean_star");
  std::vector<Dist> d(N * N, 2);
  for (std::size_t i = 0; i < N; ++i) {
    d[i * N + i] = 0;
    if (i > 0) d[i] = d[i * N] = 1;
  }
  return std::make_shared<TableSpace>(
      N, std::move(d), std::vector<Rational>{}, DistScale::squared(),
      nlohmann::json{{"type", "euclidean_star"}, {"params", {{"n", n}}}, {"scale", DistScale::squared().to_json()}});
}

std::shared_ptr<TorusSpace> torus(std::size_t N) {
  if (N < 1) throw SchemaError("torus needs N >= 1");
  return std::make_shared<TorusSpace>(N);
}

bool BallStructureTable::all_pass() const {
  if (!coverage) return false;
  return std::all_of(bands.begin(), bands.end(), [](const BallBand& b) { return b.pass; });
}

std::string BallStructureTable::to_csv() const {
  std::ostringstream os;
  os << "form,band_lo,band_hi,key_lo,key_hi,predicted_measure,observed_measure,pass\n";
  for (const auto& b : bands)
    os << '"' << b.form << "\"," << b.lo << ',' << b.hi << ',' << b.key_lo << ',' << b.key_hi << ',' << b.predicted
       << ',' << b.observed << ',' << (b.pass ? "true" : "false") << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

DoublingProductSpace::DoublingProductSpace(int q, int t, int m, bool literal)
    : GroupSpace(std::vector<std::uint32_t>(static_cast<std::size_t>((m > 0 ? m : QuadraticLevelSpace::default_dimension(q)) + t),
                                            static_cast<std::uint32_t>(q)),
                 DistScale::integer(std::int64_t{1} << (m > 0 ? m : QuadraticLevelSpace::default_dimension(q)))),
      q_(q), t_(t), m_(m > 0 ? m : QuadraticLevelSpace::default_dimension(q)), literal_(literal) {
  if (q != 5 && q != 7) throw SchemaError("doubling_product_space needs q in {5, 7}");
  if (t < 1 || t > q) throw SchemaError("doubling_product_space needs 1 <= t <= q");
  xq_ = std::make_unique<QuadraticLevelSpace>(FiniteField(q), m_);
  const std::size_t X = xq_->size();

  ell_.assign(static_cast<std::size_t>(t_ + 1) * X, -1);
  for (int j = 0; j <= t_; ++j) {
    std::vector<std::size_t> E;
    for (std::size_t u = 0; u < X; ++u)
      if (in_E(j, u) || (!literal_ && u == 0)) E.push_back(u);
    for (int l = m_; l >= 0; --l) {
      const std::size_t W = ipow(static_cast<std::size_t>(q_), m_ - l);
      for (std::size_t e : E)
        for (std::size_t w = 0; w < W; ++w) {
          int& slot = ell_[static_cast<std::size_t>(j) * X + xq_->add(e, w)];
          if (slot < 0) slot = l;
        }
    }
  }

  std::vector<Dist> norms(size());
  const Dist unit = Dist{1} << m_;
  for (Point g = 0; g < size(); ++g) {
    std::size_t u = u_of(g), v = v_of(g);
    int j = jv(v);
    Dist key = 0;
    if (v != 0) key += (Dist{1} << (2 * j)) * unit;
    if (u != 0) key += Dist{1} << (m_ - ell(j, u));
    norms[g] = key;
  }
  set_norms(std::move(norms));
}

bool DoublingProductSpace::in_E(int j, std::size_t u) const {
  if (j == 0) return u == 0;
  return xq_->level(u) == level_of_index(j);
}

int DoublingProductSpace::jv(std::size_t v) const {
  int j = 0;
  std::size_t cap = 1;
  while (v >= cap) {
    cap *= static_cast<std::size_t>(q_);
    ++j;
  }
  return j;
}

BallStructureTable DoublingProductSpace::ball_structure() const {
  BallStructureTable table;
  const Dist s = Dist{1} << m_;
  const std::size_t X = xq_size();
  auto Vcap = [&](int j) { return ipow(static_cast<std::size_t>(q_), j); };
  auto radius = [&](Dist key) { return Rational(key, s).str(); };

  table.bands.push_back(compare_band(*this, "{0}", "0", radius(1), 0, 0, [](Point g) { return g == 0; }));
  for (int l = m_; l >= 1; --l) {
    Dist lo = Dist{1} << (m_ - l), hi = Dist{1} << (m_ - l + 1);
    table.bands.push_back(compare_band(*this, "W_{-" + std::to_string(l) + "} x {0}", radius(lo), radius(hi), lo,
                                       hi - 1, [&, l](Point g) { return v_of(g) == 0 && in_W(u_of(g), l); }));
  }
  table.bands.push_back(compare_band(*this, "X_q x {0}", radius(s), radius(4 * s), s, 4 * s - 1,
                                     [&](Point g) { return v_of(g) == 0; }));
  for (int j = 1; j <= t_; ++j) {
    const Dist base = (Dist{1} << (2 * j)) * s;
    const std::size_t Vj = Vcap(j), Vj1 = Vcap(j - 1);
    const std::string J = std::to_string(j);
    const std::string tail = ") u (X_q x V_" + std::to_string(j - 1) + ")";
    table.bands.push_back(compare_band(*this, "({0} x V_" + J + tail, radius(base), radius(base + 1), base, base,
                                       [&, Vj, Vj1](Point g) {
                                         std::size_t v = v_of(g);
                                         return v < Vj1 || (v < Vj && u_of(g) == 0);
                                       }));
    for (int l = m_; l >= 1; --l) {
      Dist lo = base + (Dist{1} << (m_ - l)), hi = base + (Dist{1} << (m_ - l + 1));
      std::string Ej = "(E_" + J + " u {0})";
      std::string form = l == m_ ? "(" + Ej + " x V_" + J + tail
                                 : "((" + Ej + " + W_{-" + std::to_string(l) + "}) x V_" + J + tail;
      table.bands.push_back(compare_band(*this, form, radius(lo), radius(hi), lo, hi - 1,
                                         [&, j, l, Vj, Vj1](Point g) {
                                           std::size_t u = u_of(g), v = v_of(g);
                                           return v < Vj1 || (v < Vj && (in_level_flag(j, u, l)));
                                         }));
    }
    if (j < t_) {
      Dist lo = base + s, hi = (Dist{1} << (2 * j + 2)) * s;
      table.bands.push_back(compare_band(*this, "X_q x V_" + J, radius(lo), radius(hi), lo, hi - 1,
                                         [&, Vj](Point g) { return v_of(g) < Vj; }));
    }
  }
  const Dist top = (Dist{1} << (2 * t_)) * s + s;
  BallBand last = compare_band(*this, "X", radius(top), "inf", top, std::max(top, levels().back()),
                               [](Point) { return true; });
  table.bands.push_back(last);
  (void)X;
  table.coverage = covered(table, levels());
  return table;
}

nlohmann::json DoublingProductSpace::descriptor() const {
  return {{"type", "doubling_product"},
          {"params", {{"q", q_}, {"t", t_}, {"m", m_}, {"literal", literal_}, {"points", size()}}},
          {"scale", scale().to_json()}};
}

// ---------------------------------------------------------------------------

namespace {

int m_or_default(int k, int m) {
  if (m > 0) return m;
  return QuadraticLevelSpace::default_dimension(static_cast<int>(ipow(3, k)));
}

}  // namespace

ADRegularSpace::ADRegularSpace(int k, int t, int n, int m)
    : GroupSpace(std::vector<std::uint32_t>(static_cast<std::size_t>(m_or_default(k, m) * k + t), 3u),
                 DistScale::exponent(3, n, -m_or_default(k, m) * k + 1)),
      k_(k), q_(static_cast<int>(ipow(3, k))), t_(t), n_(n), m_(m_or_default(k, m)), M_(m_ * k) {
  if (k < 1 || k > 3) throw SchemaError("ad_regular_space needs 1 <= k <= 3");
  if (t < 1 || t > q_) throw SchemaError("ad_regular_space needs 1 <= t <= q");
  if (n < 1) throw SchemaError("ad_regular_space needs n >= 1");
  xq_ = std::make_unique<QuadraticLevelSpace>(FiniteField(3, k), m_);

  std::vector<Dist> norms(size());
  for (Point g = 0; g < size(); ++g) {
    std::size_t u = u_of(g), v = v_of(g);
    int j;
    if (v == 0) {
      int digits = 0;
      for (std::size_t x = u; x > 0; x /= 3) ++digits;
      j = digits - M_;  // -M for u = 0
    } else {
      const int jvv = jv(v);
      j = jvv;
      for (int l = jvv; l <= t_; ++l)
        if (in_E(l, u)) {
          j = std::min(j, std::max(1, l - k_));
          break;
        }
    }
    norms[g] = key_of(j);
  }
  set_norms(std::move(norms));
}

bool ADRegularSpace::in_E(int l, std::size_t u) const { return xq_->level(u) == level_of_index(l); }

int ADRegularSpace::jv(std::size_t v) const {
  int j = 0;
  for (std::size_t cap = 1; v >= cap; cap *= 3) ++j;
  return j;
}

std::vector<char> ADRegularSpace::B(int j) const {
  if (j < -M_ || j > t_) throw std::out_of_range("B_j index");
  std::vector<char> b(size(), 0);
  for (Point g = 0; g < size(); ++g) {
    std::size_t u = u_of(g), v = v_of(g);
    if (j <= 0) {
      b[g] = v == 0 && u < ipow(3, M_ + j);
      continue;
    }
    bool in = v < ipow(3, j);
    const int top = std::min(j + k_, t_);
    for (int l = 1; l <= top && !in; ++l) in = v < ipow(3, l) && in_E(l, u);
    b[g] = in;
  }
  return b;
}

bool ADRegularSpace::nesting_holds() const {
  std::vector<char> prev = B(-M_);
  for (Point g = 0; g < size(); ++g)
    if (prev[g] != (g == 0)) return false;
  for (int j = -M_ + 1; j <= t_; ++j) {
    std::vector<char> cur = B(j);
    for (Point g = 0; g < size(); ++g)
      if (prev[g] && !cur[g]) return false;
    prev.swap(cur);
  }
  return std::all_of(prev.begin(), prev.end(), [](char c) { return c != 0; });
}

BallStructureTable ADRegularSpace::ball_structure() const {
  BallStructureTable table;
  for (int j = -M_; j <= t_; ++j) {
    std::vector<char> b = B(j);
    const Dist key = key_of(j);
    std::string lo = j == -M_ ? "0" : "3^(" + std::to_string(j) + "/" + std::to_string(n_) + ")";
    std::string hi = "3^(" + std::to_string(j + 1) + "/" + std::to_string(n_) + ")";
    table.bands.push_back(compare_band(*this, "B_" + std::to_string(j), lo, hi, key, key,
                                       [&b](Point g) { return b[g] != 0; }));
  }
  table.coverage = covered(table, levels());
  return table;
}

std::vector<ADWindowRow> ADRegularSpace::window() const {
  std::vector<ADWindowRow> rows;
  const auto X = static_cast<std::int64_t>(xq_size());
  for (int j = -M_ + 1; j <= t_; ++j) {
    std::size_t meas = ball_count(key_of(j));
    Rational ratio(static_cast<std::int64_t>(meas), X);
    Rational p3 = j >= 0 ? Rational(static_cast<std::int64_t>(ipow(3, j)))
                         : Rational(1, static_cast<std::int64_t>(ipow(3, -j)));
    rows.push_back({j, meas, ratio, p3 <= ratio && ratio <= Rational(4) * p3});
  }
  return rows;
}

TripleMarginReport ADRegularSpace::triple_margin() const {
  TripleMarginReport rep;
  const DistScale& sc = scale();
  for (int j = -M_ + 1; j <= t_; ++j)
    for (int j1 = j; j1 <= t_; ++j1) {
      const Dist sum = sc.sum(key_of(j), key_of(j1));
      for (int j2 = -M_ + 1; j2 <= t_; ++j2) {
        if (key_of(j2) <= sum) continue;
        ++rep.in_range;
        if (j1 >= 1 && j2 <= j1 + k_) ++rep.violations;
      }
    }
  rep.pass = rep.violations == 0;
  return rep;
}

nlohmann::json ADRegularSpace::descriptor() const {
  return {{"type", "ad_regular"},
          {"params", {{"k", k_}, {"q", q_}, {"m", m_}, {"M", M_}, {"t", t_}, {"n", n_}, {"points", size()}}},
          {"scale", scale().to_json()}};
}

// ---------------------------------------------------------------------------

namespace {

int get_int(const nlohmann::json& p, const char* key) {
  if (!p.contains(key) || !p[key].is_number_integer()) throw SchemaError(std::string("missing integer param ") + key);
  return p[key].get<int>();
}

int get_int_or(const nlohmann::json& p, const char* key, int def) {
  if (!p.contains(key)) return def;
  if (!p[key].is_number_integer()) throw SchemaError(std::string("param must be an integer: ") + key);
  return p[key].get<int>();
}

}  // namespace

ConstructionSpec ConstructionSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw SchemaError("construction spec needs a string 'kind'");
  ConstructionSpec s{j["kind"].get<std::string>(), j.value("params", nlohmann::json::object())};
  if (!s.params.is_object()) throw SchemaError("construction 'params' must be an object");
  static const std::vector<std::string> kinds = {"star",       "euclidean_star", "torus",
                                                 "doubling_product", "ad_regular", "kary_tree"};
  if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end())
    throw SchemaError("unknown construction kind: " + s.kind);
  return s;
}

RadiiSet DoublingProductSpace::lacunary_radii() const {
  std::vector<Dist> keys;
  for (int l = m_; l >= 0; --l) keys.push_back(Dist{1} << (m_ - l));
  for (int i = 1; i <= 2 * t_ + 1; ++i) keys.push_back((Dist{1} << (i + m_)) + 1);
  return RadiiSet::from_keys(keys, true);
}

SpacePtr build_space(const ConstructionSpec& spec) {
  const auto& p = spec.params;
  if (spec.kind == "star") return star_space(get_int(p, "K"));
  if (spec.kind == "euclidean_star") return euclidean_star(get_int(p, "n"));
  if (spec.kind == "torus") {
    int N = get_int(p, "N");
    if (N < 1) throw SchemaError("torus needs N >= 1");
    return torus(static_cast<std::size_t>(N));
  }
  if (spec.kind == "doubling_product")
    return std::make_shared<DoublingProductSpace>(get_int(p, "q"), get_int(p, "t"), get_int_or(p, "m", 0),
                                                  p.value("literal", false));
  if (spec.kind == "ad_regular")
    return std::make_shared<ADRegularSpace>(get_int(p, "k"), get_int(p, "t"), get_int(p, "n"), get_int_or(p, "m", 0));
  if (spec.kind == "kary_tree") return std::make_shared<KaryTree>(get_int(p, "k"), get_int(p, "D"));
  throw SchemaError("unknown construction kind: " + spec.kind);
}

}  // namespace maxlab
