#include "maxlab/kary_tree.hpp"

#include <algorithm>

namespace maxlab {

KaryTree::KaryTree(int k, int D) : k_(k), D_(D), scale_(DistScale::integer(1)) {
  if (k < 2) throw SchemaError("kary_tree needs k >= 2");
  if (D < 0) throw SchemaError("kary_tree needs D >= 0");
  // Infinite sphere sizes reach k^{2D}; keep them inside 64 bits.
  long double top = 1;
  for (int i = 0; i < 2 * D + 1; ++i) top *= k;
  if (top > 1.8e19L) throw BudgetExceeded("kary_tree: k^(2D+1) overflows 64-bit sphere counts");
  pow_.assign(static_cast<std::size_t>(2 * D + 2), 1);
  for (std::size_t i = 1; i < pow_.size(); ++i) pow_[i] = pow_[i - 1] * static_cast<std::size_t>(k);
  n_ = 0;
  for (int j = 0; j <= D; ++j) {
    level_begin_.push_back(n_);
    n_ += pow_[static_cast<std::size_t>(j)];
  }
  level_begin_.push_back(n_);
  require_budget(n_, "kary_tree");
}

int KaryTree::depth(Point x) const {
  auto it = std::upper_bound(level_begin_.begin(), level_begin_.end(), x);
  return static_cast<int>(it - level_begin_.begin()) - 1;
}

Point KaryTree::ancestor(Point x, int m) const {
  for (int i = 0; i < m; ++i) x = parent(x);
  return x;
}

Dist KaryTree::dist(Point x, Point y) const {
  int dx = depth(x), dy = depth(y);
  Dist d = 0;
  while (dx > dy) {
    x = parent(x);
    --dx;
    ++d;
  }
  while (dy > dx) {
    y = parent(y);
    --dy;
    ++d;
  }
  while (x != y) {
    x = parent(x);
    y = parent(y);
    d += 2;
  }
  return d;
}

std::pair<Point, Point> KaryTree::descendants(Point a, int s) const {
  const std::size_t ks = pow_[static_cast<std::size_t>(s)];
  const Point first = a * ks + (ks - 1) / static_cast<std::size_t>(k_ - 1);
  return {first, first + ks};
}

std::vector<std::pair<Point, Point>> KaryTree::sphere_ranges(Point x, int r) const {
  std::vector<std::pair<Point, Point>> out;
  if (r < 0) return out;
  const int h = depth(x);
  Point a = x, prev = x;
  for (int m = 0; m <= std::min(r, h); ++m) {
    if (m > 0) {
      prev = a;
      a = parent(a);
    }
    const int s = r - m;
    if (s == 0) {
      out.emplace_back(a, a + 1);
      continue;
    }
    if (h - m + s > D_) continue;
    auto all = descendants(a, s);
    if (m == 0) {
      out.push_back(all);
      continue;
    }
    auto skip = descendants(prev, s - 1);
    if (all.first < skip.first) out.emplace_back(all.first, skip.first);
    if (skip.second < all.second) out.emplace_back(skip.second, all.second);
  }
  return out;
}

std::vector<Point> KaryTree::sphere(Point x, int r) const {
  std::vector<Point> out;
  for (auto [lo, hi] : sphere_ranges(x, r))
    for (Point p = lo; p < hi; ++p) out.push_back(p);
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t KaryTree::sphere_size(Point x, int r) const {
  std::uint64_t c = 0;
  for (auto [lo, hi] : sphere_ranges(x, r)) c += hi - lo;
  return c;
}

std::uint64_t KaryTree::sphere_size_infinite(Point x, int r) const {
  if (r < 0) return 0;
  const int h = depth(x);
  std::uint64_t c = 0;
  for (int m = 0; m <= std::min(r, h); ++m) {
    const int s = r - m;
    if (s == 0)
      c += 1;
    else if (m == 0)
      c += pow_[static_cast<std::size_t>(s)];
    else
      c += pow_[static_cast<std::size_t>(s)] - pow_[static_cast<std::size_t>(s - 1)];
  }
  return c;
}

std::uint64_t KaryTree::ball_size(Point x, int r) const {
  std::uint64_t c = 0;
  for (int i = 0; i <= r; ++i) c += sphere_size(x, i);
  return c;
}

std::uint64_t KaryTree::ball_size_infinite(Point x, int r) const {
  std::uint64_t c = 0;
  for (int i = 0; i <= r; ++i) c += sphere_size_infinite(x, i);
  return c;
}

nlohmann::json KaryTree::descriptor() const {
  return {{"type", "kary_tree"}, {"params", {{"k", k_}, {"D", D_}, {"points", n_}}}, {"scale", scale_.to_json()}};
}

}  // namespace maxlab
