#pragma once

#include <utility>
#include <vector>

#include "maxlab/mms.hpp"

namespace maxlab {

/// Rooted k-ary tree truncated at depth D with the graph metric and counting
/// measure. Vertices use heap indexing: root 0, children of x are k x + 1 .. k x + k.
class KaryTree : public Space {
 public:
  KaryTree(int k, int D);

  int k() const { return k_; }
  int D() const { return D_; }
  std::size_t size() const override { return n_; }
  Dist dist(Point x, Point y) const override;
  const DistScale& scale() const override { return scale_; }
  nlohmann::json descriptor() const override;

  int depth(Point x) const;
  Point parent(Point x) const { return (x - 1) / static_cast<Point>(k_); }
  Point child(Point x, int i) const { return static_cast<Point>(k_) * x + 1 + static_cast<Point>(i); }
  /// Ancestor m steps up (m <= depth(x)).
  Point ancestor(Point x, int m) const;
  /// Level T_j = vertices at depth j, as [begin, begin + level_size(j)).
  Point level_begin(int j) const { return level_begin_[static_cast<std::size_t>(j)]; }
  std::size_t level_size(int j) const { return pow_[static_cast<std::size_t>(j)]; }
  /// Descendants of a at relative depth s, as a half-open index range (not clipped).
  std::pair<Point, Point> descendants(Point a, int s) const;

  /// S(x, r) inside the truncated tree, as disjoint index ranges.
  std::vector<std::pair<Point, Point>> sphere_ranges(Point x, int r) const;
  std::vector<Point> sphere(Point x, int r) const;
  /// |S(x, r)| in the truncated tree.
  std::uint64_t sphere_size(Point x, int r) const;
  /// |S(x, r)| in the infinite k-ary tree, for the same vertex.
  std::uint64_t sphere_size_infinite(Point x, int r) const;
  /// |B(x, r)| truncated / infinite.
  std::uint64_t ball_size(Point x, int r) const;
  std::uint64_t ball_size_infinite(Point x, int r) const;

 private:
  int k_, D_;
  std::size_t n_;
  std::vector<std::size_t> pow_;  // k^j, j = 0..2D+1
  std::vector<Point> level_begin_;
  DistScale scale_;
};

}  // namespace maxlab
