#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace maxlab {

using Point = std::size_t;
/// Monotone integer encoding of a distance; see DistScale.
using Dist = std::int64_t;

/// Raised when a computation would exceed the configured point/work budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the partition sampler when its center-draw cap is hit.
class SeedCapExceeded : public std::runtime_error {
 public:
  SeedCapExceeded(const std::string& what, std::uint64_t seed)
      : std::runtime_error(what), seed_(seed) {}
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Invalid input to a builder or manifest.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Global point-count budget (default 2e7). MAXLAB_BUDGET overrides the default.
std::uint64_t budget();
void set_budget(std::uint64_t b);
void require_budget(std::uint64_t work, const std::string& what);

/// Worker count for data-parallel loops (MAXLAB_THREADS, else hardware).
unsigned thread_count();
void set_thread_count(unsigned n);

/// Runs body(i) for i in [0, n). Each index must only write its own slot,
/// so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace maxlab
