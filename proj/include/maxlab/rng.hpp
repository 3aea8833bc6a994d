#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace maxlab {

/// splitmix64 finalizer; also used to derive per-trial seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for trial i under a master seed. Independent of thread layout.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t i) {
  return splitmix64(master ^ splitmix64(i + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Exponential with the given rate.
  double exponential(double rate);
  std::uint64_t poisson(double mean);

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Walker alias table for repeated draws from a fixed discrete law.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights);
  std::size_t draw(Rng& rng) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace maxlab
