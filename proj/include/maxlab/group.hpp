#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace maxlab {

/// Finite abelian group Z_{n_0} x ... x Z_{n_{D-1}} with elements indexed in
/// mixed radix (component 0 least significant).
class AbelianGroup {
 public:
  explicit AbelianGroup(std::vector<std::uint32_t> moduli);

  std::size_t size() const { return size_; }
  const std::vector<std::uint32_t>& moduli() const { return moduli_; }

  std::size_t add(std::size_t a, std::size_t b) const;
  std::size_t sub(std::size_t a, std::size_t b) const;
  std::size_t neg(std::size_t a) const;
  std::uint32_t component(std::size_t a, std::size_t i) const;

 private:
  std::vector<std::uint32_t> moduli_;
  std::vector<std::size_t> stride_;
  std::size_t size_;
};

}  // namespace maxlab
