#include "maxlab/group.hpp"

#include <stdexcept>

namespace maxlab {

AbelianGroup::AbelianGroup(std::vector<std::uint32_t> moduli) : moduli_(std::move(moduli)), size_(1) {
  for (auto n : moduli_) {
    if (n == 0) throw std::invalid_argument("zero modulus");
    stride_.push_back(size_);
    size_ *= n;
  }
}

std::size_t AbelianGroup::add(std::size_t a, std::size_t b) const {
  std::size_t r = 0;
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    const std::size_t n = moduli_[i];
    std::size_t s = a % n + b % n;
    if (s >= n) s -= n;
    r += s * stride_[i];
    a /= n;
    b /= n;
  }
  return r;
}

std::size_t AbelianGroup::neg(std::size_t a) const {
  std::size_t r = 0;
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    const std::size_t n = moduli_[i];
    std::size_t c = a % n;
    r += (c == 0 ? 0 : n - c) * stride_[i];
    a /= n;
  }
  return r;
}

std::size_t AbelianGroup::sub(std::size_t a, std::size_t b) const {
  std::size_t r = 0;
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    const std::size_t n = moduli_[i];
    std::size_t x = a % n, y = b % n;
    r += (x >= y ? x - y : x + n - y) * stride_[i];
    a /= n;
    b /= n;
  }
  return r;
}

std::uint32_t AbelianGroup::component(std::size_t a, std::size_t i) const {
  return static_cast<std::uint32_t>((a / stride_.at(i)) % moduli_[i]);
}

}  // namespace maxlab
