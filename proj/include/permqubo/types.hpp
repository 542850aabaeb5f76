#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace permqubo {

/// order[j] = object placed in slot j.
using Permutation = std::vector<int>;

bool is_permutation(std::span<const int> order, std::size_t n);
Permutation identity_permutation(std::size_t n);

/// n-by-n 0/1 matrix; bits(v, j) = 1 iff object v sits in slot j.
/// Flattened variable index is v * n + j everywhere in the library.
class BinarySolution {
 public:
  BinarySolution() = default;
  explicit BinarySolution(std::size_t n) : n_(n), bits_(n * n, 0) {}
  BinarySolution(std::size_t n, std::vector<std::uint8_t> flat);

  static BinarySolution from_permutation(std::span<const int> order);

  std::size_t n() const noexcept { return n_; }
  std::uint8_t operator()(std::size_t v, std::size_t j) const noexcept { return bits_[v * n_ + j]; }
  void set(std::size_t v, std::size_t j, bool on) noexcept { bits_[v * n_ + j] = on ? 1 : 0; }

  std::span<const std::uint8_t> flat() const noexcept { return bits_; }
  std::size_t ones() const noexcept;

  friend bool operator==(const BinarySolution&, const BinarySolution&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

constexpr std::size_t flat_index(std::size_t v, std::size_t j, std::size_t n) noexcept { return v * n + j; }

}  // namespace permqubo
