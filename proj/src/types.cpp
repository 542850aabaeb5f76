#include "permqubo/types.hpp"

#include <numeric>

#include "permqubo/error.hpp"

namespace permqubo {

bool is_permutation(std::span<const int> order, std::size_t n) {
  if (order.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (int v : order) {
    if (v < 0 || static_cast<std::size_t>(v) >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

BinarySolution::BinarySolution(std::size_t n, std::vector<std::uint8_t> flat) : n_(n), bits_(std::move(flat)) {
  require(bits_.size() == n_ * n_, ErrorKind::Dimension, "bitstring length is not n*n");
  for (auto& b : bits_) b = b ? 1 : 0;
}

BinarySolution BinarySolution::from_permutation(std::span<const int> order) {
  require(is_permutation(order, order.size()), ErrorKind::InvalidSolution, "not a permutation");
  BinarySolution x(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) x.set(order[j], j, true);
  return x;
}

std::size_t BinarySolution::ones() const noexcept {
  std::size_t c = 0;
  for (auto b : bits_) c += b;
  return c;
}

}  // namespace permqubo
