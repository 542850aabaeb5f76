#pragma once

#include <vector>

#include "permqubo/matrix.hpp"
#include "permqubo/types.hpp"

namespace permqubo {

struct Assignment {
  std::vector<int> row_to_col;
  double total = 0.0;
};

/// Minimum-cost perfect assignment of a square matrix. Among optimal
/// assignments the lexicographically smallest row_to_col is returned.
Assignment hungarian(const Matrix& cost);

/// Minimum-cost assignment of every row to a distinct column, rows <= cols.
/// No tie-break guarantee.
Assignment rectangular_assignment(const Matrix& cost);

/// Each row goes to one group; group g receives between lower and upper rows.
/// Solved exactly as a slot assignment. Throws Capacity when infeasible.
std::vector<int> capacitated_assignment(const Matrix& cost, int lower, int upper);

struct Projection {
  BinarySolution bits;
  Permutation order;  // decoded slot order
  int distance = 0;   // Hamming distance to the input
};

/// Nearest permutation matrix in Hamming distance, via hungarian on 1 - 2z.
Projection project(const BinarySolution& z);

}  // namespace permqubo
