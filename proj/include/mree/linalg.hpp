#pragma once

#include <vector>

namespace mree {

// Dense m x = rhs by Gaussian elimination with partial pivoting. Returns false
// when a pivot falls below 1e-13 times the largest entry of m.
bool solve_dense(std::vector<std::vector<double>> m, std::vector<double> rhs, std::vector<double> &x);

} // namespace mree
