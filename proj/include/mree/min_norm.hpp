#pragma once

#include <vector>

namespace mree {

// Wolfe's algorithm: convex weights lambda over `points` such that
// sum_k lambda_k points[k] is the point of their convex hull closest to the origin.
std::vector<double> min_norm_point(const std::vector<std::vector<double>> &points, int max_iter = 1000);

} // namespace mree
