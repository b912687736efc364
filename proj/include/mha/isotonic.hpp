#pragma once

#include <span>
#include <vector>

namespace mha {

/// Least-squares projection of y onto nondecreasing sequences (pool adjacent
/// violators). Weights default to 1 when `w` is empty.
std::vector<double> isotonic_regression(std::span<const double> y, std::span<const double> w = {});

/// Euclidean projection of y onto sequences x with
/// 0 <= x[0] - lower, x[k+1] - x[k], upper - x[n-1] <= cap
/// (nondecreasing between fixed end values, every increment at most cap).
/// Dykstra alternation between two isotonic projections; the result is
/// exactly nondecreasing and within [lower, upper].
std::vector<double> bounded_increment_projection(std::span<const double> y, double lower, double upper, double cap);

}  // namespace mha
