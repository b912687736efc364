#include "mha/isotonic.hpp"

#include "mha/error.hpp"

#include <algorithm>
#include <cmath>

namespace mha {

std::vector<double> isotonic_regression(std::span<const double> y, std::span<const double> w) {
  if (!w.empty() && w.size() != y.size()) fail(ErrorKind::kDomain, "isotonic weights do not match values");
  struct Block {
    double mean;
    double weight;
    size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    Block b{y[i], w.empty() ? 1.0 : w[i], 1};
    while (!blocks.empty() && blocks.back().mean > b.mean) {
      const Block& prev = blocks.back();
      const double weight = prev.weight + b.weight;
      b = {(prev.mean * prev.weight + b.mean * b.weight) / weight, weight, prev.count + b.count};
      blocks.pop_back();
    }
    blocks.push_back(b);
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean);
  return out;
}

namespace {

// Nondecreasing projection clamped to [lo, hi]; clamping the unconstrained
// fit is exact for box-bounded isotonic regression.
std::vector<double> monotone_box(std::span<const double> y, double lo, double hi) {
  std::vector<double> x = isotonic_regression(y);
  for (double& v : x) v = std::clamp(v, lo, hi);
  return x;
}

}  // namespace

std::vector<double> bounded_increment_projection(std::span<const double> y, double lower, double upper, double cap) {
  const size_t n = y.size();
  if (!(cap > 0.0) || upper < lower) fail(ErrorKind::kDomain, "invalid increment bounds");
  if (static_cast<double>(n + 1) * cap < (upper - lower) * (1.0 - 1e-12)) {
    fail(ErrorKind::kConfiguration, "increment cap too small to span the interval");
  }
  if (n == 0) return {};

  // Second set in shifted coordinates psi_k = x_k - (k+1) cap, which must be
  // nonincreasing between psi_{-1} = lower and psi_n = upper - (n+1) cap.
  auto capped = [&](const std::vector<double>& z) {
    std::vector<double> neg(n);
    for (size_t k = 0; k < n; ++k) neg[k] = -(z[k] - static_cast<double>(k + 1) * cap);
    std::vector<double> fit = monotone_box(neg, -lower, -(upper - static_cast<double>(n + 1) * cap));
    for (size_t k = 0; k < n; ++k) fit[k] = -fit[k] + static_cast<double>(k + 1) * cap;
    return fit;
  };

  std::vector<double> x(y.begin(), y.end());
  std::vector<double> p(n, 0.0), q(n, 0.0), a(n), b(n), tmp(n);
  const double scale = std::max({1.0, std::abs(lower), std::abs(upper)});
  for (int it = 0; it < 10000; ++it) {
    for (size_t k = 0; k < n; ++k) tmp[k] = x[k] + p[k];
    a = monotone_box(tmp, lower, upper);
    for (size_t k = 0; k < n; ++k) p[k] = tmp[k] - a[k];
    for (size_t k = 0; k < n; ++k) tmp[k] = a[k] + q[k];
    b = capped(tmp);
    for (size_t k = 0; k < n; ++k) q[k] = tmp[k] - b[k];
    double gap = 0.0, move = 0.0;
    for (size_t k = 0; k < n; ++k) {
      gap = std::max(gap, std::abs(a[k] - b[k]));
      move = std::max(move, std::abs(b[k] - x[k]));
    }
    x = b;
    if (gap <= 1e-14 * scale && move <= 1e-14 * scale) break;
  }
  return monotone_box(x, lower, upper);
}

}  // namespace mha
