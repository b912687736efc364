#pragma once

// Helpers shared by the unit tests and the acceptance binary. The oracles
// here are deliberately naive so they do not share code paths with src/.

#include "mha/curve.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace mha::test {

// Signed crossings of the rightward ray from p (upward +1, downward -1).
inline int ray_crossing_winding(const ClosedCurve& c, const Vec2& p) {
  int w = 0;
  for (int i = 0; i < c.size(); ++i) {
    const Vec2& a = c.point(i);
    const Vec2& b = c.point((i + 1) % c.size());
    const bool up = a.y() <= p.y() && b.y() > p.y();
    const bool down = b.y() <= p.y() && a.y() > p.y();
    if (!up && !down) continue;
    const double x = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
    if (x > p.x()) w += up ? 1 : -1;
  }
  return w;
}

// O(n^2) scan over lifted samples at parameter gap >= g.
inline double brute_lift_separation(const LiftedCurve& l, double g) {
  double best = INFINITY;
  const auto& p = l.points();
  const auto& t = l.base().params();
  for (size_t i = 0; i < p.size(); ++i) {
    for (size_t j = i + 1; j < p.size(); ++j) {
      double d = std::abs(t[i] - t[j]);
      d = std::min(d, kTwoPi - d);
      if (d >= g) best = std::min(best, (p[i] - p[j]).norm());
    }
  }
  return best;
}

// Random trigonometric curve with a forced double point at samples k and
// k + n/2: gamma = c - (c(t1) - c(t2)) (1 + cos(t - t1)) / 2.
inline ClosedCurve random_double_point_curve(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> coef(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n / 2 - 1);
  const int modes = 4;
  std::vector<double> ax(modes), bx(modes), ay(modes), by(modes);
  for (int m = 0; m < modes; ++m) {
    const double s = 1.0 / (m + 1);
    ax[m] = s * coef(rng);
    bx[m] = s * coef(rng);
    ay[m] = s * coef(rng);
    by[m] = s * coef(rng);
  }
  auto c = [&](double t) {
    Vec2 v = Vec2::Zero();
    for (int m = 0; m < modes; ++m) {
      v.x() += ax[m] * std::cos((m + 1) * t) + bx[m] * std::sin((m + 1) * t);
      v.y() += ay[m] * std::cos((m + 1) * t) + by[m] * std::sin((m + 1) * t);
    }
    return v;
  };
  const int k = pick(rng);
  const double t1 = kTwoPi * k / n;
  const double t2 = t1 + kPi;
  const Vec2 gap = c(t1) - c(t2);
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    const double t = kTwoPi * i / n;
    pts.push_back(c(t) - gap * (0.5 * (1.0 + std::cos(t - t1))));
  }
  return ClosedCurve::from_points(std::move(pts));
}

}  // namespace mha::test
