#include "mha/curve.hpp"

#include "mha/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mha {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b, double* frac) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(d) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  if (frac != nullptr) *frac = s;
  return (a + s * d - p).norm();
}

struct SegmentContact {
  double distance;
  double s;  // fraction along the first segment
  double u;  // fraction along the second segment
};

SegmentContact segment_contact(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
  const Vec2 r = a1 - a0;
  const Vec2 q = b1 - b0;
  const double denom = cross2(r, q);
  if (denom != 0.0) {
    const double s = cross2(b0 - a0, q) / denom;
    const double u = cross2(b0 - a0, r) / denom;
    if (s >= 0.0 && s <= 1.0 && u >= 0.0 && u <= 1.0) return {0.0, s, u};
  }
  SegmentContact best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  double f = 0.0;
  double d = point_segment_distance(a0, b0, b1, &f);
  if (d < best.distance) best = {d, 0.0, f};
  d = point_segment_distance(a1, b0, b1, &f);
  if (d < best.distance) best = {d, 1.0, f};
  d = point_segment_distance(b0, a0, a1, &f);
  if (d < best.distance) best = {d, f, 0.0};
  d = point_segment_distance(b1, a0, a1, &f);
  if (d < best.distance) best = {d, f, 1.0};
  return best;
}

int circular_index_distance(int a, int b, int n) {
  const int d = std::abs(a - b) % n;
  return std::min(d, n - d);
}

}  // namespace

double wrap_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double circular_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return std::min(d, kTwoPi - d);
}

// ---------------------------------------------------------------------------
// ClosedCurve

ClosedCurve::ClosedCurve(std::vector<double> params, std::vector<Vec2> points)
    : params_(std::move(params)), points_(std::move(points)) {
  const size_t n = points_.size();
  if (n < 3) fail(ErrorKind::kInvalidCurve, "curve needs at least 3 samples, got " + std::to_string(n));
  if (params_.size() != n) fail(ErrorKind::kInvalidCurve, "params and points differ in length");
  if (params_[0] != 0.0) fail(ErrorKind::kInvalidCurve, "first parameter must be 0");
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(params_[i]) || params_[i] < 0.0 || params_[i] >= kTwoPi)
      fail(ErrorKind::kInvalidCurve, "parameter out of [0, 2pi) at sample " + std::to_string(i));
    if (i > 0 && !(params_[i] > params_[i - 1]))
      fail(ErrorKind::kInvalidCurve, "parameters not strictly increasing at sample " + std::to_string(i));
    if (!points_[i].allFinite()) fail(ErrorKind::kInvalidCurve, "non-finite point at sample " + std::to_string(i));
  }
  for (size_t i = 0; i < n; ++i) {
    const double len = (points_[(i + 1) % n] - points_[i]).norm();
    if (!(len > 0.0))
      fail(ErrorKind::kInvalidCurve, "zero-length segment starting at sample " + std::to_string(i));
    length_ += len;
  }
  if (!std::isfinite(length_)) fail(ErrorKind::kInvalidCurve, "curve length is not finite");
}

ClosedCurve ClosedCurve::from_points(std::vector<Vec2> points) {
  const size_t n = points.size();
  std::vector<double> params(n);
  for (size_t i = 0; i < n; ++i) params[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
  return ClosedCurve(std::move(params), std::move(points));
}

double ClosedCurve::param_step(int i) const {
  const int n = size();
  return (i + 1 < n ? param(i + 1) : kTwoPi) - param(i);
}

double ClosedCurve::segment_length(int i) const {
  return (point((i + 1) % size()) - point(i)).norm();
}

double ClosedCurve::diameter() const {
  double d = 0.0;
  for (size_t i = 0; i < points_.size(); ++i)
    for (size_t j = i + 1; j < points_.size(); ++j) d = std::max(d, (points_[i] - points_[j]).norm());
  return d;
}

double ClosedCurve::max_norm() const {
  double m = 0.0;
  for (const auto& p : points_) m = std::max(m, p.norm());
  return m;
}

double ClosedCurve::lipschitz() const {
  double lip = 0.0;
  for (int i = 0; i < size(); ++i) lip = std::max(lip, segment_length(i) / param_step(i));
  return lip;
}

std::vector<double> ClosedCurve::corner_angles() const {
  const int n = size();
  std::vector<double> angles(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Vec2 in = point(i) - point((i + n - 1) % n);
    const Vec2 out = point((i + 1) % n) - point(i);
    angles[static_cast<size_t>(i)] = std::atan2(cross2(in, out), in.dot(out));
  }
  return angles;
}

int ClosedCurve::segment_at(double t) const {
  const double w = wrap_angle(t);
  const auto it = std::upper_bound(params_.begin(), params_.end(), w);
  return static_cast<int>(it - params_.begin()) - 1;
}

Vec2 ClosedCurve::eval(double t) const {
  const double w = wrap_angle(t);
  const int k = segment_at(w);
  const double s = (w - param(k)) / param_step(k);
  return (1.0 - s) * point(k) + s * point((k + 1) % size());
}

Vec2 ClosedCurve::derivative(double t) const {
  const int k = segment_at(t);
  return (point((k + 1) % size()) - point(k)) / param_step(k);
}

double ClosedCurve::distance_to(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i)
    d = std::min(d, point_segment_distance(p, point(i), point((i + 1) % size()), nullptr));
  return d;
}

// ---------------------------------------------------------------------------
// LiftedCurve

LiftedCurve::LiftedCurve(ClosedCurve base, double epsilon) : base_(std::move(base)), epsilon_(epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    fail(ErrorKind::kDomain, "lift parameter must be finite and nonnegative");
  points4_.reserve(static_cast<size_t>(base_.size()));
  for (int i = 0; i < base_.size(); ++i) {
    const double t = base_.param(i);
    const Vec2& p = base_.point(i);
    points4_.emplace_back(p.x(), p.y(), epsilon_ * std::cos(t), epsilon_ * std::sin(t));
  }
}

Vec4 LiftedCurve::eval(double t) const {
  const double w = wrap_angle(t);
  const int k = base_.segment_at(w);
  const double s = (w - base_.param(k)) / base_.param_step(k);
  return (1.0 - s) * points4_[static_cast<size_t>(k)] + s * points4_[static_cast<size_t>((k + 1) % size())];
}

Vec4 LiftedCurve::derivative(double t) const {
  const int k = base_.segment_at(t);
  return (points4_[static_cast<size_t>((k + 1) % size())] - points4_[static_cast<size_t>(k)]) / base_.param_step(k);
}

// ---------------------------------------------------------------------------
// Operations

ClosedCurve resample_arclength(const ClosedCurve& curve, int n) {
  if (n < 3) fail(ErrorKind::kDomain, "resample count must be >= 3");
  const int m = curve.size();
  std::vector<double> cumulative(static_cast<size_t>(m) + 1, 0.0);
  for (int i = 0; i < m; ++i) {
    const double len = curve.segment_length(i);
    if (!(len > 0.0)) fail(ErrorKind::kInvalidCurve, "zero-length segment starting at sample " + std::to_string(i));
    cumulative[static_cast<size_t>(i) + 1] = cumulative[static_cast<size_t>(i)] + len;
  }
  const double total = cumulative.back();
  const double chord_tol = 1e-12 * total;

  // An input that already meets the stopping test is its own resample; the
  // chord iteration can leave an unstable fixed point from rounding alone.
  if (m == n) {
    double worst = 0.0;
    for (int i = 0; i < m; ++i) worst = std::max(worst, std::abs(curve.segment_length(i) - total / n));
    if (worst <= chord_tol) return ClosedCurve::from_points(curve.points());
  }

  auto at_arc = [&](double s) -> Vec2 {
    s = std::clamp(s, 0.0, total);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
    int k = static_cast<int>(it - cumulative.begin()) - 1;
    k = std::clamp(k, 0, m - 1);
    const double seg = cumulative[static_cast<size_t>(k) + 1] - cumulative[static_cast<size_t>(k)];
    const double f = (s - cumulative[static_cast<size_t>(k)]) / seg;
    return (1.0 - f) * curve.point(k) + f * curve.point((k + 1) % m);
  };

  std::vector<double> arc(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) arc[static_cast<size_t>(k)] = total * k / n;
  std::vector<Vec2> pts(static_cast<size_t>(n));
  auto place = [&] {
    for (int k = 0; k < n; ++k) pts[static_cast<size_t>(k)] = at_arc(arc[static_cast<size_t>(k)]);
  };
  place();

  // Equalize chords: shift each position by the gap between its target and
  // actual cumulative chord length. Arc and chord agree to second order, so
  // this contracts quickly; halving the update keeps positions ordered.
  std::vector<double> chords(static_cast<size_t>(n));
  for (int iter = 0; iter < 200; ++iter) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      chords[static_cast<size_t>(k)] = (pts[static_cast<size_t>((k + 1) % n)] - pts[static_cast<size_t>(k)]).norm();
      sum += chords[static_cast<size_t>(k)];
    }
    const double target = sum / n;
    double worst = 0.0;
    for (double c : chords) worst = std::max(worst, std::abs(c - target));
    if (worst <= chord_tol) break;

    std::vector<double> next(arc);
    double acc = 0.0;
    for (int k = 1; k < n; ++k) {
      acc += chords[static_cast<size_t>(k) - 1];
      next[static_cast<size_t>(k)] = arc[static_cast<size_t>(k)] + (target * k - acc);
    }
    double damping = 1.0;
    for (int attempt = 0; attempt < 30; ++attempt) {
      bool ordered = true;
      double prev = 0.0;
      for (int k = 1; k < n && ordered; ++k) {
        const double v = arc[static_cast<size_t>(k)] + damping * (next[static_cast<size_t>(k)] - arc[static_cast<size_t>(k)]);
        ordered = v > prev && v < total;
        prev = v;
      }
      if (ordered) break;
      damping *= 0.5;
    }
    for (int k = 1; k < n; ++k)
      arc[static_cast<size_t>(k)] += damping * (next[static_cast<size_t>(k)] - arc[static_cast<size_t>(k)]);
    place();
  }
  return ClosedCurve::from_points(std::move(pts));
}

LiftedCurve lift(const ClosedCurve& curve, double epsilon) { return LiftedCurve(curve, epsilon); }

double min_lift_separation(const LiftedCurve& lifted, double param_gap) {
  if (!(param_gap > 0.0) || param_gap >= kPi)
    fail(ErrorKind::kDomain, "param_gap must lie in (0, pi)");
  const auto& pts = lifted.points();
  const auto& params = lifted.base().params();
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      if (circular_distance(params[i], params[j]) < param_gap) continue;
      best = std::min(best, (pts[i] - pts[j]).norm());
    }
  }
  return best;
}

double default_curve_tolerance(const ClosedCurve& curve) { return 1e-9 * curve.length(); }

int IntersectionReport::transverse_count() const {
  return static_cast<int>(std::count_if(crossings.begin(), crossings.end(),
                                        [](const Crossing& c) { return c.kind == CrossingKind::kTransverse; }));
}

int IntersectionReport::tangential_count() const {
  return static_cast<int>(crossings.size()) - transverse_count();
}

IntersectionReport self_intersections(const ClosedCurve& curve, double tol) {
  if (!(tol > 0.0)) fail(ErrorKind::kDomain, "intersection tolerance must be positive");
  const int n = curve.size();
  struct Candidate {
    int i, j;
    SegmentContact contact;
  };
  std::vector<Candidate> candidates;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const SegmentContact c =
          segment_contact(curve.point(i), curve.point((i + 1) % n), curve.point(j), curve.point((j + 1) % n));
      if (c.distance <= tol) candidates.push_back({i, j, c});
    }
  }

  // A crossing that lands on or near a vertex is seen by up to four segment
  // pairs; merge pairs whose segment indices are within one of each other.
  std::vector<int> cluster(candidates.size(), -1);
  int clusters = 0;
  for (size_t a = 0; a < candidates.size(); ++a) {
    if (cluster[a] >= 0) continue;
    cluster[a] = clusters;
    std::vector<size_t> stack{a};
    while (!stack.empty()) {
      const size_t cur = stack.back();
      stack.pop_back();
      for (size_t b = 0; b < candidates.size(); ++b) {
        if (cluster[b] >= 0) continue;
        const auto& x = candidates[cur];
        const auto& y = candidates[b];
        const bool same = circular_index_distance(x.i, y.i, n) <= 1 && circular_index_distance(x.j, y.j, n) <= 1;
        const bool swapped = circular_index_distance(x.i, y.j, n) <= 1 && circular_index_distance(x.j, y.i, n) <= 1;
        if (same || swapped) {
          cluster[b] = clusters;
          stack.push_back(b);
        }
      }
    }
    ++clusters;
  }

  IntersectionReport report;
  for (int c = 0; c < clusters; ++c) {
    const Candidate* best = nullptr;
    for (size_t a = 0; a < candidates.size(); ++a)
      if (cluster[a] == c && (best == nullptr || candidates[a].contact.distance < best->contact.distance))
        best = &candidates[a];
    const int i = best->i;
    const int j = best->j;
    const Vec2 pa = curve.point(i) + best->contact.s * (curve.point((i + 1) % n) - curve.point(i));
    const Vec2 pb = curve.point(j) + best->contact.u * (curve.point((j + 1) % n) - curve.point(j));
    const Vec2 loc = 0.5 * (pa + pb);

    // Transverse iff the second strand passes from one side of the first
    // strand's local tangent line to the other.
    const Vec2 tangent = curve.point((i + 2) % n) - curve.point((i + n - 1) % n);
    const Vec2 before = curve.point((j + n - 1) % n);
    const Vec2 after = curve.point((j + 2) % n);
    const double side_before = cross2(tangent, before - loc);
    const double side_after = cross2(tangent, after - loc);
    const double scale = tangent.norm() * tol;

    // Crossing sign: the strands must meet at an angle larger than sampling
    // alone produces near a tangency, bounded by the local corner angles.
    const Vec2 other = curve.point((j + 2) % n) - curve.point((j + n - 1) % n);
    const double crossing_angle = std::asin(std::min(1.0, std::abs(cross2(tangent, other)) / (tangent.norm() * other.norm())));
    double turning = 0.0;
    for (int k = -1; k <= 2; ++k) {
      for (int base : {i, j}) {
        const int v = ((base + k) % n + n) % n;
        const Vec2 in = curve.point(v) - curve.point((v + n - 1) % n);
        const Vec2 out = curve.point((v + 1) % n) - curve.point(v);
        turning = std::max(turning, std::abs(std::atan2(cross2(in, out), in.dot(out))));
      }
    }
    const bool sharp = crossing_angle > 4.0 * turning;

    Crossing crossing;
    crossing.t1 = curve.param(i) + best->contact.s * curve.param_step(i);
    crossing.t2 = curve.param(j) + best->contact.u * curve.param_step(j);
    crossing.location = loc;
    crossing.distance = best->contact.distance;
    crossing.kind = (sharp && side_before * side_after < 0.0 && std::abs(side_before) > scale && std::abs(side_after) > scale)
                        ? CrossingKind::kTransverse
                        : CrossingKind::kTangential;
    report.crossings.push_back(crossing);
  }
  std::sort(report.crossings.begin(), report.crossings.end(),
            [](const Crossing& a, const Crossing& b) { return a.t1 < b.t1; });
  return report;
}

IntersectionReport self_intersections(const ClosedCurve& curve) {
  return self_intersections(curve, default_curve_tolerance(curve));
}

int winding_number(const ClosedCurve& curve, const Vec2& point, double tol) {
  if (curve.distance_to(point) <= tol)
    fail(ErrorKind::kIndeterminateWinding, "point lies on the curve within tolerance");
  double turning = 0.0;
  const int n = curve.size();
  for (int i = 0; i < n; ++i) {
    const Vec2 a = curve.point(i) - point;
    const Vec2 b = curve.point((i + 1) % n) - point;
    turning += std::atan2(cross2(a, b), a.dot(b));
  }
  const double turns = turning / kTwoPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.25)
    fail(ErrorKind::kIndeterminateWinding, "winding residual exceeds 0.25");
  return static_cast<int>(rounded);
}

int winding_number(const ClosedCurve& curve, const Vec2& point) {
  return winding_number(curve, point, default_curve_tolerance(curve));
}

}  // namespace mha
