#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace mha {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383279;

/// Reduces an angle to its representative in [0, 2*pi).
double wrap_angle(double t);

/// Shortest distance between two parameters on the circle, in [0, pi].
double circular_distance(double a, double b);

/// Closed planar polygon sampled at parameters in [0, 2*pi); the last sample
/// connects back to the first. Immutable after construction.
class ClosedCurve {
 public:
  /// Validates: >= 3 samples, params strictly increasing in [0, 2*pi) with
  /// params[0] == 0, all points finite, every segment of positive length.
  ClosedCurve(std::vector<double> params, std::vector<Vec2> points);

  /// Samples on the uniform grid t_i = 2*pi*i/n.
  static ClosedCurve from_points(std::vector<Vec2> points);

  int size() const { return static_cast<int>(points_.size()); }
  const std::vector<double>& params() const { return params_; }
  const std::vector<Vec2>& points() const { return points_; }
  const Vec2& point(int i) const { return points_[static_cast<size_t>(i)]; }
  double param(int i) const { return params_[static_cast<size_t>(i)]; }

  /// Parameter length of segment i (the last one wraps to 2*pi).
  double param_step(int i) const;
  double segment_length(int i) const;
  double length() const { return length_; }
  double diameter() const;
  /// sup |gamma(t)|.
  double max_norm() const;
  /// Lipschitz constant of the piecewise-linear interpolant in the parameter.
  double lipschitz() const;
  /// Exterior turning angle at every sample, in (-pi, pi].
  std::vector<double> corner_angles() const;

  /// Index of the segment containing parameter t (t reduced mod 2*pi).
  int segment_at(double t) const;
  /// Piecewise-linear interpolation in the parameter.
  Vec2 eval(double t) const;
  /// Derivative of the interpolant on the segment containing t.
  Vec2 derivative(double t) const;

  /// Euclidean distance from p to the polygon.
  double distance_to(const Vec2& p) const;

 private:
  std::vector<double> params_;
  std::vector<Vec2> points_;
  double length_ = 0.0;
};

/// gamma_eps(t) = (gamma(t), eps cos t, eps sin t) at every sample.
class LiftedCurve {
 public:
  LiftedCurve(ClosedCurve base, double epsilon);

  const ClosedCurve& base() const { return base_; }
  double epsilon() const { return epsilon_; }
  const std::vector<Vec4>& points() const { return points4_; }
  int size() const { return base_.size(); }

  /// Piecewise-linear interpolation of the lifted samples in the parameter.
  Vec4 eval(double t) const;
  Vec4 derivative(double t) const;

 private:
  ClosedCurve base_;
  double epsilon_;
  std::vector<Vec4> points4_;
};

enum class CrossingKind { kTransverse, kTangential };

struct Crossing {
  double t1 = 0.0;
  double t2 = 0.0;
  Vec2 location = Vec2::Zero();
  double distance = 0.0;
  CrossingKind kind = CrossingKind::kTransverse;
};

struct IntersectionReport {
  std::vector<Crossing> crossings;
  int transverse_count() const;
  int tangential_count() const;
};

/// n samples at equal spacing along the polygon. Positions start at the
/// first sample and are refined until consecutive chords agree, so the output
/// polygon is traversed at constant speed in its own parameter; this makes the
/// operation idempotent.
ClosedCurve resample_arclength(const ClosedCurve& curve, int n);

LiftedCurve lift(const ClosedCurve& curve, double epsilon);

/// Minimum distance between lifted samples whose parameters are at least
/// `param_gap` apart on the circle.
double min_lift_separation(const LiftedCurve& lifted, double param_gap);

/// Default proximity tolerance: 1e-9 times the curve length.
double default_curve_tolerance(const ClosedCurve& curve);

IntersectionReport self_intersections(const ClosedCurve& curve, double tol);
IntersectionReport self_intersections(const ClosedCurve& curve);

int winding_number(const ClosedCurve& curve, const Vec2& point, double tol);
int winding_number(const ClosedCurve& curve, const Vec2& point);

}  // namespace mha
