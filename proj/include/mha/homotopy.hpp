#pragma once

#include "mha/continuation.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mha {

/// Default continuity witness for phi0: 16 pi / boundary_count, i.e. eight
/// boundary spacings.
double default_phi_jump_tol(int boundary_count);

/// Null homotopy h(t, theta) of a closed curve built from a limit disk u0
/// and its boundary parametrization phi0:
///   t <  1/2: u0 at the point of angle theta and radius 2t of the mesh polygon,
///   t >= 1/2: gamma((2 - 2t) phi0(theta) + (2t - 1) theta) on the lift of phi0.
class Homotopy {
 public:
  Homotopy(DiskMap u0, BoundaryParam phi0, ClosedCurve curve);

  const DiskMap& u0() const { return u0_; }
  const BoundaryParam& phi0() const { return phi0_; }
  const ClosedCurve& curve() const { return curve_; }

  Vec2 disk_branch(double t, double theta) const;
  Vec2 boundary_branch(double t, double theta) const;
  Vec2 eval(double t, double theta) const;

  /// Bound on |disk_branch(1/2, .) - boundary_branch(1/2, .)|: the longest
  /// arc of the curve spanned by phi0 across one boundary edge.
  double interface_tolerance() const { return interface_tol_; }

 private:
  DiskMap u0_;
  BoundaryParam phi0_;
  ClosedCurve curve_;
  double interface_tol_ = 0.0;
};

/// Checks the continuity witness (max phi0 jump <= phi_jump_tol) before
/// assembling the homotopy.
Homotopy build_null_homotopy(const LimitResult& limit, const ClosedCurve& curve, double phi_jump_tol);
Homotopy build_null_homotopy(const DiskMap& u0, const BoundaryParam& phi0, const ClosedCurve& curve,
                             double phi_jump_tol);

/// One time slice. At t = 0 all points coincide, so this is a plain point
/// list rather than a ClosedCurve.
struct Frame {
  double t = 0.0;
  std::vector<Vec2> points;
};

/// n points at theta_j = 2 pi j / n.
Frame sample_frame(const Homotopy& h, double t, int n);

struct SweptArea {
  double total = 0.0;
  double first_half = 0.0;   // disk sweep, t in [0, 1/2]
  double second_half = 0.0;  // reparametrization, t in [1/2, 1]
};

/// Sum of unsigned image areas of the space-time cells: each half is split
/// into time_steps slabs and n angular sectors, each cell cut into two
/// triangles.
SweptArea homotopy_swept_area(const Homotopy& h, int time_steps, int n);
/// Second half only, exact in time: each cell is split wherever either corner
/// passes a curve vertex and integrated as a bilinear patch. The frames stay on
/// the curve, so the result is pure chord error and shrinks linearly in 1/n.
double annulus_swept_area(const Homotopy& h, int time_steps, int n);

/// Length of the curve traversed between lifted parameters a <= b.
/// Sum over boundary edges of the area between the chord from gamma(phi_i) to
/// gamma(phi_{i+1}) and the curve arc it cuts off. The discrete boundary is
/// inscribed, so this is the area a mesh map cannot reach.
double chord_deficit(const ClosedCurve& curve, const BoundaryParam& phi);

double arc_length_between(const ClosedCurve& curve, double a, double b);

struct FrameExport {
  std::string document;           // JSON
  std::vector<std::string> svgs;  // one per frame, empty unless requested
};

/// Frames at t_k = k / (time_steps - 1). `meta_extra` is merged into the
/// document's meta object (a JSON object text, may be empty).
FrameExport render_frames(const Homotopy& h, int time_steps, int n, bool svg, const std::string& meta_extra = "");
FrameExport render_frames_at(const Homotopy& h, const std::vector<double>& times, int n, bool svg,
                             const std::string& meta_extra = "");

/// Writes frames.json (and frame_###.svg) under `dir`.
void export_frames(const Homotopy& h, int time_steps, int n, const std::filesystem::path& dir, bool svg,
                   const std::string& meta_extra = "");

}  // namespace mha
