#include "mha/homotopy.hpp"

#include "mha/error.hpp"
#include "mha/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>

namespace mha {

using nlohmann::json;

namespace {

double cumulative_length(const ClosedCurve& curve, double t) {
  const double turns = std::floor(t / kTwoPi);
  const double w = wrap_angle(t);
  const int k = curve.segment_at(w);
  double len = 0.0;
  for (int i = 0; i < k; ++i) len += curve.segment_length(i);
  len += (w - curve.param(k)) / curve.param_step(k) * curve.segment_length(k);
  return turns * curve.length() + len;
}

double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 u = b - a, v = c - a;
  return 0.5 * std::abs(u.x() * v.y() - u.y() * v.x());
}

double theta_at(int j, int n) { return kTwoPi * static_cast<double>(j) / static_cast<double>(n); }

}  // namespace

double default_phi_jump_tol(int boundary_count) { return 16.0 * kPi / boundary_count; }

double arc_length_between(const ClosedCurve& curve, double a, double b) {
  if (b < a) fail(ErrorKind::kDomain, "arc length needs a <= b");
  return cumulative_length(curve, b) - cumulative_length(curve, a);
}

double chord_deficit(const ClosedCurve& curve, const BoundaryParam& phi) {
  const auto& lifted = phi.lifted();
  double total = 0.0;
  for (int i = 0; i < phi.size(); ++i) {
    const double a = lifted[static_cast<size_t>(i)];
    const double b = i + 1 < phi.size() ? lifted[static_cast<size_t>(i) + 1] : lifted[0] + kTwoPi;
    std::vector<Vec2> poly{curve.eval(wrap_angle(a))};
    // Samples strictly inside (a, b) on the lifted line.
    const double base = kTwoPi * std::floor(a / kTwoPi);
    for (double turn = base; turn < b; turn += kTwoPi) {
      for (int k = 0; k < curve.size(); ++k) {
        const double s = turn + curve.param(k);
        if (s > a && s < b) poly.push_back(curve.point(k));
      }
    }
    poly.push_back(curve.eval(wrap_angle(b)));
    double twice = 0.0;
    for (size_t k = 0; k < poly.size(); ++k) {
      const Vec2& p = poly[k];
      const Vec2& q = poly[(k + 1) % poly.size()];
      twice += p.x() * q.y() - p.y() * q.x();
    }
    total += 0.5 * std::abs(twice);
  }
  return total;
}

Homotopy::Homotopy(DiskMap u0, BoundaryParam phi0, ClosedCurve curve)
    : u0_(std::move(u0)), phi0_(std::move(phi0)), curve_(std::move(curve)) {
  if (u0_.dim() != 2) fail(ErrorKind::kDomain, "homotopy needs a planar disk map");
  if (phi0_.size() != u0_.mesh().boundary_count()) fail(ErrorKind::kDomain, "phi0 does not match the mesh boundary");
  const auto& lifted = phi0_.lifted();
  for (int i = 0; i < phi0_.size(); ++i) {
    const double a = lifted[static_cast<size_t>(i)];
    const double b = i + 1 < phi0_.size() ? lifted[static_cast<size_t>(i) + 1] : lifted[0] + kTwoPi;
    interface_tol_ = std::max(interface_tol_, arc_length_between(curve_, a, b));
  }
}

Vec2 Homotopy::disk_branch(double t, double theta) const {
  const Vec2 p = u0_.mesh().polygon_point(theta, std::clamp(2.0 * t, 0.0, 1.0));
  return u0_.eval(p);
}

Vec2 Homotopy::boundary_branch(double t, double theta) const {
  const double s = (2.0 - 2.0 * t) * phi0_.at(theta) + (2.0 * t - 1.0) * theta;
  return curve_.eval(wrap_angle(s));
}

Vec2 Homotopy::eval(double t, double theta) const {
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::kDomain, "homotopy time must lie in [0, 1]");
  return t < 0.5 ? disk_branch(t, theta) : boundary_branch(t, theta);
}

Homotopy build_null_homotopy(const DiskMap& u0, const BoundaryParam& phi0, const ClosedCurve& curve,
                             double phi_jump_tol) {
  if (!(phi_jump_tol > 0.0)) fail(ErrorKind::kConfiguration, "phi_jump_tol must be positive");
  const double jump = phi0.max_jump();
  if (jump > phi_jump_tol) {
    const int i = phi0.max_jump_index();
    const int j = (i + 1) % phi0.size();
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "phi0 jumps by %.6g across boundary edge %d-%d (angles %.6g to %.6g), above tolerance %.6g", jump, i,
                  j, phi0.angles()[static_cast<size_t>(i)], phi0.angles()[static_cast<size_t>(j)], phi_jump_tol);
    fail(ErrorKind::kDiscontinuousParametrization, buf);
  }
  return Homotopy(u0, phi0, curve);
}

Homotopy build_null_homotopy(const LimitResult& limit, const ClosedCurve& curve, double phi_jump_tol) {
  return build_null_homotopy(limit.u0, limit.phi0, curve, phi_jump_tol);
}

Frame sample_frame(const Homotopy& h, double t, int n) {
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::kDomain, "frame time must lie in [0, 1]");
  if (n < 3) fail(ErrorKind::kDomain, "frame needs at least 3 points");
  Frame f{t, {}};
  f.points.reserve(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) f.points.push_back(h.eval(t, theta_at(j, n)));
  return f;
}

namespace {

double cell_areas(const std::vector<Vec2>& prev, const std::vector<Vec2>& cur) {
  const size_t n = cur.size();
  double area = 0.0;
  for (size_t j = 0; j < n; ++j) {
    const size_t jn = (j + 1) % n;
    area += triangle_area(prev[j], cur[j], cur[jn]);
    area += triangle_area(prev[j], cur[jn], prev[jn]);
  }
  return area;
}

}  // namespace

namespace {

// Integral of |c0 + c1 u + c2 v| over the unit square.
double abs_affine_integral(double c0, double c1, double c2) {
  const double corners[4] = {c0, c0 + c1, c0 + c2, c0 + c1 + c2};
  const bool pos = std::all_of(std::begin(corners), std::end(corners), [](double x) { return x >= 0.0; });
  const bool neg = std::all_of(std::begin(corners), std::end(corners), [](double x) { return x <= 0.0; });
  if (pos || neg) return std::abs(c0 + 0.5 * c1 + 0.5 * c2);
  if (std::abs(c1) < std::abs(c2)) std::swap(c1, c2);
  // inner integral over u in closed form; F' = |x|, H' = F
  auto F = [](double x) { return 0.5 * x * std::abs(x); };
  auto H = [](double x) { return x * x * std::abs(x) / 6.0; };
  auto inner = [&](double a) { return (F(a + c1) - F(a)) / c1; };
  if (std::abs(c2) < 1e-4 * std::abs(c1)) return (inner(c0) + 4.0 * inner(c0 + 0.5 * c2) + inner(c0 + c2)) / 6.0;
  return (H(c0 + c1 + c2) - H(c0 + c1) - H(c0 + c2) + H(c0)) / (c1 * c2);
}

// Area of the bilinear patch with edges a0-b0 (earlier) and a1-b1 (later).
double patch_area(const Vec2& a0, const Vec2& b0, const Vec2& a1, const Vec2& b1) {
  const Vec2 b = b0 - a0, c = a1 - a0, d = b1 - b0 - a1 + a0;
  auto cross = [](const Vec2& x, const Vec2& y) { return x.x() * y.y() - x.y() * y.x(); };
  return abs_affine_integral(cross(b, c), cross(b, d), cross(d, c));
}

// Fractions tau in (0, 1) where s0 + tau (s1 - s0) meets a curve vertex.
void vertex_hits(const ClosedCurve& curve, double s0, double s1, std::vector<double>& out) {
  out.clear();
  if (s0 == s1) return;
  const double lo = std::min(s0, s1), hi = std::max(s0, s1);
  const auto& params = curve.params();
  for (double turn = std::floor(lo / kTwoPi); turn * kTwoPi <= hi; turn += 1.0) {
    const double base = turn * kTwoPi;
    auto it = std::upper_bound(params.begin(), params.end(), lo - base);
    for (; it != params.end() && *it + base < hi; ++it) out.push_back((*it + base - s0) / (s1 - s0));
  }
}

}  // namespace

double annulus_swept_area(const Homotopy& h, int time_steps, int n) {
  if (time_steps < 2) fail(ErrorKind::kDomain, "swept area needs time_steps >= 2");
  if (n < 3) fail(ErrorKind::kDomain, "swept area needs n >= 3");
  // tau = 2t - 1; sample j moves along the curve from phi0(theta_j) to theta_j
  std::vector<double> start(static_cast<size_t>(n)), stop(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    start[static_cast<size_t>(j)] = h.phi0().at(theta_at(j, n));
    stop[static_cast<size_t>(j)] = theta_at(j, n);
  }
  auto point = [&](int j, double tau) {
    const double s0 = start[static_cast<size_t>(j)], s1 = stop[static_cast<size_t>(j)];
    return h.curve().eval(wrap_angle(s0 + tau * (s1 - s0)));
  };

  std::vector<double> grid(static_cast<size_t>(time_steps) + 1);
  for (int k = 0; k <= time_steps; ++k) grid[static_cast<size_t>(k)] = static_cast<double>(k) / time_steps;
  std::vector<double> ha, hb, cuts;
  double area = 0.0;
  for (int j = 0; j < n; ++j) {
    const int jn = (j + 1) % n;
    // both endpoints move linearly between cuts, so each piece is exact
    vertex_hits(h.curve(), start[static_cast<size_t>(j)], stop[static_cast<size_t>(j)], ha);
    vertex_hits(h.curve(), start[static_cast<size_t>(jn)], stop[static_cast<size_t>(jn)], hb);
    cuts = grid;
    cuts.insert(cuts.end(), ha.begin(), ha.end());
    cuts.insert(cuts.end(), hb.begin(), hb.end());
    std::sort(cuts.begin(), cuts.end());
    Vec2 a0 = point(j, 0.0), b0 = point(jn, 0.0);
    for (size_t k = 1; k < cuts.size(); ++k) {
      if (!(cuts[k] > cuts[k - 1])) continue;
      const Vec2 a1 = point(j, cuts[k]), b1 = point(jn, cuts[k]);
      area += patch_area(a0, b0, a1, b1);
      a0 = a1;
      b0 = b1;
    }
  }
  return area;
}

SweptArea homotopy_swept_area(const Homotopy& h, int time_steps, int n) {
  if (time_steps < 2) fail(ErrorKind::kDomain, "swept area needs time_steps >= 2");
  if (n < 3) fail(ErrorKind::kDomain, "swept area needs n >= 3");
  std::vector<Vec2> prev(static_cast<size_t>(n)), cur(static_cast<size_t>(n));
  SweptArea out;
  for (int k = 0; k <= time_steps; ++k) {
    const double t = 0.5 * static_cast<double>(k) / time_steps;
    for (int j = 0; j < n; ++j) cur[static_cast<size_t>(j)] = h.disk_branch(t, theta_at(j, n));
    if (k > 0) out.first_half += cell_areas(prev, cur);
    std::swap(prev, cur);
  }
  out.second_half = annulus_swept_area(h, time_steps, n);
  out.total = out.first_half + out.second_half;
  return out;
}

FrameExport render_frames_at(const Homotopy& h, const std::vector<double>& times, int n, bool svg,
                             const std::string& meta_extra) {
  if (times.empty()) fail(ErrorKind::kDomain, "no frame times requested");
  if (n < 3) fail(ErrorKind::kDomain, "frames need at least 3 points");
  const SweptArea swept = homotopy_swept_area(h, 64, std::max(n, 256));
  json meta{{"time_steps", times.size()},
            {"n", n},
            {"area", round12(swept.total)},
            {"u0_area", round12(map_area(h.u0()))}};
  if (!meta_extra.empty()) {
    const json extra = json::parse(meta_extra);
    for (const auto& [key, value] : extra.items()) meta[key] = value;
  }

  Vec2 lo = h.curve().point(0), hi = lo;
  for (const Vec2& p : h.curve().points()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }

  FrameExport out;
  json frames = json::array();
  for (double t : times) {
    const Frame f = sample_frame(h, t, n);
    json pts = json::array();
    for (const Vec2& p : f.points) pts.push_back({round12(p.x()), round12(p.y())});
    frames.push_back({{"t", round12(t)}, {"points", pts}});
    if (svg) out.svgs.push_back(svg_drawing(f.points, h.curve().points(), lo, hi, "t = " + fmt12(round12(t))));
  }
  out.document = json{{"meta", meta}, {"frames", frames}}.dump(1) + "\n";
  return out;
}

FrameExport render_frames(const Homotopy& h, int time_steps, int n, bool svg, const std::string& meta_extra) {
  if (time_steps < 2) fail(ErrorKind::kDomain, "frames need time_steps >= 2");
  std::vector<double> times;
  for (int k = 0; k < time_steps; ++k) times.push_back(static_cast<double>(k) / (time_steps - 1));
  return render_frames_at(h, times, n, svg, meta_extra);
}

void export_frames(const Homotopy& h, int time_steps, int n, const std::filesystem::path& dir, bool svg,
                   const std::string& meta_extra) {
  const FrameExport out = render_frames(h, time_steps, n, svg, meta_extra);
  write_text(dir / "frames.json", out.document);
  for (size_t k = 0; k < out.svgs.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.svg", k);
    write_text(dir / name, out.svgs[k]);
  }
}

}  // namespace mha
