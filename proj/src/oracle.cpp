#include "mha/oracle.hpp"

#include "mha/error.hpp"
#include "mha/io.hpp"

#include <algorithm>
#include <cmath>

namespace mha {

namespace {

constexpr int kSubsamples = 8;

// Signed crossings of the curve with the horizontal line at height y, sorted
// by x, with suffix sums so the winding number at x is suffix[upper_bound(x)].
struct ScanLine {
  std::vector<double> xs;
  std::vector<int> suffix;

  int winding_at(double x) const {
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    return suffix[static_cast<size_t>(it - xs.begin())];
  }
};

ScanLine scan(const ClosedCurve& curve, double y) {
  std::vector<std::pair<double, int>> hits;
  const int n = curve.size();
  for (int i = 0; i < n; ++i) {
    const Vec2& a = curve.point(i);
    const Vec2& b = curve.point((i + 1) % n);
    int dir = 0;
    if (a.y() <= y && y < b.y()) dir = 1;
    if (b.y() <= y && y < a.y()) dir = -1;
    if (dir == 0) continue;
    const double x = a.x() + (y - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
    hits.emplace_back(x, dir);
  }
  std::sort(hits.begin(), hits.end());
  ScanLine line;
  line.suffix.assign(hits.size() + 1, 0);
  for (size_t k = hits.size(); k-- > 0;) line.suffix[k] = line.suffix[k + 1] + hits[k].second;
  for (const auto& h : hits) line.xs.push_back(h.first);
  return line;
}

WindingIntegral integrate(const ClosedCurve& curve, int resolution, bool signed_band) {
  if (resolution < 64) fail(ErrorKind::kDomain, "winding raster needs resolution >= 64");
  Vec2 lo = curve.point(0), hi = lo;
  for (const Vec2& p : curve.points()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 pad = 0.1 * (hi - lo).cwiseMax(Vec2::Constant(1e-12));
  lo -= pad;
  hi += pad;
  const int res = resolution;
  const double dx = (hi.x() - lo.x()) / res;
  const double dy = (hi.y() - lo.y()) / res;
  const double cell_area = dx * dy;

  // Cells touched by the curve plus their neighbours.
  std::vector<char> band(static_cast<size_t>(res) * static_cast<size_t>(res), 0);
  const double probe = 0.25 * std::min(dx, dy);
  for (int i = 0; i < curve.size(); ++i) {
    const Vec2& a = curve.point(i);
    const Vec2& b = curve.point((i + 1) % curve.size());
    const int steps = static_cast<int>(std::ceil((b - a).norm() / probe)) + 1;
    for (int s = 0; s <= steps; ++s) {
      const Vec2 p = a + (b - a) * (static_cast<double>(s) / steps);
      const int cx = static_cast<int>(std::floor((p.x() - lo.x()) / dx));
      const int cy = static_cast<int>(std::floor((p.y() - lo.y()) / dy));
      for (int oy = -1; oy <= 1; ++oy) {
        for (int ox = -1; ox <= 1; ++ox) {
          const int x = cx + ox, y = cy + oy;
          if (x >= 0 && x < res && y >= 0 && y < res) band[static_cast<size_t>(y) * res + x] = 1;
        }
      }
    }
  }

  WindingIntegral out;
  int band_cells = 0;
  int band_wmax = 0;
  for (int r = 0; r < res; ++r) {
    const double yc = lo.y() + (r + 0.5) * dy;
    const ScanLine centre = scan(curve, yc);
    bool any_band = false;
    for (int c = 0; c < res && !any_band; ++c) any_band = band[static_cast<size_t>(r) * res + c] != 0;
    std::vector<ScanLine> sub;
    if (any_band) {
      for (int s = 0; s < kSubsamples; ++s) sub.push_back(scan(curve, lo.y() + (r + (s + 0.5) / kSubsamples) * dy));
    }
    for (int c = 0; c < res; ++c) {
      const double x0 = lo.x() + c * dx;
      if (!band[static_cast<size_t>(r) * res + c]) {
        const int w = centre.winding_at(x0 + 0.5 * dx);
        out.value += std::abs(w) * cell_area;
        out.max_abs_winding = std::max(out.max_abs_winding, std::abs(w));
        continue;
      }
      ++band_cells;
      long sum_abs = 0, sum_signed = 0;
      for (int s = 0; s < kSubsamples; ++s) {
        for (int q = 0; q < kSubsamples; ++q) {
          const int w = sub[static_cast<size_t>(s)].winding_at(x0 + (q + 0.5) / kSubsamples * dx);
          sum_abs += std::abs(w);
          sum_signed += w;
          band_wmax = std::max(band_wmax, std::abs(w));
        }
      }
      const double samples = kSubsamples * kSubsamples;
      const double cell = signed_band ? std::abs(static_cast<double>(sum_signed)) : static_cast<double>(sum_abs);
      out.value += cell / samples * cell_area;
    }
  }
  out.max_abs_winding = std::max(out.max_abs_winding, band_wmax);
  out.band_area = band_cells * cell_area;
  out.error = out.band_area * std::max(1, band_wmax) / kSubsamples;
  return out;
}

}  // namespace

WindingIntegral winding_area(const ClosedCurve& curve, int resolution) { return integrate(curve, resolution, false); }

WindingIntegral current_mass(const ClosedCurve& curve, int resolution) { return integrate(curve, resolution, true); }

// ---------------------------------------------------------------------------
// Generators

namespace {

ClosedCurve generate(int samples, const std::function<Vec2(double)>& f) {
  if (samples < 3) fail(ErrorKind::kDomain, "generator needs at least 3 samples");
  std::vector<Vec2> pts;
  pts.reserve(static_cast<size_t>(samples));
  for (int i = 0; i < samples; ++i) pts.push_back(f(kTwoPi * static_cast<double>(i) / static_cast<double>(samples)));
  return ClosedCurve::from_points(std::move(pts));
}

}  // namespace

ClosedCurve circle_curve(double radius, int samples) {
  if (!(radius > 0.0)) fail(ErrorKind::kDomain, "radius must be positive");
  return generate(samples, [radius](double t) { return Vec2(radius * std::cos(t), radius * std::sin(t)); });
}

ClosedCurve doubled_circle_curve(double radius, int samples) {
  if (!(radius > 0.0)) fail(ErrorKind::kDomain, "radius must be positive");
  if (samples % 2 != 0) fail(ErrorKind::kDomain, "doubled circle needs an even sample count");
  return generate(samples, [radius](double t) { return Vec2(radius * std::cos(2 * t), radius * std::sin(2 * t)); });
}

ClosedCurve figure_eight_curve(double r1, double r2, bool opposite, int samples) {
  if (!(r1 > 0.0 && r2 > 0.0)) fail(ErrorKind::kDomain, "lobe radii must be positive");
  if (samples % 2 != 0) fail(ErrorKind::kDomain, "figure-eight needs an even sample count");
  return generate(samples, [=](double t) {
    if (t < kPi) return Vec2(-r1 + r1 * std::cos(2 * t), r1 * std::sin(2 * t));
    const double s = t - kPi;
    const double a = opposite ? kPi - 2 * s : kPi + 2 * s;
    return Vec2(r2 + r2 * std::cos(a), r2 * std::sin(a));
  });
}

ClosedCurve coincident_lobes_curve(double radius, int samples) {
  if (!(radius > 0.0)) fail(ErrorKind::kDomain, "radius must be positive");
  if (samples % 2 != 0) fail(ErrorKind::kDomain, "coincident lobes need an even sample count");
  return generate(samples, [radius](double t) {
    const double a = t < kPi ? 2 * t : -2 * (t - kPi);
    return Vec2(radius * std::cos(a), radius * std::sin(a));
  });
}

std::vector<CatalogEntry> catalog() {
  std::vector<CatalogEntry> out;
  out.push_back({"circle", "r=1", [](int n) { return circle_curve(1.0, n); }, kPi, kPi, 0.01,
                 "simple closed curve; the flat disk is the minimizer"});
  out.push_back({"doubled_circle", "r=1", [](int n) { return doubled_circle_curve(1.0, n); }, 2 * kPi, 2 * kPi, 0.03,
                 "degree-2 cover; the disk is swept twice"});
  out.push_back({"figure_eight", "r1=1 r2=0.6 opposite", [](int n) { return figure_eight_curve(1.0, 0.6, true, n); },
                 1.36 * kPi, 1.36 * kPi, 0.04, "lobes of opposite orientation tangent at the origin; each swept once"});
  out.push_back({"figure_eight_same", "r1=1 r2=0.6 same",
                 [](int n) { return figure_eight_curve(1.0, 0.6, false, n); }, std::nullopt, 1.36 * kPi, 0.04,
                 "lobes of equal orientation meeting in a cusp; winding integral is a lower bound only"});
  return out;
}

std::string catalog_csv(int resolution, int samples) {
  std::string out = "name,parameters,winding_integral,exact_area,current_mass\n";
  for (const CatalogEntry& e : catalog()) {
    const ClosedCurve c = e.generate(samples);
    out += e.name + "," + e.parameters + "," + fmt12(winding_area(c, resolution).value) + "," +
           (e.exact_area ? fmt12(*e.exact_area) : "") + "," + fmt12(current_mass(c, resolution).value) + "\n";
  }
  return out;
}

}  // namespace mha
