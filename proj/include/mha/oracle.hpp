#pragma once

#include "mha/curve.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mha {

struct WindingIntegral {
  double value = 0.0;
  double error = 0.0;       // bound on the raster error from cells near the curve
  double band_area = 0.0;   // area of the cells within one cell diagonal of the curve
  int max_abs_winding = 0;
};

/// Integral of |winding number| over the plane, on a resolution x resolution
/// grid over the bounding box padded by 10%. Cells away from the curve use
/// the winding number at their center; cells near the curve average 8 x 8
/// subsamples.
WindingIntegral winding_area(const ClosedCurve& curve, int resolution);

/// Same grid, but near the curve the signed subsample average is taken
/// before the absolute value, so opposite orientations cancel inside a cell.
/// Never exceeds winding_area on the same grid.
WindingIntegral current_mass(const ClosedCurve& curve, int resolution);

// Generators. All return `samples` points on the uniform parameter grid.
ClosedCurve circle_curve(double radius, int samples);
/// The circle of radius r traversed twice counter-clockwise.
ClosedCurve doubled_circle_curve(double radius, int samples);
/// Two circular lobes tangent at the origin: radius r1 centred at (-r1, 0)
/// traversed counter-clockwise on [0, pi), radius r2 centred at (r2, 0) on
/// [pi, 2pi), clockwise when `opposite` (a C1 junction) and counter-clockwise
/// otherwise (a cusp at the origin).
ClosedCurve figure_eight_curve(double r1, double r2, bool opposite, int samples);
/// One circle traversed counter-clockwise and then clockwise.
ClosedCurve coincident_lobes_curve(double radius, int samples);

struct CatalogEntry {
  std::string name;
  std::string parameters;
  std::function<ClosedCurve(int)> generate;
  std::optional<double> exact_area;  // empty: the winding integral is only a lower bound
  double winding_integral = 0.0;
  double tolerance = 0.0;            // relative tolerance on the extrapolated area
  std::string notes;
};

std::vector<CatalogEntry> catalog();

/// name,parameters,winding_integral,exact_area,current_mass
std::string catalog_csv(int resolution, int samples);

}  // namespace mha
