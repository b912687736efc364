#pragma once

#include "mha/plateau.hpp"

#include <array>
#include <string>
#include <vector>

namespace mha {

/// eps0 * factor^k for k = 0..count-1.
std::vector<double> epsilon_schedule(double eps0, double factor, int count);

enum class SweepMode { kWarm, kCold };
std::string to_string(SweepMode mode);

struct SweepEntry {
  double epsilon = 0.0;
  DouglasResult result;
  // Distances to the previous entry; zero for the first one.
  double map_distance = 0.0;        // vertexwise sup over all four coordinates
  double projected_distance = 0.0;  // same, first two coordinates only
  double trace_distance = 0.0;      // boundary vertices only
  double phi_change = 0.0;          // max pointwise change of the lifted parametrization
  double planarity_defect = 0.0;    // max |coordinate 3 or 4| of the map
};

struct ContinuationRecord {
  SweepMode mode = SweepMode::kWarm;
  std::array<double, 3> pins{};
  double energy_bound = 0.0;
  std::vector<SweepEntry> entries;

  std::vector<double> epsilons() const;
};

/// pi * (m1^2 + m2^2) with m1 = sup|gamma| + 1 and m2 = sqrt(Lip^2 + 2), an
/// upper bound on the cone energy of every lift with 0 < eps <= 1.
double lift_energy_bound(const ClosedCurve& curve);

/// Solves the Douglas problem for every lift parameter in `schedule`. Pins
/// are selected once from the curve; in warm mode each solve may start from
/// the previous parametrization.
ContinuationRecord run_sweep(const ClosedCurve& curve, const MeshPtr& mesh, const std::vector<double>& schedule,
                             const SolverSettings& cfg, SweepMode mode = SweepMode::kWarm);

/// Drops coordinates 3 and 4.
DiskMap project(const DiskMap& map);

struct LimitResult {
  DiskMap u0;
  BoundaryParam phi0;
  double area0 = 0.0;
  double final_area = 0.0;
  // Two-point estimates from the last three entries and whether they
  // disagree by more than three times the predicted decrement.
  std::array<double, 2> pair_estimates{};
  bool extrapolation_flagged = false;
  double planarity_defect = 0.0;
};

/// Projects the last map and extrapolates the area to eps = 0 in eps^2
/// (quadratic through the last three entries). `limit_tol` bounds the last
/// projected sup-distance.
LimitResult extract_limit(const ContinuationRecord& record, double limit_tol);

/// Default limit tolerance: 1e-3 times the curve diameter.
double default_limit_tol(const ClosedCurve& curve);

}  // namespace mha
