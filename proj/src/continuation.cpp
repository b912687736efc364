#include "mha/continuation.hpp"

#include "mha/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mha {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double row_sup(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int cols) {
  double best = 0.0;
  for (int r = 0; r < a.rows(); ++r) {
    best = std::max(best, (a.row(r).head(cols) - b.row(r).head(cols)).norm());
  }
  return best;
}

}  // namespace

std::vector<double> epsilon_schedule(double eps0, double factor, int count) {
  if (!(eps0 > 0.0 && eps0 <= 1.0)) fail(ErrorKind::kConfiguration, "eps0 must lie in (0, 1]");
  if (!(factor > 0.0 && factor < 1.0)) fail(ErrorKind::kConfiguration, "schedule factor must lie in (0, 1)");
  if (count < 2) fail(ErrorKind::kConfiguration, "schedule needs at least 2 entries");
  std::vector<double> out;
  double e = eps0;
  for (int k = 0; k < count; ++k, e *= factor) out.push_back(e);
  return out;
}

std::string to_string(SweepMode mode) { return mode == SweepMode::kWarm ? "warm" : "cold"; }

std::vector<double> ContinuationRecord::epsilons() const {
  std::vector<double> out;
  for (const SweepEntry& e : entries) out.push_back(e.epsilon);
  return out;
}

double lift_energy_bound(const ClosedCurve& curve) {
  const double m1 = curve.max_norm() + 1.0;
  const double lip = curve.lipschitz();
  const double m2 = std::sqrt(lip * lip + 2.0);
  return kPi * (m1 * m1 + m2 * m2);
}

ContinuationRecord run_sweep(const ClosedCurve& curve, const MeshPtr& mesh, const std::vector<double>& schedule,
                             const SolverSettings& cfg, SweepMode mode) {
  if (schedule.empty()) fail(ErrorKind::kConfiguration, "empty lift schedule");
  for (size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 0.0 && schedule[k] <= 1.0)) fail(ErrorKind::kConfiguration, "schedule entries must lie in (0, 1]");
    if (k > 0 && !(schedule[k] < schedule[k - 1])) fail(ErrorKind::kConfiguration, "schedule must be strictly decreasing");
  }

  ContinuationRecord record;
  record.mode = mode;
  const auto pins = select_pins(curve);
  for (size_t k = 0; k < 3; ++k) record.pins[k] = pins[k].param;
  record.energy_bound = lift_energy_bound(curve);

  const DouglasSolver solver(mesh);
  const Eigen::VectorXi boundary = Eigen::Map<const Eigen::VectorXi>(mesh->boundary_loop().data(), mesh->boundary_count());

  for (double eps : schedule) {
    DouglasOptions options;
    options.pin_params = record.pins;
    if (mode == SweepMode::kWarm && !record.entries.empty()) options.warm_start = record.entries.back().result.param;
    DouglasResult result = [&] {
      try {
        return solver.minimize(lift(curve, eps), cfg, options);
      } catch (const Error& e) {
        throw Error(e.kind(), std::string(e.what()) + " [epsilon " + fmt(eps) + "]");
      }
    }();

    SweepEntry entry{eps, std::move(result)};
    const Eigen::MatrixXd& u = entry.result.map.values();
    entry.planarity_defect = u.rightCols(2).cwiseAbs().maxCoeff();
    if (!record.entries.empty()) {
      const SweepEntry& prev = record.entries.back();
      const Eigen::MatrixXd& v = prev.result.map.values();
      entry.map_distance = row_sup(u, v, 4);
      entry.projected_distance = row_sup(u, v, 2);
      entry.trace_distance = row_sup(u(boundary, Eigen::all), v(boundary, Eigen::all), 4);
      const auto& a = entry.result.param.lifted();
      const auto& b = prev.result.param.lifted();
      for (size_t i = 0; i < a.size(); ++i) entry.phi_change = std::max(entry.phi_change, std::abs(a[i] - b[i]));
    }
    record.entries.push_back(std::move(entry));
  }
  return record;
}

DiskMap project(const DiskMap& map) {
  if (map.dim() != 4) fail(ErrorKind::kDomain, "projection expects a map into 4-space");
  return DiskMap(map.mesh_ptr(), map.values().leftCols(2));
}

double default_limit_tol(const ClosedCurve& curve) { return 1e-3 * curve.diameter(); }

LimitResult extract_limit(const ContinuationRecord& record, double limit_tol) {
  const auto& entries = record.entries;
  if (entries.size() < 2) fail(ErrorKind::kPrecondition, "limit extraction needs at least 2 sweep entries");
  const SweepEntry& last = entries.back();
  if (last.projected_distance > limit_tol) {
    std::string series;
    for (const SweepEntry& e : entries) {
      series += (series.empty() ? "" : ", ") + fmt(e.epsilon) + ":" + fmt(e.projected_distance);
    }
    fail(ErrorKind::kNonConvergence, "final projected sup-distance " + fmt(last.projected_distance) +
                                         " exceeds limit tolerance " + fmt(limit_tol) + " (series " + series + ")");
  }

  LimitResult out{project(last.result.map), last.result.param};
  out.final_area = last.result.area;
  out.area0 = last.result.area;
  out.planarity_defect = last.planarity_defect;
  if (entries.size() >= 3) {
    const size_t n = entries.size();
    std::array<double, 3> x{}, a{};
    for (size_t k = 0; k < 3; ++k) {
      const double e = entries[n - 3 + k].epsilon;
      x[k] = e * e;
      a[k] = entries[n - 3 + k].result.area;
    }
    double quad = 0.0;
    for (size_t i = 0; i < 3; ++i) {
      double w = 1.0;
      for (size_t j = 0; j < 3; ++j) {
        if (j != i) w *= x[j] / (x[j] - x[i]);
      }
      quad += w * a[i];
    }
    auto linear = [&](size_t i, size_t j) { return (a[i] * x[j] - a[j] * x[i]) / (x[j] - x[i]); };
    out.area0 = quad;
    out.pair_estimates = {linear(0, 1), linear(1, 2)};
    const double decrement = std::abs(a[2] - out.pair_estimates[1]);
    out.extrapolation_flagged = std::abs(out.pair_estimates[0] - out.pair_estimates[1]) > 3.0 * decrement;
  }
  return out;
}

}  // namespace mha
