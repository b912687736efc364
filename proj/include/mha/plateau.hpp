#pragma once

#include "mha/curve.hpp"
#include "mha/diskmesh.hpp"

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mha {

/// A boundary vertex whose curve parameter is held fixed.
struct Pin {
  int boundary_index = 0;
  double curve_param = 0.0;
};
using PinSet = std::array<Pin, 3>;

struct PinPoint {
  double param = 0.0;
  Vec2 point = Vec2::Zero();
};

/// Weakly monotone circle map phi sampled at the boundary vertices.
///
/// Stored as its real-line lift: lifted[0] lies in [0, 2pi), the sequence is
/// nondecreasing, and lifted.back() <= lifted[0] + 2pi (the closing edge
/// carries the remainder of the single turn). Pinned vertices hold their
/// curve parameter exactly.
class BoundaryParam {
 public:
  /// `angles` are the lifted boundary-vertex angles of the mesh.
  BoundaryParam(std::vector<double> lifted, PinSet pins, std::vector<double> angles);

  /// Piecewise-linear in the boundary angle between the three pins.
  static BoundaryParam from_pins(const std::vector<double>& angles, const std::array<double, 3>& pin_params);

  int size() const { return static_cast<int>(lifted_.size()); }
  const std::vector<double>& lifted() const { return lifted_; }
  const PinSet& pins() const { return pins_; }
  const std::vector<double>& angles() const { return angles_; }
  /// Lifted value of pin k.
  double pin_lifted(int k) const { return lifted_[static_cast<size_t>(pins_[static_cast<size_t>(k)].boundary_index)]; }
  bool is_pinned(int i) const;

  /// Values reduced to [0, 2pi); pinned entries are the pin parameters.
  std::vector<double> values() const;
  /// First index whose reduced value wrapped past 2pi, or size() if none.
  int wrap_index() const;

  /// Lifted phi at boundary angle theta (piecewise-linear, periodic with
  /// phi(theta + 2pi) = phi(theta) + 2pi), anchored at lifted[0].
  double at(double theta) const;
  /// Largest increase of phi between adjacent boundary vertices.
  double max_jump() const;
  /// Boundary position where max_jump() occurs (the increment i -> i+1).
  int max_jump_index() const;

  /// Throws unless the monotone / single-turn / pin invariants hold exactly.
  void validate() const;

 private:
  std::vector<double> lifted_;
  PinSet pins_;
  std::vector<double> angles_;
};

bool same_pins(const PinSet& a, const PinSet& b);

struct SolverSettings {
  double step0 = 1.0;        // first trial move of the steepest node, in boundary spacings
  double step_min = 1e-10;   // backtracking floor, same units
  double energy_tol = 1e-8;  // per-iteration decrease threshold, relative to the cone energy
  int max_outer = 500;
  double cl_slack = 3.0;
  // Largest phi increment across one boundary edge, in boundary spacings;
  // 0 leaves increments unbounded.
  double increment_cap = 2.0;
};

struct IterateInfo {
  int iteration = 0;
  double energy = 0.0;
  double step = 0.0;
  const BoundaryParam* param = nullptr;
};

struct DouglasOptions {
  std::optional<std::array<double, 3>> pin_params;
  std::optional<BoundaryParam> warm_start;
  bool allow_zero_epsilon = false;
  std::function<void(const IterateInfo&)> observer;
};

struct DouglasResult {
  DiskMap map;
  BoundaryParam param;
  double energy = 0.0;
  double area = 0.0;
  double conformality = 0.0;
  int iterations = 0;
  bool converged = false;
  double cone_energy = 0.0;
  bool zero_epsilon = false;
  bool warm_started = false;
  std::vector<double> energy_history;
};

/// gamma_eps o phi at every boundary vertex, boundary_count x 4.
Eigen::MatrixXd boundary_trace(const LiftedCurve& lifted, const BoundaryParam& param);

/// Radial extension r * gamma_eps(alpha) of the lifted curve.
DiskMap cone_competitor(const LiftedCurve& lifted, const MeshPtr& mesh);

/// Three pins: greedy maximal parameter spread starting at t = 0, rejecting
/// triples closer than pi/3 in parameter or 1e-6 * diameter in the plane.
std::array<PinPoint, 3> select_pins(const ClosedCurve& curve);

/// Per-mesh state for the Douglas problem: the harmonic extender and the
/// dense Dirichlet-to-Neumann matrix, reused across lift parameters.
class DouglasSolver {
 public:
  explicit DouglasSolver(MeshPtr mesh);

  const MeshPtr& mesh_ptr() const { return mesh_; }
  const HarmonicExtender& extender() const { return extender_; }
  const Eigen::MatrixXd& boundary_operator() const { return dtn_; }

  /// Energy of the harmonic extension of gamma_eps o phi.
  double energy(const LiftedCurve& lifted, const BoundaryParam& param) const;
  /// d(energy)/d(phi_i) for every boundary vertex (pinned entries included).
  Eigen::VectorXd gradient(const LiftedCurve& lifted, const BoundaryParam& param) const;

  DouglasResult minimize(const LiftedCurve& lifted, const SolverSettings& cfg, const DouglasOptions& options = {}) const;

 private:
  MeshPtr mesh_;
  HarmonicExtender extender_;
  Eigen::MatrixXd dtn_;
};

DouglasResult douglas_minimize(const LiftedCurve& lifted, const MeshPtr& mesh, const SolverSettings& cfg,
                               const DouglasOptions& options = {});

/// Moves every unpinned parameter by -step * gradient, then projects each
/// arc between consecutive pins onto nondecreasing sequences bounded by the
/// pins.
BoundaryParam project_descent(const BoundaryParam& param, const Eigen::VectorXd& gradient, double step,
                              double max_increment = std::numeric_limits<double>::infinity());

/// One boundary-reparametrization step from `current`, with the gradient
/// taken from its map by the chain rule through gamma_eps.
BoundaryParam descent_step(const DouglasResult& current, const LiftedCurve& lifted, double step);

/// sqrt(8 pi energy / log(1/delta)).
double courant_lebesgue_modulus(double energy, double delta);

struct OscillationSample {
  double delta = 0.0;
  double oscillation = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct OscillationReport {
  std::vector<OscillationSample> samples;
  bool pass() const;
};

/// Largest oscillation of the boundary trace over arcs of each length delta,
/// compared against slack * courant_lebesgue_modulus(energy, delta).
OscillationReport courant_lebesgue_check(const DiskMap& map, double energy, double slack,
                                         std::span<const double> deltas);
/// delta in {2^-3, ..., 2^-8}.
std::vector<double> dyadic_deltas();

}  // namespace mha
