#include "mha/plateau.hpp"

#include "mha/error.hpp"
#include "mha/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mha {

namespace {

// Derivative of the lifted interpolant at t; at a sample parameter the two
// one-sided slopes are averaged.
Vec4 lifted_slope(const LiftedCurve& lifted, double t) {
  const ClosedCurve& base = lifted.base();
  const double w = wrap_angle(t);
  const int k = base.segment_at(w);
  const int n = base.size();
  const auto& p = lifted.points();
  const Vec4 right = (p[static_cast<size_t>((k + 1) % n)] - p[static_cast<size_t>(k)]) / base.param_step(k);
  if (w != base.param(k)) return right;
  const int j = (k + n - 1) % n;
  const Vec4 left = (p[static_cast<size_t>(k)] - p[static_cast<size_t>(j)]) / base.param_step(j);
  return 0.5 * (left + right);
}

constexpr int kQuietIterations = 5;

double lifted_pin(double anchor, double param) {
  double v = param;
  while (v < anchor) v += kTwoPi;
  while (v >= anchor + kTwoPi) v -= kTwoPi;
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// BoundaryParam

BoundaryParam::BoundaryParam(std::vector<double> lifted, PinSet pins, std::vector<double> angles)
    : lifted_(std::move(lifted)), pins_(pins), angles_(std::move(angles)) {
  validate();
}

BoundaryParam BoundaryParam::from_pins(const std::vector<double>& angles, const std::array<double, 3>& pin_params) {
  const int b = static_cast<int>(angles.size());
  if (b < 3 || b % 3 != 0) fail(ErrorKind::kConfiguration, "boundary vertex count must be a positive multiple of 3");
  for (double p : pin_params) {
    if (!std::isfinite(p) || p < 0.0 || p >= kTwoPi) fail(ErrorKind::kDomain, "pin parameter outside [0, 2pi)");
  }
  const std::array<int, 4> idx{0, b / 3, 2 * b / 3, b};
  std::array<double, 4> value{};
  value[0] = pin_params[0];
  value[1] = lifted_pin(value[0], pin_params[1]);
  value[2] = lifted_pin(value[0], pin_params[2]);
  value[3] = value[0] + kTwoPi;
  if (!(value[0] < value[1] && value[1] < value[2])) {
    fail(ErrorKind::kDomain, "pin parameters must be distinct and in increasing cyclic order");
  }
  std::array<double, 4> ang{angles[0], angles[static_cast<size_t>(idx[1])], angles[static_cast<size_t>(idx[2])],
                            angles[0] + kTwoPi};
  std::vector<double> lifted(static_cast<size_t>(b));
  for (int a = 0; a < 3; ++a) {
    for (int i = idx[static_cast<size_t>(a)]; i < idx[static_cast<size_t>(a) + 1]; ++i) {
      if (i == idx[static_cast<size_t>(a)]) {
        lifted[static_cast<size_t>(i)] = value[static_cast<size_t>(a)];
        continue;
      }
      const double s = (angles[static_cast<size_t>(i)] - ang[static_cast<size_t>(a)]) /
                       (ang[static_cast<size_t>(a) + 1] - ang[static_cast<size_t>(a)]);
      lifted[static_cast<size_t>(i)] =
          value[static_cast<size_t>(a)] + s * (value[static_cast<size_t>(a) + 1] - value[static_cast<size_t>(a)]);
    }
  }
  PinSet pins{Pin{idx[0], pin_params[0]}, Pin{idx[1], pin_params[1]}, Pin{idx[2], pin_params[2]}};
  return BoundaryParam(std::move(lifted), pins, angles);
}

bool BoundaryParam::is_pinned(int i) const {
  return std::any_of(pins_.begin(), pins_.end(), [i](const Pin& p) { return p.boundary_index == i; });
}

void BoundaryParam::validate() const {
  const int b = size();
  if (b < 3) fail(ErrorKind::kDomain, "boundary parametrization needs at least 3 values");
  if (angles_.size() != lifted_.size()) fail(ErrorKind::kDomain, "boundary angles and values differ in length");
  for (int i = 0; i < b; ++i) {
    if (!std::isfinite(lifted_[static_cast<size_t>(i)])) {
      fail(ErrorKind::kDomain, "non-finite boundary parameter at index " + std::to_string(i));
    }
  }
  if (lifted_[0] < 0.0 || lifted_[0] >= kTwoPi) fail(ErrorKind::kDomain, "first boundary parameter outside [0, 2pi)");
  for (int i = 1; i < b; ++i) {
    if (lifted_[static_cast<size_t>(i)] < lifted_[static_cast<size_t>(i) - 1]) {
      fail(ErrorKind::kDomain, "boundary parametrization decreases at index " + std::to_string(i));
    }
  }
  if (lifted_.back() > lifted_[0] + kTwoPi) fail(ErrorKind::kDomain, "boundary parametrization exceeds one turn");
  if (pins_[0].boundary_index != 0) fail(ErrorKind::kDomain, "first pin must sit at boundary index 0");
  for (int k = 0; k < 3; ++k) {
    const Pin& p = pins_[static_cast<size_t>(k)];
    if (p.boundary_index < 0 || p.boundary_index >= b) fail(ErrorKind::kDomain, "pin index out of range");
    if (k > 0 && p.boundary_index <= pins_[static_cast<size_t>(k) - 1].boundary_index) {
      fail(ErrorKind::kDomain, "pin indices must increase");
    }
    if (circular_distance(lifted_[static_cast<size_t>(p.boundary_index)], p.curve_param) > 1e-12) {
      fail(ErrorKind::kDomain, "pinned value moved at boundary index " + std::to_string(p.boundary_index));
    }
  }
}

std::vector<double> BoundaryParam::values() const {
  std::vector<double> out(lifted_.size());
  for (size_t i = 0; i < lifted_.size(); ++i) out[i] = wrap_angle(lifted_[i]);
  for (const Pin& p : pins_) out[static_cast<size_t>(p.boundary_index)] = p.curve_param;
  return out;
}

int BoundaryParam::wrap_index() const {
  for (int i = 0; i < size(); ++i) {
    if (lifted_[static_cast<size_t>(i)] >= kTwoPi) return i;
  }
  return size();
}

double BoundaryParam::at(double theta) const {
  const double a0 = angles_[0];
  const double turns = std::floor((theta - a0) / kTwoPi);
  double t = theta - turns * kTwoPi;
  if (t < a0) t = a0;
  const auto it = std::upper_bound(angles_.begin(), angles_.end(), t);
  const int i = static_cast<int>(it - angles_.begin()) - 1;
  const int b = size();
  const double x0 = angles_[static_cast<size_t>(i)];
  const double x1 = i + 1 < b ? angles_[static_cast<size_t>(i) + 1] : a0 + kTwoPi;
  const double y0 = lifted_[static_cast<size_t>(i)];
  const double y1 = i + 1 < b ? lifted_[static_cast<size_t>(i) + 1] : lifted_[0] + kTwoPi;
  const double s = std::clamp((t - x0) / (x1 - x0), 0.0, 1.0);
  return y0 + s * (y1 - y0) + turns * kTwoPi;
}

double BoundaryParam::max_jump() const {
  const int i = max_jump_index();
  const double next = i + 1 < size() ? lifted_[static_cast<size_t>(i) + 1] : lifted_[0] + kTwoPi;
  return next - lifted_[static_cast<size_t>(i)];
}

int BoundaryParam::max_jump_index() const {
  int best = 0;
  double jump = -1.0;
  for (int i = 0; i < size(); ++i) {
    const double next = i + 1 < size() ? lifted_[static_cast<size_t>(i) + 1] : lifted_[0] + kTwoPi;
    if (next - lifted_[static_cast<size_t>(i)] > jump) {
      jump = next - lifted_[static_cast<size_t>(i)];
      best = i;
    }
  }
  return best;
}

bool same_pins(const PinSet& a, const PinSet& b) {
  for (size_t k = 0; k < 3; ++k) {
    if (a[k].boundary_index != b[k].boundary_index || a[k].curve_param != b[k].curve_param) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Competitors and pins

Eigen::MatrixXd boundary_trace(const LiftedCurve& lifted, const BoundaryParam& param) {
  const std::vector<double> v = param.values();
  Eigen::MatrixXd g(param.size(), 4);
  for (int i = 0; i < param.size(); ++i) g.row(i) = lifted.eval(v[static_cast<size_t>(i)]).transpose();
  return g;
}

DiskMap cone_competitor(const LiftedCurve& lifted, const MeshPtr& mesh) {
  const DiskMesh& m = *mesh;
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(m.vertex_count(), 4);
  for (int v = 0; v < m.vertex_count(); ++v) {
    const int pos = m.boundary_position(v);
    if (pos >= 0) {
      values.row(v) = lifted.eval(m.boundary_angles()[static_cast<size_t>(pos)]).transpose();
      continue;
    }
    const Vec2& x = m.vertices()[static_cast<size_t>(v)];
    const double r = x.norm();
    if (r == 0.0) continue;
    values.row(v) = r * lifted.eval(std::atan2(x.y(), x.x())).transpose();
  }
  return DiskMap(mesh, std::move(values));
}

std::array<PinPoint, 3> select_pins(const ClosedCurve& curve) {
  const double diam = curve.diameter();
  if (diam < 1e-9) fail(ErrorKind::kDegenerateCurve, "curve diameter is below 1e-9; no admissible pins");
  const int n = curve.size();
  const double min_image = 1e-6 * diam;
  const double min_gap = kPi / 3.0 - 1e-12;
  const auto& params = curve.params();

  auto nearest = [&](double target) {
    const double t = wrap_angle(target);
    const auto it = std::lower_bound(params.begin(), params.end(), t);
    int hi = static_cast<int>(it - params.begin()) % n;
    int lo = (hi + n - 1) % n;
    return circular_distance(params[static_cast<size_t>(lo)], t) <= circular_distance(params[static_cast<size_t>(hi)], t)
               ? lo
               : hi;
  };
  auto admissible = [&](int a, int b, int c) {
    const double pa = curve.param(a), pb = curve.param(b), pc = curve.param(c);
    if (circular_distance(pa, pb) < min_gap || circular_distance(pb, pc) < min_gap ||
        circular_distance(pa, pc) < min_gap) {
      return false;
    }
    if (!(wrap_angle(pb - pa) < wrap_angle(pc - pa))) return false;
    return (curve.point(a) - curve.point(b)).norm() >= min_image &&
           (curve.point(b) - curve.point(c)).norm() >= min_image &&
           (curve.point(a) - curve.point(c)).norm() >= min_image;
  };

  const int reach = std::max(1, n / 6);
  for (int a = 0; a < n; ++a) {
    const int b0 = nearest(curve.param(a) + kTwoPi / 3.0);
    const int c0 = nearest(curve.param(a) + 2.0 * kTwoPi / 3.0);
    for (int d = 0; d <= 2 * reach; ++d) {
      for (int ob = -std::min(d, reach); ob <= std::min(d, reach); ++ob) {
        const int rest = d - std::abs(ob);
        if (rest > reach) continue;
        for (int oc : {rest, -rest}) {
          const int b = ((b0 + ob) % n + n) % n;
          const int c = ((c0 + oc) % n + n) % n;
          if (admissible(a, b, c)) {
            return {PinPoint{curve.param(a), curve.point(a)}, PinPoint{curve.param(b), curve.point(b)},
                    PinPoint{curve.param(c), curve.point(c)}};
          }
          if (rest == 0) break;
        }
      }
    }
  }
  fail(ErrorKind::kDegenerateCurve, "no three samples are separated enough to serve as pins");
}

// ---------------------------------------------------------------------------
// Solver

DouglasSolver::DouglasSolver(MeshPtr mesh)
    : mesh_(std::move(mesh)), extender_(mesh_), dtn_(extender_.boundary_operator()) {}

double DouglasSolver::energy(const LiftedCurve& lifted, const BoundaryParam& param) const {
  const Eigen::MatrixXd g = boundary_trace(lifted, param);
  return 0.5 * (g.cwiseProduct(dtn_ * g)).sum();
}

Eigen::VectorXd DouglasSolver::gradient(const LiftedCurve& lifted, const BoundaryParam& param) const {
  const Eigen::MatrixXd g = boundary_trace(lifted, param);
  const Eigen::MatrixXd sg = dtn_ * g;
  const std::vector<double> v = param.values();
  Eigen::VectorXd grad(param.size());
  for (int i = 0; i < param.size(); ++i) {
    grad(i) = sg.row(i).dot(lifted_slope(lifted, v[static_cast<size_t>(i)]).transpose());
  }
  return grad;
}

BoundaryParam project_descent(const BoundaryParam& param, const Eigen::VectorXd& gradient, double step,
                              double max_increment) {
  const int b = param.size();
  const PinSet& pins = param.pins();
  std::vector<double> next = param.lifted();
  for (int a = 0; a < 3; ++a) {
    const int lo = pins[static_cast<size_t>(a)].boundary_index;
    const int hi = a < 2 ? pins[static_cast<size_t>(a) + 1].boundary_index : b;
    const double lower = next[static_cast<size_t>(lo)];
    const double upper = a < 2 ? next[static_cast<size_t>(hi)] : next[0] + kTwoPi;
    if (hi - lo < 2) continue;
    std::vector<double> y;
    y.reserve(static_cast<size_t>(hi - lo - 1));
    for (int j = lo + 1; j < hi; ++j) y.push_back(param.lifted()[static_cast<size_t>(j)] - step * gradient(j));
    std::vector<double> fit;
    if (std::isfinite(max_increment)) {
      fit = bounded_increment_projection(y, lower, upper, max_increment);
    } else {
      fit = isotonic_regression(y);
      for (double& v : fit) v = std::clamp(v, lower, upper);
    }
    for (int j = lo + 1; j < hi; ++j) next[static_cast<size_t>(j)] = fit[static_cast<size_t>(j - lo - 1)];
  }
  return BoundaryParam(std::move(next), pins, param.angles());
}

BoundaryParam descent_step(const DouglasResult& current, const LiftedCurve& lifted, double step) {
  if (!(step > 0.0)) fail(ErrorKind::kDomain, "descent step must be positive");
  const DiskMesh& mesh = current.map.mesh();
  const Eigen::MatrixXd ku = mesh.stiffness() * current.map.values();
  const std::vector<double> v = current.param.values();
  Eigen::VectorXd grad(current.param.size());
  for (int i = 0; i < current.param.size(); ++i) {
    const int vert = mesh.boundary_loop()[static_cast<size_t>(i)];
    grad(i) = ku.row(vert).dot(lifted_slope(lifted, v[static_cast<size_t>(i)]).transpose());
  }
  return project_descent(current.param, grad, step);
}

DouglasResult DouglasSolver::minimize(const LiftedCurve& lifted, const SolverSettings& cfg,
                                      const DouglasOptions& options) const {
  if (cfg.step0 <= 0.0 || cfg.step_min <= 0.0 || cfg.step_min > cfg.step0 || cfg.energy_tol <= 0.0 ||
      cfg.max_outer < 1 || cfg.cl_slack <= 0.0 || cfg.increment_cap < 0.0 ||
      (cfg.increment_cap > 0.0 && cfg.increment_cap < 1.0)) {
    fail(ErrorKind::kConfiguration, "solver settings out of range");
  }
  if (lifted.epsilon() == 0.0 && !options.allow_zero_epsilon) {
    fail(ErrorKind::kDomain, "lift parameter must be positive");
  }
  const DiskMesh& mesh = *mesh_;
  const int b = mesh.boundary_count();

  std::array<double, 3> pin_params{};
  if (options.pin_params) {
    pin_params = *options.pin_params;
  } else {
    const auto chosen = select_pins(lifted.base());
    for (size_t k = 0; k < 3; ++k) pin_params[k] = chosen[k].param;
  }
  const BoundaryParam cold = BoundaryParam::from_pins(mesh.boundary_angles(), pin_params);

  const DiskMap cone = cone_competitor(lifted, mesh_);
  const double cone_energy = dirichlet_energy(cone);
  const double tol = cfg.energy_tol * cone_energy;

  BoundaryParam current = cold;
  double e = energy(lifted, cold);
  bool warm = false;
  if (options.warm_start) {
    const BoundaryParam& w = *options.warm_start;
    if (w.size() != b || !same_pins(w.pins(), cold.pins())) {
      fail(ErrorKind::kPrecondition, "warm start does not match the mesh boundary or the pins");
    }
    const double ew = energy(lifted, w);
    if (ew < e) {
      current = w;
      e = ew;
      warm = true;
    }
  }

  std::vector<double> history{e};
  if (options.observer) options.observer(IterateInfo{0, e, 0.0, &current});

  const double spacing = kTwoPi / b;
  const double cap =
      cfg.increment_cap > 0.0 ? cfg.increment_cap * spacing : std::numeric_limits<double>::infinity();
  double alpha_prev = -1.0;
  std::vector<double> prev_lifted;
  Eigen::VectorXd prev_grad;
  bool converged = false;
  int iterations = 0;
  int quiet = 0;
  for (int it = 1; it <= cfg.max_outer; ++it) {
    const Eigen::VectorXd grad = gradient(lifted, current);
    double gmax = 0.0;
    for (int i = 0; i < b; ++i) {
      if (!current.is_pinned(i)) gmax = std::max(gmax, std::abs(grad(i)));
    }
    if (gmax == 0.0) {
      converged = true;
      break;
    }
    const double alpha_min = cfg.step_min * spacing / gmax;
    double alpha = alpha_prev > 0.0 ? 2.0 * alpha_prev : cfg.step0 * spacing / gmax;
    if (!prev_lifted.empty()) {
      // Barzilai-Borwein trial step from the last accepted move.
      double ss = 0.0, sy = 0.0;
      for (int i = 0; i < b; ++i) {
        if (current.is_pinned(i)) continue;
        const double si = current.lifted()[static_cast<size_t>(i)] - prev_lifted[static_cast<size_t>(i)];
        ss += si * si;
        sy += si * (grad(i) - prev_grad(i));
      }
      if (sy > 0.0 && ss > 0.0) alpha = ss / sy;
    }
    alpha = std::max(alpha, alpha_min);

    bool accepted = false;
    BoundaryParam trial = current;
    double e_trial = e;
    while (alpha >= alpha_min) {
      trial = project_descent(current, grad, alpha, cap);
      e_trial = energy(lifted, trial);
      if (e_trial < e) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // At the step floor: either the projected gradient predicts less than the
      // tolerance (a constrained stationary point) or the descent is broken.
      const BoundaryParam floor_step = project_descent(current, grad, alpha_min, cap);
      double predicted = 0.0;
      for (int i = 0; i < b; ++i) {
        predicted += grad(i) * (current.lifted()[static_cast<size_t>(i)] - floor_step.lifted()[static_cast<size_t>(i)]);
      }
      if (predicted <= tol) {
        converged = true;
        break;
      }
      throw Error(ErrorKind::kDescentFailure,
                  "no energy decrease at the minimum step (lift parameter " + std::to_string(lifted.epsilon()) + ")");
    }
    iterations = it;
    const double decrease = e - e_trial;
    prev_lifted = current.lifted();
    prev_grad = grad;
    current = std::move(trial);
    e = e_trial;
    alpha_prev = alpha;
    history.push_back(e);
    if (options.observer) options.observer(IterateInfo{it, e, alpha, &current});
    quiet = decrease < tol ? quiet + 1 : 0;
    if (quiet >= kQuietIterations) {
      converged = true;
      break;
    }
  }

  DiskMap map = extender_.extend(boundary_trace(lifted, current));
  const double energy_final = dirichlet_energy(map);
  const double area = map_area(map);
  return DouglasResult{std::move(map),
                       std::move(current),
                       energy_final,
                       area,
                       energy_final - area,
                       iterations,
                       converged,
                       cone_energy,
                       lifted.epsilon() == 0.0,
                       warm,
                       std::move(history)};
}

DouglasResult douglas_minimize(const LiftedCurve& lifted, const MeshPtr& mesh, const SolverSettings& cfg,
                               const DouglasOptions& options) {
  return DouglasSolver(mesh).minimize(lifted, cfg, options);
}

// ---------------------------------------------------------------------------
// Boundary modulus

double courant_lebesgue_modulus(double energy, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorKind::kDomain, "delta must lie in (0, 1)");
  return std::sqrt(8.0 * kPi * std::max(energy, 0.0) / std::log(1.0 / delta));
}

std::vector<double> dyadic_deltas() {
  std::vector<double> out;
  for (int k = 3; k <= 8; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

bool OscillationReport::pass() const {
  return std::all_of(samples.begin(), samples.end(), [](const OscillationSample& s) { return s.pass; });
}

OscillationReport courant_lebesgue_check(const DiskMap& map, double energy, double slack,
                                         std::span<const double> deltas) {
  const DiskMesh& mesh = map.mesh();
  const int b = mesh.boundary_count();
  const auto& angles = mesh.boundary_angles();
  std::vector<Eigen::VectorXd> trace;
  for (int i = 0; i < b; ++i) trace.push_back(map.values().row(mesh.boundary_loop()[static_cast<size_t>(i)]).transpose());

  auto at = [&](double theta) -> Eigen::VectorXd {
    const double a0 = angles[0];
    double t = theta - std::floor((theta - a0) / kTwoPi) * kTwoPi;
    const int i = std::clamp(static_cast<int>(std::upper_bound(angles.begin(), angles.end(), t) - angles.begin()) - 1, 0, b - 1);
    const double x1 = i + 1 < b ? angles[static_cast<size_t>(i) + 1] : a0 + kTwoPi;
    const double s = std::clamp((t - angles[static_cast<size_t>(i)]) / (x1 - angles[static_cast<size_t>(i)]), 0.0, 1.0);
    return (1.0 - s) * trace[static_cast<size_t>(i)] + s * trace[static_cast<size_t>((i + 1) % b)];
  };

  OscillationReport report;
  for (double delta : deltas) {
    double worst = 0.0;
    for (int i = 0; i < b; ++i) {
      for (double start : {angles[static_cast<size_t>(i)], angles[static_cast<size_t>(i)] - delta}) {
        std::vector<Eigen::VectorXd> pts{at(start), at(start + delta)};
        for (int j = 0; j < b; ++j) {
          for (double lift : {0.0, kTwoPi, -kTwoPi}) {
            const double a = angles[static_cast<size_t>(j)] + lift;
            if (a > start && a < start + delta) pts.push_back(trace[static_cast<size_t>(j)]);
          }
        }
        for (size_t p = 0; p < pts.size(); ++p) {
          for (size_t q = p + 1; q < pts.size(); ++q) worst = std::max(worst, (pts[p] - pts[q]).norm());
        }
      }
    }
    const double bound = courant_lebesgue_modulus(energy, delta);
    report.samples.push_back(OscillationSample{delta, worst, bound, worst <= slack * bound});
  }
  return report;
}

}  // namespace mha
