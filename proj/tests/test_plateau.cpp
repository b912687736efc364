#include "mha/error.hpp"
#include "mha/oracle.hpp"
#include "mha/plateau.hpp"

#include <doctest.h>

#include <cmath>

using namespace mha;

namespace {

const MeshPtr& default_mesh() {
  static const MeshPtr mesh = make_disk_mesh(24, 48);
  return mesh;
}

std::array<double, 3> pin_params(const ClosedCurve& c) {
  const auto p = select_pins(c);
  return {p[0].param, p[1].param, p[2].param};
}

bool monotone_with_pins(const BoundaryParam& p, const std::array<double, 3>& pins) {
  const auto& l = p.lifted();
  for (size_t i = 1; i < l.size(); ++i) {
    if (l[i] < l[i - 1]) return false;
  }
  if (l.back() > l[0] + kTwoPi) return false;
  for (int k = 0; k < 3; ++k) {
    if (circular_distance(p.pin_lifted(k), pins[static_cast<size_t>(k)]) > 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("plateau") {
  TEST_CASE("boundary parametrization from pins") {
    const auto& angles = default_mesh()->boundary_angles();
    const BoundaryParam p = BoundaryParam::from_pins(angles, {0.0, kTwoPi / 3, 2 * kTwoPi / 3});
    for (int i = 0; i < p.size(); ++i) CHECK(p.lifted()[static_cast<size_t>(i)] == doctest::Approx(angles[static_cast<size_t>(i)]));
    CHECK(p.pins()[1].boundary_index == 16);
    CHECK(p.pins()[2].boundary_index == 32);
    CHECK(p.at(1.0) == doctest::Approx(1.0));
    CHECK(p.max_jump() == doctest::Approx(kTwoPi / 48));
    CHECK_THROWS_AS(BoundaryParam::from_pins(angles, {0.0, 3.0, 2.0}), Error);

    // wrapped pins: the lift stays nondecreasing across 2 pi
    const BoundaryParam w = BoundaryParam::from_pins(angles, {5.0, 0.5, 2.5});
    CHECK(w.lifted()[0] == 5.0);
    CHECK(w.pin_lifted(1) == doctest::Approx(0.5 + kTwoPi));
    CHECK(w.values()[16] == 0.5);

    std::vector<double> bad = p.lifted();
    bad[5] = bad[3] - 0.1;
    CHECK_THROWS_AS(BoundaryParam(bad, p.pins(), angles), Error);
    std::vector<double> moved = p.lifted();
    moved[16] += 1e-6;
    CHECK_THROWS_AS(BoundaryParam(moved, p.pins(), angles), Error);
  }

  TEST_CASE("cone competitor on the circle") {
    const ClosedCurve c = circle_curve(1.0, 384);
    const DiskMap flat = cone_competitor(lift(c, 0.0), default_mesh());
    CHECK(dirichlet_energy(flat) == doctest::Approx(kPi).epsilon(0.03));
    const DiskMap lifted = cone_competitor(lift(c, 0.1), default_mesh());
    CHECK(dirichlet_energy(lifted) == doctest::Approx(1.01 * kPi).epsilon(0.03));
    for (int v = 0; v < default_mesh()->vertex_count(); ++v) {
      if (default_mesh()->vertices()[static_cast<size_t>(v)].norm() == 0.0) {
        CHECK(lifted.values().row(v).norm() == 0.0);
      }
    }
  }

  TEST_CASE("gradient matches central differences") {
    const ClosedCurve c = resample_arclength(figure_eight_curve(1.0, 0.6, true, 384), 384);
    const LiftedCurve l = lift(c, 0.1);
    const DouglasSolver solver(default_mesh());
    const auto pins = pin_params(c);
    BoundaryParam p = BoundaryParam::from_pins(default_mesh()->boundary_angles(), pins);
    // move off the sample grid so one-sided slopes agree
    std::vector<double> v = p.lifted();
    for (int i = 0; i < p.size(); ++i) {
      if (!p.is_pinned(i)) v[static_cast<size_t>(i)] += 0.0037;
    }
    p = BoundaryParam(v, p.pins(), p.angles());
    const Eigen::VectorXd g = solver.gradient(l, p);
    const double h = 1e-7;
    for (int i : {3, 10, 20, 40}) {
      std::vector<double> up = v, down = v;
      up[static_cast<size_t>(i)] += h;
      down[static_cast<size_t>(i)] -= h;
      const double fd =
          (solver.energy(l, BoundaryParam(up, p.pins(), p.angles())) - solver.energy(l, BoundaryParam(down, p.pins(), p.angles()))) /
          (2 * h);
      CHECK(g(i) == doctest::Approx(fd).epsilon(1e-5));
    }
  }

  TEST_CASE("circle minimizer is the flat disk") {
    const ClosedCurve c = circle_curve(1.0, 384);
    const LiftedCurve l = lift(c, 0.1);
    DouglasOptions opt;
    opt.pin_params = pin_params(c);
    std::vector<double> energies;
    bool invariants = true;
    opt.observer = [&](const IterateInfo& info) {
      energies.push_back(info.energy);
      invariants = invariants && monotone_with_pins(*info.param, *opt.pin_params);
    };
    const DouglasResult r = douglas_minimize(l, default_mesh(), SolverSettings{}, opt);
    CHECK(r.converged);
    CHECK(r.area == doctest::Approx(1.01 * kPi).epsilon(0.02));
    CHECK(r.conformality <= 0.02 * r.area);
    CHECK(r.energy <= r.cone_energy + 1e-9);
    CHECK(invariants);
    for (size_t k = 1; k < energies.size(); ++k) CHECK(energies[k] <= energies[k - 1] + 1e-12);
    for (int j = 0; j < 4; ++j) {
      const auto& vals = r.map.values();
      double bmax = -INFINITY, bmin = INFINITY;
      for (int b : default_mesh()->boundary_loop()) {
        bmax = std::max(bmax, vals(b, j));
        bmin = std::min(bmin, vals(b, j));
      }
      CHECK(vals.col(j).maxCoeff() <= bmax + 1e-10);
      CHECK(vals.col(j).minCoeff() >= bmin - 1e-10);
    }
  }

  TEST_CASE("iterates stay monotone and pinned on self-intersecting curves") {
    for (const ClosedCurve& raw : {doubled_circle_curve(1.0, 384), figure_eight_curve(1.0, 0.6, true, 384),
                                   figure_eight_curve(1.0, 0.6, false, 384)}) {
      const ClosedCurve c = resample_arclength(raw, 384);
      DouglasOptions opt;
      opt.pin_params = pin_params(c);
      bool invariants = true;
      double last = INFINITY;
      bool decreasing = true;
      opt.observer = [&](const IterateInfo& info) {
        invariants = invariants && monotone_with_pins(*info.param, *opt.pin_params);
        decreasing = decreasing && info.energy <= last + 1e-12;
        last = info.energy;
      };
      const DouglasResult r = douglas_minimize(lift(c, 0.05), default_mesh(), SolverSettings{}, opt);
      CHECK(invariants);
      CHECK(decreasing);
      CHECK(r.energy <= r.cone_energy + 1e-9);
      CHECK(r.energy >= r.area - 1e-10);
    }
  }

  TEST_CASE("solver settings and epsilon checks") {
    const ClosedCurve c = circle_curve(1.0, 96);
    try {
      douglas_minimize(lift(c, 0.0), default_mesh(), SolverSettings{});
      FAIL("expected domain error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDomain);
    }
    DouglasOptions opt;
    opt.allow_zero_epsilon = true;
    const DouglasResult r = douglas_minimize(lift(c, 0.0), default_mesh(), SolverSettings{}, opt);
    CHECK(r.zero_epsilon);

    SolverSettings bad;
    bad.max_outer = 0;
    CHECK_THROWS_AS(douglas_minimize(lift(c, 0.1), default_mesh(), bad), Error);
    bad = SolverSettings{};
    bad.increment_cap = 0.5;
    CHECK_THROWS_AS(douglas_minimize(lift(c, 0.1), default_mesh(), bad), Error);
  }

  TEST_CASE("projected descent") {
    const auto& angles = default_mesh()->boundary_angles();
    const BoundaryParam p = BoundaryParam::from_pins(angles, {0.0, kTwoPi / 3, 2 * kTwoPi / 3});
    const int b = p.size();

    const BoundaryParam same = project_descent(p, Eigen::VectorXd::Zero(b), 1.0);
    CHECK(same.lifted() == p.lifted());

    // pinned entries ignore the gradient
    const BoundaryParam pinned = project_descent(p, Eigen::VectorXd::Constant(b, 3.0), 0.01);
    for (const Pin& pin : p.pins()) {
      CHECK(pinned.lifted()[static_cast<size_t>(pin.boundary_index)] == p.lifted()[static_cast<size_t>(pin.boundary_index)]);
    }

    // swapping two neighbours pools them to their mean
    Eigen::VectorXd g = Eigen::VectorXd::Zero(b);
    const double s = angles[1];
    g(5) = -1.5 * s;   // pushes index 5 forward by 1.5 spacings
    g(6) = 1.5 * s;    // pushes index 6 back by 1.5 spacings
    const BoundaryParam pooled = project_descent(p, g, 1.0);
    const double mean = 0.5 * (p.lifted()[5] + p.lifted()[6]);
    CHECK(pooled.lifted()[5] == doctest::Approx(mean));
    CHECK(pooled.lifted()[6] == doctest::Approx(mean));
    CHECK(pooled.lifted()[4] == p.lifted()[4]);
    CHECK(pooled.lifted()[7] == p.lifted()[7]);
  }

  TEST_CASE("descent step") {
    const ClosedCurve c = circle_curve(1.0, 192);
    const LiftedCurve l = lift(c, 0.1);
    DouglasOptions opt;
    opt.pin_params = pin_params(c);
    const DouglasResult r = douglas_minimize(l, default_mesh(), SolverSettings{}, opt);
    const BoundaryParam next = descent_step(r, l, 1e-3);
    for (const Pin& pin : next.pins()) {
      CHECK(next.lifted()[static_cast<size_t>(pin.boundary_index)] == r.param.lifted()[static_cast<size_t>(pin.boundary_index)]);
    }
    try {
      descent_step(r, l, 0.0);
      FAIL("expected domain error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDomain);
    }
  }

  TEST_CASE("Courant-Lebesgue modulus") {
    CHECK(courant_lebesgue_modulus(kPi, std::exp(-8 * kPi)) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
    CHECK(courant_lebesgue_modulus(0.0, 0.25) == 0.0);
    const double near_one = courant_lebesgue_modulus(kPi, 0.99);
    CHECK(std::isfinite(near_one));
    CHECK(near_one > courant_lebesgue_modulus(kPi, 0.5));
    CHECK_THROWS_AS(courant_lebesgue_modulus(1.0, 1.0), Error);
    CHECK(dyadic_deltas() == std::vector<double>{0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625});
  }

  TEST_CASE("pin selection") {
    const auto circle = select_pins(circle_curve(1.0, 384));
    CHECK(circle[0].param == 0.0);
    CHECK(circle[1].param == doctest::Approx(kTwoPi / 3));
    CHECK(circle[2].param == doctest::Approx(2 * kTwoPi / 3));

    const ClosedCurve eight = figure_eight_curve(1.0, 0.6, true, 384);
    const auto p = select_pins(eight);
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        CHECK((p[static_cast<size_t>(i)].point - p[static_cast<size_t>(j)].point).norm() > 1e-6 * eight.diameter());
      }
    }

    const ClosedCurve tiny = circle_curve(1e-11, 64);
    try {
      select_pins(tiny);
      FAIL("expected degenerate-curve error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDegenerateCurve);
    }
  }
}
