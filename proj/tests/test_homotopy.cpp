#include "mha/error.hpp"
#include "mha/homotopy.hpp"
#include "mha/io.hpp"
#include "mha/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace mha;

namespace {

const MeshPtr& default_mesh() {
  static const MeshPtr mesh = make_disk_mesh(24, 48);
  return mesh;
}

struct Solved {
  ClosedCurve curve;
  LimitResult limit;
};

Solved solve(const ClosedCurve& raw) {
  ClosedCurve c = resample_arclength(raw, 384);
  const ContinuationRecord rec = run_sweep(c, default_mesh(), epsilon_schedule(0.2, 0.5, 4), SolverSettings{});
  LimitResult lim = extract_limit(rec, default_limit_tol(c));
  return {std::move(c), std::move(lim)};
}

const Solved& circle() {
  static const Solved s = solve(circle_curve(1.0, 384));
  return s;
}

const Solved& eight() {
  static const Solved s = solve(figure_eight_curve(1.0, 0.6, true, 384));
  return s;
}

Homotopy build(const Solved& s) { return build_null_homotopy(s.limit, s.curve, default_phi_jump_tol(48)); }

BoundaryParam identity_param() {
  return BoundaryParam::from_pins(default_mesh()->boundary_angles(), {0.0, kTwoPi / 3, 2 * kTwoPi / 3});
}

}  // namespace

TEST_SUITE("homotopy") {
  TEST_CASE("endpoints on the circle") {
    const Homotopy h = build(circle());
    const int n = circle().curve.size();
    const Frame end = sample_frame(h, 1.0, n);
    for (int j = 0; j < n; ++j) CHECK((end.points[static_cast<size_t>(j)] - circle().curve.point(j)).norm() <= 1e-9);
    const Frame start = sample_frame(h, 0.0, 64);
    for (const Vec2& p : start.points) CHECK((p - start.points[0]).norm() == 0.0);
    CHECK(start.points[0].norm() < 1e-6);
  }

  TEST_CASE("frame at t = 1 reproduces the figure-eight samples") {
    const Homotopy h = build(eight());
    const int n = eight().curve.size();
    const Frame end = sample_frame(h, 1.0, n);
    for (int j = 0; j < n; ++j) CHECK((end.points[static_cast<size_t>(j)] - eight().curve.point(j)).norm() <= 1e-9);
  }

  TEST_CASE("interface continuity at t = 1/2") {
    for (const Solved* s : {&circle(), &eight()}) {
      const Homotopy h = build(*s);
      double gap = 0.0;
      for (int j = 0; j < 512; ++j) {
        const double theta = kTwoPi * j / 512;
        gap = std::max(gap, (h.disk_branch(0.5, theta) - h.boundary_branch(0.5, theta)).norm());
      }
      CHECK(gap <= h.interface_tolerance());
      // at boundary vertices both branches are exactly gamma(phi0)
      const auto phi = h.phi0().values();
      for (int i = 0; i < 48; ++i) {
        const double theta = default_mesh()->boundary_angles()[static_cast<size_t>(i)];
        const Vec2 want = s->curve.eval(phi[static_cast<size_t>(i)]);
        CHECK((h.disk_branch(0.5, theta) - want).norm() < 1e-9);
        CHECK((h.boundary_branch(0.5, theta) - want).norm() < 1e-9);
      }
    }
  }

  TEST_CASE("swept area of the circle homotopy") {
    const Homotopy h = build(circle());
    const SweptArea s = homotopy_swept_area(h, 64, 256);
    CHECK(s.total == doctest::Approx(kPi).epsilon(0.03));
    CHECK(s.total == doctest::Approx(map_area(h.u0())).epsilon(0.01));
    CHECK(s.second_half <= 1e-3 * s.total);
  }

  TEST_CASE("second-half area does not grow when time is refined") {
    for (const Solved* s : {&circle(), &eight()}) {
      const Homotopy h = build(*s);
      for (int n : {256, 1024}) {
        double prev = INFINITY;
        for (int steps : {32, 64, 128, 256}) {
          const double a = annulus_swept_area(h, steps, n);
          CHECK(a <= prev * (1.0 + 1e-9));
          prev = a;
        }
      }
    }
  }

  TEST_CASE("exact second half against midpoint quadrature") {
    // |det J| of the chord map X(u, tau) = (1 - u) a(tau) + u b(tau) summed on a
    // fine midpoint grid; corners slide along the curve, so cells fold and a
    // two-triangle split would count both sheets
    auto cross = [](const Vec2& x, const Vec2& y) { return x.x() * y.y() - x.y() * y.x(); };
    for (const Solved* s : {&circle(), &eight()}) {
      const Homotopy h = build(*s);
      const int n = 256, steps = 4096, us = 16;
      double quad = 0.0;
      std::vector<Vec2> prev(n), cur(n);
      for (int k = 0; k <= steps; ++k) {
        for (int j = 0; j < n; ++j) cur[static_cast<size_t>(j)] = h.eval(0.5 + 0.5 * k / steps, kTwoPi * j / n);
        for (int j = 0; k > 0 && j < n; ++j) {
          const size_t a = static_cast<size_t>(j), b = static_cast<size_t>((j + 1) % n);
          const Vec2 chord = 0.5 * (cur[b] + prev[b] - cur[a] - prev[a]);
          for (int q = 0; q < us; ++q) {
            const double u = (q + 0.5) / us;
            quad += std::abs(cross(chord, (1 - u) * (cur[a] - prev[a]) + u * (cur[b] - prev[b]))) / us;
          }
        }
        std::swap(prev, cur);
      }
      const double exact = annulus_swept_area(h, 2, n);
      CHECK(quad == doctest::Approx(exact).epsilon(0.01));
    }
  }

  TEST_CASE("constant homotopy sweeps nothing") {
    const DiskMap u0(default_mesh(), Eigen::MatrixXd::Constant(default_mesh()->vertex_count(), 2, 0.25));
    const ClosedCurve c = circle_curve(1.0, 96);
    const Homotopy h = build_null_homotopy(u0, identity_param(), c, default_phi_jump_tol(48));
    const Frame f = sample_frame(h, 0.3, 40);
    for (const Vec2& p : f.points) CHECK((p - Vec2(0.25, 0.25)).norm() < 1e-15);
    // disk half is constant; the second half is gamma(theta) at every time
    const SweptArea s = homotopy_swept_area(h, 16, 96);
    CHECK(s.first_half == 0.0);
    CHECK(s.second_half < 1e-12);
  }

  TEST_CASE("injected phi jump is rejected") {
    const BoundaryParam base = identity_param();
    std::vector<double> v = base.lifted();
    // squeeze the first arc so the edge into pin 1 jumps by 1.0 on top of
    // its natural spacing
    const double spacing = kTwoPi / 48;
    const double top = base.lifted()[16] - spacing - 1.0;
    for (int i = 1; i < 16; ++i) v[static_cast<size_t>(i)] = top * i / 15.0;
    const BoundaryParam jumpy(v, base.pins(), base.angles());
    CHECK(jumpy.max_jump() == doctest::Approx(spacing + 1.0));
    CHECK(jumpy.max_jump() > default_phi_jump_tol(48));
    CHECK(jumpy.max_jump_index() == 15);
    try {
      build_null_homotopy(circle().limit.u0, jumpy, circle().curve, default_phi_jump_tol(48));
      FAIL("expected discontinuous-parametrization");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDiscontinuousParametrization);
      CHECK(std::string(e.what()).find("15-16") != std::string::npos);
    }
  }

  TEST_CASE("time range") {
    const Homotopy h = build(circle());
    CHECK_THROWS_AS(h.eval(1.5, 0.0), Error);
    CHECK_THROWS_AS(sample_frame(h, -0.1, 8), Error);
    CHECK_THROWS_AS(sample_frame(h, 0.5, 2), Error);
    CHECK_THROWS_AS(homotopy_swept_area(h, 1, 8), Error);
  }

  TEST_CASE("frame export") {
    const Homotopy h = build(circle());
    const FrameExport a = render_frames(h, 5, 64, true);
    const FrameExport b = render_frames(h, 5, 64, true);
    CHECK(a.document == b.document);
    CHECK(a.svgs == b.svgs);
    CHECK(a.svgs.size() == 5);
    const auto doc = nlohmann::json::parse(a.document);
    REQUIRE(doc["frames"].size() == 5);
    const std::vector<double> want{0.0, 0.25, 0.5, 0.75, 1.0};
    for (size_t k = 0; k < 5; ++k) {
      CHECK(doc["frames"][k]["t"].get<double>() == want[k]);
      CHECK(doc["frames"][k]["points"].size() == 64);
    }
    CHECK(doc["meta"]["time_steps"] == 5);
    CHECK(doc["meta"]["n"] == 64);
    CHECK(doc["meta"]["area"].get<double>() == doctest::Approx(kPi).epsilon(0.03));
  }

  TEST_CASE("chord deficit of the uniform circle") {
    // per chord: fan of 8 polygon triangles minus the chord triangle
    const double want = 0.5 * (384 * std::sin(kTwoPi / 384) - 48 * std::sin(kTwoPi / 48));
    CHECK(chord_deficit(circle_curve(1.0, 384), identity_param()) == doctest::Approx(want).epsilon(1e-10));
  }
}
