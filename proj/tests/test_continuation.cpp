#include "mha/continuation.hpp"
#include "mha/error.hpp"
#include "mha/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace mha;

namespace {

const MeshPtr& default_mesh() {
  static const MeshPtr mesh = make_disk_mesh(24, 48);
  return mesh;
}

const ContinuationRecord& circle_record() {
  static const ContinuationRecord rec =
      run_sweep(circle_curve(1.0, 384), default_mesh(), epsilon_schedule(0.2, 0.5, 4), SolverSettings{});
  return rec;
}

}  // namespace

TEST_SUITE("continuation") {
  TEST_CASE("epsilon schedule") {
    const auto s = epsilon_schedule(0.2, 0.5, 4);
    REQUIRE(s.size() == 4);
    CHECK(s[0] == 0.2);
    CHECK(s[1] == doctest::Approx(0.1));
    CHECK(s[2] == doctest::Approx(0.05));
    CHECK(s[3] == doctest::Approx(0.025));
    const auto t = epsilon_schedule(0.1, 0.1, 2);
    CHECK(t[1] == doctest::Approx(0.01));
    for (auto args : {std::tuple{1.5, 0.5, 3}, std::tuple{0.2, 1.0, 3}, std::tuple{0.2, 0.5, 0}}) {
      try {
        epsilon_schedule(std::get<0>(args), std::get<1>(args), std::get<2>(args));
        FAIL("expected configuration error");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kConfiguration);
      }
    }
  }

  TEST_CASE("circle sweep follows the flat-disk family") {
    const auto& rec = circle_record();
    REQUIRE(rec.entries.size() == 4);
    for (size_t k = 0; k < rec.entries.size(); ++k) {
      const double eps = rec.entries[k].epsilon;
      CHECK(rec.entries[k].result.converged);
      CHECK(rec.entries[k].result.area == doctest::Approx((1 + eps * eps) * kPi).epsilon(0.02));
      CHECK(rec.entries[k].planarity_defect <= eps * (1 + 0.5));
      CHECK(rec.entries[k].result.energy <= rec.energy_bound);
      if (k > 0) CHECK(rec.entries[k].result.area < rec.entries[k - 1].result.area);
      if (k > 1) {
        CHECK(rec.entries[k].map_distance < rec.entries[k - 1].map_distance);
        CHECK(rec.entries[k].planarity_defect < rec.entries[k - 1].planarity_defect);
      }
    }
  }

  TEST_CASE("energy bound uses sup norm and Lipschitz constant") {
    const ClosedCurve c = circle_curve(2.0, 64);
    const double m1 = c.max_norm() + 1.0;
    const double lip = c.lipschitz();
    CHECK(lift_energy_bound(c) == doctest::Approx(kPi * (m1 * m1 + lip * lip + 2.0)).epsilon(1e-14));
    CHECK(c.max_norm() == doctest::Approx(2.0));
    // secant slope of the inscribed 64-gon
    CHECK(lip == doctest::Approx(2.0 * 2.0 * std::sin(kPi / 64) / (kTwoPi / 64)).epsilon(1e-12));
  }

  TEST_CASE("sweep input checks") {
    try {
      run_sweep(circle_curve(1.0, 96), default_mesh(), {}, SolverSettings{});
      FAIL("expected configuration error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kConfiguration);
    }
    CHECK_THROWS_AS(run_sweep(circle_curve(1.0, 96), default_mesh(), {0.1, 0.2}, SolverSettings{}), Error);
  }

  TEST_CASE("projection") {
    const MeshPtr& mesh = default_mesh();
    Eigen::MatrixXd v(mesh->vertex_count(), 4);
    for (int i = 0; i < v.rows(); ++i) {
      const Vec2& x = mesh->vertices()[static_cast<size_t>(i)];
      v.row(i) << x.x(), x.y(), 0.1 * x.x(), 0.1 * x.y();
    }
    const DiskMap m(mesh, v);
    const DiskMap p = project(m);
    CHECK(p.dim() == 2);
    CHECK((p.values() - v.leftCols(2)).norm() == 0.0);
    CHECK(map_area(p) <= map_area(m) + 1e-10);

    Eigen::MatrixXd flat = v;
    flat.rightCols(2).setZero();
    CHECK(map_area(project(DiskMap(mesh, flat))) == map_area(DiskMap(mesh, flat)));
    CHECK_THROWS_AS(project(p), Error);
  }

  TEST_CASE("limit of the circle sweep") {
    const auto& rec = circle_record();
    const ClosedCurve c = circle_curve(1.0, 384);
    const LimitResult lim = extract_limit(rec, default_limit_tol(c));
    CHECK(lim.area0 == doctest::Approx(kPi).epsilon(0.01));
    CHECK(lim.u0.dim() == 2);
    // areas are exactly quadratic in eps for this family, so the pair
    // estimates agree and the flag stays down
    CHECK_FALSE(lim.extrapolation_flagged);
    CHECK(lim.pair_estimates[0] == doctest::Approx(lim.pair_estimates[1]).epsilon(1e-3));

    // boundary of u0 equals gamma o phi0 at the boundary vertices
    const auto phi = lim.phi0.values();
    for (int i = 0; i < default_mesh()->boundary_count(); ++i) {
      const int v = default_mesh()->boundary_loop()[static_cast<size_t>(i)];
      const Vec2 want = c.eval(phi[static_cast<size_t>(i)]);
      CHECK((lim.u0.values().row(v).transpose() - want).norm() < 1e-12);
    }
  }

  TEST_CASE("limit preconditions") {
    ContinuationRecord one = circle_record();
    one.entries.erase(one.entries.begin() + 1, one.entries.end());
    try {
      extract_limit(one, 1.0);
      FAIL("expected precondition error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kPrecondition);
    }
    try {
      extract_limit(circle_record(), 1e-12);
      FAIL("expected non-convergence");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kNonConvergence);
      CHECK(std::string(e.what()).find("series") != std::string::npos);
    }
  }

  TEST_CASE("two-entry record reports the final area") {
    const ContinuationRecord rec =
        run_sweep(circle_curve(1.0, 192), default_mesh(), epsilon_schedule(0.1, 0.5, 2), SolverSettings{});
    const LimitResult lim = extract_limit(rec, 1.0);
    CHECK(lim.area0 == lim.final_area);
  }

  TEST_CASE("figure-eight monitors") {
    const ClosedCurve c = resample_arclength(figure_eight_curve(1.0, 0.6, true, 384), 384);
    const ContinuationRecord rec = run_sweep(c, default_mesh(), epsilon_schedule(0.2, 0.5, 4), SolverSettings{});
    for (size_t k = 2; k < rec.entries.size(); ++k) {
      CHECK(rec.entries[k].map_distance < rec.entries[k - 1].map_distance);
      CHECK(rec.entries[k].phi_change < rec.entries[k - 1].phi_change);
      CHECK(rec.entries[k].planarity_defect < rec.entries[k - 1].planarity_defect);
    }
    for (const SweepEntry& e : rec.entries) {
      CHECK(e.result.energy <= e.result.cone_energy + 1e-9);
      CHECK(e.result.energy <= rec.energy_bound);
    }
  }
}
