#include "mha/diskmesh.hpp"
#include "mha/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mha;

namespace {

DiskMap linear_map(const MeshPtr& mesh, const Eigen::Matrix2d& a) {
  Eigen::MatrixXd v(mesh->vertex_count(), 2);
  for (int i = 0; i < mesh->vertex_count(); ++i) v.row(i) = (a * mesh->vertices()[static_cast<size_t>(i)]).transpose();
  return DiskMap(mesh, v);
}

// Per-triangle area formula sqrt(det(Du^T Du)) from edge vectors, computed
// independently of the library's gradient assembly.
double gram_area(const DiskMap& m) {
  double total = 0.0;
  for (const auto& tri : m.mesh().triangles()) {
    const Eigen::VectorXd e1 = (m.values().row(tri[1]) - m.values().row(tri[0])).transpose();
    const Eigen::VectorXd e2 = (m.values().row(tri[2]) - m.values().row(tri[0])).transpose();
    const double img = std::sqrt(std::max(0.0, e1.squaredNorm() * e2.squaredNorm() - std::pow(e1.dot(e2), 2)));
    total += 0.5 * img;
  }
  return total;
}

}  // namespace

TEST_SUITE("diskmesh") {
  TEST_CASE("fan mesh counts") {
    const DiskMesh m = build_disk_mesh(1, 12);
    CHECK(m.vertex_count() == 13);
    CHECK(m.triangle_count() == 12);
    CHECK(m.euler_characteristic() == 1);
  }

  TEST_CASE("boundary loop on the unit circle with increasing angles") {
    for (int rings : {2, 6, 24}) {
      const DiskMesh m = build_disk_mesh(rings, 48);
      const auto& ang = m.boundary_angles();
      for (size_t i = 0; i < ang.size(); ++i) {
        const Vec2& p = m.vertices()[static_cast<size_t>(m.boundary_loop()[i])];
        CHECK(std::abs(p.norm() - 1.0) < 1e-12);
        if (i > 0) CHECK(ang[i] > ang[i - 1]);
      }
      CHECK(m.euler_characteristic() == 1);
      for (int t = 0; t < m.triangle_count(); ++t) CHECK(m.triangle_area(t) > 1e-14);
    }
    const DiskMesh m = build_disk_mesh(2, 12);
    for (int i = 0; i < 12; ++i) CHECK(m.boundary_angles()[static_cast<size_t>(i)] == doctest::Approx(i * kPi / 6));
  }

  TEST_CASE("boundary count must be a multiple of 3") {
    try {
      build_disk_mesh(4, 10);
      FAIL("expected configuration error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kConfiguration);
    }
  }

  TEST_CASE("energy and area of linear maps") {
    const MeshPtr mesh = make_disk_mesh(24, 48);
    const DiskMap id = linear_map(mesh, Eigen::Matrix2d::Identity());
    CHECK(dirichlet_energy(id) == doctest::Approx(kPi).epsilon(0.02));
    CHECK(map_area(id) == doctest::Approx(kPi).epsilon(0.02));
    CHECK(conformality_residual(id) <= 1e-10);

    const DiskMap twice = linear_map(mesh, 2 * Eigen::Matrix2d::Identity());
    CHECK(dirichlet_energy(twice) == doctest::Approx(4 * kPi).epsilon(0.02));

    Eigen::Matrix2d stretch;
    stretch << 2, 0, 0, 1;
    const DiskMap s = linear_map(mesh, stretch);
    CHECK(map_area(s) == doctest::Approx(2 * kPi).epsilon(0.02));
    CHECK(conformality_residual(s) == doctest::Approx(kPi / 2).epsilon(0.03));

    const DiskMap constant(mesh, Eigen::MatrixXd::Constant(mesh->vertex_count(), 2, 0.7));
    CHECK(dirichlet_energy(constant) == 0.0);
    CHECK(map_area(constant) == 0.0);
    CHECK(conformality_residual(constant) == 0.0);
  }

  TEST_CASE("area matches the Gram-determinant oracle") {
    const MeshPtr mesh = make_disk_mesh(8, 24);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int k : {2, 4}) {
      Eigen::MatrixXd v(mesh->vertex_count(), k);
      for (int i = 0; i < v.rows(); ++i) {
        for (int j = 0; j < k; ++j) v(i, j) = n(rng);
      }
      const DiskMap m(mesh, v);
      CHECK(map_area(m) == doctest::Approx(gram_area(m)).epsilon(1e-12));
      CHECK(dirichlet_energy(m) >= map_area(m) - 1e-10);
      CHECK(dirichlet_energy(m.scaled(3.0)) == doctest::Approx(9.0 * dirichlet_energy(m)).epsilon(1e-14));
      // a random rotation of the target in the first two coordinates
      Eigen::MatrixXd r = v;
      const double a = 0.83;
      r.col(0) = std::cos(a) * v.col(0) - std::sin(a) * v.col(1);
      r.col(1) = std::sin(a) * v.col(0) + std::cos(a) * v.col(1);
      CHECK(dirichlet_energy(DiskMap(mesh, r)) == doctest::Approx(dirichlet_energy(m)).epsilon(1e-12));
      CHECK(map_area(DiskMap(mesh, r)) == doctest::Approx(map_area(m)).epsilon(1e-12));
    }
  }

  TEST_CASE("harmonic extension examples") {
    const MeshPtr mesh = make_disk_mesh(24, 48);
    const int b = mesh->boundary_count();

    const DiskMap c = harmonic_extend(mesh, Eigen::MatrixXd::Constant(b, 2, -1.5));
    CHECK((c.values().array() + 1.5).abs().maxCoeff() < 1e-12);

    const double eps = 0.1;
    Eigen::MatrixXd g(b, 4);
    for (int i = 0; i < b; ++i) {
      const double t = mesh->boundary_angles()[static_cast<size_t>(i)];
      g.row(i) << std::cos(t), std::sin(t), eps * std::cos(t), eps * std::sin(t);
    }
    const DiskMap u = harmonic_extend(mesh, g);
    for (int v = 0; v < mesh->vertex_count(); ++v) {
      const Vec2& x = mesh->vertices()[static_cast<size_t>(v)];
      CHECK((u.values().row(v).head<2>().transpose() - x).norm() < 0.02);
      CHECK((u.values().row(v).tail<2>().transpose() - eps * x).norm() < 0.02 * eps);
    }
    CHECK(dirichlet_energy(u) == doctest::Approx((1 + eps * eps) * kPi).epsilon(0.02));

    // Dirichlet-to-Neumann form gives the same energy
    const Eigen::MatrixXd s = HarmonicExtender(mesh).boundary_operator();
    CHECK(0.5 * (g.cwiseProduct(s * g)).sum() == doctest::Approx(dirichlet_energy(u)).epsilon(1e-10));
  }

  TEST_CASE("maximum principle on random boundary data") {
    const MeshPtr mesh = make_disk_mesh(12, 36);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXd g(mesh->boundary_count(), 4);
      for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < 4; ++j) g(i, j) = u(rng);
      }
      const DiskMap m = harmonic_extend(mesh, g);
      for (int j = 0; j < 4; ++j) {
        CHECK(m.values().col(j).maxCoeff() <= g.col(j).maxCoeff() + 1e-10);
        CHECK(m.values().col(j).minCoeff() >= g.col(j).minCoeff() - 1e-10);
      }
    }
  }

  TEST_CASE("identity energy error shrinks under refinement") {
    double prev = INFINITY;
    for (int rings : {6, 12, 24, 48}) {
      const MeshPtr mesh = make_disk_mesh(rings, std::min(6 * rings, 96) / 3 * 3);
      Eigen::MatrixXd g(mesh->boundary_count(), 2);
      for (int i = 0; i < g.rows(); ++i) {
        const double t = mesh->boundary_angles()[static_cast<size_t>(i)];
        g.row(i) << std::cos(t), std::sin(t);
      }
      const double err = std::abs(dirichlet_energy(harmonic_extend(mesh, g)) - kPi);
      CHECK(err < prev);
      prev = err;
    }
  }

  TEST_CASE("evaluation reproduces vertex values and linear maps") {
    const MeshPtr mesh = make_disk_mesh(10, 30);
    Eigen::Matrix2d a;
    a << 1.0, 0.3, -0.2, 0.8;
    const DiskMap m = linear_map(mesh, a);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> r(0.0, 0.95), t(0.0, kTwoPi);
    for (int k = 0; k < 50; ++k) {
      const double rr = r(rng), tt = t(rng);
      const Vec2 p(rr * std::cos(tt), rr * std::sin(tt));
      CHECK((m.eval(p) - a * p).norm() < 1e-12);
    }
  }

  TEST_CASE("polygon point") {
    const MeshPtr mesh = make_disk_mesh(4, 12);
    CHECK(mesh->polygon_point(0.3, 0.0).norm() == 0.0);
    for (int i = 0; i < 12; ++i) {
      const double t = mesh->boundary_angles()[static_cast<size_t>(i)];
      const Vec2& v = mesh->vertices()[static_cast<size_t>(mesh->boundary_loop()[static_cast<size_t>(i)])];
      CHECK((mesh->polygon_point(t, 1.0) - v).norm() < 1e-12);
    }
  }
}
