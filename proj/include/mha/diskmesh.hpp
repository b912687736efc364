#pragma once

#include "mha/curve.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <array>
#include <memory>
#include <vector>

namespace mha {

/// Triangulated unit disk. Boundary vertices sit on the unit circle in
/// counter-clockwise order starting at angle 0; all triangles are CCW.
class DiskMesh {
 public:
  using Triangle = std::array<int, 3>;

  static constexpr double kMinTriangleArea = 1e-14;

  DiskMesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles, std::vector<int> boundary_loop);

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int triangle_count() const { return static_cast<int>(triangles_.size()); }
  int boundary_count() const { return static_cast<int>(boundary_loop_.size()); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<int>& boundary_loop() const { return boundary_loop_; }
  /// Angular position of each boundary-loop vertex, lifted to be increasing.
  const std::vector<double>& boundary_angles() const { return boundary_angles_; }
  const std::vector<int>& interior_vertices() const { return interior_; }

  /// Position of v in the boundary loop, or -1 for interior vertices.
  int boundary_position(int v) const { return boundary_position_[static_cast<size_t>(v)]; }
  double triangle_area(int t) const;
  int edge_count() const;
  int euler_characteristic() const { return vertex_count() - edge_count() + triangle_count(); }

  /// P1 stiffness matrix K with K_ij = integral of grad(phi_i) . grad(phi_j).
  Eigen::SparseMatrix<double> stiffness() const;

  /// Point of the mesh polygon on the ray at angle theta, scaled by radius in
  /// [0, 1]. radius 1 lands on the boundary chord.
  Vec2 polygon_point(double theta, double radius) const;

  struct Location {
    int triangle;
    Eigen::Vector3d barycentric;
  };
  /// Triangle containing p (closest one when p is marginally outside).
  Location locate(const Vec2& p) const;

 private:
  void build_locator();

  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<int> boundary_loop_;
  std::vector<double> boundary_angles_;
  std::vector<int> boundary_position_;
  std::vector<int> interior_;
  int grid_ = 1;
  std::vector<std::vector<int>> buckets_;
};

using MeshPtr = std::shared_ptr<const DiskMesh>;

/// Concentric-ring triangulation: ring j has radius j/rings and
/// min(boundary_count, 6j) vertices (the outer ring exactly boundary_count),
/// followed by Delaunay edge flips so every cotangent weight is nonnegative.
DiskMesh build_disk_mesh(int rings, int boundary_count);
MeshPtr make_disk_mesh(int rings, int boundary_count);

/// Piecewise-linear map from a disk mesh into R^k, k in {2, 4}.
class DiskMap {
 public:
  DiskMap(MeshPtr mesh, Eigen::MatrixXd values);

  const DiskMesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  /// vertex_count x k matrix, one row per vertex.
  const Eigen::MatrixXd& values() const { return values_; }
  int dim() const { return static_cast<int>(values_.cols()); }

  Eigen::VectorXd eval(const Vec2& p) const;
  DiskMap scaled(double factor) const;

 private:
  MeshPtr mesh_;
  Eigen::MatrixXd values_;
};

double dirichlet_energy(const DiskMap& map);
double map_area(const DiskMap& map);
/// dirichlet_energy - map_area; nonnegative per triangle.
double conformality_residual(const DiskMap& map);

/// Factors the interior stiffness block once; each extension is then a pair
/// of triangular solves.
class HarmonicExtender {
 public:
  explicit HarmonicExtender(MeshPtr mesh);

  const MeshPtr& mesh_ptr() const { return mesh_; }
  /// boundary_values: boundary_count x k, rows in boundary-loop order.
  DiskMap extend(const Eigen::MatrixXd& boundary_values) const;
  /// Dense Dirichlet-to-Neumann matrix S = K_BB - K_BI K_II^{-1} K_IB, so the
  /// energy of the harmonic extension of g is 0.5 * trace(g^T S g).
  Eigen::MatrixXd boundary_operator() const;

 private:
  MeshPtr mesh_;
  Eigen::SparseMatrix<double> k_ii_;
  Eigen::SparseMatrix<double> k_ib_;
  Eigen::SparseMatrix<double> k_bb_;
  std::vector<int> interior_slot_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

DiskMap harmonic_extend(const MeshPtr& mesh, const Eigen::MatrixXd& boundary_values);

}  // namespace mha
