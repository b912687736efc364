#include "mha/diskmesh.hpp"

#include "mha/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>

namespace mha {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

std::pair<int, int> edge_key(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

double cot_at(const Vec2& apex, const Vec2& a, const Vec2& b) {
  const Vec2 u = a - apex;
  const Vec2 v = b - apex;
  return u.dot(v) / std::abs(u.x() * v.y() - u.y() * v.x());
}

// Per-triangle gradient of the linear interpolant: values are the three
// vertex images as columns (k x 3); returns the k x 2 Jacobian.
Eigen::MatrixXd triangle_jacobian(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Eigen::VectorXd& u0,
                                  const Eigen::VectorXd& u1, const Eigen::VectorXd& u2) {
  Eigen::Matrix2d m;
  m.col(0) = p1 - p0;
  m.col(1) = p2 - p0;
  Eigen::MatrixXd e(u0.size(), 2);
  e.col(0) = u1 - u0;
  e.col(1) = u2 - u0;
  return e * m.inverse();
}

// Flip interior edges until every edge is locally Delaunay.
void delaunay_flip(const std::vector<Vec2>& verts, std::vector<DiskMesh::Triangle>& tris) {
  for (int pass = 0; pass < 1000; ++pass) {
    std::map<std::pair<int, int>, std::vector<int>> adjacency;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t)
      for (int e = 0; e < 3; ++e) adjacency[edge_key(tris[t][e], tris[t][(e + 1) % 3])].push_back(t);

    bool flipped = false;
    std::vector<bool> touched(tris.size(), false);
    for (const auto& [edge, owners] : adjacency) {
      if (owners.size() != 2) continue;
      const int t1 = owners[0];
      const int t2 = owners[1];
      if (touched[t1] || touched[t2]) continue;
      auto opposite = [&](int t) {
        for (int v : tris[t])
          if (v != edge.first && v != edge.second) return v;
        return -1;
      };
      const int c = opposite(t1);
      const int d = opposite(t2);
      int a = edge.first;
      int b = edge.second;
      // Orient so that a->b is a directed edge of t1; then the quad a, d, b, c
      // is counter-clockwise and the flipped pair is (a, d, c), (d, b, c).
      bool forward = false;
      for (int e = 0; e < 3; ++e)
        if (tris[t1][e] == a && tris[t1][(e + 1) % 3] == b) forward = true;
      if (!forward) std::swap(a, b);
      const double weight = cot_at(verts[c], verts[a], verts[b]) + cot_at(verts[d], verts[a], verts[b]);
      if (weight >= -1e-12) continue;
      const DiskMesh::Triangle n1{a, d, c};
      const DiskMesh::Triangle n2{d, b, c};
      if (signed_area(verts[n1[0]], verts[n1[1]], verts[n1[2]]) <= DiskMesh::kMinTriangleArea ||
          signed_area(verts[n2[0]], verts[n2[1]], verts[n2[2]]) <= DiskMesh::kMinTriangleArea)
        continue;
      tris[t1] = n1;
      tris[t2] = n2;
      touched[t1] = touched[t2] = true;
      flipped = true;
    }
    if (!flipped) return;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// DiskMesh

DiskMesh::DiskMesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles, std::vector<int> boundary_loop)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), boundary_loop_(std::move(boundary_loop)) {
  const int nv = vertex_count();
  if (nv < 4 || triangles_.empty() || boundary_loop_.size() < 3)
    fail(ErrorKind::kMeshQuality, "disk mesh is too small");

  for (int t = 0; t < triangle_count(); ++t) {
    for (int v : triangles_[t])
      if (v < 0 || v >= nv) fail(ErrorKind::kMeshQuality, "triangle " + std::to_string(t) + " has an invalid index");
    const double area = triangle_area(t);
    if (!(area > kMinTriangleArea))
      fail(ErrorKind::kMeshQuality, "triangle " + std::to_string(t) + " is degenerate or inverted");
  }

  boundary_position_.assign(static_cast<size_t>(nv), -1);
  boundary_angles_.resize(boundary_loop_.size());
  for (size_t i = 0; i < boundary_loop_.size(); ++i) {
    const int v = boundary_loop_[i];
    if (v < 0 || v >= nv || boundary_position_[static_cast<size_t>(v)] >= 0)
      fail(ErrorKind::kMeshQuality, "boundary loop has an invalid or repeated vertex");
    boundary_position_[static_cast<size_t>(v)] = static_cast<int>(i);
    const Vec2& p = vertices_[static_cast<size_t>(v)];
    if (std::abs(p.norm() - 1.0) > 1e-12)
      fail(ErrorKind::kMeshQuality, "boundary vertex " + std::to_string(v) + " is off the unit circle");
    const double a = wrap_angle(std::atan2(p.y(), p.x()));
    if (i == 0) {
      boundary_angles_[0] = a;
    } else {
      const double step = wrap_angle(a - wrap_angle(boundary_angles_[i - 1]));
      if (!(step > 0.0)) fail(ErrorKind::kMeshQuality, "boundary angles are not strictly increasing");
      boundary_angles_[i] = boundary_angles_[i - 1] + step;
    }
  }
  const double closing = wrap_angle(boundary_angles_.front() - wrap_angle(boundary_angles_.back()));
  if (std::abs(boundary_angles_.back() + closing - boundary_angles_.front() - kTwoPi) > 1e-9 || !(closing > 0.0))
    fail(ErrorKind::kMeshQuality, "boundary loop does not wind once around the disk");

  for (int v = 0; v < nv; ++v)
    if (boundary_position_[static_cast<size_t>(v)] < 0) interior_.push_back(v);

  // Boundary edges (owned by one triangle) must be exactly the loop edges.
  std::map<std::pair<int, int>, int> owners;
  for (const auto& tri : triangles_)
    for (int e = 0; e < 3; ++e) ++owners[edge_key(tri[e], tri[(e + 1) % 3])];
  int open_edges = 0;
  for (const auto& [edge, count] : owners) {
    if (count > 2) fail(ErrorKind::kMeshQuality, "non-manifold edge in disk mesh");
    if (count == 1) ++open_edges;
  }
  const int nb = boundary_count();
  for (int i = 0; i < nb; ++i) {
    const auto it = owners.find(edge_key(boundary_loop_[i], boundary_loop_[(i + 1) % nb]));
    if (it == owners.end() || it->second != 1)
      fail(ErrorKind::kMeshQuality, "boundary loop edge " + std::to_string(i) + " is not a mesh boundary edge");
  }
  if (open_edges != nb) fail(ErrorKind::kMeshQuality, "mesh has boundary edges outside the boundary loop");
  if (euler_characteristic() != 1) fail(ErrorKind::kMeshQuality, "mesh is not a topological disk");

  build_locator();
}

double DiskMesh::triangle_area(int t) const {
  const auto& tri = triangles_[static_cast<size_t>(t)];
  return signed_area(vertices_[static_cast<size_t>(tri[0])], vertices_[static_cast<size_t>(tri[1])],
                     vertices_[static_cast<size_t>(tri[2])]);
}

int DiskMesh::edge_count() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& tri : triangles_)
    for (int e = 0; e < 3; ++e) edges.insert(edge_key(tri[e], tri[(e + 1) % 3]));
  return static_cast<int>(edges.size());
}

Eigen::SparseMatrix<double> DiskMesh::stiffness() const {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(triangles_.size() * 9);
  for (int t = 0; t < triangle_count(); ++t) {
    const auto& tri = triangles_[static_cast<size_t>(t)];
    const double area = triangle_area(t);
    std::array<Vec2, 3> grad;
    for (int i = 0; i < 3; ++i) {
      const Vec2& a = vertices_[static_cast<size_t>(tri[(i + 1) % 3])];
      const Vec2& b = vertices_[static_cast<size_t>(tri[(i + 2) % 3])];
      grad[static_cast<size_t>(i)] = Vec2(a.y() - b.y(), b.x() - a.x()) / (2.0 * area);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        entries.emplace_back(tri[i], tri[j], area * grad[static_cast<size_t>(i)].dot(grad[static_cast<size_t>(j)]));
  }
  Eigen::SparseMatrix<double> k(vertex_count(), vertex_count());
  k.setFromTriplets(entries.begin(), entries.end());
  return k;
}

Vec2 DiskMesh::polygon_point(double theta, double radius) const {
  const int nb = boundary_count();
  const double base = boundary_angles_.front();
  double rel = wrap_angle(theta - base) + base;
  auto it = std::upper_bound(boundary_angles_.begin(), boundary_angles_.end(), rel);
  const int k = std::max(0, static_cast<int>(it - boundary_angles_.begin()) - 1);
  const Vec2& a = vertices_[static_cast<size_t>(boundary_loop_[k])];
  const Vec2& b = vertices_[static_cast<size_t>(boundary_loop_[(k + 1) % nb])];
  const Vec2 dir(std::cos(theta), std::sin(theta));
  // Ray from the origin along dir meets the chord a-b at a + s (b - a).
  const Vec2 d = b - a;
  const double denom = dir.x() * d.y() - dir.y() * d.x();
  const double s = (dir.y() * a.x() - dir.x() * a.y()) / denom;
  const Vec2 hit = a + std::clamp(s, 0.0, 1.0) * d;
  return radius * hit;
}

void DiskMesh::build_locator() {
  grid_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(triangles_.size())) / 2.0));
  buckets_.assign(static_cast<size_t>(grid_ * grid_), {});
  const double cell = 2.0 / grid_;
  auto clamp_cell = [&](double x) { return std::clamp(static_cast<int>(std::floor((x + 1.0) / cell)), 0, grid_ - 1); };
  for (int t = 0; t < triangle_count(); ++t) {
    const auto& tri = triangles_[static_cast<size_t>(t)];
    double xmin = 2, xmax = -2, ymin = 2, ymax = -2;
    for (int v : tri) {
      const Vec2& p = vertices_[static_cast<size_t>(v)];
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
    }
    for (int gy = clamp_cell(ymin); gy <= clamp_cell(ymax); ++gy)
      for (int gx = clamp_cell(xmin); gx <= clamp_cell(xmax); ++gx)
        buckets_[static_cast<size_t>(gy * grid_ + gx)].push_back(t);
  }
}

DiskMesh::Location DiskMesh::locate(const Vec2& p) const {
  auto barycentric = [&](int t) {
    const auto& tri = triangles_[static_cast<size_t>(t)];
    const Vec2& a = vertices_[static_cast<size_t>(tri[0])];
    const Vec2& b = vertices_[static_cast<size_t>(tri[1])];
    const Vec2& c = vertices_[static_cast<size_t>(tri[2])];
    const double area = signed_area(a, b, c);
    return Eigen::Vector3d(signed_area(p, b, c) / area, signed_area(a, p, c) / area, signed_area(a, b, p) / area);
  };
  const double cell = 2.0 / grid_;
  const int gx = std::clamp(static_cast<int>(std::floor((p.x() + 1.0) / cell)), 0, grid_ - 1);
  const int gy = std::clamp(static_cast<int>(std::floor((p.y() + 1.0) / cell)), 0, grid_ - 1);
  Location best{-1, Eigen::Vector3d::Zero()};
  double best_score = -std::numeric_limits<double>::infinity();
  for (int t : buckets_[static_cast<size_t>(gy * grid_ + gx)]) {
    const Eigen::Vector3d bc = barycentric(t);
    if (bc.minCoeff() > best_score) {
      best_score = bc.minCoeff();
      best = {t, bc};
    }
  }
  if (best_score < -1e-9) {
    for (int t = 0; t < triangle_count(); ++t) {
      const Eigen::Vector3d bc = barycentric(t);
      if (bc.minCoeff() > best_score) {
        best_score = bc.minCoeff();
        best = {t, bc};
      }
    }
  }
  if (best_score < 0.0) {
    best.barycentric = best.barycentric.cwiseMax(0.0);
    best.barycentric /= best.barycentric.sum();
  }
  return best;
}

// ---------------------------------------------------------------------------
// Construction

DiskMesh build_disk_mesh(int rings, int boundary_count) {
  if (rings < 1) fail(ErrorKind::kConfiguration, "rings must be >= 1");
  if (boundary_count < 12 || boundary_count % 3 != 0)
    fail(ErrorKind::kConfiguration, "boundary_count must be >= 12 and divisible by 3, got " + std::to_string(boundary_count));

  std::vector<Vec2> verts{Vec2::Zero()};
  std::vector<std::vector<int>> ring_ids(static_cast<size_t>(rings) + 1);
  std::vector<std::vector<double>> ring_angles(static_cast<size_t>(rings) + 1);
  ring_ids[0] = {0};
  ring_angles[0] = {0.0};
  for (int j = 1; j <= rings; ++j) {
    const int count = j == rings ? boundary_count : std::min(boundary_count, 6 * j);
    const double radius = static_cast<double>(j) / rings;
    for (int k = 0; k < count; ++k) {
      const double a = kTwoPi * k / count;
      ring_ids[static_cast<size_t>(j)].push_back(static_cast<int>(verts.size()));
      ring_angles[static_cast<size_t>(j)].push_back(a);
      verts.emplace_back(radius * std::cos(a), radius * std::sin(a));
    }
  }
  // Boundary vertices exactly on the circle.
  for (int v : ring_ids[static_cast<size_t>(rings)]) verts[static_cast<size_t>(v)].normalize();

  std::vector<DiskMesh::Triangle> tris;
  auto add = [&](int a, int b, int c) {
    DiskMesh::Triangle t{a, b, c};
    if (signed_area(verts[static_cast<size_t>(a)], verts[static_cast<size_t>(b)], verts[static_cast<size_t>(c)]) < 0)
      std::swap(t[1], t[2]);
    tris.push_back(t);
  };
  for (int j = 1; j <= rings; ++j) {
    const auto& inner = ring_ids[static_cast<size_t>(j) - 1];
    const auto& outer = ring_ids[static_cast<size_t>(j)];
    const auto& ia = ring_angles[static_cast<size_t>(j) - 1];
    const auto& oa = ring_angles[static_cast<size_t>(j)];
    const int m = static_cast<int>(inner.size());
    const int n = static_cast<int>(outer.size());
    if (m == 1) {
      for (int k = 0; k < n; ++k) add(inner[0], outer[static_cast<size_t>(k)], outer[static_cast<size_t>((k + 1) % n)]);
      continue;
    }
    // Zipper: advance along whichever ring has the nearer next vertex.
    int i = 0;
    int k = 0;
    while (i < m || k < n) {
      const double next_inner = i + 1 < m ? ia[static_cast<size_t>(i) + 1] : kTwoPi;
      const double next_outer = k + 1 < n ? oa[static_cast<size_t>(k) + 1] : kTwoPi;
      const int vi = inner[static_cast<size_t>(i % m)];
      const int vo = outer[static_cast<size_t>(k % n)];
      if (k < n && (i >= m || next_outer <= next_inner)) {
        add(vi, vo, outer[static_cast<size_t>((k + 1) % n)]);
        ++k;
      } else {
        add(vi, vo, inner[static_cast<size_t>((i + 1) % m)]);
        ++i;
      }
    }
  }
  delaunay_flip(verts, tris);
  return DiskMesh(std::move(verts), std::move(tris), ring_ids[static_cast<size_t>(rings)]);
}

MeshPtr make_disk_mesh(int rings, int boundary_count) {
  return std::make_shared<const DiskMesh>(build_disk_mesh(rings, boundary_count));
}

// ---------------------------------------------------------------------------
// DiskMap and functionals

DiskMap::DiskMap(MeshPtr mesh, Eigen::MatrixXd values) : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (!mesh_) fail(ErrorKind::kDomain, "disk map needs a mesh");
  if (values_.rows() != mesh_->vertex_count())
    fail(ErrorKind::kDomain, "disk map has " + std::to_string(values_.rows()) + " values for " +
                                 std::to_string(mesh_->vertex_count()) + " vertices");
  if (values_.cols() != 2 && values_.cols() != 4) fail(ErrorKind::kDomain, "disk map target dimension must be 2 or 4");
  if (!values_.allFinite()) fail(ErrorKind::kDomain, "disk map has non-finite values");
}

Eigen::VectorXd DiskMap::eval(const Vec2& p) const {
  const auto loc = mesh_->locate(p);
  const auto& tri = mesh_->triangles()[static_cast<size_t>(loc.triangle)];
  Eigen::VectorXd out = Eigen::VectorXd::Zero(values_.cols());
  for (int i = 0; i < 3; ++i) out += loc.barycentric[i] * values_.row(tri[i]).transpose();
  return out;
}

DiskMap DiskMap::scaled(double factor) const { return DiskMap(mesh_, factor * values_); }

namespace {

struct TriangleMeasures {
  double energy;
  double area;
};

TriangleMeasures triangle_measures(const DiskMap& map, int t) {
  const DiskMesh& mesh = map.mesh();
  const auto& tri = mesh.triangles()[static_cast<size_t>(t)];
  const auto& v = mesh.vertices();
  const auto& u = map.values();
  const Eigen::MatrixXd jac =
      triangle_jacobian(v[static_cast<size_t>(tri[0])], v[static_cast<size_t>(tri[1])], v[static_cast<size_t>(tri[2])],
                        u.row(tri[0]).transpose(), u.row(tri[1]).transpose(), u.row(tri[2]).transpose());
  const double domain_area = mesh.triangle_area(t);
  const Eigen::VectorXd a = jac.col(0);
  const Eigen::VectorXd b = jac.col(1);
  // Gram determinant via Lagrange's identity keeps it exactly nonnegative.
  double gram = 0.0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = i + 1; j < a.size(); ++j) {
      const double m = a[i] * b[j] - a[j] * b[i];
      gram += m * m;
    }
  return {0.5 * domain_area * (a.squaredNorm() + b.squaredNorm()), domain_area * std::sqrt(gram)};
}

}  // namespace

double dirichlet_energy(const DiskMap& map) {
  double sum = 0.0;
  for (int t = 0; t < map.mesh().triangle_count(); ++t) sum += triangle_measures(map, t).energy;
  return sum;
}

double map_area(const DiskMap& map) {
  double sum = 0.0;
  for (int t = 0; t < map.mesh().triangle_count(); ++t) sum += triangle_measures(map, t).area;
  return sum;
}

double conformality_residual(const DiskMap& map) {
  double sum = 0.0;
  for (int t = 0; t < map.mesh().triangle_count(); ++t) {
    const auto m = triangle_measures(map, t);
    sum += m.energy - m.area;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Harmonic extension

HarmonicExtender::HarmonicExtender(MeshPtr mesh) : mesh_(std::move(mesh)) {
  const DiskMesh& m = *mesh_;
  const int ni = static_cast<int>(m.interior_vertices().size());
  const int nb = m.boundary_count();
  interior_slot_.assign(static_cast<size_t>(m.vertex_count()), -1);
  for (int i = 0; i < ni; ++i) interior_slot_[static_cast<size_t>(m.interior_vertices()[static_cast<size_t>(i)])] = i;

  const Eigen::SparseMatrix<double> k = m.stiffness();
  std::vector<Eigen::Triplet<double>> ii, ib, bb;
  for (int col = 0; col < k.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(k, col); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      const int ri = interior_slot_[static_cast<size_t>(r)];
      const int ci = interior_slot_[static_cast<size_t>(c)];
      if (ri >= 0 && ci >= 0) {
        ii.emplace_back(ri, ci, it.value());
      } else if (ri >= 0) {
        ib.emplace_back(ri, m.boundary_position(c), it.value());
      } else if (ci < 0) {
        bb.emplace_back(m.boundary_position(r), m.boundary_position(c), it.value());
      }
    }
  }
  k_ii_.resize(ni, ni);
  k_ii_.setFromTriplets(ii.begin(), ii.end());
  k_ib_.resize(ni, nb);
  k_ib_.setFromTriplets(ib.begin(), ib.end());
  k_bb_.resize(nb, nb);
  k_bb_.setFromTriplets(bb.begin(), bb.end());
  if (ni > 0) {
    solver_.compute(k_ii_);
    if (solver_.info() != Eigen::Success) fail(ErrorKind::kSolver, "interior stiffness factorization failed");
  }
}

DiskMap HarmonicExtender::extend(const Eigen::MatrixXd& boundary_values) const {
  const DiskMesh& m = *mesh_;
  if (boundary_values.rows() != m.boundary_count())
    fail(ErrorKind::kDomain, "boundary values do not match the boundary loop length");
  if (!boundary_values.allFinite()) fail(ErrorKind::kDomain, "boundary values are not finite");
  Eigen::MatrixXd values(m.vertex_count(), boundary_values.cols());
  for (int i = 0; i < m.boundary_count(); ++i) values.row(m.boundary_loop()[static_cast<size_t>(i)]) = boundary_values.row(i);
  if (!m.interior_vertices().empty()) {
    const Eigen::MatrixXd rhs = -(k_ib_ * boundary_values);
    const Eigen::MatrixXd interior = solver_.solve(rhs);
    if (solver_.info() != Eigen::Success || !interior.allFinite())
      fail(ErrorKind::kSolver, "harmonic extension solve failed");
    for (size_t i = 0; i < m.interior_vertices().size(); ++i)
      values.row(m.interior_vertices()[i]) = interior.row(static_cast<Eigen::Index>(i));
  }
  return DiskMap(mesh_, std::move(values));
}

Eigen::MatrixXd HarmonicExtender::boundary_operator() const {
  Eigen::MatrixXd s = Eigen::MatrixXd(k_bb_);
  if (!mesh_->interior_vertices().empty()) {
    const Eigen::MatrixXd kib = Eigen::MatrixXd(k_ib_);
    const Eigen::MatrixXd x = solver_.solve(kib);
    s -= kib.transpose() * x;
  }
  return 0.5 * (s + s.transpose());
}

DiskMap harmonic_extend(const MeshPtr& mesh, const Eigen::MatrixXd& boundary_values) {
  return HarmonicExtender(mesh).extend(boundary_values);
}

}  // namespace mha
