#include "ldgbc/geometry.hpp"

#include "ldgbc/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace ldgbc {

namespace {

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

std::uint64_t edge_key(int a, int b) {
  auto lo = static_cast<std::uint64_t>(std::min(a, b));
  auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

}  // namespace

double DomainSpec::area() const {
  double twice = 0.0;
  const auto n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(vertices[i], vertices[(i + 1) % n]);
  return 0.5 * twice;
}

double DomainSpec::perimeter() const {
  double p = 0.0;
  const auto n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) p += (vertices[(i + 1) % n] - vertices[i]).norm();
  return p;
}

void DomainSpec::validate() const {
  const auto n = vertices.size();
  if (n < 3) throw InvalidArgument("polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    if ((vertices[(i + 1) % n] - vertices[i]).norm() == 0.0)
      throw InvalidArgument(fmt::format("polygon has repeated consecutive vertex {}", i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = vertices[i];
    const Point& b = vertices[(i + 1) % n];
    const Point& c = vertices[(i + 2) % n];
    // strictly left turn at every vertex: CCW and every interior angle < pi
    if (cross(b - a, c - b) <= 0.0)
      throw InvalidArgument(fmt::format("polygon '{}' is not strictly convex and counterclockwise at vertex {}", name,
                                        (i + 1) % n));
  }
  // total turning of 2*pi rules out self-intersecting star shapes
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d d0 = vertices[(i + 1) % n] - vertices[i];
    const Eigen::Vector2d d1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    turning += std::atan2(cross(d0, d1), d0.dot(d1));
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-9)
    throw InvalidArgument(fmt::format("polygon '{}' is not simple", name));
}

DomainSpec unit_square_domain() {
  return DomainSpec{{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}, "unit-square", DomainSpec::CoarseSplit::VertexFan};
}

DomainSpec slanted_quadrilateral_domain(double angle) {
  if (!(angle > std::numbers::pi / 2 && angle < std::numbers::pi))
    throw InvalidArgument("slanted quadrilateral angle must lie in (pi/2, pi)");
  // the slanted edge leaves the origin with direction angle, reaching x2 = 1
  const double vx = std::cos(angle) / std::sin(angle);
  return DomainSpec{{Point(0, 0), Point(1, 0), Point(1, 1), Point(vx, 1)},
                    "slanted-quadrilateral",
                    DomainSpec::CoarseSplit::LongestEdgeMidpoint};
}

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles, int depth)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), depth_(depth) {
  build_topology();
}

void Mesh::build_topology() {
  const int ne = num_elements();
  areas_.resize(ne);
  diameters_.resize(ne);
  element_edges_.assign(ne, {-1, -1, -1});
  h_ = 0.0;

  for (int e = 0; e < ne; ++e) {
    auto& t = triangles_[e];
    for (int v : t) {
      if (v < 0 || v >= num_vertices()) throw InvalidArgument(fmt::format("triangle {} references vertex {}", e, v));
    }
    double twice = cross(vertices_[t[1]] - vertices_[t[0]], vertices_[t[2]] - vertices_[t[0]]);
    if (twice < 0.0) {
      std::swap(t[1], t[2]);
      twice = -twice;
    }
    if (twice == 0.0) throw InvalidArgument(fmt::format("triangle {} is degenerate", e));
    areas_[e] = 0.5 * twice;
    double d = 0.0;
    for (int k = 0; k < 3; ++k) d = std::max(d, (vertices_[t[(k + 1) % 3]] - vertices_[t[k]]).norm());
    diameters_[e] = d;
    h_ = std::max(h_, d);
  }

  edges_.clear();
  edges_.reserve(static_cast<std::size_t>(ne) * 3 / 2 + 8);
  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(static_cast<std::size_t>(ne) * 2);
  for (int e = 0; e < ne; ++e) {
    const auto& t = triangles_[e];
    for (int k = 0; k < 3; ++k) {
      const int a = t[k];
      const int b = t[(k + 1) % 3];
      auto [it, inserted] = lookup.try_emplace(edge_key(a, b), num_edges());
      if (inserted) {
        Edge edge;
        edge.v = {a, b};
        edge.element = {e, -1};
        edge.local = {k, -1};
        const Eigen::Vector2d d = vertices_[b] - vertices_[a];
        edge.length = d.norm();
        // CCW triangle: outward normal is the tangent rotated clockwise
        edge.normal = Eigen::Vector2d(d.y(), -d.x()) / edge.length;
        edges_.push_back(edge);
      } else {
        Edge& edge = edges_[it->second];
        if (edge.element[1] >= 0)
          throw InvalidArgument(fmt::format("edge ({}, {}) shared by more than two triangles", a, b));
        if (edge.v[0] != b || edge.v[1] != a)
          throw InvalidArgument(fmt::format("triangles {} and {} have inconsistent orientation", edge.element[0], e));
        edge.element[1] = e;
        edge.local[1] = k;
      }
      element_edges_[e][k] = it->second;
    }
  }

  boundary_edges_.clear();
  interior_edges_.clear();
  boundary_index_.assign(edges_.size(), -1);
  for (int id = 0; id < num_edges(); ++id) {
    if (edges_[id].is_boundary()) {
      boundary_index_[id] = static_cast<int>(boundary_edges_.size());
      boundary_edges_.push_back(id);
    } else {
      interior_edges_.push_back(id);
    }
  }
}

double Mesh::total_area() const {
  double s = 0.0;
  for (double a : areas_) s += a;
  return s;
}

Point Mesh::centroid(int e) const {
  const auto& t = triangles_[e];
  return (vertices_[t[0]] + vertices_[t[1]] + vertices_[t[2]]) / 3.0;
}

Eigen::Vector3d Mesh::barycentric(int e, const Point& x) const {
  const auto& t = triangles_[e];
  const Point& a = vertices_[t[0]];
  const Point& b = vertices_[t[1]];
  const Point& c = vertices_[t[2]];
  const double twice = 2.0 * areas_[e];
  const double l1 = cross(x - a, c - a) / twice;
  const double l2 = cross(b - a, x - a) / twice;
  return {1.0 - l1 - l2, l1, l2};
}

Point Mesh::edge_point(int edge_id, double t) const {
  const Edge& edge = edges_[edge_id];
  return (1.0 - t) * vertices_[edge.v[0]] + t * vertices_[edge.v[1]];
}

Mesh build_unit_square_mesh(int n) {
  if (n < 1) throw InvalidArgument(fmt::format("invalid refinement n = {}", n));
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh(std::move(vertices), std::move(triangles));
}

Mesh build_polygon_mesh(const DomainSpec& domain, int level) {
  domain.validate();
  if (level < 0) throw InvalidArgument(fmt::format("invalid refinement level {}", level));
  std::vector<Point> vertices = domain.vertices;
  std::vector<std::array<int, 3>> triangles;
  const int n = static_cast<int>(vertices.size());
  switch (domain.split) {
    case DomainSpec::CoarseSplit::VertexFan:
      for (int k = 1; k + 1 < n; ++k) triangles.push_back({0, k, k + 1});
      break;
    case DomainSpec::CoarseSplit::LongestEdgeMidpoint: {
      int longest = 0;
      double best = -1.0;
      for (int k = 0; k < n; ++k) {
        const double len = (vertices[(k + 1) % n] - vertices[k]).norm();
        if (len > best + 1e-14) {
          best = len;
          longest = k;
        }
      }
      const int mid = n;
      vertices.push_back(0.5 * (vertices[longest] + vertices[(longest + 1) % n]));
      for (int s = 1; s < n; ++s) {
        const int a = (longest + s) % n;
        const int b = (longest + s + 1) % n;
        triangles.push_back({mid, a, b});
      }
      break;
    }
  }
  Mesh mesh(std::move(vertices), std::move(triangles));
  for (int l = 0; l < level; ++l) mesh = refine_uniform(mesh);
  return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Point> vertices = mesh.vertices();
  vertices.reserve(vertices.size() + mesh.edges().size());
  std::vector<int> midpoint(mesh.num_edges());
  for (int id = 0; id < mesh.num_edges(); ++id) {
    const Edge& edge = mesh.edge(id);
    midpoint[id] = static_cast<int>(vertices.size());
    vertices.push_back(0.5 * (mesh.vertex(edge.v[0]) + mesh.vertex(edge.v[1])));
  }
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(4 * static_cast<std::size_t>(mesh.num_elements()));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& t = mesh.triangle(e);
    const auto& ee = mesh.element_edges(e);
    const int m01 = midpoint[ee[0]];
    const int m12 = midpoint[ee[1]];
    const int m20 = midpoint[ee[2]];
    triangles.push_back({t[0], m01, m20});
    triangles.push_back({m01, t[1], m12});
    triangles.push_back({m20, m12, t[2]});
    triangles.push_back({m01, m12, m20});
  }
  return Mesh(std::move(vertices), std::move(triangles), mesh.depth() + 1);
}

int EdgeClassification::num_inflow() const {
  return static_cast<int>(std::count(inflow.begin(), inflow.end(), true));
}

EdgeClassification classify_boundary_edges(const Mesh& mesh, const VelocityField& beta) {
  EdgeClassification c;
  c.inflow.resize(mesh.num_boundary_edges());
  for (int j = 0; j < mesh.num_boundary_edges(); ++j) {
    const int id = mesh.boundary_edges()[j];
    const Edge& edge = mesh.edge(id);
    c.inflow[j] = beta(mesh.edge_point(id, 0.5)).dot(edge.normal) < 0.0;
  }
  return c;
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  for (const Point& p : mesh.vertices()) out << fmt::format("v {:.17g} {:.17g}\n", p.x(), p.y());
  for (const auto& t : mesh.triangles()) out << fmt::format("t {} {} {}\n", t[0], t[1], t[2]);
}

Mesh read_mesh(std::istream& in) {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    char tag = 0;
    ls >> tag;
    if (tag == 'v') {
      double x = 0, y = 0;
      if (!(ls >> x >> y)) throw InvalidArgument(fmt::format("mesh line {}: bad vertex", lineno));
      vertices.emplace_back(x, y);
    } else if (tag == 't') {
      std::array<int, 3> t{};
      if (!(ls >> t[0] >> t[1] >> t[2])) throw InvalidArgument(fmt::format("mesh line {}: bad triangle", lineno));
      triangles.push_back(t);
    } else {
      throw InvalidArgument(fmt::format("mesh line {}: unknown record '{}'", lineno, tag));
    }
  }
  return Mesh(std::move(vertices), std::move(triangles));
}

}  // namespace ldgbc
