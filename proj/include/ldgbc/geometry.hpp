#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ldgbc {

using Point = Eigen::Vector2d;
using VelocityField = std::function<Eigen::Vector2d(const Point&)>;

/// Counterclockwise convex polygon.
struct DomainSpec {
  enum class CoarseSplit {
    VertexFan,           // fan from vertex 0: N-2 triangles
    LongestEdgeMidpoint  // fan from the midpoint of the longest edge: N-1 triangles
  };

  std::vector<Point> vertices;
  std::string name;
  CoarseSplit split = CoarseSplit::VertexFan;

  double area() const;
  double perimeter() const;
  /// Throws InvalidArgument unless the polygon is simple, convex and CCW.
  void validate() const;
};

DomainSpec unit_square_domain();

/// Quadrilateral (0,0), (1,0), (1,1), (vx,1) with interior angle `angle` at
/// the origin; angle = 5*pi/6 gives vx = -sqrt(3).
DomainSpec slanted_quadrilateral_domain(double angle);

struct Edge {
  std::array<int, 2> v{-1, -1};
  /// element[0] always exists; element[1] == -1 on the boundary.
  std::array<int, 2> element{-1, -1};
  /// Local edge index inside each adjacent element.
  std::array<int, 2> local{-1, -1};
  /// Unit normal pointing out of element[0].
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();
  double length = 0.0;

  bool is_boundary() const { return element[1] < 0; }
  Eigen::Vector2d normal_from(int side) const { return side == 0 ? normal : Eigen::Vector2d(-normal); }
};

/// Conforming triangulation. Triangles are counterclockwise; local edge k
/// joins local vertices k and (k+1)%3.
///
/// Meshes produced by refine_uniform number children so that element e has
/// parent e/4 in the mesh it was refined from.
class Mesh {
 public:
  Mesh() = default;
  Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles, int depth = 0);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_elements() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_boundary_edges() const { return static_cast<int>(boundary_edges_.size()); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int i) const { return vertices_[i]; }
  const std::array<int, 3>& triangle(int e) const { return triangles_[e]; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const Edge& edge(int id) const { return edges_[id]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::array<int, 3>& element_edges(int e) const { return element_edges_[e]; }

  /// Boundary edge ids in boundary-DOF order.
  const std::vector<int>& boundary_edges() const { return boundary_edges_; }
  /// Position of an edge in boundary_edges(), or -1 for interior edges.
  int boundary_index(int edge_id) const { return boundary_index_[edge_id]; }
  const std::vector<int>& interior_edges() const { return interior_edges_; }

  double area(int e) const { return areas_[e]; }
  double diameter(int e) const { return diameters_[e]; }
  /// max element diameter
  double h() const { return h_; }
  double total_area() const;
  int depth() const { return depth_; }

  Point centroid(int e) const;
  /// Barycentric coordinates of x with respect to element e.
  Eigen::Vector3d barycentric(int e, const Point& x) const;
  /// Physical point at parameter t in [0,1] along edge (v[0] -> v[1]).
  Point edge_point(int edge_id, double t) const;
  /// Element reached from this mesh's element by walking `levels` red refinements up.
  static int ancestor(int element, int levels) { return element >> (2 * levels); }

 private:
  void build_topology();

  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> element_edges_;
  std::vector<int> boundary_edges_;
  std::vector<int> interior_edges_;
  std::vector<int> boundary_index_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
  double h_ = 0.0;
  int depth_ = 0;
};

/// [0,1]^2 split into n x n squares, each cut along its lower-left to
/// upper-right diagonal.
Mesh build_unit_square_mesh(int n);

/// Coarse triangulation of a convex polygon followed by `level` red refinements.
Mesh build_polygon_mesh(const DomainSpec& domain, int level);

/// Red refinement: every triangle splits into four similar children
/// (three corner children in local-vertex order, then the middle one).
Mesh refine_uniform(const Mesh& mesh);

/// Inflow/outflow flags per boundary edge (indexed like Mesh::boundary_edges()).
struct EdgeClassification {
  std::vector<bool> inflow;
  int num_inflow() const;
  int num_outflow() const { return static_cast<int>(inflow.size()) - num_inflow(); }
};

/// inflow iff beta(midpoint) . n < 0; ties count as outflow.
EdgeClassification classify_boundary_edges(const Mesh& mesh, const VelocityField& beta);

/// Plain text "v x y" / "t i j k" lines with 17 significant digits.
void write_mesh(const Mesh& mesh, std::ostream& out);
Mesh read_mesh(std::istream& in);

}  // namespace ldgbc
