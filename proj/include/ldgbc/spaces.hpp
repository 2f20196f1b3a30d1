#pragma once

#include "ldgbc/geometry.hpp"
#include "ldgbc/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>

namespace ldgbc {

using ScalarFunction = std::function<double(const Point&)>;
using VectorFunction = std::function<Eigen::Vector2d(const Point&)>;

enum class SpaceKind {
  Scalar,             // discontinuous P1 on triangles, 3 DOFs per element
  Vector,             // discontinuous P1 vectors, 6 DOFs per element (x nodes, then y nodes)
  Boundary,           // edgewise P1 on boundary edges, 2 DOFs per edge
  BoundaryQuadrature  // point values at the Gauss points of each boundary edge
};

struct DofMap {
  SpaceKind kind = SpaceKind::Scalar;
  int entities = 0;
  int dofs_per_entity = 0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(entities) * dofs_per_entity; }
  Eigen::Index offset(int entity) const { return static_cast<Eigen::Index>(entity) * dofs_per_entity; }
  bool is_boundary() const { return kind == SpaceKind::Boundary || kind == SpaceKind::BoundaryQuadrature; }
  bool operator==(const DofMap&) const = default;
};

/// `boundary_points` is the per-edge Gauss point count for BoundaryQuadrature.
DofMap build_dof_map(const Mesh& mesh, SpaceKind kind, int boundary_points = 0);

struct DiscreteField {
  DofMap map;
  Eigen::VectorXd coeffs;

  DiscreteField() = default;
  explicit DiscreteField(DofMap m) : map(m), coeffs(Eigen::VectorXd::Zero(m.size())) {}
  DiscreteField(DofMap m, Eigen::VectorXd c);

  /// Local coefficient block of one entity.
  auto local(int entity) const { return coeffs.segment(map.offset(entity), map.dofs_per_entity); }
};

/// Constant gradients of the three nodal basis functions (one per row).
Eigen::Matrix<double, 3, 2> basis_gradients(const Mesh& mesh, int element);

/// Physical point of a reference-triangle point.
Point map_to_element(const Mesh& mesh, int element, const Eigen::Vector2d& ref);

/// Values of the element's nodal basis along an edge, seen from `side`.
Eigen::Vector3d edge_basis(const Mesh& mesh, int edge_id, int side, double t);

/// Element-wise (edge-wise) L2 projection onto the space; BoundaryQuadrature
/// fields are sampled at their points.
DiscreteField l2_project(const ScalarFunction& f, const DofMap& map, const Mesh& mesh,
                         int degree = kDefaultQuadratureDegree);
DiscreteField l2_project(const VectorFunction& f, const DofMap& map, const Mesh& mesh,
                         int degree = kDefaultQuadratureDegree);

/// P1 value(s) inside an element: 1 entry for scalar fields, 2 for vectors.
/// Throws InvalidArgument when x lies outside the element.
Eigen::VectorXd eval_field(const DiscreteField& field, const Mesh& mesh, int element, const Point& x);
double eval_scalar(const DiscreteField& field, const Mesh& mesh, int element, const Point& x);
Eigen::Vector2d eval_vector(const DiscreteField& field, const Mesh& mesh, int element, const Point& x);

/// Evaluates the element polynomial at x without the inside-element check
/// (the polynomial's natural extension).
double eval_scalar_unchecked(const DiscreteField& field, const Mesh& mesh, int element, const Point& x);
Eigen::Vector2d eval_vector_unchecked(const DiscreteField& field, const Mesh& mesh, int element, const Point& x);

/// Restriction of the element on `side` of an edge at parameter t.
/// side 1 is rejected on boundary edges.
Eigen::VectorXd trace_on_edge(const DiscreteField& field, const Mesh& mesh, int edge_id, int side, double t);

/// [y] = y_0 n_0 + y_1 n_1 and {y} for a scalar field on an interior edge.
Eigen::Vector2d jump(const DiscreteField& field, const Mesh& mesh, int edge_id, double t);
double average(const DiscreteField& field, const Mesh& mesh, int edge_id, double t);

/// Value of a Boundary-kind field on boundary edge j (boundary index) at t.
double eval_boundary(const DiscreteField& field, int boundary_edge, double t);

/// Integral over the domain by a triangle rule of the given degree.
double integrate(const Mesh& mesh, const ScalarFunction& f, int degree = kErrorQuadratureDegree);
/// Integral over an element; f receives element id and physical point.
double integrate_elements(const Mesh& mesh, const std::function<double(int, const Point&)>& f,
                          int degree = kErrorQuadratureDegree);
/// Integral over the boundary; f receives boundary index j, parameter t, and point.
double integrate_boundary(const Mesh& mesh, const std::function<double(int, double, const Point&)>& f,
                          int degree = kErrorQuadratureDegree);

}  // namespace ldgbc
