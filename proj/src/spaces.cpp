#include "ldgbc/spaces.hpp"

#include "ldgbc/errors.hpp"

#include <fmt/format.h>

namespace ldgbc {

namespace {

constexpr double kInsideTolerance = 1e-10;

// Reference P1 mass matrix scaled by 1/area.
Eigen::Matrix3d unit_mass() {
  Eigen::Matrix3d m = Eigen::Matrix3d::Constant(1.0 / 12.0);
  m.diagonal().setConstant(1.0 / 6.0);
  return m;
}

void require_inside(const Mesh& mesh, int element, const Eigen::Vector3d& lambda) {
  if (lambda.minCoeff() < -kInsideTolerance)
    throw InvalidArgument(fmt::format("point outside element {} (barycentric min {:.3e})", element, lambda.minCoeff()));
  (void)mesh;
}

}  // namespace

DofMap build_dof_map(const Mesh& mesh, SpaceKind kind, int boundary_points) {
  switch (kind) {
    case SpaceKind::Scalar:
      return {kind, mesh.num_elements(), 3};
    case SpaceKind::Vector:
      return {kind, mesh.num_elements(), 6};
    case SpaceKind::Boundary:
      return {kind, mesh.num_boundary_edges(), 2};
    case SpaceKind::BoundaryQuadrature:
      if (boundary_points < 1) throw InvalidArgument("boundary quadrature space needs at least one point per edge");
      return {kind, mesh.num_boundary_edges(), boundary_points};
  }
  throw InvalidArgument("unknown space kind");
}

DiscreteField::DiscreteField(DofMap m, Eigen::VectorXd c) : map(m), coeffs(std::move(c)) {
  if (coeffs.size() != map.size())
    throw InvalidArgument(fmt::format("coefficient length {} does not match {} DOFs", coeffs.size(), map.size()));
}

Eigen::Matrix<double, 3, 2> basis_gradients(const Mesh& mesh, int element) {
  const auto& t = mesh.triangle(element);
  const Point& a = mesh.vertex(t[0]);
  const Point& b = mesh.vertex(t[1]);
  const Point& c = mesh.vertex(t[2]);
  const double twice = 2.0 * mesh.area(element);
  Eigen::Matrix<double, 3, 2> g;
  // grad lambda_i = rot(opposite edge) / (2 |K|)
  g.row(0) << (b.y() - c.y()) / twice, (c.x() - b.x()) / twice;
  g.row(1) << (c.y() - a.y()) / twice, (a.x() - c.x()) / twice;
  g.row(2) << (a.y() - b.y()) / twice, (b.x() - a.x()) / twice;
  return g;
}

Point map_to_element(const Mesh& mesh, int element, const Eigen::Vector2d& ref) {
  const auto& t = mesh.triangle(element);
  return (1.0 - ref.x() - ref.y()) * mesh.vertex(t[0]) + ref.x() * mesh.vertex(t[1]) + ref.y() * mesh.vertex(t[2]);
}

Eigen::Vector3d edge_basis(const Mesh& mesh, int edge_id, int side, double t) {
  const Edge& edge = mesh.edge(edge_id);
  const int k = edge.local[side];
  Eigen::Vector3d phi = Eigen::Vector3d::Zero();
  // element[0] walks the edge as v[0] -> v[1]; element[1] walks it backwards
  if (side == 0) {
    phi[k] = 1.0 - t;
    phi[(k + 1) % 3] = t;
  } else {
    phi[k] = t;
    phi[(k + 1) % 3] = 1.0 - t;
  }
  return phi;
}

DiscreteField l2_project(const ScalarFunction& f, const DofMap& map, const Mesh& mesh, int degree) {
  DiscreteField out(map);
  switch (map.kind) {
    case SpaceKind::Scalar: {
      const QuadratureRule rule = quadrature_rule(Entity::Triangle, degree);
      const Eigen::Matrix3d mass_inv = unit_mass().inverse();
      for (int e = 0; e < mesh.num_elements(); ++e) {
        Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
        for (Eigen::Index q = 0; q < rule.size(); ++q) {
          const Eigen::Vector2d ref = rule.points.col(q);
          const Eigen::Vector3d phi(1.0 - ref.x() - ref.y(), ref.x(), ref.y());
          rhs += 2.0 * rule.weights[q] * f(map_to_element(mesh, e, ref)) * phi;
        }
        // rhs carries the factor 1/area relative to the physical load
        out.coeffs.segment<3>(map.offset(e)) = mass_inv * rhs;
      }
      return out;
    }
    case SpaceKind::Boundary: {
      const QuadratureRule rule = quadrature_rule(Entity::Edge, degree);
      Eigen::Matrix2d mass;
      mass << 1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0;
      const Eigen::Matrix2d mass_inv = mass.inverse();
      for (int j = 0; j < mesh.num_boundary_edges(); ++j) {
        const int id = mesh.boundary_edges()[j];
        Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
        for (Eigen::Index q = 0; q < rule.size(); ++q) {
          const double t = rule.points(0, q);
          rhs += rule.weights[q] * f(mesh.edge_point(id, t)) * Eigen::Vector2d(1.0 - t, t);
        }
        out.coeffs.segment<2>(map.offset(j)) = mass_inv * rhs;
      }
      return out;
    }
    case SpaceKind::BoundaryQuadrature: {
      const QuadratureRule rule = gauss_legendre(map.dofs_per_entity);
      for (int j = 0; j < mesh.num_boundary_edges(); ++j) {
        const int id = mesh.boundary_edges()[j];
        for (Eigen::Index q = 0; q < rule.size(); ++q) out.coeffs[map.offset(j) + q] = f(mesh.edge_point(id, rule.points(0, q)));
      }
      return out;
    }
    case SpaceKind::Vector:
      break;
  }
  throw InvalidArgument("scalar function projected onto a vector space");
}

DiscreteField l2_project(const VectorFunction& f, const DofMap& map, const Mesh& mesh, int degree) {
  if (map.kind != SpaceKind::Vector) throw InvalidArgument("vector function projected onto a non-vector space");
  DiscreteField out(map);
  const QuadratureRule rule = quadrature_rule(Entity::Triangle, degree);
  const Eigen::Matrix3d mass_inv = unit_mass().inverse();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Eigen::Matrix<double, 3, 2> rhs = Eigen::Matrix<double, 3, 2>::Zero();
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d ref = rule.points.col(q);
      const Eigen::Vector3d phi(1.0 - ref.x() - ref.y(), ref.x(), ref.y());
      rhs += 2.0 * rule.weights[q] * phi * f(map_to_element(mesh, e, ref)).transpose();
    }
    const Eigen::Matrix<double, 3, 2> c = mass_inv * rhs;
    out.coeffs.segment<3>(map.offset(e)) = c.col(0);
    out.coeffs.segment<3>(map.offset(e) + 3) = c.col(1);
  }
  return out;
}

double eval_scalar_unchecked(const DiscreteField& field, const Mesh& mesh, int element, const Point& x) {
  return mesh.barycentric(element, x).dot(field.coeffs.segment<3>(field.map.offset(element)));
}

Eigen::Vector2d eval_vector_unchecked(const DiscreteField& field, const Mesh& mesh, int element, const Point& x) {
  const Eigen::Vector3d lambda = mesh.barycentric(element, x);
  const auto off = field.map.offset(element);
  return {lambda.dot(field.coeffs.segment<3>(off)), lambda.dot(field.coeffs.segment<3>(off + 3))};
}

double eval_scalar(const DiscreteField& field, const Mesh& mesh, int element, const Point& x) {
  if (field.map.kind != SpaceKind::Scalar) throw InvalidArgument("eval_scalar on a non-scalar field");
  require_inside(mesh, element, mesh.barycentric(element, x));
  return eval_scalar_unchecked(field, mesh, element, x);
}

Eigen::Vector2d eval_vector(const DiscreteField& field, const Mesh& mesh, int element, const Point& x) {
  if (field.map.kind != SpaceKind::Vector) throw InvalidArgument("eval_vector on a non-vector field");
  require_inside(mesh, element, mesh.barycentric(element, x));
  return eval_vector_unchecked(field, mesh, element, x);
}

Eigen::VectorXd eval_field(const DiscreteField& field, const Mesh& mesh, int element, const Point& x) {
  if (field.map.kind == SpaceKind::Vector) return eval_vector(field, mesh, element, x);
  if (field.map.kind == SpaceKind::Scalar) return Eigen::VectorXd::Constant(1, eval_scalar(field, mesh, element, x));
  throw InvalidArgument("eval_field needs an element-based field");
}

Eigen::VectorXd trace_on_edge(const DiscreteField& field, const Mesh& mesh, int edge_id, int side, double t) {
  const Edge& edge = mesh.edge(edge_id);
  if (side < 0 || side > 1) throw InvalidArgument("edge side must be 0 or 1");
  if (side == 1 && edge.is_boundary())
    throw InvalidArgument(fmt::format("boundary edge {} has no second adjacent element", edge_id));
  if (t < -kInsideTolerance || t > 1.0 + kInsideTolerance) throw InvalidArgument("edge parameter outside [0,1]");
  const int e = edge.element[side];
  const Eigen::Vector3d phi = edge_basis(mesh, edge_id, side, t);
  const auto off = field.map.offset(e);
  if (field.map.kind == SpaceKind::Scalar) return Eigen::VectorXd::Constant(1, phi.dot(field.coeffs.segment<3>(off)));
  if (field.map.kind == SpaceKind::Vector)
    return Eigen::Vector2d(phi.dot(field.coeffs.segment<3>(off)), phi.dot(field.coeffs.segment<3>(off + 3)));
  throw InvalidArgument("trace_on_edge needs an element-based field");
}

Eigen::Vector2d jump(const DiscreteField& field, const Mesh& mesh, int edge_id, double t) {
  const Edge& edge = mesh.edge(edge_id);
  const double y0 = trace_on_edge(field, mesh, edge_id, 0, t)[0];
  if (edge.is_boundary()) return y0 * edge.normal;
  const double y1 = trace_on_edge(field, mesh, edge_id, 1, t)[0];
  return y0 * edge.normal - y1 * edge.normal;
}

double average(const DiscreteField& field, const Mesh& mesh, int edge_id, double t) {
  const Edge& edge = mesh.edge(edge_id);
  const double y0 = trace_on_edge(field, mesh, edge_id, 0, t)[0];
  if (edge.is_boundary()) return y0;
  return 0.5 * (y0 + trace_on_edge(field, mesh, edge_id, 1, t)[0]);
}

double eval_boundary(const DiscreteField& field, int boundary_edge, double t) {
  if (field.map.kind != SpaceKind::Boundary) throw InvalidArgument("eval_boundary needs an edgewise P1 boundary field");
  const auto off = field.map.offset(boundary_edge);
  return (1.0 - t) * field.coeffs[off] + t * field.coeffs[off + 1];
}

double integrate(const Mesh& mesh, const ScalarFunction& f, int degree) {
  return integrate_elements(mesh, [&](int, const Point& x) { return f(x); }, degree);
}

double integrate_elements(const Mesh& mesh, const std::function<double(int, const Point&)>& f, int degree) {
  const QuadratureRule rule = quadrature_rule(Entity::Triangle, degree);
  double sum = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double local = 0.0;
    for (Eigen::Index q = 0; q < rule.size(); ++q)
      local += rule.weights[q] * f(e, map_to_element(mesh, e, rule.points.col(q)));
    sum += 2.0 * mesh.area(e) * local;
  }
  return sum;
}

double integrate_boundary(const Mesh& mesh, const std::function<double(int, double, const Point&)>& f, int degree) {
  const QuadratureRule rule = quadrature_rule(Entity::Edge, degree);
  double sum = 0.0;
  for (int j = 0; j < mesh.num_boundary_edges(); ++j) {
    const int id = mesh.boundary_edges()[j];
    double local = 0.0;
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const double t = rule.points(0, q);
      local += rule.weights[q] * f(j, t, mesh.edge_point(id, t));
    }
    sum += mesh.edge(id).length * local;
  }
  return sum;
}

}  // namespace ldgbc
