#include "ldgbc/analysis.hpp"

#include "ldgbc/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace ldgbc {

ProblemData ManufacturedCase::problem() const {
  ProblemData data;
  data.epsilon = epsilon;
  data.omega = omega;
  const Eigen::Vector2d b = beta;
  data.beta = [b](const Point&) { return b; };
  const double a = alpha;
  data.reaction = [a](const Point&) { return a; };
  data.source = source;
  data.desired = desired;
  return data;
}

ManufacturedCase manufactured_example1(double epsilon, double omega) {
  if (!(epsilon > 0.0) || !(omega > 0.0)) throw InvalidArgument("epsilon and omega must be positive");
  ManufacturedCase c;
  c.epsilon = epsilon;
  c.omega = omega;
  const double se = std::sqrt(epsilon);
  const double sy = se / omega;
  c.y = [sy](const Point& x) { return -sy * (x[0] * (1 - x[0]) + x[1] * (1 - x[1])); };
  c.grad_y = [sy](const Point& x) { return Eigen::Vector2d(-sy * (1 - 2 * x[0]), -sy * (1 - 2 * x[1])); };
  c.u = c.y;
  c.z = [se](const Point& x) { return x[0] * x[1] * (1 - x[0]) * (1 - x[1]) / se; };
  c.grad_z = [se](const Point& x) {
    return Eigen::Vector2d((1 - 2 * x[0]) * x[1] * (1 - x[1]) / se, (1 - 2 * x[1]) * x[0] * (1 - x[0]) / se);
  };
  const Eigen::Vector2d beta = c.beta;
  const double alpha = c.alpha;
  const auto y = c.y;
  const auto gy = c.grad_y;
  const auto z = c.z;
  const auto gz = c.grad_z;
  // lap y = 4 sy, lap z = -2 (x2(1-x2) + x1(1-x1)) / se
  c.source = [=](const Point& x) { return -epsilon * 4.0 * sy + beta.dot(gy(x)) + alpha * y(x); };
  c.desired = [=](const Point& x) {
    const double lap_z = -2.0 * (x[1] * (1 - x[1]) + x[0] * (1 - x[0])) / se;
    return y(x) - (-epsilon * lap_z - beta.dot(gz(x)) + alpha * z(x));
  };
  return c;
}

ManufacturedCase manufactured_linear(double epsilon, const Eigen::Vector3d& coef) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  ManufacturedCase c;
  c.epsilon = epsilon;
  c.y = [coef](const Point& x) { return coef[0] + coef[1] * x[0] + coef[2] * x[1]; };
  c.grad_y = [coef](const Point&) { return Eigen::Vector2d(coef[1], coef[2]); };
  c.u = c.y;
  c.z = [](const Point&) { return 0.0; };
  c.grad_z = [](const Point&) { return Eigen::Vector2d::Zero().eval(); };
  const Eigen::Vector2d beta = c.beta;
  const double alpha = c.alpha;
  const auto y = c.y;
  c.source = [=](const Point& x) { return beta.dot(Eigen::Vector2d(coef[1], coef[2])) + alpha * y(x); };
  c.desired = y;
  return c;
}

ProblemData example2_problem(double epsilon) {
  ProblemData data;
  data.epsilon = epsilon;
  data.omega = 1.0;
  data.source = [](const Point&) { return 0.0; };
  data.desired = [](const Point& x) { return std::pow(x.squaredNorm(), -1.0 / 3.0); };
  data.lower = 0.0;
  data.upper = 0.2;
  return data;
}

ProblemData example3_problem(double epsilon) {
  ProblemData data;
  data.epsilon = epsilon;
  data.omega = 1.0;
  data.beta = [](const Point&) { return Eigen::Vector2d(1.0, 0.0); };
  data.reaction = [](const Point&) { return 2.0; };
  data.source = [](const Point&) { return 1.0; };
  data.desired = [](const Point& x) { return x[1] < 0.5 ? -1.0 : 1.0; };
  data.lower = 0.0;
  return data;
}

BoundaryFunction boundary_trace(const DiscreteField& field, const Mesh& mesh) {
  if (field.map.kind != SpaceKind::Scalar) throw InvalidArgument("boundary trace needs a scalar field");
  return [&field, &mesh](int j, double t) {
    const int id = mesh.boundary_edges()[j];
    return eval_scalar_unchecked(field, mesh, mesh.edge(id).element[0], mesh.edge_point(id, t));
  };
}

double error_l2_domain(const DiscreteField& field, const ScalarFunction& exact, const Mesh& mesh, int degree) {
  if (field.map.kind != SpaceKind::Scalar || field.map.entities != mesh.num_elements())
    throw InvalidArgument("domain error needs a scalar field on the given mesh");
  return std::sqrt(integrate_elements(
      mesh,
      [&](int e, const Point& x) {
        const double r = eval_scalar_unchecked(field, mesh, e, x) - exact(x);
        return r * r;
      },
      degree));
}

double error_l2_boundary(const BoundaryFunction& approx, const ScalarFunction& exact, const Mesh& mesh, int degree) {
  return std::sqrt(integrate_boundary(
      mesh,
      [&](int j, double t, const Point& x) {
        const double r = approx(j, t) - exact(x);
        return r * r;
      },
      degree));
}

double error_flux_normal_boundary(const DiscreteField& p_h, const VectorFunction& grad_z, double epsilon,
                                  const Mesh& mesh, int degree) {
  if (p_h.map.kind != SpaceKind::Vector || p_h.map.entities != mesh.num_elements())
    throw InvalidArgument("flux error needs a vector field on the given mesh");
  const double se = std::sqrt(epsilon);
  return std::sqrt(integrate_boundary(
      mesh,
      [&](int j, double, const Point& x) {
        const Edge& edge = mesh.edge(mesh.boundary_edges()[j]);
        const double r = (se * grad_z(x) - eval_vector_unchecked(p_h, mesh, edge.element[0], x)).dot(edge.normal);
        return r * r;
      },
      degree));
}

double convergence_rate(double e_coarse, double e_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0))
    throw InvalidArgument(fmt::format("rates need positive errors, got {} and {}", e_coarse, e_fine));
  return std::log(e_coarse / e_fine) / std::log(2.0);
}

double fitted_rate(const std::vector<double>& errors) {
  const auto n = static_cast<Eigen::Index>(errors.size());
  if (n < 2) throw InvalidArgument("a fitted rate needs at least two errors");
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(errors[static_cast<std::size_t>(i)] > 0.0)) throw InvalidArgument("rates need positive errors");
    a(i, 0) = 1.0;
    a(i, 1) = static_cast<double>(i);
    b[i] = std::log2(errors[static_cast<std::size_t>(i)]);
  }
  return -a.colPivHouseholderQr().solve(b)[1];
}

double ErrorReport::value(const ErrorRow& row, Column c) {
  switch (c) {
    case Y: return row.err_y;
    case U: return row.err_u;
    case Z: return row.err_z;
    case PN: return row.err_pn;
  }
  return 0.0;
}

std::optional<double> ErrorReport::rate(std::size_t i, Column c) const {
  if (i == 0 || i >= rows.size()) return std::nullopt;
  const double a = value(rows[i - 1], c);
  const double b = value(rows[i], c);
  if (!(a > 0.0) || !(b > 0.0)) return std::nullopt;
  return convergence_rate(a, b);
}

std::vector<double> ErrorReport::column(Column c) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const ErrorRow& r : rows) out.push_back(value(r, c));
  return out;
}

ErrorRow exact_errors(const Mesh& mesh, const DiscreteSolution& sol, const ManufacturedCase& exact) {
  ErrorRow row;
  row.elements = mesh.num_elements();
  row.h = mesh.h();
  row.err_y = error_l2_domain(sol.y, exact.y, mesh);
  row.err_u = error_l2_boundary(sol.control_function(), exact.u, mesh);
  row.err_z = error_l2_boundary(boundary_trace(sol.z, mesh), exact.z, mesh);
  row.err_pn = error_flux_normal_boundary(sol.p, exact.grad_z, exact.epsilon, mesh);
  row.pdas_iterations = sol.iterations;
  return row;
}

namespace {

struct BoundaryParent {
  int coarse_edge = -1;  // boundary index on the coarse mesh
  double t0 = 0.0;       // coarse parameter of the fine edge's endpoints
  double t1 = 0.0;
};

// Parameter of x along the coarse edge, or nullopt when x is off the segment.
std::optional<double> locate_on_edge(const Mesh& mesh, int edge_id, const Point& x) {
  const Edge& e = mesh.edge(edge_id);
  const Point a = mesh.vertex(e.v[0]);
  const Eigen::Vector2d d = mesh.vertex(e.v[1]) - a;
  const double t = (x - a).dot(d) / d.squaredNorm();
  const double dist = (x - (a + t * d)).norm();
  if (dist > 1e-10 * e.length || t < -1e-10 || t > 1 + 1e-10) return std::nullopt;
  return t;
}

}  // namespace

ErrorRow reference_compare(const Mesh& coarse_mesh, const DiscreteSolution& coarse, const Mesh& fine_mesh,
                           const DiscreteSolution& reference) {
  int levels = 0;
  long count = coarse_mesh.num_elements();
  while (count < fine_mesh.num_elements()) {
    count *= 4;
    ++levels;
  }
  if (levels == 0 || count != fine_mesh.num_elements())
    throw InvalidArgument(fmt::format("{} elements is not a nested refinement of {} elements", fine_mesh.num_elements(),
                                      coarse_mesh.num_elements()));
  for (int e = 0; e < fine_mesh.num_elements(); ++e) {
    const Eigen::Vector3d lambda = coarse_mesh.barycentric(Mesh::ancestor(e, levels), fine_mesh.centroid(e));
    if (lambda.minCoeff() < -1e-10) throw InvalidArgument("meshes are not nested: fine element outside its ancestor");
  }

  std::vector<BoundaryParent> parent(static_cast<std::size_t>(fine_mesh.num_boundary_edges()));
  for (int jf = 0; jf < fine_mesh.num_boundary_edges(); ++jf) {
    const int idf = fine_mesh.boundary_edges()[jf];
    const Edge& ef = fine_mesh.edge(idf);
    const int k = Mesh::ancestor(ef.element[0], levels);
    for (int ce : coarse_mesh.element_edges(k)) {
      if (!coarse_mesh.edge(ce).is_boundary()) continue;
      const auto t0 = locate_on_edge(coarse_mesh, ce, fine_mesh.vertex(ef.v[0]));
      const auto t1 = locate_on_edge(coarse_mesh, ce, fine_mesh.vertex(ef.v[1]));
      if (t0 && t1) {
        parent[static_cast<std::size_t>(jf)] = {coarse_mesh.boundary_index(ce), *t0, *t1};
        break;
      }
    }
    if (parent[static_cast<std::size_t>(jf)].coarse_edge < 0)
      throw InvalidArgument("meshes are not nested: fine boundary edge without a coarse parent");
  }

  ErrorRow row;
  row.elements = coarse_mesh.num_elements();
  row.h = coarse_mesh.h();
  row.pdas_iterations = coarse.iterations;
  row.err_y = std::sqrt(integrate_elements(fine_mesh, [&](int e, const Point& x) {
    const double r = eval_scalar_unchecked(coarse.y, coarse_mesh, Mesh::ancestor(e, levels), x) -
                     eval_scalar_unchecked(reference.y, fine_mesh, e, x);
    return r * r;
  }));

  double su = 0.0, sz = 0.0, sp = 0.0;
  const QuadratureRule rule = quadrature_rule(Entity::Edge, kErrorQuadratureDegree);
  for (int jf = 0; jf < fine_mesh.num_boundary_edges(); ++jf) {
    const int idf = fine_mesh.boundary_edges()[jf];
    const Edge& ef = fine_mesh.edge(idf);
    const BoundaryParent& par = parent[static_cast<std::size_t>(jf)];
    const int kf = ef.element[0];
    const int kc = Mesh::ancestor(kf, levels);
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const double t = rule.points(0, q);
      const double w = ef.length * rule.weights[q];
      const Point x = fine_mesh.edge_point(idf, t);
      const double tc = (1.0 - t) * par.t0 + t * par.t1;
      const double du = coarse.control(par.coarse_edge, tc) - reference.control(jf, t);
      const double dz = eval_scalar_unchecked(coarse.z, coarse_mesh, kc, x) - eval_scalar_unchecked(reference.z, fine_mesh, kf, x);
      const double dp = (eval_vector_unchecked(coarse.p, coarse_mesh, kc, x) - eval_vector_unchecked(reference.p, fine_mesh, kf, x))
                            .dot(ef.normal);
      su += w * du * du;
      sz += w * dz * dz;
      sp += w * dp * dp;
    }
  }
  row.err_u = std::sqrt(su);
  row.err_z = std::sqrt(sz);
  row.err_pn = std::sqrt(sp);
  return row;
}

double GalerkinDiagnostics::error_bound(double epsilon, double c) const {
  return state * state + c * (epsilon * flux_normal * flux_normal + kappa_adjoint * kappa_adjoint);
}

GalerkinDiagnostics galerkin_diagnostics(const ManufacturedCase& exact, const Discretization& disc) {
  const Mesh& mesh = *disc.mesh;
  const ForwardSolver solver(disc);
  GalerkinDiagnostics d;
  const StateSolution state = solver.solve_state(exact.u, true);
  d.state = error_l2_domain(state.y, exact.y, mesh);
  const auto y = exact.y;
  const auto yd = exact.desired;
  const AdjointSolution adjoint = solver.solve_adjoint([&](const Point& x) { return y(x) - yd(x); });
  d.flux_normal = error_flux_normal_boundary(adjoint.p, exact.grad_z, exact.epsilon, mesh);
  d.adjoint_boundary = error_l2_boundary(boundary_trace(adjoint.z, mesh), exact.z, mesh);
  d.kappa_adjoint = std::sqrt(integrate_boundary(mesh, [&](int j, double, const Point& x) {
    const int id = mesh.boundary_edges()[j];
    const double r = kappa_at(disc, j, x) * (eval_scalar_unchecked(adjoint.z, mesh, mesh.edge(id).element[0], x) - exact.z(x));
    return r * r;
  }));
  const DiscreteField pi = quasi_interpolate(mesh, exact.u);
  d.quasi_interpolation = error_l2_boundary([&](int j, double t) { return eval_boundary(pi, j, t); }, exact.u, mesh);
  return d;
}

}  // namespace ldgbc
