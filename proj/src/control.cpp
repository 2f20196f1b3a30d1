#include "ldgbc/control.hpp"

#include "ldgbc/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace ldgbc {

const char* to_string(ControlDiscretization kind) {
  return kind == ControlDiscretization::Full ? "full" : "variational";
}

double project_admissible(double value, double lower, double upper) {
  if (lower > upper) throw InvalidArgument(fmt::format("control bounds inverted: {} > {}", lower, upper));
  return std::min(std::max(value, lower), upper);
}

Eigen::VectorXd project_admissible(const Eigen::VectorXd& values, double lower, double upper) {
  if (lower > upper) throw InvalidArgument(fmt::format("control bounds inverted: {} > {}", lower, upper));
  return values.cwiseMax(lower).cwiseMin(upper);
}

double DiscreteSolution::control(int j, double t) const {
  if (kind == ControlDiscretization::Full) return eval_boundary(u, j, t);
  return std::min(std::max(eval_boundary(u_preimage, j, t), lower), upper);
}

BoundaryFunction DiscreteSolution::control_function() const {
  return [this](int j, double t) { return control(j, t); };
}

DiscreteField quasi_interpolate(const Mesh& mesh, const ScalarFunction& u, int degree) {
  const QuadratureRule rule = quadrature_rule(Entity::Edge, degree);
  std::vector<double> num(static_cast<std::size_t>(mesh.num_vertices()), 0.0);
  std::vector<double> den(num.size(), 0.0);
  for (int j = 0; j < mesh.num_boundary_edges(); ++j) {
    const int id = mesh.boundary_edges()[j];
    const Edge& edge = mesh.edge(id);
    double m0 = 0.0, m1 = 0.0;
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const double t = rule.points(0, q);
      const double w = edge.length * rule.weights[q] * u(mesh.edge_point(id, t));
      m0 += w * (1.0 - t);
      m1 += w * t;
    }
    num[edge.v[0]] += m0;
    num[edge.v[1]] += m1;
    den[edge.v[0]] += 0.5 * edge.length;
    den[edge.v[1]] += 0.5 * edge.length;
  }
  const DofMap map = build_dof_map(mesh, SpaceKind::Boundary);
  Eigen::VectorXd coeffs(map.size());
  for (int j = 0; j < mesh.num_boundary_edges(); ++j) {
    const Edge& edge = mesh.edge(mesh.boundary_edges()[j]);
    for (int a = 0; a < 2; ++a) coeffs[map.offset(j) + a] = num[edge.v[a]] / den[edge.v[a]];
  }
  return DiscreteField(map, std::move(coeffs));
}

double kappa_at(const Discretization& disc, int j, const Point& x) {
  const Mesh& mesh = *disc.mesh;
  const int id = mesh.boundary_edges()[j];
  const Edge& edge = mesh.edge(id);
  double k = disc.flux.penalty_sign * disc.flux.sqrt_epsilon * disc.flux.c11[id];
  if (disc.flux.classification.inflow[j]) k += std::abs(disc.data.beta(x).dot(edge.normal));
  return k;
}

namespace {

// eps^(1/2) p_h.n - kappa_z z_h at a boundary point
double adjoint_boundary_term(const Discretization& disc, const DiscreteField& p, const DiscreteField& z, int j,
                             double t) {
  const Mesh& mesh = *disc.mesh;
  const int id = mesh.boundary_edges()[j];
  const Edge& edge = mesh.edge(id);
  const Point x = mesh.edge_point(id, t);
  const Eigen::Vector2d pv = eval_vector_unchecked(p, mesh, edge.element[0], x);
  const double zv = eval_scalar_unchecked(z, mesh, edge.element[0], x);
  return disc.flux.sqrt_epsilon * pv.dot(edge.normal) - kappa_at(disc, j, x) * zv;
}

DiscreteField preimage(const Discretization& disc, const DiscreteField& p, const DiscreteField& z) {
  const DofMap map = build_dof_map(*disc.mesh, SpaceKind::Boundary);
  Eigen::VectorXd c(map.size());
  for (int j = 0; j < disc.mesh->num_boundary_edges(); ++j)
    for (int a = 0; a < 2; ++a) c[map.offset(j) + a] = adjoint_boundary_term(disc, p, z, j, a) / disc.data.omega;
  return DiscreteField(map, std::move(c));
}

Eigen::VectorXd dof_gradient(const BlockOperator& ops, double omega, const Eigen::VectorXd& u, const DiscreteField& p,
                             const DiscreteField& z) {
  return omega * (ops.mass_gamma * u) + ops.m1 * p.coeffs + ops.m2 * z.coeffs;
}

Eigen::VectorXd default_initial_control(const ProblemData& data, Eigen::Index n) {
  double value = 0.0;
  if (data.has_lower() && data.has_upper())
    value = 0.5 * (data.lower + data.upper);
  else
    value = std::min(std::max(0.0, data.lower), data.upper);
  return Eigen::VectorXd::Constant(n, value);
}

BoundStatus classify(const ProblemData& data, double c, double mu, double u) {
  if (data.has_lower() && mu + c * (u - data.lower) < 0.0) return BoundStatus::Lower;
  if (data.has_upper() && mu + c * (u - data.upper) > 0.0) return BoundStatus::Upper;
  return BoundStatus::Inactive;
}

}  // namespace

ReducedGradient reduced_gradient(const Discretization& disc, const DiscreteSolution& sol) {
  ReducedGradient g;
  g.dof = dof_gradient(disc.ops, disc.data.omega, sol.u.coeffs, sol.p, sol.z);
  g.multiplier = g.dof.cwiseQuotient(disc.ops.lumped_gamma);
  const Discretization* d = &disc;
  g.pointwise = [d, sol](int j, double t) {
    return d->data.omega * sol.control(j, t) - adjoint_boundary_term(*d, sol.p, sol.z, j, t);
  };
  return g;
}

OptimalityResidual optimality_residual(const Discretization& disc, const DiscreteSolution& sol) {
  const Eigen::VectorXd lambda = reduced_gradient(disc, sol).multiplier;
  const Eigen::VectorXd& u = sol.u.coeffs;
  if (sol.active.status.size() != static_cast<std::size_t>(u.size()))
    throw InvalidArgument("solution carries no active set of matching size");
  OptimalityResidual r;
  r.multiplier_scale = lambda.lpNorm<Eigen::Infinity>();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    r.bound_violation = std::max({r.bound_violation, sol.lower - u[i], u[i] - sol.upper});
    switch (sol.active.status[static_cast<std::size_t>(i)]) {
      case BoundStatus::Inactive:
        r.stationarity = std::max(r.stationarity, std::abs(lambda[i]));
        break;
      case BoundStatus::Lower:
        r.sign_violation = std::max(r.sign_violation, -lambda[i]);
        break;
      case BoundStatus::Upper:
        r.sign_violation = std::max(r.sign_violation, lambda[i]);
        break;
    }
  }
  return r;
}

namespace {

DiscreteSolution assemble_solution(const Discretization& disc, ControlDiscretization kind, Eigen::VectorXd u,
                                   StateSolution state, AdjointSolution adjoint) {
  DiscreteSolution sol;
  sol.kind = kind;
  sol.lower = disc.data.lower;
  sol.upper = disc.data.upper;
  sol.y = std::move(state.y);
  sol.q = std::move(state.q);
  sol.z = std::move(adjoint.z);
  sol.p = std::move(adjoint.p);
  sol.u = DiscreteField(disc.ops.control, std::move(u));
  if (kind == ControlDiscretization::Variational) sol.u_preimage = preimage(disc, sol.p, sol.z);
  return sol;
}

ControlDiscretization kind_of(const Discretization& disc) {
  return disc.ops.control_space == ControlSpace::EdgewiseP1 ? ControlDiscretization::Full
                                                             : ControlDiscretization::Variational;
}

}  // namespace

DiscreteSolution evaluate_control(const Discretization& disc, const Eigen::VectorXd& u) {
  const ForwardSolver solver(disc);
  StateSolution state = solver.solve_state(u);
  AdjointSolution adjoint = solver.solve_adjoint(disc.ops.mass_omega * state.y.coeffs - disc.ops.desired_load);
  DiscreteSolution sol = assemble_solution(disc, kind_of(disc), u, std::move(state), std::move(adjoint));
  sol.cost = evaluate_cost(*disc.mesh, disc.data, sol.y, sol.control_function());
  return sol;
}

DiscreteSolution pdas_solve(const Discretization& disc, const ControlMode& mode, const PdasOptions& options) {
  if (disc.ops.control_space != mode.space())
    throw InvalidArgument(fmt::format("{} control mode needs forms assembled for that control space", to_string(mode.kind)));
  if (options.max_iterations < 1) throw InvalidArgument("PDAS iteration cap must be positive");
  const ProblemData& data = disc.data;
  const BlockOperator& ops = disc.ops;
  const double c = mode.penalty > 0.0 ? mode.penalty : data.omega;
  const Eigen::Index nu = ops.control.size();

  Eigen::VectorXd u = options.initial_control ? *options.initial_control : default_initial_control(data, nu);
  if (u.size() != nu) throw InvalidArgument(fmt::format("initial control has {} entries, space has {}", u.size(), nu));

  ActiveSetState active(nu);
  for (Eigen::Index i = 0; i < nu; ++i) active.status[static_cast<std::size_t>(i)] = classify(data, c, 0.0, u[i]);

  std::vector<int> changes;
  for (int it = 1; it <= options.max_iterations; ++it) {
    active.iteration = it;
    const BlockSystem sys = compose_kkt(disc, active);
    const Eigen::VectorXd x = direct_solve(sys.matrix, sys.rhs);
    u = sys.block(x, 4);
    StateSolution state{DiscreteField(ops.scalar, sys.block(x, 1)), DiscreteField(ops.vector, sys.block(x, 0))};
    AdjointSolution adjoint{DiscreteField(ops.scalar, sys.block(x, 3)), DiscreteField(ops.vector, sys.block(x, 2))};

    const Eigen::VectorXd lambda = dof_gradient(ops, data.omega, u, adjoint.p, adjoint.z).cwiseQuotient(ops.lumped_gamma);
    ActiveSetState next(nu);
    next.iteration = it;
    for (Eigen::Index i = 0; i < nu; ++i) next.status[static_cast<std::size_t>(i)] = classify(data, c, -lambda[i], u[i]);

    const int diff = next.difference(active);
    if (diff == 0) {
      DiscreteSolution sol = assemble_solution(disc, mode.kind, u, std::move(state), std::move(adjoint));
      sol.active = std::move(active);
      sol.iterations = it;
      sol.converged = true;
      sol.cost = evaluate_cost(*disc.mesh, data, sol.y, sol.control_function());
      return sol;
    }
    changes.push_back(diff);
    active = std::move(next);
  }
  const std::size_t n = changes.size();
  throw NonConvergence(fmt::format("active-set iteration did not settle in {} iterations; last two updates changed {} and {} DOFs",
                                   options.max_iterations, n >= 2 ? changes[n - 2] : 0, changes[n - 1]));
}

double evaluate_cost(const Mesh& mesh, const ProblemData& data, const DiscreteField& y, const BoundaryFunction& u,
                     int degree) {
  if (y.map.kind != SpaceKind::Scalar || y.map.entities != mesh.num_elements())
    throw InvalidArgument("cost needs a scalar field on the given mesh");
  const double track = integrate_elements(
      mesh,
      [&](int e, const Point& x) {
        const double r = eval_scalar_unchecked(y, mesh, e, x) - data.desired(x);
        return r * r;
      },
      degree);
  const double control = integrate_boundary(
      mesh,
      [&](int j, double t, const Point&) {
        const double v = u(j, t);
        return v * v;
      },
      degree);
  return 0.5 * track + 0.5 * data.omega * control;
}

double reduced_cost(const Discretization& disc, const ForwardSolver& solver, const Eigen::VectorXd& u) {
  const BlockOperator& ops = disc.ops;
  const Eigen::VectorXd y = solver.solve_state(u).y.coeffs;
  const double yd2 = integrate(*disc.mesh, [&](const Point& x) { return disc.data.desired(x) * disc.data.desired(x); });
  return 0.5 * y.dot(ops.mass_omega * y) - y.dot(ops.desired_load) + 0.5 * yd2 +
         0.5 * disc.data.omega * u.dot(ops.mass_gamma * u);
}

GradientCheck fd_gradient_check(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& du) {
  const BlockOperator& ops = disc.ops;
  if (u.size() != ops.control.size() || du.size() != ops.control.size())
    throw InvalidArgument("control and direction must live in the control space");
  const ForwardSolver solver(disc);
  const StateSolution state = solver.solve_state(u);
  const AdjointSolution adjoint = solver.solve_adjoint(ops.mass_omega * state.y.coeffs - ops.desired_load);

  GradientCheck check;
  check.adjoint = dof_gradient(ops, disc.data.omega, u, adjoint.p, adjoint.z).dot(du);
  const double dnorm = du.lpNorm<Eigen::Infinity>();
  if (dnorm == 0.0) return check;
  const double t = 1e-5 * std::max(1.0, u.lpNorm<Eigen::Infinity>()) / dnorm;
  check.finite_difference = (reduced_cost(disc, solver, u + t * du) - reduced_cost(disc, solver, u - t * du)) / (2.0 * t);
  const double scale = std::max(std::abs(check.adjoint), std::abs(check.finite_difference));
  check.relative_error = scale > 0.0 ? std::abs(check.adjoint - check.finite_difference) / scale : 0.0;
  return check;
}

}  // namespace ldgbc
