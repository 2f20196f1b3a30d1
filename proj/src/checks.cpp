#include "ldgbc/checks.hpp"

#include "ldgbc/analysis.hpp"
#include "ldgbc/control.hpp"
#include "ldgbc/io.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace ldgbc {

double duality_defect(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& g) {
  const ForwardSolver solver(disc);
  const BlockOperator& ops = disc.ops;
  const StateSolution state = solver.solve_state(u, false);
  const AdjointSolution adjoint = solver.solve_adjoint(ops.mass_omega * g);
  const double lhs = u.dot(ops.m1 * adjoint.p.coeffs + ops.m2 * adjoint.z.coeffs);
  const double rhs = g.dot(ops.mass_omega * state.y.coeffs);
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
}

namespace {

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(build_unit_square_mesh(n)); }

}  // namespace

std::vector<CheckResult> run_property_checks(std::uint64_t seed, const std::function<void(const CheckResult&)>& report) {
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> results;
  auto record = [&](std::string name, double value, double tol) {
    CheckResult r{std::move(name), value <= tol, value, tol};
    if (report) report(r);
    results.push_back(r);
  };

  {
    std::uniform_real_distribution<double> dist(1e-6, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      double a = dist(rng), b = dist(rng), c = dist(rng);
      worst = std::max(worst, std::abs(convergence_rate(a, b) + convergence_rate(b, c) - convergence_rate(a, c)));
    }
    record("convergence rates add along a sequence", worst, 1e-12);
  }

  {
    double worst = 0.0;
    for (int n : {2, 4, 8}) {
      const ManufacturedCase lin = manufactured_linear(1.0);
      const Discretization disc = discretize(square(n), lin.problem());
      const StateSolution s = solve_state(disc, lin.u);
      worst = std::max({worst, error_l2_domain(s.y, lin.y, *disc.mesh),
                        (s.q.coeffs - l2_project(VectorFunction([&](const Point& x) { return lin.q(x); }),
                                                 disc.ops.vector, *disc.mesh)
                                          .coeffs)
                            .lpNorm<Eigen::Infinity>()});
    }
    record("linear state reproduced exactly (n = 2, 4, 8)", worst, 1e-10);
  }

  const Discretization ex1 = discretize(square(8), manufactured_example1(1.0).problem());
  {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k)
      worst = std::max(worst, duality_defect(ex1, random_vector(rng, ex1.ops.control.size()),
                                             random_vector(rng, ex1.ops.scalar.size())));
    record("duality identity, 20 random pairs (128 elements)", worst, 1e-10);
  }

  {
    double worst = 0.0;
    const Eigen::VectorXd u = random_vector(rng, ex1.ops.control.size());
    for (int k = 0; k < 10; ++k)
      worst = std::max(worst, fd_gradient_check(ex1, u, random_vector(rng, ex1.ops.control.size())).relative_error);
    record("adjoint gradient vs central differences (128 elements)", worst, 1e-7);
  }

  {
    const Discretization disc = discretize(square(8), example2_problem(1.0));
    const DiscreteSolution sol = pdas_solve(disc, ControlMode::full());
    const OptimalityResidual r = optimality_residual(disc, sol);
    record("PDAS iterations, example 2 (128 elements)", sol.iterations, 10);
    record("PDAS bound violation", r.bound_violation, 1e-10);
    record("PDAS complementarity", std::max(r.stationarity, r.sign_violation), 1e-8 * std::max(1.0, r.multiplier_scale));
    const DiscreteSolution free = pdas_solve(ex1, ControlMode::full());
    record("unconstrained PDAS iterations minus one", free.iterations - 1, 0);
  }

  {
    const Mesh mesh = build_unit_square_mesh(4);
    const DiscreteField c = quasi_interpolate(mesh, [](const Point&) { return 0.7; });
    record("quasi-interpolation keeps constants", (c.coeffs.array() - 0.7).abs().maxCoeff(), 1e-14);
  }

  {
    const auto coarse = square(4);
    const auto fine = std::make_shared<const Mesh>(refine_uniform(*coarse));
    const Discretization cd = discretize(coarse, example2_problem(1.0));
    const DiscreteSolution cs = pdas_solve(cd, ControlMode::full());
    // The coarse solution injected into the refined mesh.
    DiscreteSolution injected = cs;
    injected.y = DiscreteField(build_dof_map(*fine, SpaceKind::Scalar));
    injected.z = DiscreteField(build_dof_map(*fine, SpaceKind::Scalar));
    injected.p = DiscreteField(build_dof_map(*fine, SpaceKind::Vector));
    for (int e = 0; e < fine->num_elements(); ++e) {
      const int parent = Mesh::ancestor(e, 1);
      for (int i = 0; i < 3; ++i) {
        const Point& x = fine->vertex(fine->triangle(e)[i]);
        injected.y.coeffs[3 * e + i] = eval_scalar_unchecked(cs.y, *coarse, parent, x);
        injected.z.coeffs[3 * e + i] = eval_scalar_unchecked(cs.z, *coarse, parent, x);
        const Eigen::Vector2d p = eval_vector_unchecked(cs.p, *coarse, parent, x);
        injected.p.coeffs[6 * e + i] = p.x();
        injected.p.coeffs[6 * e + 3 + i] = p.y();
      }
    }
    injected.u = DiscreteField(build_dof_map(*fine, SpaceKind::Boundary));
    for (int j = 0; j < fine->num_boundary_edges(); ++j) {
      const Edge& edge = fine->edge(fine->boundary_edges()[j]);
      const Point mid = 0.5 * (fine->vertex(edge.v[0]) + fine->vertex(edge.v[1]));
      int host = -1;
      double best = kInfinity;
      for (int jc = 0; jc < coarse->num_boundary_edges(); ++jc) {
        const Edge& ce = coarse->edge(coarse->boundary_edges()[jc]);
        if (ce.element[0] != Mesh::ancestor(edge.element[0], 1)) continue;
        const Point a0 = coarse->vertex(ce.v[0]), a1 = coarse->vertex(ce.v[1]);
        const double t = (mid - a0).dot(a1 - a0) / (a1 - a0).squaredNorm();
        const double d = (a0 + t * (a1 - a0) - mid).norm();
        if (d < best) best = d, host = jc;
      }
      const Edge& ce = coarse->edge(coarse->boundary_edges()[host]);
      const Point a0 = coarse->vertex(ce.v[0]), a1 = coarse->vertex(ce.v[1]);
      for (int a = 0; a < 2; ++a) {
        const double t = (fine->vertex(edge.v[a]) - a0).dot(a1 - a0) / (a1 - a0).squaredNorm();
        injected.u.coeffs[2 * j + a] = cs.control(host, t);
      }
    }
    const ErrorRow row = reference_compare(*coarse, cs, *fine, injected);
    record("reference comparison through one refinement is zero",
           std::max({row.err_y, row.err_u, row.err_z, row.err_pn}), 1e-13);

    std::stringstream buffer;
    write_vtk_field(*coarse, cs.y, "y_h", buffer);
    const VtkData vtk = read_vtk(buffer);
    const auto& values = vtk.point_data.at("y_h");
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      worst = std::max(worst, std::abs(values[i] - cs.y.coeffs[static_cast<Eigen::Index>(i)]));
    record("VTK round trip of y_h", worst, 1e-15);
  }
  return results;
}

}  // namespace ldgbc
