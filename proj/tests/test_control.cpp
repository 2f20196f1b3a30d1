#include "ldgbc/analysis.hpp"
#include "ldgbc/control.hpp"
#include "ldgbc/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ldgbc;

namespace {

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(build_unit_square_mesh(n)); }

double boundary_error(const DiscreteField& f, const ScalarFunction& exact, const Mesh& m) {
  return error_l2_boundary([&](int j, double t) { return eval_boundary(f, j, t); }, exact, m);
}

}  // namespace

TEST_SUITE("control") {
  TEST_CASE("projection onto the admissible set") {
    CHECK(project_admissible(-1.0, 0.0, 0.2) == 0.0);
    CHECK(project_admissible(0.1, 0.0, 0.2) == 0.1);
    CHECK(project_admissible(3.0, 0.0, 0.2) == 0.2);
    CHECK(project_admissible(-5.0, 0.0, kInfinity) == 0.0);
    CHECK(project_admissible(-5.0, -kInfinity, kInfinity) == -5.0);
    const Eigen::VectorXd v = project_admissible(Eigen::Vector3d(-1, 0.5, 2), 0.0, 1.0);
    CHECK(v == Eigen::Vector3d(0, 0.5, 1));
    CHECK_THROWS_AS(project_admissible(0.0, 1.0, 0.0), InvalidArgument);
  }

  TEST_CASE("quasi-interpolation") {
    const Mesh m = build_unit_square_mesh(4);
    const DiscreteField c = quasi_interpolate(m, [](const Point&) { return -1.25; });
    CHECK((c.coeffs.array() + 1.25).abs().maxCoeff() < 1e-14);

    // nodal values are weighted averages, so they stay inside the range of u
    auto wave = [](const Point& x) { return 0.1 + 0.1 * std::sin(7.0 * x.x() + 3.0 * x.y()); };
    const DiscreteField w = quasi_interpolate(m, wave);
    CHECK(w.coeffs.minCoeff() >= 0.0);
    CHECK(w.coeffs.maxCoeff() <= 0.2);

    // continuity at boundary vertices
    for (int j = 0; j < m.num_boundary_edges(); ++j)
      for (int k = 0; k < m.num_boundary_edges(); ++k)
        if (m.edge(m.boundary_edges()[j]).v[1] == m.edge(m.boundary_edges()[k]).v[0])
          CHECK(w.coeffs[2 * j + 1] == w.coeffs[2 * k]);

    // linear data are reproduced at vertices inside a side, not at corners
    const DiscreteField lin = quasi_interpolate(m, [](const Point& x) { return 2.0 * x.x() + 3.0 * x.y(); });
    for (int j = 0; j < m.num_boundary_edges(); ++j) {
      const Edge& e = m.edge(m.boundary_edges()[j]);
      for (int a = 0; a < 2; ++a) {
        const Point& x = m.vertex(e.v[a]);
        const bool corner = (x.x() == 0.0 || x.x() == 1.0) && (x.y() == 0.0 || x.y() == 1.0);
        if (!corner) CHECK(std::abs(lin.coeffs[2 * j + a] - (2.0 * x.x() + 3.0 * x.y())) < 1e-13);
      }
    }
  }

  TEST_CASE("quasi-interpolation rates") {
    auto rough = [](const Point& x) { return std::sqrt(std::abs(x.x() - 1.0 / 3.0)); };
    auto smooth = [](const Point& x) { return std::sin(2.0 * std::numbers::pi * x.x()) * std::cos(std::numbers::pi * x.y()); };
    std::vector<double> er, es;
    for (int n : {8, 16, 32, 64}) {
      const Mesh m = build_unit_square_mesh(n);
      er.push_back(boundary_error(quasi_interpolate(m, rough), rough, m));
      es.push_back(boundary_error(quasi_interpolate(m, smooth), smooth, m));
    }
    CHECK(std::abs(fitted_rate(er) - 1.0) < 0.1);
    CHECK(fitted_rate(es) > 1.4);
  }

  TEST_CASE("reduced gradient") {
    const Discretization d = discretize(square(4), example2_problem(1.0));
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(d.ops.control.size(), 0.05);
    const DiscreteSolution s = evaluate_control(d, u);
    const ReducedGradient g = reduced_gradient(d, s);
    CHECK(g.dof.size() == u.size());
    CHECK((g.multiplier.cwiseProduct(d.ops.lumped_gamma) - g.dof).norm() < 1e-14 * g.dof.norm());

    // dof gradient is the Galerkin projection of the pointwise gradient
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> r(-1.0, 1.0);
    Eigen::VectorXd v(u.size());
    for (auto& x : v) x = r(rng);
    const DiscreteField vf(d.ops.control, v);
    const double tested = integrate_boundary(*d.mesh, [&](int j, double t, const Point&) {
      return g.pointwise(j, t) * eval_boundary(vf, j, t);
    });
    CHECK(tested == doctest::Approx(g.dof.dot(v)).epsilon(1e-10));

    const GradientCheck fd = fd_gradient_check(d, u, v);
    CHECK(fd.relative_error < 1e-7);
  }

  TEST_CASE("gradient check edge cases") {
    const Discretization d = discretize(square(2), example2_problem(1.0));
    const Eigen::Index n = d.ops.control.size();
    const GradientCheck zero = fd_gradient_check(d, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n));
    CHECK(zero.adjoint == 0.0);
    CHECK(zero.relative_error == 0.0);
    const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(n, 0.0, 0.3);
    const Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(n, 1.0, -1.0), b = Eigen::VectorXd::Ones(n);
    const double ga = fd_gradient_check(d, u, a).adjoint, gb = fd_gradient_check(d, u, b).adjoint;
    CHECK(fd_gradient_check(d, u, 2.0 * a - b).adjoint == doctest::Approx(2.0 * ga - gb).epsilon(1e-12));
    CHECK_THROWS_AS(fd_gradient_check(d, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)), InvalidArgument);
  }

  TEST_CASE("unconstrained PDAS is a single solve") {
    for (auto mode : {ControlMode::full(), ControlMode::variational()}) {
      const Discretization d = discretize(square(4), manufactured_example1(1.0).problem(), mode.space());
      const DiscreteSolution s = pdas_solve(d, mode);
      CHECK(s.converged);
      CHECK(s.iterations == 1);
      CHECK(optimality_residual(d, s).stationarity < 1e-9);
    }
  }

  TEST_CASE("pinned bounds") {
    ProblemData data = example2_problem(1.0);
    data.lower = data.upper = 0.1;
    const Discretization d = discretize(square(4), data);
    const DiscreteSolution s = pdas_solve(d, ControlMode::full());
    CHECK((s.u.coeffs.array() - 0.1).abs().maxCoeff() < 1e-14);
    CHECK(s.active.count(BoundStatus::Inactive) == 0);
  }

  TEST_CASE("example 2 active sets") {
    for (auto mode : {ControlMode::full(), ControlMode::variational()}) {
      const Discretization d = discretize(square(8), example2_problem(1.0), mode.space());
      const DiscreteSolution s = pdas_solve(d, mode);
      CHECK(s.iterations <= 10);
      CHECK(s.active.count(BoundStatus::Upper) > 0);
      const OptimalityResidual r = optimality_residual(d, s);
      CHECK(r.bound_violation <= 1e-10);
      CHECK(r.stationarity <= 1e-8 * std::max(1.0, r.multiplier_scale));
      CHECK(r.sign_violation <= 1e-8 * std::max(1.0, r.multiplier_scale));
      for (int j = 0; j < d.mesh->num_boundary_edges(); ++j)
        for (double t : {0.0, 0.25, 0.5, 1.0}) {
          CHECK(s.control(j, t) >= -1e-12);
          CHECK(s.control(j, t) <= 0.2 + 1e-12);
        }
    }
  }

  TEST_CASE("PDAS failures") {
    const Discretization d = discretize(square(8), example2_problem(1.0));
    PdasOptions capped;
    capped.max_iterations = 1;
    CHECK_THROWS_AS(pdas_solve(d, ControlMode::full(), capped), NonConvergence);
    capped.max_iterations = 0;
    CHECK_THROWS_AS(pdas_solve(d, ControlMode::full(), capped), InvalidArgument);
    CHECK_THROWS_AS(pdas_solve(d, ControlMode::variational()), InvalidArgument);
    PdasOptions bad_start;
    bad_start.initial_control = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(pdas_solve(d, ControlMode::full(), bad_start), InvalidArgument);
  }

  TEST_CASE("variational and full agree without bounds") {
    const auto m = square(8);
    const ProblemData data = example2_problem(1.0);
    ProblemData free = data;
    free.lower = -kInfinity;
    free.upper = kInfinity;
    const Discretization df = discretize(m, free, ControlSpace::EdgewiseP1);
    const Discretization dv = discretize(m, free, ControlSpace::QuadraturePoint);
    const DiscreteSolution sf = pdas_solve(df, ControlMode::full());
    const DiscreteSolution sv = pdas_solve(dv, ControlMode::variational());
    CHECK((sf.y.coeffs - sv.y.coeffs).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK((sf.q.coeffs - sv.q.coeffs).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK((sf.z.coeffs - sv.z.coeffs).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK((sf.p.coeffs - sv.p.coeffs).lpNorm<Eigen::Infinity>() < 1e-8);
    for (int j = 0; j < m->num_boundary_edges(); ++j)
      for (double t : {0.0, 0.3, 1.0}) CHECK(std::abs(sf.control(j, t) - sv.control(j, t)) < 1e-8);
  }

  TEST_CASE("the PDAS solution minimizes the reduced cost") {
    const Discretization d = discretize(square(4), example2_problem(1.0));
    const DiscreteSolution s = pdas_solve(d, ControlMode::full());
    const ForwardSolver solver(d);
    const double best = reduced_cost(d, solver, s.u.coeffs);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> r(-0.05, 0.05);
    for (int k = 0; k < 10; ++k) {
      Eigen::VectorXd v = s.u.coeffs;
      for (auto& x : v) x += r(rng);
      CHECK(reduced_cost(d, solver, project_admissible(v, 0.0, 0.2)) >= best - 1e-14);
    }
  }

  TEST_CASE("cost functional") {
    const Mesh m = build_unit_square_mesh(2);
    const DiscreteField zero(build_dof_map(m, SpaceKind::Scalar));
    ProblemData data;
    data.desired = [](const Point&) { return 1.0; };
    CHECK(evaluate_cost(m, data, zero, [](int, double) { return 0.0; }) == doctest::Approx(0.5).epsilon(1e-14));
    data.desired = [](const Point&) { return 0.0; };
    data.omega = 0.5;
    // omega/2 * 2^2 * perimeter
    CHECK(evaluate_cost(m, data, zero, [](int, double) { return 2.0; }) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK_THROWS_AS(evaluate_cost(m, data, DiscreteField(build_dof_map(m, SpaceKind::Vector)), [](int, double) { return 0.0; }),
                    InvalidArgument);
  }
}
