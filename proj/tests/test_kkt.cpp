#include "ldgbc/analysis.hpp"
#include "ldgbc/control.hpp"
#include "ldgbc/errors.hpp"
#include "ldgbc/kkt.hpp"

#include <doctest.h>

using namespace ldgbc;

namespace {

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(build_unit_square_mesh(n)); }

}  // namespace

TEST_SUITE("kkt") {
  TEST_CASE("block layout") {
    const Discretization d = discretize(square(3), ProblemData{});
    const BlockSystem sys = compose_kkt(d, ActiveSetState(d.ops.control.size()));
    const Eigen::Index m = d.mesh->num_elements(), b = d.mesh->num_boundary_edges();
    CHECK(sys.size() == 6 * m + 3 * m + 6 * m + 3 * m + 2 * b);
    CHECK(sys.matrix.rows() == sys.size());
    CHECK(sys.matrix.cols() == sys.size());
    CHECK(sys.control_index(0) == 18 * m);
  }

  TEST_CASE("inconsistent active sets are rejected") {
    const Discretization d = discretize(square(2), ProblemData{});
    CHECK_THROWS_AS(compose_kkt(d, ActiveSetState(3)), InvalidArgument);
    ActiveSetState s(d.ops.control.size());
    s.status[0] = BoundStatus::Lower;
    CHECK_THROWS_AS(compose_kkt(d, s), InvalidArgument);
  }

  TEST_CASE("fully pinned control decouples the state") {
    ProblemData data = example2_problem(1.0);
    data.lower = data.upper = 0.0;
    const Discretization d = discretize(square(4), data);
    ActiveSetState s(d.ops.control.size());
    for (auto& st : s.status) st = BoundStatus::Lower;
    const BlockSystem sys = compose_kkt(d, s);
    const Eigen::VectorXd x = direct_solve(sys.matrix, sys.rhs);
    CHECK(sys.block(x, 4).isZero(0.0));
    const StateSolution state = solve_state(d, Eigen::VectorXd::Zero(d.ops.control.size()));
    CHECK((sys.block(x, 1) - state.y.coeffs).norm() < 1e-10 * std::max(1.0, state.y.coeffs.norm()));
  }

  TEST_CASE("unconstrained solve is stationary and consistent") {
    const ManufacturedCase ex = manufactured_example1(1.0);
    const Discretization d = discretize(square(4), ex.problem());
    const BlockSystem sys = compose_kkt(d, ActiveSetState(d.ops.control.size()));
    const Eigen::VectorXd x = direct_solve(sys.matrix, sys.rhs);
    CHECK((sys.matrix * x - sys.rhs).norm() <= 1e-10 * sys.rhs.norm());
    const Eigen::VectorXd u = sys.block(x, 4);

    // eliminating u: state and adjoint solves with the KKT control reproduce y and z
    const ForwardSolver solver(d);
    const StateSolution state = solver.solve_state(u);
    const AdjointSolution adj = solver.solve_adjoint(d.ops.mass_omega * state.y.coeffs - d.ops.desired_load);
    CHECK((state.y.coeffs - sys.block(x, 1)).norm() < 1e-8 * state.y.coeffs.norm());
    CHECK((adj.z.coeffs - sys.block(x, 3)).norm() < 1e-8 * adj.z.coeffs.norm());

    const Eigen::VectorXd g = d.data.omega * (d.ops.mass_gamma * u) + d.ops.m1 * adj.p.coeffs + d.ops.m2 * adj.z.coeffs;
    CHECK(g.lpNorm<Eigen::Infinity>() < 1e-10);

    DiscreteSolution sol;
    sol.u = DiscreteField(d.ops.control, u);
    const double err = error_l2_boundary(sol.control_function(), ex.u, *d.mesh);
    CHECK(err > 4.27e-2 / 2.0);
    CHECK(err < 4.27e-2 * 2.0);
  }

  TEST_CASE("direct solve recovers a known solution") {
    for (ControlSpace space : {ControlSpace::EdgewiseP1, ControlSpace::QuadraturePoint}) {
      const Discretization d = discretize(square(4), example2_problem(1.0), space);
      const BlockSystem sys = compose_kkt(d, ActiveSetState(d.ops.control.size()));
      const Eigen::VectorXd x0 = Eigen::VectorXd::LinSpaced(sys.size(), -1.0, 2.0);
      const Eigen::VectorXd x = direct_solve(sys.matrix, sys.matrix * x0);
      CHECK((x - x0).norm() <= 1e-9 * x0.norm());
    }
  }

  TEST_CASE("unconstrained KKT is nonsingular on the example meshes") {
    const std::vector<std::pair<ProblemData, std::shared_ptr<const Mesh>>> cases{
        {manufactured_example1(1.0).problem(), square(8)},
        {example2_problem(1e-4), square(8)},
        {example3_problem(1.0),
         std::make_shared<const Mesh>(build_polygon_mesh(slanted_quadrilateral_domain(kExample3Angle), 3))}};
    for (const auto& [data, mesh] : cases) {
      const Discretization d = discretize(mesh, data);
      const BlockSystem sys = compose_kkt(d, ActiveSetState(d.ops.control.size()));
      CHECK_NOTHROW(direct_solve(sys.matrix, sys.rhs));
    }
  }

  TEST_CASE("active set bookkeeping") {
    ActiveSetState a(4), b(4);
    b.status[1] = BoundStatus::Upper;
    b.status[3] = BoundStatus::Lower;
    CHECK(a.difference(b) == 2);
    CHECK(b.count(BoundStatus::Upper) == 1);
    CHECK(b.count(BoundStatus::Inactive) == 2);
    CHECK_FALSE(a.same_sets(b));
    CHECK(a.same_sets(ActiveSetState(4)));
  }
}
