#include "ldgbc/analysis.hpp"
#include "ldgbc/checks.hpp"
#include "ldgbc/errors.hpp"
#include "ldgbc/ldg.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <random>

using namespace ldgbc;

namespace {

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(build_unit_square_mesh(n)); }

Eigen::MatrixXd dense(const SparseMatrix& m) { return Eigen::MatrixXd(m); }

bool axis_aligned(const Edge& e) { return std::abs(e.normal.x()) < 1e-12 || std::abs(e.normal.y()) < 1e-12; }

}  // namespace

TEST_SUITE("ldg") {
  TEST_CASE("flux parameters") {
    const Mesh m = build_unit_square_mesh(4);
    ProblemData data;
    const FluxParameters f = compute_flux_parameters(m, data);
    for (int id = 0; id < m.num_edges(); ++id) {
      CHECK(f.c11[id] > 0.0);
      CHECK(std::abs(f.c11[id] * m.edge(id).length - data.epsilon) < 1e-14);
      if (axis_aligned(m.edge(id))) {
        CHECK(f.c11[id] == doctest::Approx(4.0));
        CHECK(std::abs(f.c12n[id]) == 0.5);
      } else {
        CHECK(f.c12n[id] == 0.0);  // diagonals are parallel to the default direction (1,1)
      }
      CHECK(std::abs(f.d11n[id]) == 0.5);
    }
    for (int j = 0; j < m.num_boundary_edges(); ++j) {
      const Edge& e = m.edge(m.boundary_edges()[j]);
      const bool bottom_or_left = e.normal.x() < -0.5 || e.normal.y() < -0.5;
      CHECK(f.kappa_z[j] == doctest::Approx(bottom_or_left ? -3.0 : -4.0));
    }

    data.c12_direction = Eigen::Vector2d(1.0, std::numbers::pi / 1000.0);
    const FluxParameters g = compute_flux_parameters(m, data);
    for (int id = 0; id < m.num_edges(); ++id) CHECK(std::abs(g.c12n[id]) == 0.5);
  }

  TEST_CASE("C12 sign follows the direction") {
    const Mesh m = build_unit_square_mesh(2);
    ProblemData data;
    data.c12_direction = Eigen::Vector2d(2.0, -0.5);
    const FluxParameters f = compute_flux_parameters(m, data);
    for (int id = 0; id < m.num_edges(); ++id) {
      const double nv = m.edge(id).normal.dot(data.c12_direction);
      CHECK(f.c12n[id] == (nv > 0 ? 0.5 : -0.5));
    }
  }

  TEST_CASE("epsilon scaling") {
    const auto m = square(3);
    ProblemData a, b;
    a.epsilon = 0.3;
    b.epsilon = 1.2;
    const Discretization da = discretize(m, a), db = discretize(m, b);
    for (int id = 0; id < m->num_edges(); ++id) CHECK(db.flux.c11[id] == doctest::Approx(4.0 * da.flux.c11[id]).epsilon(1e-15));
    CHECK((dense(db.ops.m1) - 2.0 * dense(da.ops.m1)).lpNorm<Eigen::Infinity>() < 1e-14);
  }

  TEST_CASE("vector mass matrix") {
    const Discretization d = discretize(square(4), ProblemData{});
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d.ops.vector.size());
    CHECK(ones.dot(d.ops.a * ones) == doctest::Approx(2.0).epsilon(1e-13));
    const Eigen::MatrixXd a = dense(d.ops.a);
    CHECK((a - a.transpose()).lpNorm<Eigen::Infinity>() < 1e-15);
    std::mt19937 rng(5);
    std::vector<int> idx(static_cast<std::size_t>(a.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    Eigen::MatrixXd sub(50, 50);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) sub(i, j) = a(idx[i], idx[j]);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sub).eigenvalues().minCoeff() > 0.0);
  }

  TEST_CASE("single element without convection") {
    const auto m = std::make_shared<const Mesh>(
        Mesh({Point(0.2, 0.1), Point(1.3, 0.4), Point(0.5, 1.2)}, {{0, 1, 2}}));
    ProblemData data;
    data.epsilon = 1.0;
    data.beta = [](const Point&) { return Eigen::Vector2d::Zero().eval(); };
    const Discretization d = discretize(m, data);
    const Eigen::Vector3d ones(1, 1, 1);
    // volume mass minus the boundary penalty eps^(1/2) * (eps/h_E) * |E| on each edge
    CHECK(ones.dot(d.ops.mass_omega * ones) == doctest::Approx(m->area(0)).epsilon(1e-14));
    CHECK(ones.dot(d.ops.c * ones) == doctest::Approx(m->area(0) - 3.0).epsilon(1e-13));
  }

  TEST_CASE("b_h in both forms") {
    for (const auto& mesh : {square(3), std::make_shared<const Mesh>(build_polygon_mesh(
                                            slanted_quadrilateral_domain(5.0 * std::numbers::pi / 6.0), 2))}) {
      ProblemData data;
      data.epsilon = 0.7;
      const Discretization d = discretize(mesh, data);
      const SparseMatrix div = assemble_b_divergence_form(*mesh, data, d.flux);
      CHECK((dense(div) - dense(d.ops.b)).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }

  TEST_CASE("homogeneous data give zero solutions") {
    const Discretization d = discretize(square(3), ProblemData{});
    const StateSolution s = solve_state(d, Eigen::VectorXd::Zero(d.ops.control.size()));
    CHECK(s.y.coeffs.isZero(0.0));
    CHECK(s.q.coeffs.isZero(0.0));
    const AdjointSolution a = solve_adjoint(d, Eigen::VectorXd::Zero(d.ops.scalar.size()));
    CHECK(a.z.coeffs.isZero(0.0));
    CHECK(a.p.coeffs.isZero(0.0));
  }

  TEST_CASE("global linear state is reproduced") {
    for (int n : {2, 4, 8}) {
      ProblemData data;
      data.source = [](const Point& x) { return 1.0 + x.x(); };  // beta.grad(x1) + x1
      const Discretization d = discretize(square(n), data);
      const StateSolution s = solve_state(d, [](const Point& x) { return x.x(); });
      for (int e = 0; e < d.mesh->num_elements(); ++e)
        for (int i = 0; i < 3; ++i) {
          const Point& x = d.mesh->vertex(d.mesh->triangle(e)[i]);
          CHECK(std::abs(s.y.coeffs[3 * e + i] - x.x()) < 1e-10);
          CHECK(std::abs(s.q.coeffs[6 * e + i] + 1.0) < 1e-10);
          CHECK(std::abs(s.q.coeffs[6 * e + 3 + i]) < 1e-10);
        }
    }
  }

  TEST_CASE("example 1 state error at 32 elements") {
    const ManufacturedCase ex = manufactured_example1(1.0);
    const Discretization d = discretize(square(4), ex.problem());
    const double err = error_l2_domain(solve_state(d, ex.u).y, ex.y, *d.mesh);
    CHECK(err > 1.64e-2 / 3.0);
    CHECK(err < 1.64e-2 * 3.0);
  }

  TEST_CASE("duality identity") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& mesh : {square(4), square(8)}) {
      for (ControlSpace space : {ControlSpace::EdgewiseP1, ControlSpace::QuadraturePoint}) {
        const Discretization d = discretize(mesh, ProblemData{}, space);
        for (int k = 0; k < 5; ++k) {
          Eigen::VectorXd uc(d.ops.control.size()), g(d.ops.scalar.size());
          for (auto& v : uc) v = u(rng);
          for (auto& v : g) v = u(rng);
          CHECK(duality_defect(d, uc, g) < 1e-10);
        }
      }
    }
  }

  TEST_CASE("example 1 adjoint boundary errors decay") {
    const ManufacturedCase ex = manufactured_example1(1.0);
    double last_z = kInfinity, last_pn = kInfinity;
    for (int n : {4, 8, 16}) {
      const Discretization d = discretize(square(n), ex.problem());
      const AdjointSolution a = solve_adjoint(d, [&](const Point& x) { return ex.y(x) - ex.desired(x); });
      const double ez = error_l2_boundary(boundary_trace(a.z, *d.mesh), ex.z, *d.mesh);
      const double epn = error_flux_normal_boundary(a.p, ex.grad_z, ex.epsilon, *d.mesh);
      CHECK(ez < 0.5 * last_z);
      CHECK(epn < 0.8 * last_pn);
      last_z = ez;
      last_pn = epn;
    }
  }

  TEST_CASE("problem data validation") {
    const Mesh m = build_unit_square_mesh(2);
    ProblemData d;
    CHECK_NOTHROW(d.validate(&m));
    d.epsilon = 0.0;
    CHECK_THROWS_AS(d.validate(), InvalidArgument);
    d = ProblemData{};
    d.omega = -1.0;
    CHECK_THROWS_AS(d.validate(), InvalidArgument);
    d = ProblemData{};
    d.lower = 1.0;
    d.upper = 0.0;
    CHECK_THROWS_AS(d.validate(), InvalidArgument);
    d = ProblemData{};
    d.c12_direction.setZero();
    CHECK_THROWS_AS(d.validate(), InvalidArgument);
    d = ProblemData{};
    d.beta = [](const Point& x) { return Eigen::Vector2d(x.x(), 0.0); };
    CHECK_THROWS_AS(d.validate(&m), InvalidArgument);
    d.beta = [](const Point& x) { return Eigen::Vector2d(x.y(), -x.x()); };
    CHECK_NOTHROW(d.validate(&m));
  }
}
