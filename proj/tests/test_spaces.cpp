#include "ldgbc/errors.hpp"
#include "ldgbc/quadrature.hpp"
#include "ldgbc/spaces.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ldgbc;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// int_{x,y >= 0, x+y <= 1} x^a y^b = a! b! / (a+b+2)!
double triangle_monomial(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

Mesh single_triangle() {
  return Mesh({Point(0.2, 0.1), Point(1.3, 0.4), Point(0.5, 1.2)}, {{0, 1, 2}});
}

}  // namespace

TEST_SUITE("spaces") {
  TEST_CASE("dof counts") {
    const Mesh m = build_unit_square_mesh(1);
    const DofMap s = build_dof_map(m, SpaceKind::Scalar);
    const DofMap v = build_dof_map(m, SpaceKind::Vector);
    const DofMap b = build_dof_map(m, SpaceKind::Boundary);
    CHECK(s.size() == 6);
    CHECK(v.size() == 12);
    CHECK(b.size() == 8);
    for (int e = 0; e < 2; ++e) CHECK(v.offset(e) == 6 * e);
    CHECK(build_dof_map(m, SpaceKind::BoundaryQuadrature, 3).size() == 12);
  }

  TEST_CASE("quadrature exactness") {
    const QuadratureRule e3 = quadrature_rule(Entity::Edge, 3);
    CHECK(e3.size() == 2);
    CHECK(e3.weights.sum() == doctest::Approx(1.0).epsilon(1e-15));

    for (int degree = 0; degree <= 6; ++degree) {
      const QuadratureRule t = quadrature_rule(Entity::Triangle, degree);
      const QuadratureRule e = quadrature_rule(Entity::Edge, degree);
      CHECK(t.weights.minCoeff() > 0.0);
      CHECK(e.weights.minCoeff() > 0.0);
      CHECK(std::abs(t.weights.sum() - 0.5) < 1e-14);
      CHECK(std::abs(e.weights.sum() - 1.0) < 1e-14);
      for (int a = 0; a <= degree; ++a) {
        double edge = 0.0;
        for (Eigen::Index k = 0; k < e.size(); ++k) edge += e.weights[k] * std::pow(e.points(0, k), a);
        CHECK(std::abs(edge - 1.0 / (a + 1)) < 1e-13);
        for (int b = 0; a + b <= degree; ++b) {
          double tri = 0.0;
          for (Eigen::Index k = 0; k < t.size(); ++k)
            tri += t.weights[k] * std::pow(t.points(0, k), a) * std::pow(t.points(1, k), b);
          CHECK(std::abs(tri - triangle_monomial(a, b)) < 1e-13 * triangle_monomial(a, b) + 1e-16);
        }
      }
    }
    CHECK_THROWS_AS(quadrature_rule(Entity::Triangle, 7), InvalidArgument);

    const QuadratureRule t2 = quadrature_rule(Entity::Triangle, 2);
    double x2 = 0.0;
    for (Eigen::Index k = 0; k < t2.size(); ++k) x2 += t2.weights[k] * t2.points(0, k) * t2.points(0, k);
    CHECK(x2 == doctest::Approx(1.0 / 12.0).epsilon(1e-14));

    const Mesh tri = single_triangle();
    CHECK(integrate(tri, [](const Point&) { return 1.0; }) == doctest::Approx(tri.area(0)).epsilon(1e-14));
  }

  TEST_CASE("gauss-legendre nodes") {
    const QuadratureRule g = gauss_legendre(3);
    CHECK(g.points(0, 1) == doctest::Approx(0.5));
    CHECK(g.points(0, 0) == doctest::Approx(0.5 - 0.5 * std::sqrt(0.6)).epsilon(1e-14));
    CHECK(g.weights[1] == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
  }

  TEST_CASE("l2 projection") {
    const Mesh m = build_unit_square_mesh(3);
    const DofMap s = build_dof_map(m, SpaceKind::Scalar);
    CHECK(l2_project([](const Point&) { return 0.0; }, s, m).coeffs.isZero(0.0));

    auto lin = [](const Point& x) { return 2.0 * x.x() - x.y(); };
    const DiscreteField f = l2_project(lin, s, m);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
      double a = u(rng), b = u(rng) * (1.0 - a);
      const int e = k % m.num_elements();
      const auto& t = m.triangle(e);
      const Point x = (1 - a - b) * m.vertex(t[0]) + a * m.vertex(t[1]) + b * m.vertex(t[2]);
      CHECK(std::abs(eval_scalar(f, m, e, x) - lin(x)) < 1e-12);
    }

    const Mesh tri = single_triangle();
    const DiscreteField q = l2_project([](const Point& x) { return x.x() * x.x(); },
                                       build_dof_map(tri, SpaceKind::Scalar), tri);
    const double mean_f = integrate(tri, [](const Point& x) { return x.x() * x.x(); }) / tri.area(0);
    CHECK(std::abs(q.coeffs.mean() - mean_f) < 1e-12);  // P1 mean = vertex average

    const DiscreteField again =
        l2_project([&](const Point& x) { return eval_scalar(q, tri, 0, x); }, q.map, tri);
    CHECK((again.coeffs - q.coeffs).lpNorm<Eigen::Infinity>() < 1e-13);

    const DofMap vmap = build_dof_map(m, SpaceKind::Vector);
    const DiscreteField v = l2_project([](const Point& x) { return Eigen::Vector2d(x.y(), 1.0 - x.x()); }, vmap, m);
    const Point x(0.4, 0.3);
    int host = -1;
    for (int e = 0; e < m.num_elements(); ++e)
      if (m.barycentric(e, x).minCoeff() > 0.0) host = e;
    REQUIRE(host >= 0);
    CHECK((eval_vector(v, m, host, x) - Eigen::Vector2d(0.3, 0.6)).norm() < 1e-12);
  }

  TEST_CASE("pointwise evaluation") {
    const Mesh tri = single_triangle();
    const DofMap s = build_dof_map(tri, SpaceKind::Scalar);
    const Point inside = tri.centroid(0);
    CHECK(eval_scalar(DiscreteField(s, Eigen::Vector3d(1, 1, 1)), tri, 0, inside) == doctest::Approx(1.0));
    CHECK(eval_scalar(DiscreteField(s, Eigen::Vector3d(0, 1, 0)), tri, 0, tri.vertex(1)) == doctest::Approx(1.0));
    CHECK(eval_scalar(DiscreteField(s, Eigen::Vector3d(0, 1, 0)), tri, 0, tri.vertex(2)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(eval_scalar(DiscreteField(s), tri, 0, Point(5.0, 5.0)), InvalidArgument);

    const QuadratureRule r = quadrature_rule(Entity::Triangle, 4);
    for (Eigen::Index k = 0; k < r.size(); ++k) {
      const Point x = map_to_element(tri, 0, r.points.col(k));
      const Eigen::Vector3d b = tri.barycentric(0, x);
      CHECK(std::abs(b.sum() - 1.0) < 1e-14);
    }
  }

  TEST_CASE("traces, jumps and averages") {
    const Mesh m = build_unit_square_mesh(2);
    const DofMap s = build_dof_map(m, SpaceKind::Scalar);
    const DiscreteField lin = l2_project([](const Point& x) { return 1.0 + x.x() - 3.0 * x.y(); }, s, m);
    for (int id : m.interior_edges())
      for (double t : {0.0, 0.3, 1.0})
        CHECK(std::abs(trace_on_edge(lin, m, id, 0, t)[0] - trace_on_edge(lin, m, id, 1, t)[0]) < 1e-12);
    CHECK_THROWS_AS(trace_on_edge(lin, m, m.boundary_edges()[0], 1, 0.5), InvalidArgument);

    const int id = m.interior_edges()[0];
    const Edge& edge = m.edge(id);
    DiscreteField pc(s);
    pc.coeffs.segment(3 * edge.element[0], 3).setConstant(1.0);
    pc.coeffs.segment(3 * edge.element[1], 3).setConstant(2.0);
    const Eigen::Vector2d j = jump(pc, m, id, 0.5);
    CHECK(j.norm() == doctest::Approx(1.0));
    CHECK(std::abs(std::abs(j.dot(edge.normal)) - 1.0) < 1e-14);
    CHECK(average(pc, m, id, 0.5) == doctest::Approx(1.5));
  }

  TEST_CASE("P1 products need only degree 2") {
    const Mesh m = build_unit_square_mesh(2);
    const DofMap s = build_dof_map(m, SpaceKind::Scalar);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DiscreteField f(s), g(s);
    for (Eigen::Index i = 0; i < s.size(); ++i) f.coeffs[i] = u(rng), g.coeffs[i] = u(rng);
    auto product = [&](int e, const Point& x) {
      return eval_scalar_unchecked(f, m, e, x) * eval_scalar_unchecked(g, m, e, x);
    };
    CHECK(std::abs(integrate_elements(m, product, 2) - integrate_elements(m, product, 4)) < 1e-13);

    const QuadratureRule r = quadrature_rule(Entity::Triangle, 4);
    for (Eigen::Index k = 0; k < r.size(); ++k) {
      const Point x = map_to_element(m, 3, r.points.col(k));
      CHECK(std::abs(m.barycentric(3, x).sum() - 1.0) < 1e-14);
      CHECK(std::abs(edge_basis(m, m.element_edges(3)[0], m.edge(m.element_edges(3)[0]).element[0] == 3 ? 0 : 1,
                                0.37)
                         .sum() -
                     1.0) < 1e-14);
    }
  }

  TEST_CASE("boundary fields") {
    const Mesh m = build_unit_square_mesh(2);
    const DofMap b = build_dof_map(m, SpaceKind::Boundary);
    DiscreteField f(b);
    f.coeffs[2] = 1.0;
    f.coeffs[3] = 3.0;
    CHECK(eval_boundary(f, 1, 0.0) == doctest::Approx(1.0));
    CHECK(eval_boundary(f, 1, 0.5) == doctest::Approx(2.0));
    CHECK(eval_boundary(f, 1, 1.0) == doctest::Approx(3.0));
    CHECK(integrate_boundary(m, [](int, double, const Point&) { return 1.0; }) == doctest::Approx(4.0));
    CHECK_THROWS_AS(DiscreteField(b, Eigen::VectorXd::Zero(3)), InvalidArgument);
  }
}
