#include "ldgbc/quadrature.hpp"

#include "ldgbc/errors.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <cmath>
#include <vector>

namespace ldgbc {

namespace {

struct Orbit {
  enum Kind { Centroid, S21, S111 } kind;
  double a;  // S21: (a, a, 1-2a); S111: (a, b, 1-a-b)
  double b;
  double weight;  // normalized so that the weights of a rule sum to 1
};

QuadratureRule triangle_from_orbits(int degree, const std::vector<Orbit>& orbits) {
  std::vector<Eigen::Vector3d> bary;
  std::vector<double> w;
  for (const Orbit& o : orbits) {
    switch (o.kind) {
      case Orbit::Centroid:
        bary.emplace_back(1.0 / 3, 1.0 / 3, 1.0 / 3);
        w.push_back(o.weight);
        break;
      case Orbit::S21: {
        const double c = 1.0 - 2.0 * o.a;
        bary.emplace_back(o.a, o.a, c);
        bary.emplace_back(o.a, c, o.a);
        bary.emplace_back(c, o.a, o.a);
        w.insert(w.end(), 3, o.weight);
        break;
      }
      case Orbit::S111: {
        const double c = 1.0 - o.a - o.b;
        const double p[3] = {o.a, o.b, c};
        const int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        for (const auto& s : perm) {
          bary.emplace_back(p[s[0]], p[s[1]], p[s[2]]);
          w.push_back(o.weight);
        }
        break;
      }
    }
  }
  QuadratureRule rule;
  rule.entity = Entity::Triangle;
  rule.degree = degree;
  rule.points.resize(2, static_cast<Eigen::Index>(bary.size()));
  rule.weights.resize(static_cast<Eigen::Index>(bary.size()));
  for (std::size_t i = 0; i < bary.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    rule.points(0, k) = bary[i][1];
    rule.points(1, k) = bary[i][2];
    rule.weights[k] = 0.5 * w[i];
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre(int npoints) {
  if (npoints < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one point");
  // Jacobi matrix of the Legendre recurrence on [-1,1]
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(npoints, npoints);
  for (int k = 1; k < npoints; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  rule.entity = Entity::Edge;
  rule.degree = 2 * npoints - 1;
  rule.points.resize(2, npoints);
  rule.points.row(1).setZero();
  rule.weights.resize(npoints);
  for (int k = 0; k < npoints; ++k) {
    rule.points(0, k) = 0.5 * (solver.eigenvalues()[k] + 1.0);
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights[k] = v0 * v0;  // 2 v0^2 on [-1,1], halved on [0,1]
  }
  return rule;
}

QuadratureRule quadrature_rule(Entity entity, int degree) {
  if (degree < 0 || degree > 6)
    throw InvalidArgument(fmt::format("unsupported quadrature degree {} (0..6 available)", degree));
  if (entity == Entity::Edge) {
    QuadratureRule rule = gauss_legendre((degree + 2) / 2);
    return rule;
  }
  switch (degree) {
    case 0:
    case 1:
      return triangle_from_orbits(1, {{Orbit::Centroid, 0, 0, 1.0}});
    case 2:
      return triangle_from_orbits(2, {{Orbit::S21, 1.0 / 6.0, 0, 1.0 / 3.0}});
    case 3:
    case 4:
      return triangle_from_orbits(4, {{Orbit::S21, 0.445948490915964886, 0, 0.223381589678011466},
                                      {Orbit::S21, 0.091576213509770743, 0, 0.109951743655321868}});
    case 5:
      return triangle_from_orbits(5, {{Orbit::Centroid, 0, 0, 0.225},
                                      {Orbit::S21, 0.470142064105115090, 0, 0.132394152788506181},
                                      {Orbit::S21, 0.101286507323456339, 0, 0.125939180544827153}});
    default:
      return triangle_from_orbits(6, {{Orbit::S21, 0.249286745170910421, 0, 0.116786275726379366},
                                      {Orbit::S21, 0.063089014491502228, 0, 0.050844906370206817},
                                      {Orbit::S111, 0.053145049844816947, 0.310352451033784405, 0.082851075618373575}});
  }
}

}  // namespace ldgbc
