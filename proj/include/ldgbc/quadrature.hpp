#pragma once

#include <Eigen/Dense>

namespace ldgbc {

enum class Entity { Triangle, Edge };

/// Rule on the reference triangle {(x,y): x,y >= 0, x+y <= 1} (points are
/// 2 x n) or on [0,1] (points are 1 x n).
struct QuadratureRule {
  Entity entity = Entity::Triangle;
  Eigen::Matrix2Xd points;
  Eigen::VectorXd weights;
  int degree = 0;

  Eigen::Index size() const { return weights.size(); }
  /// 1/2 for the triangle, 1 for the edge.
  double reference_measure() const { return entity == Entity::Triangle ? 0.5 : 1.0; }
};

/// Exact for polynomials up to `degree` (0..6); all weights positive.
/// Edge rules are Gauss-Legendre, triangle rules are symmetric Dunavant-type.
QuadratureRule quadrature_rule(Entity entity, int degree);

/// Gauss-Legendre nodes/weights on [0,1] via the Golub-Welsch eigenproblem.
QuadratureRule gauss_legendre(int npoints);

inline constexpr int kDefaultQuadratureDegree = 4;
inline constexpr int kErrorQuadratureDegree = 6;

}  // namespace ldgbc
