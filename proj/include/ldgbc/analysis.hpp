#pragma once

#include "ldgbc/control.hpp"
#include "ldgbc/geometry.hpp"
#include "ldgbc/ldg.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace ldgbc {

/// Closed-form optimal state, adjoint and control with the data that
/// generates them.
struct ManufacturedCase {
  double epsilon = 1.0;
  double omega = 1.0;
  Eigen::Vector2d beta{1.0, 1.0};
  double alpha = 1.0;
  ScalarFunction y, z, u;
  VectorFunction grad_y, grad_z;
  ScalarFunction source, desired;

  /// p = eps^(1/2) grad z.
  Eigen::Vector2d p(const Point& x) const { return std::sqrt(epsilon) * grad_z(x); }
  /// q = -eps^(1/2) grad y.
  Eigen::Vector2d q(const Point& x) const { return -std::sqrt(epsilon) * grad_y(x); }
  ProblemData problem() const;
};

/// y = -(eps^(1/2)/omega)(x1(1-x1) + x2(1-x2)), z = eps^(-1/2) x1 x2 (1-x1)(1-x2)
/// on the unit square, beta = (1,1), alpha = 1.
ManufacturedCase manufactured_example1(double epsilon, double omega = 1.0);

/// Globally linear state y = c0 + c1 x1 + c2 x2 (z = 0); the LDG state solve
/// reproduces it exactly.
ManufacturedCase manufactured_linear(double epsilon, const Eigen::Vector3d& c = Eigen::Vector3d(0.3, -1.2, 0.7));

/// f = 0, y_d = (x1^2 + x2^2)^(-1/3), 0 <= u <= 0.2 on the unit square.
ProblemData example2_problem(double epsilon);

/// y_d = -1 below x2 = 1/2 and 1 above, f = 1, beta = (1,0), alpha = 2, u >= 0.
ProblemData example3_problem(double epsilon);

inline constexpr double kExample3Angle = 5.0 * std::numbers::pi / 6.0;

/// Boundary trace of a discrete field as a BoundaryFunction (element[0] side).
BoundaryFunction boundary_trace(const DiscreteField& field, const Mesh& mesh);

double error_l2_domain(const DiscreteField& field, const ScalarFunction& exact, const Mesh& mesh,
                       int degree = kErrorQuadratureDegree);
double error_l2_boundary(const BoundaryFunction& approx, const ScalarFunction& exact, const Mesh& mesh,
                         int degree = kErrorQuadratureDegree);
/// ||(p - p_h).n||_Gamma with p = eps^(1/2) grad_z.
double error_flux_normal_boundary(const DiscreteField& p_h, const VectorFunction& grad_z, double epsilon,
                                  const Mesh& mesh, int degree = kErrorQuadratureDegree);

/// ln(e_coarse / e_fine) / ln 2.
double convergence_rate(double e_coarse, double e_fine);

/// Least-squares slope of -log2(error) against refinement index.
double fitted_rate(const std::vector<double>& errors);

struct ErrorRow {
  int elements = 0;
  double h = 0.0;
  double err_y = 0.0;   // ||y - y_h||_Omega
  double err_u = 0.0;   // ||u - u_h||_Gamma
  double err_z = 0.0;   // ||z - z_h||_Gamma
  double err_pn = 0.0;  // ||(p - p_h).n||_Gamma
  int pdas_iterations = 0;
};

struct ErrorReport {
  std::string title;
  std::vector<ErrorRow> rows;

  enum Column { Y = 0, U = 1, Z = 2, PN = 3 };
  static double value(const ErrorRow& row, Column c);
  /// Rate between row i-1 and row i; empty for the first row.
  std::optional<double> rate(std::size_t i, Column c) const;
  std::vector<double> column(Column c) const;
};

/// Errors of an Example 1-type run against closed-form fields.
ErrorRow exact_errors(const Mesh& mesh, const DiscreteSolution& sol, const ManufacturedCase& exact);

/// Errors of a coarse solution against a solution on a nested refinement of
/// its mesh. Integrates over the fine elements and edges, evaluating the
/// coarse polynomials in the ancestor element.
/// Throws InvalidArgument when the meshes are not nested.
ErrorRow reference_compare(const Mesh& coarse_mesh, const DiscreteSolution& coarse, const Mesh& fine_mesh,
                           const DiscreteSolution& reference);

/// Galerkin-error terms of the a priori bounds.
struct GalerkinDiagnostics {
  double state = 0.0;                // ||y - y_h(u)||_Omega
  double flux_normal = 0.0;          // ||(p_h(u) - p).n||_Gamma
  double adjoint_boundary = 0.0;     // ||z_h(u) - z||_Gamma
  double kappa_adjoint = 0.0;        // ||kappa_z (z_h(u) - z)||_Gamma
  double quasi_interpolation = 0.0;  // ||pi_h u - u||_Gamma

  /// ||y - y_h(u)||^2 + C (eps ||(p_h(u) - p).n||^2 + ||kappa_z (z_h(u) - z)||^2)
  double error_bound(double epsilon, double c) const;
};

GalerkinDiagnostics galerkin_diagnostics(const ManufacturedCase& exact, const Discretization& disc);

}  // namespace ldgbc
