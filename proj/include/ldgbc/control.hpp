#pragma once

#include "ldgbc/kkt.hpp"
#include "ldgbc/ldg.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ldgbc {

/// Value of a control on boundary edge j (boundary index) at edge parameter t.
using BoundaryFunction = std::function<double(int j, double t)>;

enum class ControlDiscretization { Variational, Full };

struct ControlMode {
  ControlDiscretization kind = ControlDiscretization::Full;
  /// PDAS constant c; nonpositive means "use omega".
  double penalty = 0.0;

  static ControlMode variational(double c = 0.0) { return {ControlDiscretization::Variational, c}; }
  static ControlMode full(double c = 0.0) { return {ControlDiscretization::Full, c}; }
  ControlSpace space() const {
    return kind == ControlDiscretization::Full ? ControlSpace::EdgewiseP1 : ControlSpace::QuadraturePoint;
  }
};

const char* to_string(ControlDiscretization kind);

struct DiscreteSolution {
  DiscreteField y, q, z, p;
  /// Control-space coefficients: nodal values per edge (full) or values at
  /// the boundary Gauss points (variational).
  DiscreteField u;
  /// Variational mode only: the unclamped edgewise-P1 function
  /// (eps^(1/2) p_h.n - kappa_z z_h) / omega whose projection is the control.
  DiscreteField u_preimage;
  ControlDiscretization kind = ControlDiscretization::Full;
  double lower = -kInfinity;
  double upper = kInfinity;
  ActiveSetState active;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;

  /// u_h at parameter t of boundary edge j.
  double control(int j, double t) const;
  /// Refers to this object; do not outlive or move it.
  BoundaryFunction control_function() const;
};

/// Elementwise clamp to [lower, upper].
Eigen::VectorXd project_admissible(const Eigen::VectorXd& values, double lower, double upper);
double project_admissible(double value, double lower, double upper);

/// pi_h u = sum_n (u, xi_n)_Gamma / (1, xi_n)_Gamma xi_n over boundary vertices.
DiscreteField quasi_interpolate(const Mesh& mesh, const ScalarFunction& u, int degree = kErrorQuadratureDegree);

/// Boundary weight kappa_z at a point of boundary edge j (boundary index).
double kappa_at(const Discretization& disc, int j, const Point& x);

struct ReducedGradient {
  /// Gradient in control DOF space: omega M_Gamma u + M1 p + M2 z.
  Eigen::VectorXd dof;
  /// dof ./ lumped boundary mass (pointwise values in variational mode).
  Eigen::VectorXd multiplier;
  /// lambda = omega u - eps^(1/2) p.n + kappa_z z at a boundary point.
  BoundaryFunction pointwise;
};

ReducedGradient reduced_gradient(const Discretization& disc, const DiscreteSolution& sol);

/// First-order optimality defects of a converged PDAS solution, with the
/// multiplier lambda = reduced gradient ./ lumped boundary mass.
struct OptimalityResidual {
  double bound_violation = 0.0;  // max distance of a control DOF outside [lower, upper]
  double stationarity = 0.0;     // max |lambda| over inactive DOFs
  double sign_violation = 0.0;   // lambda < 0 at lower-active or > 0 at upper-active DOFs
  double multiplier_scale = 0.0; // max |lambda|
};

OptimalityResidual optimality_residual(const Discretization& disc, const DiscreteSolution& sol);

/// Unconstrained state/adjoint solution for control-space coefficients u.
DiscreteSolution evaluate_control(const Discretization& disc, const Eigen::VectorXd& u);

struct PdasOptions {
  int max_iterations = 50;
  std::optional<Eigen::VectorXd> initial_control;
};

/// Primal-dual active set iteration; stops when two consecutive active sets
/// agree. Throws NonConvergence past the cap.
DiscreteSolution pdas_solve(const Discretization& disc, const ControlMode& mode, const PdasOptions& options = {});

/// 1/2 ||y_h - y_d||^2 + omega/2 ||u_h||^2_Gamma, degree-6 quadrature.
double evaluate_cost(const Mesh& mesh, const ProblemData& data, const DiscreteField& y, const BoundaryFunction& u,
                     int degree = kErrorQuadratureDegree);

/// Reduced discrete functional J_h(u) = 1/2 ||y_h(u) - y_d||^2 + omega/2 u' M_Gamma u.
double reduced_cost(const Discretization& disc, const ForwardSolver& solver, const Eigen::VectorXd& u);

struct GradientCheck {
  double adjoint = 0.0;
  double finite_difference = 0.0;
  double relative_error = 0.0;
};

/// Adjoint directional derivative against central differences of the
/// reduced functional.
GradientCheck fd_gradient_check(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& du);

}  // namespace ldgbc
