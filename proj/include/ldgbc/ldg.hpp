#pragma once

#include "ldgbc/geometry.hpp"
#include "ldgbc/linsolve.hpp"
#include "ldgbc/spaces.hpp"

#include <Eigen/Dense>

#include <limits>
#include <memory>
#include <vector>

namespace ldgbc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Data of the control problem
///   min 1/2 ||y - y_d||^2 + omega/2 ||u||^2_Gamma,  u_a <= u <= u_b,
///   div(-eps grad y + beta y) + alpha y = f,  y = u on Gamma.
struct ProblemData {
  double epsilon = 1.0;
  double omega = 1.0;
  VelocityField beta = [](const Point&) { return Eigen::Vector2d(1.0, 1.0); };
  ScalarFunction reaction = [](const Point&) { return 1.0; };
  ScalarFunction source = [](const Point&) { return 0.0; };
  ScalarFunction desired = [](const Point&) { return 0.0; };
  double lower = -kInfinity;
  double upper = kInfinity;
  /// Direction v of the C12 flux, C12.n = sign(n.v)/2 with sign(0) = 0, so
  /// edges parallel to v get the central flux.
  Eigen::Vector2d c12_direction{1.0, 1.0};
  /// Sign s of the jump penalty in q^ = {q} + s C11 [y] (and in kappa_z).
  double penalty_sign = -1.0;
  /// Triangle/edge quadrature degree for f, y_d and variable coefficients.
  int data_degree = kDefaultQuadratureDegree;

  bool has_lower() const { return lower > -kInfinity; }
  bool has_upper() const { return upper < kInfinity; }
  bool is_unconstrained() const { return !has_lower() && !has_upper(); }

  /// Throws InvalidArgument for eps <= 0, omega <= 0, u_a > u_b, v = 0, or a
  /// velocity with sampled divergence above 1e-8 inside `domain`.
  void validate(const Mesh* domain = nullptr) const;
};

/// Per-edge coefficients of the numerical traces.
struct FluxParameters {
  double sqrt_epsilon = 1.0;
  double penalty_sign = 1.0;
  std::vector<double> c11;   // eps / h_E, every edge
  std::vector<double> c12n;  // C12 . n_0 with n_0 the normal out of element[0]
  std::vector<double> d11n;  // D11 . n_0
  /// -+ eps^(1/2) C11 + [inflow] |beta.n|, per boundary edge (boundary index)
  std::vector<double> kappa_z;
  EdgeClassification classification;
};

FluxParameters compute_flux_parameters(const Mesh& mesh, const ProblemData& data);

/// How the control enters the discrete system.
enum class ControlSpace {
  EdgewiseP1,      // U_h: 2 nodal DOFs per boundary edge
  QuadraturePoint  // point values at boundary Gauss points (variational discretization)
};

/// Assembled LDG forms. Conventions (coefficient vectors of P1 fields):
///   a_h(q,r) = r' A q,  b_h(y,r) = r' B y,  c_h(y,v) = v' C y,
///   m_h1(u,r) = u' M1 r, m_h2(u,v) = u' M2 v,  F(v) = v' load.
struct BlockOperator {
  DofMap scalar;
  DofMap vector;
  DofMap control;
  ControlSpace control_space = ControlSpace::EdgewiseP1;

  SparseMatrix a;           // W x W
  SparseMatrix b;           // W x V
  SparseMatrix c;           // V x V
  SparseMatrix m1;          // U x W
  SparseMatrix m2;          // U x V
  SparseMatrix mass_omega;  // V x V
  SparseMatrix mass_gamma;  // U x U
  Eigen::VectorXd load;          // (f, v)
  Eigen::VectorXd desired_load;  // (y_d, v)
  Eigen::VectorXd lumped_gamma;  // row sums of mass_gamma
};

/// Number of Gauss points per boundary edge in the QuadraturePoint space.
inline constexpr int kControlQuadraturePoints = 3;

BlockOperator assemble_forms(const Mesh& mesh, const ProblemData& data, const FluxParameters& flux,
                             ControlSpace control_space = ControlSpace::EdgewiseP1);

/// b_h assembled from its volume-divergence form (before integration by parts).
SparseMatrix assemble_b_divergence_form(const Mesh& mesh, const ProblemData& data, const FluxParameters& flux);

/// Loads (m_h1(g, .), m_h2(g, .)) for a boundary function g, by quadrature.
std::pair<Eigen::VectorXd, Eigen::VectorXd> boundary_loads(const Mesh& mesh, const ProblemData& data,
                                                           const FluxParameters& flux, const ScalarFunction& g,
                                                           int degree = kErrorQuadratureDegree);

/// (g, v) for every scalar basis function.
Eigen::VectorXd load_vector(const Mesh& mesh, const ScalarFunction& g, int degree);

/// Mesh, data, flux parameters and assembled forms of one discrete problem.
struct Discretization {
  std::shared_ptr<const Mesh> mesh;
  ProblemData data;
  FluxParameters flux;
  BlockOperator ops;
};

Discretization discretize(std::shared_ptr<const Mesh> mesh, const ProblemData& data,
                          ControlSpace control_space = ControlSpace::EdgewiseP1);

struct StateSolution {
  DiscreteField y;
  DiscreteField q;
};

struct AdjointSolution {
  DiscreteField z;
  DiscreteField p;
};

/// Factorizations of the forward [A B; -B' C] and adjoint [A -B; B' C']
/// systems, reused across right-hand sides.
class ForwardSolver {
 public:
  explicit ForwardSolver(const Discretization& disc);

  /// u given as control-space coefficients.
  StateSolution solve_state(const Eigen::VectorXd& u, bool with_source = true) const;
  /// u given pointwise on the boundary; loads by quadrature.
  StateSolution solve_state(const ScalarFunction& u, bool with_source = true) const;
  /// Raw loads: (row of q equations, row of y equations).
  StateSolution solve_state_loads(const Eigen::VectorXd& q_load, const Eigen::VectorXd& y_load) const;
  /// rhs_load is the vector ((g, phi_i))_i.
  AdjointSolution solve_adjoint(const Eigen::VectorXd& rhs_load) const;
  AdjointSolution solve_adjoint(const ScalarFunction& g) const;

  const Discretization& discretization() const { return *disc_; }

 private:
  const Discretization* disc_;
  DirectSolver state_;
  DirectSolver adjoint_;
};

StateSolution solve_state(const Discretization& disc, const Eigen::VectorXd& u, bool with_source = true);
StateSolution solve_state(const Discretization& disc, const ScalarFunction& u, bool with_source = true);
AdjointSolution solve_adjoint(const Discretization& disc, const Eigen::VectorXd& rhs_load);
AdjointSolution solve_adjoint(const Discretization& disc, const ScalarFunction& g);

}  // namespace ldgbc
