#include "ldgbc/ldg.hpp"

#include "ldgbc/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>

namespace ldgbc {

namespace {

// sign with ties resolved to +1
double half_sign(double x) { return x >= 0.0 ? 0.5 : -0.5; }

// sign(x)/2 with sign(0) = 0; |x| below roundoff of n.v counts as zero
double tie_sign(double x, double scale) { return std::abs(x) <= 1e-12 * scale ? 0.0 : half_sign(x); }

Eigen::Index sdof(int e, int i) { return 3 * static_cast<Eigen::Index>(e) + i; }
Eigen::Index wdof(int e, int c, int i) { return 6 * static_cast<Eigen::Index>(e) + 3 * c + i; }

}  // namespace

void ProblemData::validate(const Mesh* domain) const {
  if (!(epsilon > 0.0)) throw InvalidArgument(fmt::format("diffusion epsilon must be positive, got {}", epsilon));
  if (!(omega > 0.0)) throw InvalidArgument(fmt::format("regularization omega must be positive, got {}", omega));
  if (lower > upper) throw InvalidArgument(fmt::format("control bounds inverted: {} > {}", lower, upper));
  if (c12_direction.norm() == 0.0) throw InvalidArgument("C12 direction must be nonzero");
  if (penalty_sign != 1.0 && penalty_sign != -1.0) throw InvalidArgument("penalty sign must be +1 or -1");
  if (!beta || !reaction || !source || !desired) throw InvalidArgument("problem data has an empty coefficient function");
  if (domain != nullptr && domain->num_elements() > 0) {
    std::mt19937 rng(12345);
    std::uniform_int_distribution<int> pick(0, domain->num_elements() - 1);
    std::uniform_real_distribution<double> bary(0.05, 0.9);
    const double step = 1e-5;
    for (int k = 0; k < 16; ++k) {
      const int e = pick(rng);
      double l1 = bary(rng), l2 = bary(rng);
      if (l1 + l2 > 0.95) {
        l1 *= 0.5;
        l2 *= 0.5;
      }
      const Point x = map_to_element(*domain, e, Eigen::Vector2d(l1, l2));
      const double div = (beta(x + Point(step, 0)).x() - beta(x - Point(step, 0)).x() + beta(x + Point(0, step)).y() -
                          beta(x - Point(0, step)).y()) /
                         (2.0 * step);
      if (std::abs(div) > 1e-8) throw InvalidArgument(fmt::format("velocity field has divergence {:.3e}", div));
    }
  }
}

FluxParameters compute_flux_parameters(const Mesh& mesh, const ProblemData& data) {
  FluxParameters flux;
  flux.sqrt_epsilon = std::sqrt(data.epsilon);
  flux.penalty_sign = data.penalty_sign;
  flux.classification = classify_boundary_edges(mesh, data.beta);
  const int ne = mesh.num_edges();
  flux.c11.resize(ne);
  flux.c12n.resize(ne);
  flux.d11n.resize(ne);
  for (int id = 0; id < ne; ++id) {
    const Edge& edge = mesh.edge(id);
    flux.c11[id] = data.epsilon / edge.length;
    flux.c12n[id] = tie_sign(edge.normal.dot(data.c12_direction), data.c12_direction.norm());
    flux.d11n[id] = half_sign(edge.normal.dot(data.beta(mesh.edge_point(id, 0.5))));
  }
  flux.kappa_z.resize(mesh.num_boundary_edges());
  for (int j = 0; j < mesh.num_boundary_edges(); ++j) {
    const int id = mesh.boundary_edges()[j];
    const Edge& edge = mesh.edge(id);
    const double inflow = flux.classification.inflow[j] ? std::abs(data.beta(mesh.edge_point(id, 0.5)).dot(edge.normal)) : 0.0;
    flux.kappa_z[j] = flux.penalty_sign * flux.sqrt_epsilon * flux.c11[id] + inflow;
  }
  return flux;
}

Eigen::VectorXd load_vector(const Mesh& mesh, const ScalarFunction& g, int degree) {
  const QuadratureRule rule = quadrature_rule(Entity::Triangle, degree);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(3 * static_cast<Eigen::Index>(mesh.num_elements()));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double jac = 2.0 * mesh.area(e);
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d ref = rule.points.col(q);
      const Eigen::Vector3d phi(1.0 - ref.x() - ref.y(), ref.x(), ref.y());
      out.segment<3>(sdof(e, 0)) += jac * rule.weights[q] * g(map_to_element(mesh, e, ref)) * phi;
    }
  }
  return out;
}

BlockOperator assemble_forms(const Mesh& mesh, const ProblemData& data, const FluxParameters& flux,
                             ControlSpace control_space) {
  if (static_cast<int>(flux.c11.size()) != mesh.num_edges() ||
      static_cast<int>(flux.kappa_z.size()) != mesh.num_boundary_edges())
    throw InvalidArgument("flux parameters do not match the mesh");

  BlockOperator ops;
  ops.control_space = control_space;
  ops.scalar = build_dof_map(mesh, SpaceKind::Scalar);
  ops.vector = build_dof_map(mesh, SpaceKind::Vector);
  ops.control = control_space == ControlSpace::EdgewiseP1
                    ? build_dof_map(mesh, SpaceKind::Boundary)
                    : build_dof_map(mesh, SpaceKind::BoundaryQuadrature, kControlQuadraturePoints);

  const double se = flux.sqrt_epsilon;
  const double sp = flux.penalty_sign;
  const QuadratureRule tri = quadrature_rule(Entity::Triangle, data.data_degree);
  const QuadratureRule line = quadrature_rule(Entity::Edge, data.data_degree);
  const QuadratureRule control_rule = gauss_legendre(kControlQuadraturePoints);

  std::vector<Triplet> ta, tb, tc, tm1, tm2, tmo, tmg;
  const auto ne = static_cast<std::size_t>(mesh.num_elements());
  ta.reserve(18 * ne);
  tb.reserve(18 * ne + 36 * ne);
  tc.reserve(9 * ne + 24 * ne);
  tmo.reserve(9 * ne);

  Eigen::Matrix3d unit_mass = Eigen::Matrix3d::Constant(1.0 / 12.0);
  unit_mass.diagonal().setConstant(1.0 / 6.0);

  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double area = mesh.area(e);
    const Eigen::Matrix<double, 3, 2> grad = basis_gradients(mesh, e);
    const Eigen::Matrix3d mass = area * unit_mass;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        tmo.emplace_back(sdof(e, i), sdof(e, j), mass(i, j));
        for (int c = 0; c < 2; ++c) ta.emplace_back(wdof(e, c, i), wdof(e, c, j), mass(i, j));
      }
    }
    // b_h volume term: eps^(1/2) (grad y, r)_K
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) tb.emplace_back(wdof(e, c, i), sdof(e, j), se * grad(j, c) * area / 3.0);

    // c_h volume term: (alpha y, v)_K - (y, beta . grad v)_K
    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    for (Eigen::Index q = 0; q < tri.size(); ++q) {
      const Eigen::Vector2d ref = tri.points.col(q);
      const Eigen::Vector3d phi(1.0 - ref.x() - ref.y(), ref.x(), ref.y());
      const Point x = map_to_element(mesh, e, ref);
      const double w = 2.0 * area * tri.weights[q];
      const Eigen::Vector3d beta_grad = grad * data.beta(x);
      // rows: test v_i, cols: trial y_j
      local += w * (data.reaction(x) * phi * phi.transpose() - beta_grad * phi.transpose());
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) tc.emplace_back(sdof(e, i), sdof(e, j), local(i, j));
  }

  for (int id : mesh.interior_edges()) {
    const Edge& edge = mesh.edge(id);
    const int k0 = edge.element[0];
    const int k1 = edge.element[1];
    const Eigen::Vector2d n = edge.normal;
    const double c12 = flux.c12n[id];
    const double d11 = flux.d11n[id];
    const double pen = sp * se * flux.c11[id];
    const int elem[2] = {k0, k1};
    const double side_sign[2] = {1.0, -1.0};
    // b_h: -eps^(1/2) ({r} - C12 [r]) . [y]; r-side weights 1/2 -+ c12
    const double r_weight[2] = {0.5 - c12, 0.5 + c12};
    // c_h: ({y} + D11.[y]) beta.[v]; y-side weights 1/2 +- d11
    const double y_weight[2] = {0.5 + d11, 0.5 - d11};
    for (Eigen::Index q = 0; q < line.size(); ++q) {
      const double t = line.points(0, q);
      const double w = edge.length * line.weights[q];
      const Eigen::Vector3d phi[2] = {edge_basis(mesh, id, 0, t), edge_basis(mesh, id, 1, t)};
      const double beta_n = data.beta(mesh.edge_point(id, t)).dot(n);
      for (int sr = 0; sr < 2; ++sr) {
        for (int sy = 0; sy < 2; ++sy) {
          for (int i = 0; i < 3; ++i) {
            if (phi[sr][i] == 0.0) continue;
            for (int j = 0; j < 3; ++j) {
              if (phi[sy][j] == 0.0) continue;
              const double pp = phi[sr][i] * phi[sy][j];
              for (int c = 0; c < 2; ++c)
                tb.emplace_back(wdof(elem[sr], c, i), sdof(elem[sy], j), -se * w * r_weight[sr] * n[c] * side_sign[sy] * pp);
              // test side sr (v), trial side sy (y)
              const double conv = y_weight[sy] * beta_n * side_sign[sr];
              const double penalty = pen * side_sign[sy] * side_sign[sr];
              tc.emplace_back(sdof(elem[sr], i), sdof(elem[sy], j), w * (conv + penalty) * pp);
            }
          }
        }
      }
    }
  }

  const int nb = mesh.num_boundary_edges();
  for (int jb = 0; jb < nb; ++jb) {
    const int id = mesh.boundary_edges()[jb];
    const Edge& edge = mesh.edge(id);
    const int k = edge.element[0];
    const Eigen::Vector2d n = edge.normal;
    const bool inflow = flux.classification.inflow[jb];
    const double pen = sp * se * flux.c11[id];
    for (Eigen::Index q = 0; q < line.size(); ++q) {
      const double t = line.points(0, q);
      const double w = edge.length * line.weights[q];
      const Eigen::Vector3d phi = edge_basis(mesh, id, 0, t);
      const double beta_n = data.beta(mesh.edge_point(id, t)).dot(n);
      for (int i = 0; i < 3; ++i) {
        if (phi[i] == 0.0) continue;
        for (int j = 0; j < 3; ++j) {
          if (phi[j] == 0.0) continue;
          const double pp = phi[i] * phi[j];
          for (int c = 0; c < 2; ++c) tb.emplace_back(wdof(k, c, i), sdof(k, j), -se * w * n[c] * pp);
          const double outflow = inflow ? 0.0 : beta_n;
          tc.emplace_back(sdof(k, i), sdof(k, j), w * (outflow + pen) * pp);
        }
      }
    }

    // control couplings
    const auto off = ops.control.offset(jb);
    auto couple = [&](Eigen::Index row, double weight, double t, double basis) {
      const Eigen::Vector3d phi = edge_basis(mesh, id, 0, t);
      const double inflow_coef = inflow ? std::abs(data.beta(mesh.edge_point(id, t)).dot(n)) : 0.0;
      for (int i = 0; i < 3; ++i) {
        if (phi[i] == 0.0) continue;
        for (int c = 0; c < 2; ++c) tm1.emplace_back(row, wdof(k, c, i), -se * weight * basis * n[c] * phi[i]);
        tm2.emplace_back(row, sdof(k, i), weight * basis * (pen + inflow_coef) * phi[i]);
      }
    };
    if (control_space == ControlSpace::EdgewiseP1) {
      for (Eigen::Index q = 0; q < line.size(); ++q) {
        const double t = line.points(0, q);
        const double w = edge.length * line.weights[q];
        const double psi[2] = {1.0 - t, t};
        for (int a = 0; a < 2; ++a) {
          couple(off + a, w, t, psi[a]);
          for (int b2 = 0; b2 < 2; ++b2) tmg.emplace_back(off + a, off + b2, w * psi[a] * psi[b2]);
        }
      }
    } else {
      for (Eigen::Index q = 0; q < control_rule.size(); ++q) {
        const double t = control_rule.points(0, q);
        const double w = edge.length * control_rule.weights[q];
        couple(off + q, w, t, 1.0);
        tmg.emplace_back(off + q, off + q, w);
      }
    }
  }

  const Eigen::Index nv = ops.scalar.size();
  const Eigen::Index nw = ops.vector.size();
  const Eigen::Index nu = ops.control.size();
  ops.a = finalize(nw, nw, ta);
  ops.b = finalize(nw, nv, tb);
  ops.c = finalize(nv, nv, tc);
  ops.m1 = finalize(nu, nw, tm1);
  ops.m2 = finalize(nu, nv, tm2);
  ops.mass_omega = finalize(nv, nv, tmo);
  ops.mass_gamma = finalize(nu, nu, tmg);
  ops.lumped_gamma = ops.mass_gamma * Eigen::VectorXd::Ones(nu);
  ops.load = load_vector(mesh, data.source, data.data_degree);
  ops.desired_load = load_vector(mesh, data.desired, data.data_degree);
  return ops;
}

SparseMatrix assemble_b_divergence_form(const Mesh& mesh, const ProblemData& data, const FluxParameters& flux) {
  const double se = flux.sqrt_epsilon;
  const QuadratureRule line = quadrature_rule(Entity::Edge, data.data_degree);
  std::vector<Triplet> tb;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Eigen::Matrix<double, 3, 2> grad = basis_gradients(mesh, e);
    const double area = mesh.area(e);
    // -eps^(1/2) (y, div r)_K
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) tb.emplace_back(wdof(e, c, i), sdof(e, j), -se * grad(i, c) * area / 3.0);
  }
  for (int id : mesh.interior_edges()) {
    const Edge& edge = mesh.edge(id);
    const int elem[2] = {edge.element[0], edge.element[1]};
    const double c12 = flux.c12n[id];
    const double side_sign[2] = {1.0, -1.0};
    // ({y} + C12.[y]) [r]: y-side weights 1/2 +- c12, [r] = (r_0 - r_1).n
    const double y_weight[2] = {0.5 + c12, 0.5 - c12};
    for (Eigen::Index q = 0; q < line.size(); ++q) {
      const double t = line.points(0, q);
      const double w = edge.length * line.weights[q];
      const Eigen::Vector3d phi[2] = {edge_basis(mesh, id, 0, t), edge_basis(mesh, id, 1, t)};
      for (int sr = 0; sr < 2; ++sr)
        for (int sy = 0; sy < 2; ++sy)
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
              const double pp = phi[sr][i] * phi[sy][j];
              if (pp == 0.0) continue;
              for (int c = 0; c < 2; ++c)
                tb.emplace_back(wdof(elem[sr], c, i), sdof(elem[sy], j),
                                se * w * y_weight[sy] * side_sign[sr] * edge.normal[c] * pp);
            }
    }
  }
  return finalize(6 * static_cast<Eigen::Index>(mesh.num_elements()), 3 * static_cast<Eigen::Index>(mesh.num_elements()),
                  tb);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> boundary_loads(const Mesh& mesh, const ProblemData& data,
                                                           const FluxParameters& flux, const ScalarFunction& g,
                                                           int degree) {
  const QuadratureRule line = quadrature_rule(Entity::Edge, degree);
  const auto ne = static_cast<Eigen::Index>(mesh.num_elements());
  Eigen::VectorXd l1 = Eigen::VectorXd::Zero(6 * ne);
  Eigen::VectorXd l2 = Eigen::VectorXd::Zero(3 * ne);
  for (int jb = 0; jb < mesh.num_boundary_edges(); ++jb) {
    const int id = mesh.boundary_edges()[jb];
    const Edge& edge = mesh.edge(id);
    const int k = edge.element[0];
    const double pen = flux.penalty_sign * flux.sqrt_epsilon * flux.c11[id];
    for (Eigen::Index q = 0; q < line.size(); ++q) {
      const double t = line.points(0, q);
      const Point x = mesh.edge_point(id, t);
      const double w = edge.length * line.weights[q] * g(x);
      const Eigen::Vector3d phi = edge_basis(mesh, id, 0, t);
      const double inflow_coef = flux.classification.inflow[jb] ? std::abs(data.beta(x).dot(edge.normal)) : 0.0;
      for (int i = 0; i < 3; ++i) {
        for (int c = 0; c < 2; ++c) l1[wdof(k, c, i)] += -flux.sqrt_epsilon * w * edge.normal[c] * phi[i];
        l2[sdof(k, i)] += w * (pen + inflow_coef) * phi[i];
      }
    }
  }
  return {l1, l2};
}

Discretization discretize(std::shared_ptr<const Mesh> mesh, const ProblemData& data, ControlSpace control_space) {
  if (!mesh) throw InvalidArgument("discretize needs a mesh");
  data.validate(mesh.get());
  Discretization disc;
  disc.mesh = std::move(mesh);
  disc.data = data;
  disc.flux = compute_flux_parameters(*disc.mesh, data);
  disc.ops = assemble_forms(*disc.mesh, data, disc.flux, control_space);
  return disc;
}

namespace {

// [X Y; Z W] from four blocks
SparseMatrix block2x2(const SparseMatrix& x, const SparseMatrix& y, const SparseMatrix& z, const SparseMatrix& w) {
  const Eigen::Index n0 = x.rows();
  const Eigen::Index m0 = x.cols();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(x.nonZeros() + y.nonZeros() + z.nonZeros() + w.nonZeros()));
  auto add = [&t](const SparseMatrix& m, Eigen::Index r0, Eigen::Index c0) {
    for (int r = 0; r < m.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(m, r); it; ++it) t.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
  };
  add(x, 0, 0);
  add(y, 0, m0);
  add(z, n0, 0);
  add(w, n0, m0);
  return finalize(n0 + z.rows(), m0 + y.cols(), t);
}

}  // namespace

ForwardSolver::ForwardSolver(const Discretization& disc) : disc_(&disc) {
  const BlockOperator& ops = disc.ops;
  const SparseMatrix bt = ops.b.transpose();
  const SparseMatrix ct = ops.c.transpose();
  state_.factorize(block2x2(ops.a, ops.b, -bt, ops.c));
  adjoint_.factorize(block2x2(ops.a, -ops.b, bt, ct));
}

StateSolution ForwardSolver::solve_state_loads(const Eigen::VectorXd& q_load, const Eigen::VectorXd& y_load) const {
  const BlockOperator& ops = disc_->ops;
  const Eigen::Index nw = ops.vector.size();
  const Eigen::Index nv = ops.scalar.size();
  if (q_load.size() != nw || y_load.size() != nv) throw InvalidArgument("state loads have wrong dimensions");
  Eigen::VectorXd rhs(nw + nv);
  rhs << q_load, y_load;
  const Eigen::VectorXd x = state_.solve(rhs);
  return {DiscreteField(ops.scalar, x.tail(nv)), DiscreteField(ops.vector, x.head(nw))};
}

StateSolution ForwardSolver::solve_state(const Eigen::VectorXd& u, bool with_source) const {
  const BlockOperator& ops = disc_->ops;
  if (u.size() != ops.control.size())
    throw InvalidArgument(fmt::format("control has {} coefficients, space has {}", u.size(), ops.control.size()));
  Eigen::VectorXd y_load = ops.m2.transpose() * u;
  if (with_source) y_load += ops.load;
  return solve_state_loads(ops.m1.transpose() * u, y_load);
}

StateSolution ForwardSolver::solve_state(const ScalarFunction& u, bool with_source) const {
  auto [l1, l2] = boundary_loads(*disc_->mesh, disc_->data, disc_->flux, u);
  if (with_source) l2 += disc_->ops.load;
  return solve_state_loads(l1, l2);
}

AdjointSolution ForwardSolver::solve_adjoint(const Eigen::VectorXd& rhs_load) const {
  const BlockOperator& ops = disc_->ops;
  const Eigen::Index nw = ops.vector.size();
  const Eigen::Index nv = ops.scalar.size();
  if (rhs_load.size() != nv) throw InvalidArgument("adjoint load has wrong dimension");
  Eigen::VectorXd rhs(nw + nv);
  rhs << Eigen::VectorXd::Zero(nw), rhs_load;
  const Eigen::VectorXd x = adjoint_.solve(rhs);
  return {DiscreteField(ops.scalar, x.tail(nv)), DiscreteField(ops.vector, x.head(nw))};
}

AdjointSolution ForwardSolver::solve_adjoint(const ScalarFunction& g) const {
  return solve_adjoint(load_vector(*disc_->mesh, g, kErrorQuadratureDegree));
}

StateSolution solve_state(const Discretization& disc, const Eigen::VectorXd& u, bool with_source) {
  return ForwardSolver(disc).solve_state(u, with_source);
}
StateSolution solve_state(const Discretization& disc, const ScalarFunction& u, bool with_source) {
  return ForwardSolver(disc).solve_state(u, with_source);
}
AdjointSolution solve_adjoint(const Discretization& disc, const Eigen::VectorXd& rhs_load) {
  return ForwardSolver(disc).solve_adjoint(rhs_load);
}
AdjointSolution solve_adjoint(const Discretization& disc, const ScalarFunction& g) {
  return ForwardSolver(disc).solve_adjoint(g);
}

}  // namespace ldgbc
