#pragma once

#include "ldgbc/ldg.hpp"
#include "ldgbc/linsolve.hpp"

#include <cstdint>
#include <vector>

namespace ldgbc {

enum class BoundStatus : std::int8_t { Inactive = 0, Lower = 1, Upper = 2 };

/// Per control DOF (edge nodes in the full discretization, boundary Gauss
/// points in the variational one).
struct ActiveSetState {
  std::vector<BoundStatus> status;
  int iteration = 0;

  ActiveSetState() = default;
  explicit ActiveSetState(Eigen::Index n) : status(static_cast<std::size_t>(n), BoundStatus::Inactive) {}

  int count(BoundStatus s) const;
  /// Number of DOFs whose status differs.
  int difference(const ActiveSetState& other) const;
  bool same_sets(const ActiveSetState& other) const { return status == other.status; }
};

/// Monolithic optimality system with unknown blocks ordered (q, y, p, z, u).
struct BlockSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  /// Start offsets of the q, y, p, z, u blocks, and total size at index 5.
  std::array<Eigen::Index, 6> offset{};

  Eigen::Index size() const { return offset[5]; }
  /// Global index of control DOF i.
  Eigen::Index control_index(Eigen::Index i) const { return offset[4] + i; }
  auto block(const Eigen::VectorXd& x, int k) const { return x.segment(offset[k], offset[k + 1] - offset[k]); }
};

/// Rows:
///   A q + B y - M1' u = 0
///  -B' q + C y - M2' u = F
///   A p - B z = 0
///   B' p + C' z - M_Omega y = -(y_d, .)
///   inactive i: (omega M_Gamma u + M1 p + M2 z)_i = 0,  active i: u_i = bound
BlockSystem compose_kkt(const Discretization& disc, const ActiveSetState& active);

}  // namespace ldgbc
