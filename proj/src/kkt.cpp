#include "ldgbc/kkt.hpp"

#include "ldgbc/errors.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace ldgbc {

int ActiveSetState::count(BoundStatus s) const {
  return static_cast<int>(std::count(status.begin(), status.end(), s));
}

int ActiveSetState::difference(const ActiveSetState& other) const {
  if (status.size() != other.status.size()) return static_cast<int>(std::max(status.size(), other.status.size()));
  int d = 0;
  for (std::size_t i = 0; i < status.size(); ++i) d += status[i] != other.status[i];
  return d;
}

BlockSystem compose_kkt(const Discretization& disc, const ActiveSetState& active) {
  const BlockOperator& ops = disc.ops;
  const ProblemData& data = disc.data;
  const Eigen::Index nw = ops.vector.size();
  const Eigen::Index nv = ops.scalar.size();
  const Eigen::Index nu = ops.control.size();
  if (static_cast<Eigen::Index>(active.status.size()) != nu)
    throw InvalidArgument(fmt::format("active set has {} entries, control space has {}", active.status.size(), nu));
  for (std::size_t i = 0; i < active.status.size(); ++i) {
    if (active.status[i] == BoundStatus::Lower && !data.has_lower())
      throw InvalidArgument(fmt::format("control DOF {} marked lower-active without a lower bound", i));
    if (active.status[i] == BoundStatus::Upper && !data.has_upper())
      throw InvalidArgument(fmt::format("control DOF {} marked upper-active without an upper bound", i));
  }

  BlockSystem sys;
  sys.offset = {0, nw, nw + nv, 2 * nw + nv, 2 * nw + 2 * nv, 2 * nw + 2 * nv + nu};
  const auto& off = sys.offset;

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * ops.a.nonZeros() + 4 * ops.b.nonZeros() + 2 * ops.c.nonZeros() +
                                     2 * ops.m1.nonZeros() + 2 * ops.m2.nonZeros() + ops.mass_omega.nonZeros() +
                                     ops.mass_gamma.nonZeros() + nu));
  auto add = [&t](const SparseMatrix& m, Eigen::Index r0, Eigen::Index c0, double scale, bool transpose,
                  const std::vector<BoundStatus>* row_filter = nullptr) {
    for (int r = 0; r < m.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
        const Eigen::Index row = transpose ? it.col() : it.row();
        const Eigen::Index col = transpose ? it.row() : it.col();
        if (row_filter && (*row_filter)[static_cast<std::size_t>(row)] != BoundStatus::Inactive) continue;
        t.emplace_back(r0 + row, c0 + col, scale * it.value());
      }
    }
  };

  // state equations
  add(ops.a, off[0], off[0], 1.0, false);
  add(ops.b, off[0], off[1], 1.0, false);
  add(ops.m1, off[0], off[4], -1.0, true);
  add(ops.b, off[1], off[0], -1.0, true);
  add(ops.c, off[1], off[1], 1.0, false);
  add(ops.m2, off[1], off[4], -1.0, true);
  // adjoint equations
  add(ops.a, off[2], off[2], 1.0, false);
  add(ops.b, off[2], off[3], -1.0, false);
  add(ops.mass_omega, off[3], off[1], -1.0, false);
  add(ops.b, off[3], off[2], 1.0, true);
  add(ops.c, off[3], off[3], 1.0, true);
  // gradient equation on inactive DOFs
  add(ops.mass_gamma, off[4], off[4], data.omega, false, &active.status);
  add(ops.m1, off[4], off[2], 1.0, false, &active.status);
  add(ops.m2, off[4], off[3], 1.0, false, &active.status);

  sys.rhs = Eigen::VectorXd::Zero(sys.size());
  sys.rhs.segment(off[1], nv) = ops.load;
  sys.rhs.segment(off[3], nv) = -ops.desired_load;
  for (Eigen::Index i = 0; i < nu; ++i) {
    const BoundStatus s = active.status[static_cast<std::size_t>(i)];
    if (s == BoundStatus::Inactive) continue;
    t.emplace_back(off[4] + i, off[4] + i, 1.0);
    sys.rhs[off[4] + i] = s == BoundStatus::Lower ? data.lower : data.upper;
  }
  sys.matrix = finalize(sys.size(), sys.size(), t);
  return sys;
}

}  // namespace ldgbc
