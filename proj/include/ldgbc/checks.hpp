#pragma once

#include "ldgbc/ldg.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ldgbc {

/// |u'(M1 P(g) + M2 Z(g)) - g' M_Omega Y(u)| / max(|lhs|, |rhs|), where Y(u)
/// is the source-free state for boundary data u and (Z, P)(g) the adjoint
/// driven by g.
double duality_defect(const Discretization& disc, const Eigen::VectorXd& u, const Eigen::VectorXd& g);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
};

/// Small-mesh invariants: rate additivity, linear consistency, duality,
/// gradient check, PDAS optimality, quasi-interpolation, reference
/// round trip, VTK round trip.
std::vector<CheckResult> run_property_checks(std::uint64_t seed,
                                             const std::function<void(const CheckResult&)>& report = {});

}  // namespace ldgbc
