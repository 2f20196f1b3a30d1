#pragma once

#include <Eigen/Sparse>

#include <filesystem>
#include <memory>
#include <vector>

namespace ldgbc {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Sums duplicates and compresses. Throws InvalidArgument on out-of-range
/// indices.
SparseMatrix finalize(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& triplets);

/// Eigen::SparseLU (COLAMD ordering) with a residual check.
class DirectSolver {
 public:
  static constexpr double kResidualTolerance = 1e-10;

  DirectSolver();
  explicit DirectSolver(const SparseMatrix& a);
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  /// Throws SingularSystem (with the offending pivot when known).
  void factorize(const SparseMatrix& a);
  /// Solves and applies iterative refinement until ||Ax-b|| <= tol ||b||.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::Index rows() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Eigen::VectorXd direct_solve(const SparseMatrix& a, const Eigen::VectorXd& b);

/// Matrix Market coordinate export.
void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path);

}  // namespace ldgbc
