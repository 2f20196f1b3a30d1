#include "ldgbc/linsolve.hpp"

#include "ldgbc/errors.hpp"

#include <fmt/format.h>

#include <fstream>
#include <regex>
#include <string>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

namespace ldgbc {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

SparseMatrix finalize(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& triplets) {
  for (const Triplet& t : triplets) {
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols)
      throw InvalidArgument(fmt::format("triplet ({}, {}) outside a {} x {} matrix", t.row(), t.col(), rows, cols));
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(0.0);
  m.makeCompressed();
  return m;
}

struct DirectSolver::Impl {
  ColMatrix matrix;
  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;
};

DirectSolver::DirectSolver() = default;
DirectSolver::DirectSolver(const SparseMatrix& a) { factorize(a); }
DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

Eigen::Index DirectSolver::rows() const { return impl_ ? impl_->matrix.rows() : 0; }

void DirectSolver::factorize(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument(fmt::format("direct solve needs a square matrix, got {} x {}", a.rows(), a.cols()));
  impl_ = std::make_unique<Impl>();
  impl_->matrix = a;
  impl_->matrix.makeCompressed();
  if (a.rows() == 0) return;
  impl_->lu.compute(impl_->matrix);
  if (impl_->lu.info() != Eigen::Success) {
    std::string message = impl_->lu.lastErrorMessage();
    long pivot = -1;
    std::smatch match;
    if (std::regex_search(message, match, std::regex("([0-9]+)"))) pivot = std::stol(match[1]);
    impl_.reset();
    throw SingularSystem(fmt::format("sparse LU failed: {}", message.empty() ? "numerically singular" : message), pivot);
  }
}

Eigen::VectorXd DirectSolver::solve(const Eigen::VectorXd& b) const {
  if (!impl_) throw InvalidArgument("solve called before factorize");
  if (b.size() != impl_->matrix.rows())
    throw InvalidArgument(fmt::format("rhs length {} does not match matrix size {}", b.size(), impl_->matrix.rows()));
  if (b.size() == 0) return b;
  Eigen::VectorXd x = impl_->lu.solve(b);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b - impl_->matrix * x;
  for (int step = 0; step < 3 && r.norm() > kResidualTolerance * bnorm; ++step) {
    x += impl_->lu.solve(r);
    r = b - impl_->matrix * x;
  }
  if (!x.allFinite()) throw SingularSystem("sparse LU produced non-finite values");
  if (r.norm() > kResidualTolerance * bnorm)
    throw SingularSystem(fmt::format("relative residual {:.3e} above {:.0e} after refinement", r.norm() / bnorm,
                                     kResidualTolerance));
  return x;
}

Eigen::VectorXd direct_solve(const SparseMatrix& a, const Eigen::VectorXd& b) { return DirectSolver(a).solve(b); }

void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << fmt::format("{} {} {}\n", a.rows(), a.cols(), a.nonZeros());
  for (int r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) out << fmt::format("{} {} {:.17g}\n", it.row() + 1, it.col() + 1, it.value());
}

}  // namespace ldgbc
