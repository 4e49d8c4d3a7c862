#pragma once

// Sparse symmetric positive definite solves shared by the eigen and capacity
// minimizers. The matrix is stored as its lower triangle with a fixed pattern.

#include <algorithm>

#include <Eigen/CholmodSupport>
#include <Eigen/Sparse>

namespace pspec::detail {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

class SpdSolver {
 public:
  void analyze(const SparseMatrix& lower) {
    llt_.analyzePattern(lower);
    analyzed_ = true;
  }
  bool factorize(const SparseMatrix& lower) {
    if (!analyzed_) analyze(lower);
    llt_.factorize(lower);
    return llt_.info() == Eigen::Success;
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }

 private:
  Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower> llt_;
  bool analyzed_ = false;
};

// Position of entry (row, col), row >= col, inside the compressed storage.
inline int slot_of(const SparseMatrix& m, int row, int col) {
  const int* outer = m.outerIndexPtr();
  const int* inner = m.innerIndexPtr();
  const int* begin = inner + outer[col];
  const int* end = inner + outer[col + 1];
  const int* it = std::lower_bound(begin, end, row);
  return static_cast<int>(it - inner);
}

}  // namespace pspec::detail
