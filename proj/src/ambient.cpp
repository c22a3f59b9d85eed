#include "spacedec/ambient.h"

namespace spacedec {

Index AmbientMatrix::rows() const {
  return std::visit([](const auto& a) { return static_cast<Index>(a.rows()); }, data_);
}

Index AmbientMatrix::cols() const {
  return std::visit([](const auto& a) { return static_cast<Index>(a.cols()); }, data_);
}

Matrix AmbientMatrix::times(const Matrix& Y) const {
  return std::visit([&](const auto& a) -> Matrix { return a * Y; }, data_);
}

Matrix AmbientMatrix::transpose_times(const Matrix& Y) const {
  return std::visit([&](const auto& a) -> Matrix { return a.transpose() * Y; }, data_);
}

Matrix AmbientMatrix::to_dense() const {
  if (is_sparse()) return Matrix(sparse());
  return dense();
}

double AmbientMatrix::squared_norm() const {
  return std::visit([](const auto& a) { return a.squaredNorm(); }, data_);
}

double AmbientMatrix::inner(const Matrix& B) const {
  if (is_sparse()) {
    double acc = 0.0;
    const SparseMatrix& A = sparse();
    for (Index j = 0; j < A.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(A, j); it; ++it) acc += it.value() * B(it.row(), j);
    return acc;
  }
  return dense().cwiseProduct(B).sum();
}

double AmbientMatrix::inner(const Factored& B) const {
  // <A, L R^T> = sum((A R) .* L)
  return times(B.right).cwiseProduct(B.left).sum();
}

} // namespace spacedec
