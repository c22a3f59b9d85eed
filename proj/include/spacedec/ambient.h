#pragma once

#include <variant>

#include "spacedec/types.h"

namespace spacedec {

// A matrix given as left * right^T. Points X = H V^T and tangent directions
// eta = [K H] [V Vp]^T are passed to objectives in this form so that
// sampled objectives never materialize the m x n product.
struct Factored {
  Matrix left;
  Matrix right;

  Index rows() const { return left.rows(); }
  Index cols() const { return right.rows(); }
  Matrix dense() const { return left * right.transpose(); }
};

// Euclidean gradients and Hessian images: dense, or sparse when the
// objective only touches a sampled pattern.
class AmbientMatrix {
public:
  AmbientMatrix() : data_(Matrix()) {}
  AmbientMatrix(Matrix dense) : data_(std::move(dense)) {}
  AmbientMatrix(SparseMatrix sparse) : data_(std::move(sparse)) {}

  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(data_); }
  Index rows() const;
  Index cols() const;

  Matrix times(const Matrix& Y) const;            // A Y
  Matrix transpose_times(const Matrix& Y) const;  // A^T Y
  Matrix to_dense() const;
  double squared_norm() const;
  double inner(const Matrix& B) const;            // <A, B>
  double inner(const Factored& B) const;          // <A, left right^T>

  const Matrix& dense() const { return std::get<Matrix>(data_); }
  const SparseMatrix& sparse() const { return std::get<SparseMatrix>(data_); }

private:
  std::variant<Matrix, SparseMatrix> data_;
};

} // namespace spacedec
