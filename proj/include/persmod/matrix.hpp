#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "persmod/field.hpp"

namespace pm {

// Dense row-major matrix over F_p. Shapes with zero rows or columns are legal.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<Elem> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Elem& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  Elem operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  const std::vector<Elem>& data() const { return a_; }
  std::vector<Elem>& data() { return a_; }

  bool is_zero() const;
  bool is_identity() const;
  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

  Matrix transpose() const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);
  std::string str() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Elem> a_;
};

Matrix mul(const Field& F, const Matrix& A, const Matrix& B);
Matrix add(const Field& F, const Matrix& A, const Matrix& B);
Matrix sub(const Field& F, const Matrix& A, const Matrix& B);
Matrix scale(const Field& F, Elem c, const Matrix& A);
Matrix block_diag(const Matrix& A, const Matrix& B);
Matrix hstack(const Matrix& A, const Matrix& B);
Matrix vstack(const Matrix& A, const Matrix& B);

struct Echelon {
  Matrix rref;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

Echelon row_reduce(const Field& F, Matrix A);
std::size_t rank(const Field& F, const Matrix& A);
// Columns form a basis of {x : A x = 0}.
Matrix nullspace(const Field& F, const Matrix& A);
// Rows form a basis of {y : y A = 0}.
Matrix left_nullspace(const Field& F, const Matrix& A);
std::optional<Matrix> inverse(const Field& F, const Matrix& A);
bool is_invertible(const Field& F, const Matrix& A);
// Leftmost linearly independent columns of A spanning its column space.
Matrix column_basis(const Field& F, const Matrix& A);
// Some X with A X = B, if one exists.
std::optional<Matrix> solve(const Field& F, const Matrix& A, const Matrix& B);

}  // namespace pm
