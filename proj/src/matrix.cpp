#include "persmod/matrix.hpp"

#include <sstream>
#include <stdexcept>

namespace pm {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<Elem> data)
    : rows_(rows), cols_(cols), a_(std::move(data)) {
  if (a_.size() != rows * cols) throw std::invalid_argument("matrix data has wrong length");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1;
  return I;
}

bool Matrix::is_zero() const {
  for (Elem v : a_)
    if (v) return false;
  return true;
}

bool Matrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(i, j) != (i == j ? 1u : 0u)) return false;
  return true;
}

Matrix Matrix::transpose() const {
  Matrix T(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
  return T;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("matrix block out of range");
  Matrix B(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) B(i, j) = (*this)(r0 + i, c0 + j);
  return B;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_)
    throw std::out_of_range("matrix block out of range");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

std::string Matrix::str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? "; " : "");
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j);
  }
  os << "](" << rows_ << "x" << cols_ << ")";
  return os.str();
}

Matrix mul(const Field& F, const Matrix& A, const Matrix& B) {
  if (A.cols() != B.rows())
    throw std::invalid_argument("matrix product shape mismatch " + A.str() + " * " + B.str());
  Matrix C(A.rows(), B.cols());
  const std::uint64_t p = F.p();
  // below 2^16 products fit in 32 bits and a row sum cannot overflow
  const bool small = p < (1u << 16) && A.cols() < (std::size_t(1) << 31);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < B.cols(); ++j) {
      std::uint64_t acc = 0;
      for (std::size_t k = 0; k < A.cols(); ++k) {
        acc += std::uint64_t(A(i, k)) * B(k, j);
        if (!small) acc %= p;
      }
      C(i, j) = static_cast<Elem>(acc % p);
    }
  }
  return C;
}

Matrix add(const Field& F, const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("matrix sum shape mismatch");
  Matrix C = A;
  for (std::size_t i = 0; i < C.data().size(); ++i) C.data()[i] = F.add(A.data()[i], B.data()[i]);
  return C;
}

Matrix sub(const Field& F, const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("matrix difference shape mismatch");
  Matrix C = A;
  for (std::size_t i = 0; i < C.data().size(); ++i) C.data()[i] = F.sub(A.data()[i], B.data()[i]);
  return C;
}

Matrix scale(const Field& F, Elem c, const Matrix& A) {
  Matrix C = A;
  for (auto& v : C.data()) v = F.mul(c, v);
  return C;
}

Matrix block_diag(const Matrix& A, const Matrix& B) {
  Matrix C(A.rows() + B.rows(), A.cols() + B.cols());
  C.set_block(0, 0, A);
  C.set_block(A.rows(), A.cols(), B);
  return C;
}

Matrix hstack(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows()) throw std::invalid_argument("hstack row mismatch");
  Matrix C(A.rows(), A.cols() + B.cols());
  C.set_block(0, 0, A);
  C.set_block(0, A.cols(), B);
  return C;
}

Matrix vstack(const Matrix& A, const Matrix& B) {
  if (A.cols() != B.cols()) throw std::invalid_argument("vstack column mismatch");
  Matrix C(A.rows() + B.rows(), A.cols());
  C.set_block(0, 0, A);
  C.set_block(A.rows(), 0, B);
  return C;
}

Echelon row_reduce(const Field& F, Matrix A) {
  Echelon E;
  std::size_t r = 0;
  for (std::size_t c = 0; c < A.cols() && r < A.rows(); ++c) {
    std::size_t piv = r;
    while (piv < A.rows() && A(piv, c) == 0) ++piv;
    if (piv == A.rows()) continue;
    if (piv != r)
      for (std::size_t j = 0; j < A.cols(); ++j) std::swap(A(piv, j), A(r, j));
    Elem iv = F.inv(A(r, c));
    for (std::size_t j = c; j < A.cols(); ++j) A(r, j) = F.mul(A(r, j), iv);
    for (std::size_t i = 0; i < A.rows(); ++i) {
      if (i == r || A(i, c) == 0) continue;
      Elem f = A(i, c);
      for (std::size_t j = c; j < A.cols(); ++j) A(i, j) = F.sub(A(i, j), F.mul(f, A(r, j)));
    }
    E.pivots.push_back(c);
    ++r;
  }
  E.rref = std::move(A);
  return E;
}

std::size_t rank(const Field& F, const Matrix& A) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  return row_reduce(F, A).pivots.size();
}

Matrix nullspace(const Field& F, const Matrix& A) {
  Echelon E = row_reduce(F, A);
  std::vector<bool> is_piv(A.cols(), false);
  for (auto c : E.pivots) is_piv[c] = true;
  std::vector<std::size_t> free;
  for (std::size_t c = 0; c < A.cols(); ++c)
    if (!is_piv[c]) free.push_back(c);
  Matrix N(A.cols(), free.size());
  for (std::size_t k = 0; k < free.size(); ++k) {
    N(free[k], k) = 1;
    for (std::size_t r = 0; r < E.pivots.size(); ++r) N(E.pivots[r], k) = F.neg(E.rref(r, free[k]));
  }
  return N;
}

Matrix left_nullspace(const Field& F, const Matrix& A) {
  return nullspace(F, A.transpose()).transpose();
}

std::optional<Matrix> inverse(const Field& F, const Matrix& A) {
  if (!A.square()) return std::nullopt;
  std::size_t n = A.rows();
  Echelon E = row_reduce(F, hstack(A, Matrix::identity(n)));
  if (E.pivots.size() < n || (n > 0 && E.pivots[n - 1] != n - 1)) return std::nullopt;
  return E.rref.block(0, n, n, n);
}

bool is_invertible(const Field& F, const Matrix& A) {
  return A.square() && rank(F, A) == A.rows();
}

Matrix column_basis(const Field& F, const Matrix& A) {
  Echelon E = row_reduce(F, A);
  Matrix B(A.rows(), E.pivots.size());
  for (std::size_t k = 0; k < E.pivots.size(); ++k)
    for (std::size_t i = 0; i < A.rows(); ++i) B(i, k) = A(i, E.pivots[k]);
  return B;
}

std::optional<Matrix> solve(const Field& F, const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows()) throw std::invalid_argument("solve shape mismatch");
  Echelon E = row_reduce(F, hstack(A, B));
  Matrix X(A.cols(), B.cols());
  for (std::size_t r = 0; r < E.pivots.size(); ++r) {
    if (E.pivots[r] >= A.cols()) return std::nullopt;
    for (std::size_t j = 0; j < B.cols(); ++j) X(E.pivots[r], j) = E.rref(r, A.cols() + j);
  }
  return X;
}

}  // namespace pm
