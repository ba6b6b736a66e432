#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "derivkit/field.hpp"

namespace derivkit {

/// Dense matrix over an exact field, row-major. Entries are always stored as
/// reduced canonical representatives: residues in [0, p) for F_p, lowest
/// terms with positive denominator for Q.
///
/// A matrix of shape m x n acts on column vectors: it represents a linear map
/// k^n -> k^m.
class Matrix {
 public:
  Matrix() : Matrix(Field::f2(), 0, 0) {}
  Matrix(Field field, std::size_t rows, std::size_t cols);

  static Matrix zero(Field field, std::size_t rows, std::size_t cols) {
    return Matrix(field, rows, cols);
  }
  static Matrix identity(Field field, std::size_t n);
  static Matrix from_rows(Field field,
                          std::initializer_list<std::initializer_list<long>> rows);
  static Matrix from_rows(Field field, const std::vector<std::vector<long>>& rows,
                          std::size_t cols_if_empty = 0);
  /// Single column vector.
  static Matrix column(Field field, const std::vector<long>& entries);

  const Field& field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  mpq_class at(std::size_t r, std::size_t c) const;
  void set(std::size_t r, std::size_t c, const mpq_class& value);
  void set(std::size_t r, std::size_t c, long value);
  bool is_nonzero_at(std::size_t r, std::size_t c) const;
  std::string entry_string(std::size_t r, std::size_t c) const;

  bool is_zero() const;
  bool is_identity() const;

  Matrix transpose() const;
  Matrix operator*(const Matrix& rhs) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix operator-() const;
  Matrix scaled(const mpq_class& factor) const;
  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);

  Matrix block(std::size_t row0, std::size_t col0, std::size_t nrows,
               std::size_t ncols) const;
  void set_block(std::size_t row0, std::size_t col0, const Matrix& value);
  /// Adds value into the block starting at (row0, col0).
  void add_block(std::size_t row0, std::size_t col0, const Matrix& value);
  Matrix select_columns(const std::vector<std::size_t>& columns) const;
  Matrix select_rows(const std::vector<std::size_t>& rows) const;

  static Matrix hstack(const std::vector<Matrix>& parts, Field field, std::size_t rows);
  static Matrix vstack(const std::vector<Matrix>& parts, Field field, std::size_t cols);
  static Matrix direct_sum(const Matrix& a, const Matrix& b);
  static Matrix kronecker(const Matrix& a, const Matrix& b);

  friend bool operator==(const Matrix& a, const Matrix& b);

  // Raw residue access for prime fields; used by hot loops in other modules.
  std::uint32_t residue(std::size_t r, std::size_t c) const {
    return mod_[r * cols_ + c];
  }

 private:
  friend struct MatrixAccess;

  Field field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint32_t> mod_;  // prime fields
  std::vector<mpq_class> rat_;      // rationals
};

/// Reduced row echelon form together with the pivot columns.
struct RowEchelon {
  Matrix reduced;
  std::vector<std::size_t> pivots;
};

/// Gauss-Jordan elimination: columns are scanned left to right and the pivot
/// row is the first remaining row with a nonzero entry. Pivots are only taken
/// among the first `pivot_limit` columns (all columns by default).
RowEchelon rref(const Matrix& m, std::size_t pivot_limit = static_cast<std::size_t>(-1));

std::size_t rank(const Matrix& m);

/// Columns form a basis of the right null space, one per free column in
/// increasing order; the free variable is 1 in its own basis vector.
Matrix kernel_basis(const Matrix& m);

/// The pivot columns of m: a basis of its column space.
Matrix image_basis(const Matrix& m);

/// Rows form a basis of the left null space (so the returned q satisfies
/// q * m = 0 and q has full row rank). Used as a cokernel projection.
Matrix cokernel_projection(const Matrix& m);

/// Some x with a * x = b: free variables are set to zero. Throws InvalidInput
/// on field or shape mismatch.
std::optional<Matrix> solve(const Matrix& a, const Matrix& b);

/// Inverse of a square invertible matrix; throws InvalidInput otherwise.
Matrix inverse(const Matrix& m);

/// Columns of `extra` that are independent modulo span(base), chosen greedily
/// left to right. Returns their indices.
std::vector<std::size_t> complement_columns(const Matrix& base, const Matrix& extra);

std::string to_string(const Matrix& m);

}  // namespace derivkit
