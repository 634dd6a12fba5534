#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace dtcae {

/// Dense real matrix, row-major.
///
/// Construction from caller-supplied entries rejects NaN/Inf; matrices
/// produced by arithmetic below are not re-checked.
class Matrix {
 public:
  Matrix() = default;
  /// Zero-filled rows x cols matrix.
  Matrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of row-major `entries`; size must equal rows*cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  /// Nested-list literal, e.g. Matrix{{1, 2}, {3, 4}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<double> data() noexcept { return entries_; }
  std::span<const double> data() const noexcept { return entries_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(entries_).subspan(r * cols_, cols_);
  }

  std::vector<double> col(std::size_t c) const;
  void set_col(std::size_t c, std::span<const double> v);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
/// a * a^T, exactly symmetric.
Matrix gram(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scaled(const Matrix& a, double s);
double squared_norm(const Matrix& a);
double frobenius_norm(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

/// a^T v for a column vector v given as a span (length a.rows()).
std::vector<double> transposed_times(const Matrix& a, std::span<const double> v);
/// a v (length a.cols()).
std::vector<double> times(const Matrix& a, std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);

/// Lower-triangular Cholesky factor L with L L^T = a. Throws Singular if a
/// is not numerically positive definite.
Matrix cholesky(const Matrix& a);

/// Solves (gram + lambda I) X = rhs by Cholesky factorization.
Matrix ridge_solve(const Matrix& gram, const Matrix& rhs, double lambda);

}  // namespace dtcae
