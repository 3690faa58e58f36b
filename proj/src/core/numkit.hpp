#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "core/error.hpp"

namespace zsml {

/// Dense float64 vector. Entries are validated to be finite on construction.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim) : entries_(dim, 0.0) {}
  Vector(std::initializer_list<double> entries);
  explicit Vector(std::vector<double> entries);

  std::size_t dim() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  double& operator[](std::size_t i) { return entries_[i]; }
  const std::vector<double>& entries() const { return entries_; }
  const double* data() const { return entries_.data(); }
  double* data() { return entries_.data(); }
  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> entries_;
};

/// Dense float64 matrix, row-major. Entries are validated to be finite when
/// constructed from data; the zero-initializing constructor trivially holds
/// the invariant.
class Matrix {
 public:
  Matrix() = default;  // 0x0 placeholder, only valid as a moved-from state
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t k);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }
  const std::vector<double>& entries() const { return entries_; }
  const double* row(std::size_t i) const { return entries_.data() + i * cols_; }
  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

/// C = A * B with a fixed ascending-k inner loop so results are reproducible.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

/// Solves a * X = b for symmetric positive definite a via Cholesky.
/// Symmetry is checked to 1e-9 relative; a non-positive pivot triggers one
/// retry with 1e-10*trace(a)/k added to the diagonal, then fails naming the
/// pivot index.
Matrix solve_spd(const Matrix& a, const Matrix& b);

/// Lower-triangular factor L with L*L^T ~= cov, tolerant of semidefinite
/// inputs: after the jitter retry, pivots within rounding of zero yield a
/// zero column instead of failing. Used for Gaussian sampling.
Matrix cholesky_psd(const Matrix& cov);

/// Sum of squared entries.
double frobenius_norm_sq(const Matrix& a);

double dot(const Vector& a, const Vector& b);

Matrix select_rows(const Matrix& a, const std::vector<std::size_t>& idx);
Matrix select_cols(const Matrix& a, const std::vector<std::size_t>& idx);

Vector matrix_row(const Matrix& a, std::size_t i);

}  // namespace zsml
