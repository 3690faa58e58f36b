#include "core/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zsml {

namespace {

void require_finite(const std::vector<double>& entries, const char* what) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!std::isfinite(entries[i])) {
      throw ContractError(std::string(what) + ": non-finite entry at index " +
                          std::to_string(i));
    }
  }
}

// Plain Cholesky on a copy of a. Returns the index of the first
// non-positive pivot, or a.rows() on success. When tolerate_zero is set,
// pivots in [-tol, tol] produce a zero column instead of failing.
std::size_t cholesky_in_place(Matrix& l, bool tolerate_zero, double tol) {
  const std::size_t k = l.rows();
  for (std::size_t j = 0; j < k; ++j) {
    double d = l(j, j);
    for (std::size_t p = 0; p < j; ++p) d -= l(j, p) * l(j, p);
    if (d <= 0.0) {
      if (!(tolerate_zero && d >= -tol)) return j;
      l(j, j) = 0.0;
      for (std::size_t i = j + 1; i < k; ++i) l(i, j) = 0.0;
      continue;
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < k; ++i) {
      double s = l(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
      l(i, j) = s / ljj;
    }
  }
  // zero the strict upper triangle so l is a proper factor
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) l(i, j) = 0.0;
  return k;
}

double trace(const Matrix& a) {
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

void require_symmetric(const Matrix& a) {
  if (a.rows() != a.cols())
    throw ContractError("solve_spd: matrix is " + std::to_string(a.rows()) +
                        "x" + std::to_string(a.cols()) + ", not square");
  double scale = 1.0;
  for (double v : a.entries()) scale = std::max(scale, std::fabs(v));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      if (std::fabs(a(i, j) - a(j, i)) > 1e-9 * scale) {
        throw ContractError("solve_spd: matrix not symmetric at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

Matrix jittered(const Matrix& a) {
  Matrix b = a;
  const double eps = 1e-10 * trace(a) / static_cast<double>(a.rows());
  for (std::size_t i = 0; i < b.rows(); ++i) b(i, i) += eps;
  return b;
}

}  // namespace

Vector::Vector(std::initializer_list<double> entries) : entries_(entries) {
  if (entries_.empty()) throw ContractError("Vector: dim must be >= 1");
  require_finite(entries_, "Vector");
}

Vector::Vector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ContractError("Vector: dim must be >= 1");
  require_finite(entries_, "Vector");
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0)
    throw ContractError("Matrix: rows and cols must be >= 1");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows == 0 || cols == 0)
    throw ContractError("Matrix: rows and cols must be >= 1");
  if (entries_.size() != rows * cols)
    throw ContractError("Matrix: entry count " +
                        std::to_string(entries_.size()) + " != " +
                        std::to_string(rows) + "*" + std::to_string(cols));
  require_finite(entries_, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  if (rows_ == 0) throw ContractError("Matrix: rows must be >= 1");
  cols_ = rows.begin()->size();
  if (cols_ == 0) throw ContractError("Matrix: cols must be >= 1");
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ContractError("Matrix: ragged initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  require_finite(entries_, "Matrix");
}

Matrix Matrix::identity(std::size_t k) {
  Matrix m(k, k);
  for (std::size_t i = 0; i < k; ++i) m(i, i) = 1.0;
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw ContractError("matmul: inner dimensions " + std::to_string(a.cols()) +
                        " and " + std::to_string(b.rows()) + " differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  require_symmetric(a);
  if (b.rows() != a.rows())
    throw ContractError("solve_spd: rhs has " + std::to_string(b.rows()) +
                        " rows, expected " + std::to_string(a.rows()));
  Matrix l = a;
  std::size_t bad = cholesky_in_place(l, false, 0.0);
  if (bad != a.rows()) {
    l = jittered(a);
    bad = cholesky_in_place(l, false, 0.0);
    if (bad != a.rows())
      throw FactorizationError(
          "solve_spd: matrix not positive definite, pivot " +
              std::to_string(bad) + " <= 0 after jitter",
          bad);
  }

  // forward then back substitution, one rhs column at a time
  const std::size_t k = a.rows();
  Matrix x(b.rows(), b.cols());
  std::vector<double> y(k);
  for (std::size_t col = 0; col < b.cols(); ++col) {
    for (std::size_t i = 0; i < k; ++i) {
      double s = b(i, col);
      for (std::size_t p = 0; p < i; ++p) s -= l(i, p) * y[p];
      y[i] = s / l(i, i);
    }
    for (std::size_t ii = k; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t p = ii + 1; p < k; ++p) s -= l(p, ii) * x(p, col);
      x(ii, col) = s / l(ii, ii);
    }
  }
  return x;
}

Matrix cholesky_psd(const Matrix& cov) {
  if (cov.rows() != cov.cols())
    throw ContractError("cholesky_psd: matrix not square");
  Matrix l = cov;
  if (cholesky_in_place(l, false, 0.0) == cov.rows()) return l;
  l = jittered(cov);
  const double tol = 1e-12 * std::max(1.0, trace(cov));
  const std::size_t bad = cholesky_in_place(l, true, tol);
  if (bad != cov.rows())
    throw FactorizationError("cholesky_psd: matrix not PSD, pivot " +
                                 std::to_string(bad) + " negative after jitter",
                             bad);
  return l;
}

double frobenius_norm_sq(const Matrix& a) {
  double s = 0.0;
  for (double v : a.entries()) s += v * v;
  return s;
}

double dot(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim())
    throw ContractError("dot: dims " + std::to_string(a.dim()) + " and " +
                        std::to_string(b.dim()) + " differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

Matrix select_rows(const Matrix& a, const std::vector<std::size_t>& idx) {
  if (idx.empty()) throw ContractError("select_rows: empty index set");
  Matrix out(idx.size(), a.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= a.rows()) throw ContractError("select_rows: index out of range");
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(idx[i], j);
  }
  return out;
}

Matrix select_cols(const Matrix& a, const std::vector<std::size_t>& idx) {
  if (idx.empty()) throw ContractError("select_cols: empty index set");
  Matrix out(a.rows(), idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] >= a.cols()) throw ContractError("select_cols: index out of range");
    for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) = a(i, idx[j]);
  }
  return out;
}

Vector matrix_row(const Matrix& a, std::size_t i) {
  std::vector<double> v(a.row(i), a.row(i) + a.cols());
  return Vector(std::move(v));
}

}  // namespace zsml
